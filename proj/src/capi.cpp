#include <algorithm>
#include <cmath>
#include <new>
#include <string>

#include "thermalfid/error.hpp"
#include "thermalfid/fidelity.hpp"
#include "thermalfid/loschmidt.hpp"
#include "thermalfid/oracle.hpp"
#include "thermalfid/sweep.hpp"
#include "thermalfid/thermalfid.h"
#include "thermalfid/version.hpp"

struct tfid_model {
  thermalfid::QuasiFreeModel model;
};

struct tfid_sweep_config {
  thermalfid::SweepConfig config;
  std::string scratch;
};

struct tfid_sweep_result {
  thermalfid::SweepResult result;
  std::string csv;
};

namespace {

thread_local std::string last_error;

tfid_status fail(tfid_status status, std::string message) {
  last_error = std::move(message);
  return status;
}

tfid_status status_of(thermalfid::ErrorKind kind) {
  using thermalfid::ErrorKind;
  switch (kind) {
    case ErrorKind::Domain: return TFID_ERR_DOMAIN;
    case ErrorKind::DimensionMismatch: return TFID_ERR_DIMENSION_MISMATCH;
    case ErrorKind::Numerical: return TFID_ERR_NUMERICAL;
    case ErrorKind::Config: return TFID_ERR_CONFIG;
    case ErrorKind::Io: return TFID_ERR_IO;
  }
  return TFID_ERR_INTERNAL;
}

// Runs `body`, translating exceptions into status codes.
template <class F>
tfid_status guarded(F&& body) {
  try {
    body();
    return TFID_OK;
  } catch (const thermalfid::Error& e) {
    return fail(status_of(e.kind()), e.what());
  } catch (const std::bad_alloc&) {
    return fail(TFID_ERR_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return fail(TFID_ERR_INTERNAL, e.what());
  } catch (...) {
    return fail(TFID_ERR_INTERNAL, "unknown exception");
  }
}

#define TFID_REQUIRE(ptr)                                                  \
  do {                                                                     \
    if ((ptr) == nullptr) return fail(TFID_ERR_INVALID_ARGUMENT, #ptr " is null"); \
  } while (0)

void fill(const thermalfid::FidelityBreakdown& b, tfid_fidelity_info* info, double* per_mode) {
  if (info) *info = {b.total, b.log_total, b.clamped, b.max_excursion};
  if (per_mode) std::copy(b.per_mode.begin(), b.per_mode.end(), per_mode);
}

}  // namespace

extern "C" {

const char* tfid_version(void) { return thermalfid::kVersion; }

const char* tfid_last_error(void) { return last_error.c_str(); }

const char* tfid_status_name(tfid_status status) {
  switch (status) {
    case TFID_OK: return "ok";
    case TFID_ERR_INVALID_ARGUMENT: return "invalid argument";
    case TFID_ERR_DOMAIN: return "domain error";
    case TFID_ERR_DIMENSION_MISMATCH: return "dimension mismatch";
    case TFID_ERR_NUMERICAL: return "numerical error";
    case TFID_ERR_CONFIG: return "configuration error";
    case TFID_ERR_IO: return "I/O error";
    case TFID_ERR_INTERNAL: return "internal error";
  }
  return "unknown status";
}

tfid_status tfid_model_create_xy(double gamma, double lambda, int n_sites, tfid_grid grid,
                                 tfid_model** out) {
  TFID_REQUIRE(out);
  *out = nullptr;
  if (grid != TFID_GRID_INTEGER && grid != TFID_GRID_HALF_INTEGER) {
    return fail(TFID_ERR_INVALID_ARGUMENT, "unknown grid convention");
  }
  return guarded([&] {
    const auto g = grid == TFID_GRID_INTEGER ? thermalfid::Grid::Integer : thermalfid::Grid::HalfInteger;
    *out = new tfid_model{thermalfid::xy_to_quasifree({gamma, lambda, n_sites, g})};
  });
}

tfid_status tfid_model_create_modes(const double* epsilon, const double* delta, size_t count,
                                    tfid_model** out) {
  TFID_REQUIRE(out);
  *out = nullptr;
  TFID_REQUIRE(epsilon);
  TFID_REQUIRE(delta);
  return guarded([&] {
    std::vector<thermalfid::MomentumMode> modes;
    modes.reserve(count);
    for (size_t i = 0; i < count; ++i) modes.push_back(thermalfid::make_mode(epsilon[i], delta[i]));
    *out = new tfid_model{thermalfid::QuasiFreeModel(std::move(modes))};
  });
}

void tfid_model_destroy(tfid_model* model) { delete model; }

size_t tfid_model_mode_count(const tfid_model* model) { return model ? model->model.size() : 0; }

tfid_status tfid_model_get_mode(const tfid_model* model, size_t index, tfid_mode_info* out) {
  TFID_REQUIRE(model);
  TFID_REQUIRE(out);
  if (index >= model->model.size()) return fail(TFID_ERR_INVALID_ARGUMENT, "mode index out of range");
  const auto& m = model->model[index];
  *out = {m.epsilon, m.delta, m.lambda, m.theta};
  return TFID_OK;
}

tfid_status tfid_thermal_fidelity(const tfid_model* model0, double beta0, const tfid_model* model1,
                                  double beta1, tfid_fidelity_info* info, double* per_mode) {
  TFID_REQUIRE(model0);
  TFID_REQUIRE(model1);
  return guarded([&] {
    fill(thermalfid::thermal_fidelity(thermalfid::ThermalState(model0->model, beta0),
                                      thermalfid::ThermalState(model1->model, beta1)),
         info, per_mode);
  });
}

tfid_status tfid_thermal_echo(const tfid_model* model0, const tfid_model* model1, double beta,
                              double time, tfid_fidelity_info* info, double* per_mode) {
  TFID_REQUIRE(model0);
  TFID_REQUIRE(model1);
  return guarded([&] {
    fill(thermalfid::thermal_echo({model0->model, model1->model, beta, time}), info, per_mode);
  });
}

tfid_status tfid_echo_time_series(const tfid_model* model0, const tfid_model* model1, double beta,
                                  const double* times, size_t count, double* out) {
  TFID_REQUIRE(model0);
  TFID_REQUIRE(model1);
  if (count > 0) {
    TFID_REQUIRE(times);
    TFID_REQUIRE(out);
  }
  return guarded([&] {
    const auto series = thermalfid::echo_time_series(model0->model, model1->model, beta,
                                                     std::span<const double>(times, count));
    std::copy(series.begin(), series.end(), out);
  });
}

tfid_status tfid_bures_distance(double fidelity, double* out) {
  TFID_REQUIRE(out);
  return guarded([&] { *out = thermalfid::bures_distance(fidelity); });
}

tfid_status tfid_sweep_config_create(tfid_quantity quantity, tfid_sweep_config** out) {
  TFID_REQUIRE(out);
  *out = nullptr;
  if (quantity != TFID_FIDELITY && quantity != TFID_ECHO) {
    return fail(TFID_ERR_INVALID_ARGUMENT, "unknown quantity");
  }
  return guarded([&] {
    auto* c = new tfid_sweep_config{};
    c->config.quantity = quantity == TFID_FIDELITY ? thermalfid::Quantity::Fidelity
                                                   : thermalfid::Quantity::Echo;
    *out = c;
  });
}

void tfid_sweep_config_destroy(tfid_sweep_config* config) { delete config; }

tfid_status tfid_sweep_config_set(tfid_sweep_config* config, const char* key, const char* value) {
  TFID_REQUIRE(config);
  TFID_REQUIRE(key);
  TFID_REQUIRE(value);
  return guarded([&] { thermalfid::apply_setting(config->config, key, value); });
}

tfid_status tfid_sweep_config_load_file(tfid_sweep_config* config, const char* path) {
  TFID_REQUIRE(config);
  TFID_REQUIRE(path);
  return guarded([&] { config->config = thermalfid::load_config_file(path, config->config); });
}

tfid_status tfid_sweep_config_validate(const tfid_sweep_config* config) {
  TFID_REQUIRE(config);
  return guarded([&] { thermalfid::validate(config->config); });
}

const char* tfid_sweep_config_get(const tfid_sweep_config* config, const char* key) {
  if (!config || !key) return nullptr;
  auto& self = const_cast<tfid_sweep_config&>(*config);
  const std::string k(key);
  if (k == "out") {
    self.scratch = config->config.output_path;
  } else if (k == "plot") {
    self.scratch = config->config.emit_plot_script ? "true" : "false";
  } else if (k == "timestamp") {
    self.scratch = config->config.stamp_time ? "true" : "false";
  } else if (k == "threads") {
    self.scratch = std::to_string(config->config.threads);
  } else {
    const auto entries = thermalfid::describe(config->config);
    const auto it = std::find_if(entries.begin(), entries.end(),
                                 [&](const auto& kv) { return kv.first == k; });
    if (it == entries.end()) return nullptr;
    self.scratch = it->second;
  }
  return self.scratch.c_str();
}

tfid_status tfid_sweep_run(const tfid_sweep_config* config, tfid_sweep_result** out) {
  TFID_REQUIRE(config);
  TFID_REQUIRE(out);
  *out = nullptr;
  return guarded([&] { *out = new tfid_sweep_result{thermalfid::run_sweep(config->config), {}}; });
}

void tfid_sweep_result_destroy(tfid_sweep_result* result) { delete result; }

size_t tfid_sweep_result_row_count(const tfid_sweep_result* result) {
  return result ? result->result.rows.size() : 0;
}

size_t tfid_sweep_result_error_count(const tfid_sweep_result* result) {
  return result ? result->result.error_count() : 0;
}

tfid_status tfid_sweep_result_get_row(const tfid_sweep_result* result, size_t index,
                                      tfid_sweep_row* out) {
  TFID_REQUIRE(result);
  TFID_REQUIRE(out);
  if (index >= result->result.rows.size()) return fail(TFID_ERR_INVALID_ARGUMENT, "row index out of range");
  const auto& r = result->result.rows[index];
  *out = {r.beta, r.gamma, r.lambda, r.value, r.log_value, r.ok() ? 1 : 0, r.error.c_str()};
  return TFID_OK;
}

const char* tfid_sweep_result_csv(tfid_sweep_result* result) {
  if (!result) {
    fail(TFID_ERR_INVALID_ARGUMENT, "result is null");
    return nullptr;
  }
  const auto status = guarded([&] { result->csv = thermalfid::render_csv(result->result); });
  return status == TFID_OK ? result->csv.c_str() : nullptr;
}

tfid_status tfid_sweep_result_write_csv(const tfid_sweep_result* result, const char* path) {
  TFID_REQUIRE(result);
  TFID_REQUIRE(path);
  return guarded([&] { thermalfid::write_csv(result->result, path); });
}

tfid_status tfid_sweep_result_emit_plot_script(const tfid_sweep_result* result,
                                               const char* script_path, const char* csv_path) {
  TFID_REQUIRE(result);
  TFID_REQUIRE(script_path);
  TFID_REQUIRE(csv_path);
  return guarded([&] { thermalfid::emit_plot_script(result->result, script_path, csv_path); });
}

tfid_status tfid_oracle_check(uint64_t seed, size_t draws, tfid_oracle_report* out) {
  TFID_REQUIRE(out);
  return guarded([&] {
    const auto r = thermalfid::oracle::run_oracle_checks(seed, draws);
    *out = {r.seed,
            r.fidelity_draws,
            r.echo_draws,
            r.product_draws,
            r.max_fidelity_deviation,
            r.max_echo_deviation,
            r.max_product_deviation,
            r.fidelity_tolerance,
            r.echo_tolerance,
            r.product_tolerance,
            r.passed() ? 1 : 0};
  });
}

}  // extern "C"
