// thermalfid command line front end. Talks to the library through the C API only.
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "thermalfid/thermalfid.h"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitBreach = 1;
constexpr int kExitUsage = 2;

struct ConfigDeleter {
  void operator()(tfid_sweep_config* c) const { tfid_sweep_config_destroy(c); }
};
struct ResultDeleter {
  void operator()(tfid_sweep_result* r) const { tfid_sweep_result_destroy(r); }
};
struct ModelDeleter {
  void operator()(tfid_model* m) const { tfid_model_destroy(m); }
};

struct SweepFlags {
  std::string config_file;
  std::optional<std::string> n_sites, grid, gamma, gamma_range, lambda, lambda_range;
  std::optional<std::string> delta_gamma, delta_lambda, time, out, threads;
  std::vector<std::string> beta;
  bool plot = false;
  bool timestamp = false;
};

struct DumpFlags {
  int n_sites = 0;
  std::string grid = "integer";
  double gamma = 0.0;
  double lambda = 0.0;
};

struct OracleFlags {
  std::uint64_t seed = 42;
  std::size_t draws = 1000;
};

void add_sweep_options(CLI::App* app, SweepFlags& f) {
  app->add_option("--config", f.config_file, "key=value config file; flags override it")
      ->check(CLI::ExistingFile);
  app->add_option("--n-sites", f.n_sites, "number of spins N (even)");
  app->add_option("--grid", f.grid, "momentum grid")
      ->check(CLI::IsMember({"integer", "half-integer"}));
  app->add_option("--gamma", f.gamma, "fixed anisotropy");
  app->add_option("--gamma-range", f.gamma_range, "MIN:MAX:STEPS");
  app->add_option("--lambda", f.lambda, "fixed transverse field");
  app->add_option("--lambda-range", f.lambda_range, "MIN:MAX:STEPS");
  app->add_option("--delta-gamma", f.delta_gamma, "perturbation of gamma");
  app->add_option("--delta-lambda", f.delta_lambda, "perturbation of lambda");
  app->add_option("--beta", f.beta, "inverse temperature (repeatable, or comma list)")
      ->allow_extra_args(false);
  app->add_option("--time", f.time, "echo time");
  app->add_option("--out", f.out, "CSV output path (stdout when omitted)");
  app->add_option("--threads", f.threads, "worker threads, 0 = all cores");
  app->add_flag("--plot", f.plot, "also write a matplotlib script next to the CSV");
  app->add_flag("--timestamp", f.timestamp, "record the UTC run time in the metadata");
}

int report(tfid_status s, const char* what) {
  std::cerr << "thermalfid: " << what << ": " << tfid_status_name(s) << ": " << tfid_last_error()
            << "\n";
  return s == TFID_ERR_CONFIG || s == TFID_ERR_INVALID_ARGUMENT ? kExitUsage : kExitBreach;
}

int run_sweep(CLI::App& app, tfid_quantity q, const SweepFlags& f) {
  tfid_sweep_config* raw = nullptr;
  if (auto s = tfid_sweep_config_create(q, &raw); s != TFID_OK) return report(s, "config");
  std::unique_ptr<tfid_sweep_config, ConfigDeleter> cfg(raw);

  if (!f.config_file.empty()) {
    if (auto s = tfid_sweep_config_load_file(cfg.get(), f.config_file.c_str()); s != TFID_OK) {
      std::cerr << app.help();
      return report(s, f.config_file.c_str());
    }
  }
  // the subcommand decides the quantity even if the file says otherwise
  tfid_sweep_config_set(cfg.get(), "quantity", q == TFID_ECHO ? "echo" : "fidelity");

  std::vector<std::pair<const char*, std::string>> settings;
  auto put = [&](const char* key, const std::optional<std::string>& v) {
    if (v) settings.emplace_back(key, *v);
  };
  put("n-sites", f.n_sites);
  put("grid", f.grid);
  put("gamma", f.gamma);
  put("gamma-range", f.gamma_range);
  put("lambda", f.lambda);
  put("lambda-range", f.lambda_range);
  put("delta-gamma", f.delta_gamma);
  put("delta-lambda", f.delta_lambda);
  put("time", f.time);
  put("out", f.out);
  put("threads", f.threads);
  if (!f.beta.empty()) {
    std::string joined;
    for (const auto& b : f.beta) joined += (joined.empty() ? "" : ",") + b;
    settings.emplace_back("beta", joined);
  }
  if (f.plot) settings.emplace_back("plot", "true");
  if (f.timestamp) settings.emplace_back("timestamp", "true");

  for (const auto& [key, value] : settings) {
    if (auto s = tfid_sweep_config_set(cfg.get(), key, value.c_str()); s != TFID_OK) {
      std::cerr << app.help();
      return report(s, key);
    }
  }
  if (auto s = tfid_sweep_config_validate(cfg.get()); s != TFID_OK) {
    std::cerr << app.help();
    return report(s, "config");
  }

  const std::string out = tfid_sweep_config_get(cfg.get(), "out");
  const bool plot = std::string(tfid_sweep_config_get(cfg.get(), "plot")) == "true";
  if (plot && out.empty()) {
    std::cerr << app.help() << "thermalfid: --plot needs --out\n";
    return kExitUsage;
  }

  tfid_sweep_result* rraw = nullptr;
  if (auto s = tfid_sweep_run(cfg.get(), &rraw); s != TFID_OK) return report(s, "sweep");
  std::unique_ptr<tfid_sweep_result, ResultDeleter> result(rraw);

  if (out.empty()) {
    const char* text = tfid_sweep_result_csv(result.get());
    if (!text) return report(TFID_ERR_INTERNAL, "csv");
    std::fputs(text, stdout);
  } else {
    if (auto s = tfid_sweep_result_write_csv(result.get(), out.c_str()); s != TFID_OK) {
      return report(s, out.c_str());
    }
    if (plot) {
      const auto script = std::filesystem::path(out).replace_extension(".py").string();
      if (auto s = tfid_sweep_result_emit_plot_script(result.get(), script.c_str(), out.c_str());
          s != TFID_OK) {
        return report(s, script.c_str());
      }
      std::cerr << "plot script: " << script << "\n";
    }
  }

  const auto rows = tfid_sweep_result_row_count(result.get());
  const auto errors = tfid_sweep_result_error_count(result.get());
  std::cerr << rows << " rows";
  if (errors) std::cerr << ", " << errors << " with errors";
  std::cerr << "\n";
  return kExitOk;
}

int run_mode_dump(const DumpFlags& f) {
  const tfid_grid grid = f.grid == "integer" ? TFID_GRID_INTEGER : TFID_GRID_HALF_INTEGER;
  tfid_model* raw = nullptr;
  if (auto s = tfid_model_create_xy(f.gamma, f.lambda, f.n_sites, grid, &raw); s != TFID_OK) {
    return report(s, "mode-dump");
  }
  std::unique_ptr<tfid_model, ModelDeleter> model(raw);
  std::printf("%-6s %24s %24s %24s %24s\n", "j", "epsilon", "delta", "Lambda", "theta");
  const size_t n = tfid_model_mode_count(model.get());
  for (size_t i = 0; i < n; ++i) {
    tfid_mode_info m{};
    tfid_model_get_mode(model.get(), i, &m);
    const double j = grid == TFID_GRID_INTEGER ? double(i + 1) : double(i) + 0.5;
    std::printf("%-6g %24.17g %24.17g %24.17g %24.17g\n", j, m.epsilon, m.delta, m.lambda,
                m.theta);
  }
  return kExitOk;
}

int run_oracle(const OracleFlags& f) {
  tfid_oracle_report r{};
  if (auto s = tfid_oracle_check(f.seed, f.draws, &r); s != TFID_OK) return report(s, "oracle-check");
  auto line = [](const char* name, size_t draws, double dev, double tol) {
    std::printf("%-9s draws=%-6zu max_abs_dev=%.3e tol=%.0e %s\n", name, draws, dev, tol,
                dev <= tol ? "ok" : "BREACH");
  };
  std::printf("oracle-check seed=%llu\n", static_cast<unsigned long long>(r.seed));
  line("fidelity", r.fidelity_draws, r.max_fidelity_deviation, r.fidelity_tolerance);
  line("echo", r.echo_draws, r.max_echo_deviation, r.echo_tolerance);
  line("product", r.product_draws, r.max_product_deviation, r.product_tolerance);
  const double worst = std::fmax(r.max_fidelity_deviation,
                                 std::fmax(r.max_echo_deviation, r.max_product_deviation));
  std::printf("max deviation: %.3e %s\n", worst, r.passed ? "PASS" : "FAIL");
  return r.passed ? kExitOk : kExitBreach;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Thermal fidelity and Loschmidt echo of quasi-free fermion chains"};
  app.set_version_flag("--version", std::string(tfid_version()));
  app.require_subcommand(1);

  SweepFlags fid_flags, echo_flags;
  auto* fid = app.add_subcommand("fidelity-sweep", "thermal fidelity over a (beta, gamma, lambda) grid");
  add_sweep_options(fid, fid_flags);
  auto* echo = app.add_subcommand("echo-sweep", "thermal Loschmidt echo over a grid");
  add_sweep_options(echo, echo_flags);

  DumpFlags dump_flags;
  auto* dump = app.add_subcommand("mode-dump", "print the quasiparticle modes of an XY chain");
  dump->add_option("--n-sites", dump_flags.n_sites, "number of spins N (even)")->required();
  dump->add_option("--grid", dump_flags.grid, "momentum grid")
      ->check(CLI::IsMember({"integer", "half-integer"}));
  dump->add_option("--gamma", dump_flags.gamma, "anisotropy")->required();
  dump->add_option("--lambda", dump_flags.lambda, "transverse field")->required();

  OracleFlags oracle_flags;
  auto* oracle = app.add_subcommand("oracle-check", "compare closed forms with dense matrices");
  oracle->add_option("--seed", oracle_flags.seed, "RNG seed");
  oracle->add_option("--draws", oracle_flags.draws, "fidelity draws (echo gets half)")
      ->check(CLI::Range(std::size_t{1}, std::size_t{10'000'000}));

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    if (!app.get_subcommands().empty()) std::cerr << app.get_subcommands().front()->help();
    else std::cerr << app.help();
    return kExitUsage;
  }

  if (*fid) return run_sweep(*fid, TFID_FIDELITY, fid_flags);
  if (*echo) return run_sweep(*echo, TFID_ECHO, echo_flags);
  if (*dump) return run_mode_dump(dump_flags);
  return run_oracle(oracle_flags);
}
