#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "thermalfid/model.hpp"

namespace thermalfid {

enum class Quantity { Fidelity, Echo };

/// Evenly spaced axis: `steps` points from `min` to `max` inclusive. A single
/// point requires min == max.
struct AxisRange {
  double min = 0.0;
  double max = 0.0;
  int steps = 1;

  bool degenerate() const noexcept { return steps == 1; }
  std::vector<double> values() const;

  friend bool operator==(const AxisRange&, const AxisRange&) = default;
};

/// H0 = H(gamma, lambda) against H1 = H(gamma + delta_gamma, lambda + delta_lambda)
/// over a (beta, gamma, lambda) grid.
struct SweepConfig {
  int n_sites = 200;
  Grid grid = Grid::Integer;
  AxisRange gamma_range{0.0, 1.5, 151};
  AxisRange lambda_range{0.0, 2.0, 201};
  double delta_gamma = 1e-2;
  double delta_lambda = 1e-2;
  std::vector<double> beta_list{1.0, 10.0, 20.0, 100.0};
  Quantity quantity = Quantity::Fidelity;
  std::optional<double> echo_time;
  std::string output_path;
  bool emit_plot_script = false;
  bool stamp_time = false;
  unsigned threads = 0;  // 0: hardware concurrency

  friend bool operator==(const SweepConfig&, const SweepConfig&) = default;
};

/// Throws ConfigError naming the first invalid field.
void validate(const SweepConfig& c);

/// Applies one `key=value` setting; keys are the long CLI flag names
/// (n-sites, grid, gamma, gamma-range, lambda, lambda-range, delta-gamma,
/// delta-lambda, beta, time, out, plot, quantity, threads, timestamp).
/// `beta` takes a comma-separated list and replaces the current list.
void apply_setting(SweepConfig& c, std::string_view key, std::string_view value);

/// Flat key=value text, '#' comments, blank lines ignored. Repeated `beta`
/// lines accumulate. Settings are applied on top of `base`.
SweepConfig parse_config_text(std::string_view text, SweepConfig base = {});
SweepConfig load_config_file(const std::filesystem::path& path, SweepConfig base = {});

/// Canonical key=value rendering of every setting that affects the rows.
std::vector<std::pair<std::string, std::string>> describe(const SweepConfig& c);

std::string_view to_string(Grid g);
std::string_view to_string(Quantity q);

struct SweepRow {
  double beta = 0.0;
  double gamma = 0.0;
  double lambda = 0.0;
  double value = 0.0;
  double log_value = 0.0;
  std::string error;  // empty when the row is valid

  bool ok() const noexcept { return error.empty(); }
};

struct SweepResult {
  SweepConfig config;
  std::string tool_version;
  std::string timestamp;  // empty unless config.stamp_time
  std::vector<SweepRow> rows;

  std::size_t error_count() const;
};

/// Rows in beta-major, then gamma, then lambda order. A row whose evaluation
/// fails or is non-finite carries an error message; the sweep continues.
SweepResult run_sweep(const SweepConfig& c);

std::string render_csv(const SweepResult& r);
void write_csv(const SweepResult& r, const std::filesystem::path& path);
SweepResult parse_csv(std::string_view text);
SweepResult read_csv(const std::filesystem::path& path);

/// matplotlib script; `csv_reference` is resolved relative to the script's
/// own directory.
std::string render_plot_script(const SweepResult& r, const std::string& csv_reference,
                               const std::string& image_stem);
void emit_plot_script(const SweepResult& r, const std::filesystem::path& script_path,
                      const std::filesystem::path& csv_path);

std::string format_number(double x);  // %.17g

}  // namespace thermalfid
