#include "thermalfid/sweep.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <sstream>
#include <thread>

#include "thermalfid/error.hpp"
#include "thermalfid/fidelity.hpp"
#include "thermalfid/loschmidt.hpp"
#include "thermalfid/version.hpp"

namespace thermalfid {

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> parts;
  std::size_t start = 0;
  while (true) {
    const auto pos = s.find(sep, start);
    parts.push_back(trim(s.substr(start, pos - start)));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return parts;
}

double parse_double(std::string_view field, std::string_view text) {
  text = trim(text);
  if (text == "inf" || text == "infinity") return kInfiniteBeta;
  double x = 0.0;
  const auto* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, x);
  if (ec != std::errc() || ptr != end || text.empty()) {
    throw ConfigError(std::string(field), "expected a number, got '" + std::string(text) + "'");
  }
  return x;
}

long parse_integer(std::string_view field, std::string_view text) {
  text = trim(text);
  long x = 0;
  const auto* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, x);
  if (ec != std::errc() || ptr != end || text.empty()) {
    throw ConfigError(std::string(field), "expected an integer, got '" + std::string(text) + "'");
  }
  return x;
}

bool parse_bool(std::string_view field, std::string_view text) {
  text = trim(text);
  if (text == "true" || text == "1" || text == "yes" || text == "on") return true;
  if (text == "false" || text == "0" || text == "no" || text == "off") return false;
  throw ConfigError(std::string(field), "expected true or false, got '" + std::string(text) + "'");
}

AxisRange parse_range(std::string_view field, std::string_view text) {
  const auto parts = split(text, ':');
  if (parts.size() != 3) {
    throw ConfigError(std::string(field), "expected MIN:MAX:STEPS, got '" + std::string(text) + "'");
  }
  const long steps = parse_integer(field, parts[2]);
  if (steps < 1 || steps > 1'000'000) throw ConfigError(std::string(field), "STEPS out of range");
  return {parse_double(field, parts[0]), parse_double(field, parts[1]), static_cast<int>(steps)};
}

std::vector<double> parse_list(std::string_view field, std::string_view text) {
  std::vector<double> out;
  for (auto part : split(text, ',')) out.push_back(parse_double(field, part));
  return out;
}

void validate_range(const char* field, const AxisRange& r) {
  if (!std::isfinite(r.min) || !std::isfinite(r.max)) throw ConfigError(field, "bounds must be finite");
  if (r.steps < 1) throw ConfigError(field, "steps must be >= 1");
  if (r.steps == 1 && r.min != r.max) {
    throw ConfigError(field, "a single-point range needs MIN == MAX (use steps >= 2 to sweep)");
  }
  if (r.min > r.max) throw ConfigError(field, "MIN exceeds MAX");
}

std::string utc_timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

SweepRow evaluate(const SweepConfig& c, const QuasiFreeModel& m0, const QuasiFreeModel& m1,
                  double beta, double gamma, double lambda) {
  SweepRow row{beta, gamma, lambda, 0.0, 0.0, {}};
  try {
    FidelityBreakdown b;
    if (c.quantity == Quantity::Fidelity) {
      b = thermal_fidelity(ThermalState(m0, beta), ThermalState(m1, beta));
    } else {
      b = thermal_echo(EchoQuery{m0, m1, beta, *c.echo_time});
    }
    row.value = b.total;
    row.log_value = b.log_total;
    if (!std::isfinite(b.total) || std::isnan(b.log_total)) {
      row.error = "non-finite value";
    } else if (b.max_excursion > kUnitTolerance) {
      row.error = "per-mode factor exceeded 1 by " + format_number(b.max_excursion);
    }
  } catch (const Error& e) {
    row.value = std::nan("");
    row.log_value = std::nan("");
    row.error = e.what();
  }
  return row;
}

}  // namespace

std::string format_number(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::string_view to_string(Grid g) { return g == Grid::Integer ? "integer" : "half-integer"; }

std::string_view to_string(Quantity q) { return q == Quantity::Fidelity ? "fidelity" : "echo"; }

std::vector<double> AxisRange::values() const {
  std::vector<double> out;
  out.reserve(static_cast<std::size_t>(std::max(steps, 0)));
  if (steps == 1) {
    out.push_back(min);
    return out;
  }
  for (int i = 0; i < steps; ++i) {
    out.push_back(i == steps - 1 ? max : min + (max - min) * i / (steps - 1));
  }
  return out;
}

void validate(const SweepConfig& c) {
  if (c.n_sites < 2 || c.n_sites % 2 != 0) throw ConfigError("n-sites", "must be even and >= 2");
  validate_range("gamma-range", c.gamma_range);
  validate_range("lambda-range", c.lambda_range);
  if (!(c.delta_gamma >= 0.0) || !std::isfinite(c.delta_gamma)) {
    throw ConfigError("delta-gamma", "must be finite and >= 0");
  }
  if (!(c.delta_lambda >= 0.0) || !std::isfinite(c.delta_lambda)) {
    throw ConfigError("delta-lambda", "must be finite and >= 0");
  }
  if (c.delta_gamma == 0.0 && c.delta_lambda == 0.0) {
    throw ConfigError("delta-lambda", "delta-gamma and delta-lambda cannot both be 0");
  }
  if (c.beta_list.empty()) throw ConfigError("beta", "at least one inverse temperature is required");
  for (double b : c.beta_list) {
    if (!(b > 0.0)) throw ConfigError("beta", "inverse temperatures must be > 0");
  }
  if (c.quantity == Quantity::Echo) {
    if (!c.echo_time) throw ConfigError("time", "echo sweeps need an echo time");
    if (!(*c.echo_time >= 0.0) || !std::isfinite(*c.echo_time)) {
      throw ConfigError("time", "must be finite and >= 0");
    }
  } else if (c.echo_time) {
    throw ConfigError("time", "only valid for echo sweeps");
  }
  if (c.threads > 1024) throw ConfigError("threads", "at most 1024 worker threads");
}

void apply_setting(SweepConfig& c, std::string_view key, std::string_view value) {
  key = trim(key);
  value = trim(value);
  const std::string field(key);
  if (key == "n-sites") {
    const long n = parse_integer(field, value);
    if (n < 2 || n > 100'000'000) throw ConfigError(field, "out of range");
    c.n_sites = static_cast<int>(n);
  } else if (key == "grid") {
    if (value == "integer") c.grid = Grid::Integer;
    else if (value == "half-integer") c.grid = Grid::HalfInteger;
    else throw ConfigError(field, "expected integer or half-integer");
  } else if (key == "gamma") {
    const double g = parse_double(field, value);
    c.gamma_range = {g, g, 1};
  } else if (key == "gamma-range") {
    c.gamma_range = parse_range(field, value);
  } else if (key == "lambda") {
    const double l = parse_double(field, value);
    c.lambda_range = {l, l, 1};
  } else if (key == "lambda-range") {
    c.lambda_range = parse_range(field, value);
  } else if (key == "delta-gamma") {
    c.delta_gamma = parse_double(field, value);
  } else if (key == "delta-lambda") {
    c.delta_lambda = parse_double(field, value);
  } else if (key == "beta") {
    c.beta_list = parse_list(field, value);
  } else if (key == "time") {
    c.echo_time = parse_double(field, value);
  } else if (key == "quantity") {
    if (value == "fidelity") c.quantity = Quantity::Fidelity;
    else if (value == "echo") c.quantity = Quantity::Echo;
    else throw ConfigError(field, "expected fidelity or echo");
  } else if (key == "out") {
    c.output_path = std::string(value);
  } else if (key == "plot") {
    c.emit_plot_script = parse_bool(field, value);
  } else if (key == "timestamp") {
    c.stamp_time = parse_bool(field, value);
  } else if (key == "threads") {
    const long n = parse_integer(field, value);
    if (n < 0) throw ConfigError(field, "must be >= 0");
    c.threads = static_cast<unsigned>(n);
  } else {
    throw ConfigError(field, "unknown setting");
  }
}

SweepConfig parse_config_text(std::string_view text, SweepConfig base) {
  bool beta_seen = false;
  std::size_t line_no = 0;
  for (auto line : split(text, '\n')) {
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw ConfigError("line " + std::to_string(line_no), "expected key=value");
    }
    const auto key = trim(line.substr(0, eq));
    const auto value = trim(line.substr(eq + 1));
    if (key == "beta" && beta_seen) {
      const auto more = parse_list("beta", value);
      base.beta_list.insert(base.beta_list.end(), more.begin(), more.end());
      continue;
    }
    if (key == "beta") beta_seen = true;
    apply_setting(base, key, value);
  }
  return base;
}

SweepConfig load_config_file(const std::filesystem::path& path, SweepConfig base) {
  std::ifstream in(path);
  if (!in) throw IoError(path.string(), "cannot open config file");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config_text(buf.str(), std::move(base));
}

std::vector<std::pair<std::string, std::string>> describe(const SweepConfig& c) {
  auto range = [](const AxisRange& r) {
    return format_number(r.min) + ":" + format_number(r.max) + ":" + std::to_string(r.steps);
  };
  std::string betas;
  for (std::size_t i = 0; i < c.beta_list.size(); ++i) {
    if (i) betas += ",";
    betas += format_number(c.beta_list[i]);
  }
  std::vector<std::pair<std::string, std::string>> out{
      {"quantity", std::string(to_string(c.quantity))},
      {"n-sites", std::to_string(c.n_sites)},
      {"grid", std::string(to_string(c.grid))},
      {"gamma-range", range(c.gamma_range)},
      {"lambda-range", range(c.lambda_range)},
      {"delta-gamma", format_number(c.delta_gamma)},
      {"delta-lambda", format_number(c.delta_lambda)},
      {"beta", betas},
  };
  if (c.echo_time) out.emplace_back("time", format_number(*c.echo_time));
  return out;
}

std::size_t SweepResult::error_count() const {
  return static_cast<std::size_t>(
      std::count_if(rows.begin(), rows.end(), [](const SweepRow& r) { return !r.ok(); }));
}

SweepResult run_sweep(const SweepConfig& c) {
  validate(c);
  SweepResult result;
  result.config = c;
  result.tool_version = kVersion;
  if (c.stamp_time) result.timestamp = utc_timestamp();

  const auto gammas = c.gamma_range.values();
  const auto lambdas = c.lambda_range.values();
  const std::size_t plane = gammas.size() * lambdas.size();
  result.rows.resize(c.beta_list.size() * plane);

  // One work item per (gamma, lambda); each fills its rows for every beta.
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t item = next++; item < plane; item = next++) {
      const double gamma = gammas[item / lambdas.size()];
      const double lambda = lambdas[item % lambdas.size()];
      try {
        const auto m0 = xy_to_quasifree({gamma, lambda, c.n_sites, c.grid});
        const auto m1 = xy_to_quasifree(
            {gamma + c.delta_gamma, lambda + c.delta_lambda, c.n_sites, c.grid});
        for (std::size_t b = 0; b < c.beta_list.size(); ++b) {
          result.rows[b * plane + item] = evaluate(c, m0, m1, c.beta_list[b], gamma, lambda);
        }
      } catch (const Error& e) {
        for (std::size_t b = 0; b < c.beta_list.size(); ++b) {
          result.rows[b * plane + item] =
              SweepRow{c.beta_list[b], gamma, lambda, std::nan(""), std::nan(""), e.what()};
        }
      }
    }
  };

  unsigned threads = c.threads ? c.threads : std::max(1u, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, plane));
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(threads);
    for (unsigned i = 0; i < threads; ++i) pool.emplace_back(worker);
  }
  return result;
}

// ---- CSV ------------------------------------------------------------------

namespace {
constexpr std::string_view kCsvHeader = "beta,gamma,lambda,value,log_value";
}

std::string render_csv(const SweepResult& r) {
  std::string out;
  out += "# thermalfid sweep\n";
  out += "# tool_version: " + r.tool_version + "\n";
  out += "# grid: " + std::string(to_string(r.config.grid)) + "\n";
  out += "# timestamp: " + (r.timestamp.empty() ? std::string("none") : r.timestamp) + "\n";
  for (const auto& [key, value] : describe(r.config)) out += "# config: " + key + "=" + value + "\n";
  out += "# rows: " + std::to_string(r.rows.size()) + "\n";
  out += "# errors: " + std::to_string(r.error_count()) + "\n";
  for (std::size_t i = 0; i < r.rows.size(); ++i) {
    if (!r.rows[i].ok()) out += "# error: row=" + std::to_string(i) + " " + r.rows[i].error + "\n";
  }
  out += kCsvHeader;
  out += "\n";
  for (const auto& row : r.rows) {
    out += format_number(row.beta) + "," + format_number(row.gamma) + "," +
           format_number(row.lambda) + "," + format_number(row.value) + "," +
           format_number(row.log_value) + "\n";
  }
  return out;
}

void write_csv(const SweepResult& r, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError(path.string(), "cannot open for writing");
  out << render_csv(r);
  out.flush();
  if (!out) throw IoError(path.string(), "write failed");
}

SweepResult parse_csv(std::string_view text) {
  SweepResult r;
  SweepConfig config;
  bool beta_seen = false;
  bool header_seen = false;
  std::vector<std::pair<std::size_t, std::string>> errors;

  auto strtod_field = [](std::string_view s) {
    const std::string tmp(s);
    char* end = nullptr;
    const double x = std::strtod(tmp.c_str(), &end);
    if (end == tmp.c_str() || *end != '\0') throw IoError("<csv>", "bad number '" + tmp + "'");
    return x;
  };

  for (auto line : split(text, '\n')) {
    if (line.empty()) continue;
    if (line.front() == '#') {
      const auto body = trim(line.substr(1));
      const auto colon = body.find(':');
      if (colon == std::string_view::npos) continue;
      const auto key = trim(body.substr(0, colon));
      const auto value = trim(body.substr(colon + 1));
      if (key == "tool_version") {
        r.tool_version = std::string(value);
      } else if (key == "timestamp") {
        r.timestamp = value == "none" ? std::string() : std::string(value);
      } else if (key == "config") {
        const auto eq = value.find('=');
        if (eq == std::string_view::npos) continue;
        const auto ckey = value.substr(0, eq);
        if (ckey == "beta") {
          if (beta_seen) throw IoError("<csv>", "duplicate beta metadata");
          beta_seen = true;
        }
        apply_setting(config, ckey, value.substr(eq + 1));
      } else if (key == "error") {
        // row=<index> <message>
        const auto space = value.find(' ');
        const auto idx = value.substr(0, space);
        if (idx.substr(0, 4) != "row=") continue;
        const auto n = parse_integer("error", idx.substr(4));
        errors.emplace_back(static_cast<std::size_t>(n),
                            space == std::string_view::npos ? std::string() : std::string(value.substr(space + 1)));
      }
      continue;
    }
    if (!header_seen) {
      if (trim(line) != kCsvHeader) throw IoError("<csv>", "unexpected header '" + std::string(line) + "'");
      header_seen = true;
      continue;
    }
    const auto cells = split(line, ',');
    if (cells.size() != 5) throw IoError("<csv>", "expected 5 columns");
    r.rows.push_back({strtod_field(cells[0]), strtod_field(cells[1]), strtod_field(cells[2]),
                      strtod_field(cells[3]), strtod_field(cells[4]), {}});
  }
  if (!header_seen) throw IoError("<csv>", "missing header line");
  for (auto& [index, message] : errors) {
    if (index >= r.rows.size()) throw IoError("<csv>", "error entry for a missing row");
    r.rows[index].error = message.empty() ? std::string("error") : message;
  }
  r.config = config;
  return r;
}

SweepResult read_csv(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError(path.string(), "cannot open for reading");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_csv(buf.str());
}

// ---- Plot script -----------------------------------------------------------

std::string render_plot_script(const SweepResult& r, const std::string& csv_reference,
                               const std::string& image_stem) {
  const auto& c = r.config;
  const bool surface = !c.gamma_range.degenerate() && !c.lambda_range.degenerate();
  const bool along_gamma = c.lambda_range.degenerate() && !c.gamma_range.degenerate();
  const std::string label = c.quantity == Quantity::Fidelity ? "fidelity" : "Loschmidt echo";
  auto py_number = [](double x) {
    return std::isinf(x) ? std::string("float(\"inf\")") : format_number(x);
  };

  std::string s;
  s += "#!/usr/bin/env python3\n";
  s += "# Plot script written by thermalfid " + r.tool_version + ".\n";
  s += "import csv\nimport os\n\nimport matplotlib\n\nmatplotlib.use(\"Agg\")\n";
  s += "import matplotlib.pyplot as plt\n\n";
  s += "HERE = os.path.dirname(os.path.abspath(__file__))\n";
  s += "CSV = os.path.join(HERE, \"" + csv_reference + "\")\n";
  s += "GAMMA_STEPS = " + std::to_string(c.gamma_range.steps) + "\n";
  s += "LAMBDA_STEPS = " + std::to_string(c.lambda_range.steps) + "\n\n\n";
  s += "def load_rows():\n";
  s += "    with open(CSV, newline=\"\") as fh:\n";
  s += "        lines = [line for line in fh if not line.startswith(\"#\")]\n";
  s += "    reader = csv.reader(lines)\n";
  s += "    next(reader)\n";
  s += "    return [tuple(float(x) for x in row) for row in reader]\n\n\n";
  s += "ROWS = load_rows()\n\n\n";
  s += "def block(beta):\n";
  s += "    return [row for row in ROWS if row[0] == beta]\n\n\n";

  if (surface) {
    s += "def heatmap(beta, out):\n";
    s += "    rows = block(beta)\n";
    s += "    grid = [[rows[g * LAMBDA_STEPS + l][3] for l in range(LAMBDA_STEPS)] for g in range(GAMMA_STEPS)]\n";
    s += "    lam = [rows[l][2] for l in range(LAMBDA_STEPS)]\n";
    s += "    gam = [rows[g * LAMBDA_STEPS][1] for g in range(GAMMA_STEPS)]\n";
    s += "    fig, ax = plt.subplots(figsize=(6, 4.5))\n";
    s += "    mesh = ax.pcolormesh(lam, gam, grid, shading=\"nearest\", cmap=\"viridis\")\n";
    s += "    fig.colorbar(mesh, ax=ax, label=\"" + label + "\")\n";
    s += "    ax.set_xlabel(\"lambda\")\n";
    s += "    ax.set_ylabel(\"gamma\")\n";
    s += "    ax.set_title(\"" + label + ", beta = %g\" % beta)\n";
    s += "    fig.tight_layout()\n";
    s += "    fig.savefig(os.path.join(HERE, out), dpi=150)\n";
    s += "    plt.close(fig)\n\n\n";
    for (std::size_t i = 0; i < c.beta_list.size(); ++i) {
      s += "# beta = " + format_number(c.beta_list[i]) + "\n";
      s += "heatmap(" + py_number(c.beta_list[i]) + ", \"" + image_stem + "_beta" +
           std::to_string(i) + ".png\")\n";
    }
  } else {
    const int axis = along_gamma ? 1 : 2;
    s += "fig, ax = plt.subplots(figsize=(6, 4.5))\n";
    for (double beta : c.beta_list) {
      const std::string b = format_number(beta);
      s += "rows = block(" + py_number(beta) + ")\n";
      s += "ax.plot([row[" + std::to_string(axis) + "] for row in rows], [row[3] for row in rows], "
           "marker=\".\", label=\"beta = " + b + "\")\n";
    }
    s += "ax.set_xlabel(\"" + std::string(along_gamma ? "gamma" : "lambda") + "\")\n";
    s += "ax.set_ylabel(\"" + label + "\")\n";
    s += "ax.legend()\n";
    s += "fig.tight_layout()\n";
    s += "fig.savefig(os.path.join(HERE, \"" + image_stem + ".png\"), dpi=150)\n";
  }
  return s;
}

void emit_plot_script(const SweepResult& r, const std::filesystem::path& script_path,
                      const std::filesystem::path& csv_path) {
  namespace fs = std::filesystem;
  const fs::path script_dir = fs::absolute(script_path).parent_path();
  const fs::path csv_abs = fs::absolute(csv_path);
  fs::path reference = csv_abs.lexically_normal().lexically_relative(script_dir.lexically_normal());
  if (reference.empty()) reference = csv_abs;
  const std::string stem = script_path.stem().string();

  std::ofstream out(script_path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError(script_path.string(), "cannot open for writing");
  out << render_plot_script(r, reference.generic_string(), stem);
  out.flush();
  if (!out) throw IoError(script_path.string(), "write failed");
}

}  // namespace thermalfid
