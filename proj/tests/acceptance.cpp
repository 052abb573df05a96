// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any fail.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "thermalfid/fidelity.hpp"
#include "thermalfid/loschmidt.hpp"
#include "thermalfid/oracle.hpp"
#include "thermalfid/sweep.hpp"

using namespace thermalfid;

namespace {

int failed = 0;

void verdict(int id, bool ok, const std::string& what) {
  std::printf("[%s] %2d  %s\n", ok ? "PASS" : "FAIL", id, what.c_str());
  std::fflush(stdout);
  if (!ok) ++failed;
}

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

class Stopwatch {
 public:
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

QuasiFreeModel xy(double gamma, double lambda, int n) {
  return xy_to_quasifree({gamma, lambda, n, Grid::Integer});
}

SweepConfig critical_line(Quantity q, double beta) {
  SweepConfig c;
  c.n_sites = 200;
  c.gamma_range = {1.0, 1.0, 1};
  c.lambda_range = {0.0, 2.0, 201};
  c.delta_gamma = 1e-2;
  c.delta_lambda = 1e-2;
  c.beta_list = {beta};
  c.quantity = q;
  if (q == Quantity::Echo) c.echo_time = 10.0;
  return c;
}

const SweepRow& lowest(const SweepResult& r) {
  return *std::min_element(r.rows.begin(), r.rows.end(),
                           [](const SweepRow& a, const SweepRow& b) { return a.value < b.value; });
}

double value_at(const SweepResult& r, double lambda) {
  for (const auto& row : r.rows)
    if (std::fabs(row.lambda - lambda) < 1e-12) return row.value;
  return std::nan("");
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

void oracle_criteria() {
  Stopwatch clock;
  const auto r = oracle::run_oracle_checks(42, 1000);
  const double t = clock.seconds();
  verdict(1, r.fidelity_draws == 1000 && r.max_fidelity_deviation <= 1e-10 && t < 10.0,
          fmt("oracle fidelity: %zu draws, max |analytic - dense| = %.2e (tol 1e-10), %.2f s",
              r.fidelity_draws, r.max_fidelity_deviation, t));
  verdict(2, r.echo_draws == 500 && r.max_echo_deviation <= 1e-10 && t < 10.0,
          fmt("oracle echo: %zu draws, max |analytic - dense| = %.2e (tol 1e-10), %.2f s",
              r.echo_draws, r.max_echo_deviation, t));
  verdict(8, r.product_draws == 100 && r.max_product_deviation <= 1e-12,
          fmt("multiplicativity: %zu two-mode 16x16 draws, max |joint - product| = %.2e (tol 1e-12)",
              r.product_draws, r.max_product_deviation));
}

void partition_identity() {
  oracle::UniformSource src(7);
  double worst = 0.0;
  for (int i = 0; i < 100; ++i) {
    const double lambda = src.uniform(0.0, 5.0);
    const double theta = src.angle();
    const QuasiFreeModel m({make_mode(lambda * std::cos(theta), lambda * std::sin(theta))});
    const double b0 = src.uniform(0.01, 50.0);
    double b1 = src.uniform(0.01, 50.0);
    if (b1 == b0) b1 += 1.0;
    const double lam = m[0].lambda;
    const double want = mode_partition(lam, 0.5 * (b0 + b1)) /
                        std::sqrt(mode_partition(lam, b0) * mode_partition(lam, b1));
    const double got = thermal_fidelity(ThermalState(m, b0), ThermalState(m, b1)).total;
    worst = std::max(worst, std::fabs(got - want) / want);
  }
  verdict(3, worst <= 1e-12,
          fmt("partition-function identity: 100 single-mode models, max rel. error %.2e (tol 1e-12)",
              worst));
}

void zero_temperature() {
  double worst_f = 0.0, worst_e = 0.0;
  for (double lambda : {0.5, 1.5}) {
    const auto m0 = xy(1.0, lambda, 20);
    const auto m1 = xy(1.01, lambda + 0.01, 20);
    const double f = thermal_fidelity(ThermalState(m0, 1e3), ThermalState(m1, 1e3)).total;
    worst_f = std::max(worst_f, std::fabs(f - ground_state_fidelity(m0, m1).total));
    const double e = thermal_echo({m0, m1, 1e3, 1.0}).total;
    worst_e = std::max(worst_e, std::fabs(e - ground_state_echo(m0, m1, 1.0).total));
  }
  verdict(4, worst_f <= 1e-6 && worst_e <= 1e-6,
          fmt("zero-temperature limit at beta = 1e3: fidelity gap %.2e, echo gap %.2e (tol 1e-6)",
              worst_f, worst_e));
}

void dip_location() {
  Stopwatch c1;
  const auto f = run_sweep(critical_line(Quantity::Fidelity, 100.0));
  const double tf = c1.seconds();
  Stopwatch c2;
  const auto e = run_sweep(critical_line(Quantity::Echo, 100.0));
  const double te = c2.seconds();
  const double lf = lowest(f).lambda, le = lowest(e).lambda;
  verdict(5, std::fabs(lf - 1.0) <= 0.05 && std::fabs(le - 1.0) <= 0.05 && tf < 5.0 && te < 5.0,
          fmt("dip location at beta = 100: fidelity argmin lambda = %.2f (%.2f s), "
              "echo(t=10) argmin lambda = %.2f (%.2f s); need |lambda - 1| <= 0.05, < 5 s",
              lf, tf, le, te));
}

void washout() {
  bool ok = true;
  std::string detail;
  for (const Quantity q : {Quantity::Fidelity, Quantity::Echo}) {
    std::vector<double> depth;
    for (double beta : {100.0, 20.0, 10.0, 1.0}) {
      const auto r = run_sweep(critical_line(q, beta));
      depth.push_back(value_at(r, 1.5) - lowest(r).value);
    }
    ok = ok && depth[0] > depth[1] && depth[1] > depth[2] && depth[2] > depth[3];
    detail += fmt("%s d(100,20,10,1) = %.3e > %.3e > %.3e > %.3e; ", std::string(to_string(q)).c_str(),
                  depth[0], depth[1], depth[2], depth[3]);
  }
  detail.resize(detail.size() - 2);
  verdict(6, ok, "thermal washout ordering: " + detail);
}

void sign_change() {
  // gamma = 0 chain: eps_j = cos(phi_j) - lambda; lambda = +-0.3 flips the phi = pi/2 mode only
  const auto inside = xy(0.0, 0.3, 4);
  const auto flipped = xy(0.0, -0.3, 4);
  const auto shifted = xy(0.0, 0.35, 4);
  const std::vector<double> e0{-0.3, -1.3}, e1{0.3, -0.7}, e2{-0.35, -1.35};
  const double f_flip = ground_state_fidelity(inside, flipped).total;
  const double d_flip = fidelity_diagonal_fermions(e0, e1, kInfiniteBeta, kInfiniteBeta);
  const double f_keep = ground_state_fidelity(inside, shifted).total;
  const double d_keep = fidelity_diagonal_fermions(e0, e2, kInfiniteBeta, kInfiniteBeta);
  verdict(7, f_flip == 0.0 && d_flip == 0.0 && f_keep == 1.0 && d_keep == 1.0,
          fmt("sign change: one flipped energy -> F = %g (pair form), %g (diagonal form); "
              "no flip -> F = %g, %g",
              f_flip, d_flip, f_keep, d_keep));
}

SweepConfig full_surface() {
  SweepConfig c;  // N = 200, gamma 0:1.5:151, lambda 0:2:201, beta {1, 10, 20, 100}
  c.delta_gamma = 1e-2;
  c.delta_lambda = 1e-2;
  return c;
}

void stability() {
  Stopwatch clock;
  const auto r = run_sweep(full_surface());
  const double t = clock.seconds();
  std::size_t bad = 0;
  for (const auto& row : r.rows)
    if (!std::isfinite(row.value) || row.value < 0.0 || row.value > 1.0) ++bad;

  // spot checks at very low temperature
  std::size_t spot_bad = 0, spots = 0;
  for (double beta : {1e2, 1e3, 1e4}) {
    for (double gamma : {0.0, 0.5, 1.0}) {
      for (double lambda : {0.0, 0.5, 1.0, 1.5, 2.0}) {
        const auto m0 = xy(gamma, lambda, 200);
        const auto m1 = xy(gamma + 0.01, lambda + 0.01, 200);
        const auto f = thermal_fidelity(ThermalState(m0, beta), ThermalState(m1, beta));
        const auto e = thermal_echo({m0, m1, beta, 10.0});
        for (const auto* b : {&f, &e}) {
          ++spots;
          if (!std::isfinite(b->total) || std::isnan(b->log_total) || b->max_excursion > kUnitTolerance)
            ++spot_bad;
        }
      }
    }
  }
  verdict(9, r.rows.size() == 4u * 151u * 201u && r.error_count() == 0 && bad == 0 && spot_bad == 0,
          fmt("stability: %zu-row surface, %zu flagged rows (non-finite or excursion > 1e-12), "
              "%zu out of range, %.2f s; %zu/%zu low-temperature spot checks clean",
              r.rows.size(), r.error_count(), bad, t, spots - spot_bad, spots));
}

void determinism() {
  namespace fs = std::filesystem;
  const fs::path dir = fs::temp_directory_path() / "thermalfid_acceptance";
  fs::create_directories(dir);

  auto surface = full_surface();
  surface.threads = 0;
  write_csv(run_sweep(surface), dir / "a.csv");
  surface.threads = 1;
  write_csv(run_sweep(surface), dir / "b.csv");

  auto echo = critical_line(Quantity::Echo, 20.0);
  echo.beta_list = {1.0, 20.0, 100.0};
  write_csv(run_sweep(echo), dir / "c.csv");
  write_csv(run_sweep(echo), dir / "d.csv");

  const std::string a = slurp(dir / "a.csv"), b = slurp(dir / "b.csv");
  const std::string c = slurp(dir / "c.csv"), d = slurp(dir / "d.csv");
  fs::remove_all(dir);
  verdict(10, !a.empty() && a == b && !c.empty() && c == d,
          fmt("determinism: repeated fidelity surface (%zu bytes) and echo sweep (%zu bytes) "
              "byte-identical",
              a.size(), c.size()));
}

}  // namespace

int main() {
  oracle_criteria();
  partition_identity();
  zero_temperature();
  dip_location();
  washout();
  sign_change();
  stability();
  determinism();
  std::printf("%d criteria failed\n", failed);
  return failed ? 1 : 0;
}
