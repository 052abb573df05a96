#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include "doctest.h"
#include "thermalfid/error.hpp"
#include "thermalfid/fidelity.hpp"
#include "thermalfid/oracle.hpp"

using namespace thermalfid;
using std::numbers::pi;

namespace {

MomentumMode polar(double lambda, double theta) {
  return make_mode(lambda * std::cos(theta), lambda * std::sin(theta));
}

QuasiFreeModel xy(double gamma, double lambda, int n = 200) {
  return xy_to_quasifree({gamma, lambda, n, Grid::Integer});
}

double total(const QuasiFreeModel& a, double b0, const QuasiFreeModel& b, double b1) {
  return thermal_fidelity(ThermalState(a, b0), ThermalState(b, b1)).total;
}

// many-body levels of sum_k H_k, each pair contributing -L, +L, 0, 0
std::vector<double> enumerate_levels(const QuasiFreeModel& m) {
  std::vector<double> levels{0.0};
  for (const auto& mode : m.modes()) {
    std::vector<double> next;
    for (double e : levels) {
      for (double d : {-mode.lambda, mode.lambda, 0.0, 0.0}) next.push_back(e + d);
    }
    levels = std::move(next);
  }
  return levels;
}

}  // namespace

TEST_CASE("mode partition function") {
  CHECK(mode_partition(0.0, 3.0) == 4.0);
  CHECK(mode_partition(1.0, 1e-300) == 4.0);
  CHECK(mode_partition(1.0, 2.0) == doctest::Approx(2.0 + 2.0 * std::cosh(2.0)).epsilon(1e-15));
  // 2 + 2cosh(200) = e^200 + 2 + e^-200
  CHECK(log_mode_partition(2.0, 100.0) == doctest::Approx(200.0).epsilon(1e-15));
  CHECK_THROWS_AS(mode_partition(2.0, 1000.0), NumericalError);
  CHECK(std::isfinite(log_mode_partition(100.0, 1e4)));
  CHECK_THROWS_AS(mode_partition(-1.0, 1.0), DomainError);
  CHECK_THROWS_AS(log_mode_partition(1.0, 0.0), DomainError);
}

TEST_CASE("trace product") {
  const auto m = polar(0.8, 0.3);
  const double beta = 1.7;
  const auto same = mode_trace_product(m, m, beta, beta);
  CHECK(same.value() == doctest::Approx(2.0 * std::cosh(2.0 * beta * 0.8)).epsilon(1e-14));

  const auto flipped = mode_trace_product(polar(0.8, 0.3), polar(0.8, 0.3 + pi), beta, beta);
  CHECK(flipped.value() == doctest::Approx(2.0).epsilon(1e-14));

  const auto t = mode_trace_product(make_mode(1.0, 0.0), polar(1.3, 0.4), 2.0, 0.7);
  CHECK(t.value() == doctest::Approx(17.815253868150945015810760424502).epsilon(1e-14));
  CHECK(mode_fidelity(make_mode(1.0, 0.0), polar(1.3, 0.4), 2.0, 0.7) ==
        doctest::Approx(0.94563426427861930892794239225085).epsilon(1e-14));

  // stays representable where the linear value does not
  const auto huge = mode_trace_product(polar(100.0, 0.0), polar(100.0, 0.1), 1e4, 1e4);
  CHECK(std::isfinite(huge.mantissa));
  CHECK(huge.log() == doctest::Approx(2e6 + 2.0 * std::log(std::cos(0.05))).epsilon(1e-15));
}

TEST_CASE("single mode fidelity") {
  const auto m = polar(1.4, -2.0);
  CHECK(mode_fidelity(m, m, 0.9, 0.9) == doctest::Approx(1.0).epsilon(1e-15));

  // same mode, two temperatures: partition-function ratio
  for (double b0 : {0.1, 1.0, 5.0}) {
    for (double b1 : {0.3, 2.0, 9.0}) {
      const double want = mode_partition(1.4, 0.5 * (b0 + b1)) /
                          std::sqrt(mode_partition(1.4, b0) * mode_partition(1.4, b1));
      CHECK(mode_fidelity(m, m, b0, b1) == doctest::Approx(want).epsilon(1e-14));
    }
  }
}

TEST_CASE("closed form against the expanded product expression") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> lam(0.0, 3.0), ang(-pi, pi), beta(0.05, 4.0);
  for (int i = 0; i < 500; ++i) {
    const auto m0 = polar(lam(rng), ang(rng));
    const auto m1 = polar(lam(rng), ang(rng));
    const double b0 = beta(rng), b1 = beta(rng);
    const double a = b0 * m0.lambda, b = b1 * m1.lambda;
    const double inner = 1.0 + std::cosh(a) * std::cosh(b) +
                         std::sinh(a) * std::sinh(b) * std::cos(m0.theta - m1.theta);
    const double expanded = (1.0 + std::sqrt(inner) / std::sqrt(2.0)) /
                            std::sqrt((1.0 + std::cosh(a)) * (1.0 + std::cosh(b)));
    CHECK(mode_fidelity(m0, m1, b0, b1) == doctest::Approx(expanded).epsilon(1e-12));
  }
}

TEST_CASE("thermal fidelity of identical states") {
  const auto m = xy(0.6, 0.8);
  const auto f = thermal_fidelity(ThermalState(m, 20.0), ThermalState(m, 20.0));
  CHECK(f.total == doctest::Approx(1.0).epsilon(1e-13));
  for (double v : f.per_mode) CHECK(v == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(f.max_excursion <= kUnitTolerance);
}

TEST_CASE("the critical point lowers the fidelity") {
  const double off = total(xy(1.0, 1.5), 100.0, xy(1.01, 1.51), 100.0);
  const double at = total(xy(1.0, 1.0), 100.0, xy(1.01, 1.01), 100.0);
  CHECK(off > at);
}

TEST_CASE("product of dense per-mode fidelities") {
  const auto m0 = xy(0.7, 0.9, 12);
  const auto m1 = xy(0.75, 0.95, 12);
  const auto f = thermal_fidelity(ThermalState(m0, 3.0), ThermalState(m1, 4.5));
  double product = 1.0;
  for (std::size_t k = 0; k < m0.size(); ++k) {
    const double dense = oracle::dense_thermal_fidelity(m0[k], m1[k], 3.0, 4.5);
    CHECK(f.per_mode[k] == doctest::Approx(dense).epsilon(1e-10));
    product *= dense;
  }
  CHECK(std::fabs(f.total - product) <= 1e-10);
}

TEST_CASE("ground state fidelity") {
  const auto m = xy(0.4, 0.3, 20);
  CHECK(ground_state_fidelity(m, m).total == 1.0);

  const QuasiFreeModel a({make_mode(1.0, 0.0)});
  const QuasiFreeModel b({make_mode(-1.0, 0.0)});
  CHECK(ground_state_fidelity(a, b).total == 0.0);

  // gamma = 0: eps = cos(phi) - lambda flips sign for one mode between the two fields
  const auto inside = xy_to_quasifree({0.0, 0.3, 4, Grid::Integer});   // eps = -0.3, -1.3
  const auto outside = xy_to_quasifree({0.0, -0.3, 4, Grid::Integer});  // eps = +0.3, -0.7
  CHECK(ground_state_fidelity(inside, outside).total == 0.0);
  CHECK(thermal_fidelity(ThermalState(inside, kInfiniteBeta), ThermalState(outside, kInfiniteBeta))
            .total == 0.0);

  const auto near = xy_to_quasifree({0.0, 0.35, 4, Grid::Integer});
  CHECK(ground_state_fidelity(inside, near).total == 1.0);

  CHECK(ground_mode_fidelity(polar(1.0, 0.2), polar(2.0, 1.4)) ==
        doctest::Approx(std::cos(0.6)).epsilon(1e-15));
}

TEST_CASE("mismatched inputs") {
  const auto a = xy(1.0, 0.5, 4);
  const auto b = xy(1.0, 0.5, 6);
  CHECK_THROWS_AS(thermal_fidelity(ThermalState(a, 1.0), ThermalState(b, 1.0)), DimensionMismatch);
  CHECK_THROWS_AS(ground_state_fidelity(a, b), DimensionMismatch);
  CHECK_THROWS_AS(thermal_fidelity(ThermalState(a, 1.0), ThermalState(a, kInfiniteBeta)),
                  DomainError);
}

TEST_CASE("commuting spectra") {
  const std::vector<double> s{0.0, 0.4, 1.1, 2.5};
  CHECK(fidelity_commuting(s, s, 2.0, 2.0) == doctest::Approx(1.0).epsilon(1e-15));

  const auto z = [&](double beta) {
    double sum = 0.0;
    for (double e : s) sum += std::exp(-beta * e);
    return sum;
  };
  CHECK(fidelity_commuting(s, s, 0.5, 3.0) ==
        doctest::Approx(z(1.75) / std::sqrt(z(0.5) * z(3.0))).epsilon(1e-14));

  const std::vector<double> s0{0.0, 1.0}, s1{0.0, 2.0};
  CHECK(fidelity_commuting(s0, s1, 1.0, 1.0) ==
        doctest::Approx(0.98149184766322901694785968).epsilon(1e-14));

  // huge energies do not overflow
  const std::vector<double> big{0.0, 1e3, 5e3};
  CHECK(std::isfinite(fidelity_commuting(big, big, 1e4, 2e4)));
  CHECK_THROWS_AS(fidelity_commuting(s0, s, 1.0, 1.0), DimensionMismatch);
}

TEST_CASE("commuting special case of the pair formula") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> lam(0.0, 2.0), ang(-pi, pi), beta(0.1, 6.0);
  for (int trial = 0; trial < 40; ++trial) {
    std::vector<MomentumMode> v0, v1;
    for (int k = 0; k < 3; ++k) {
      const double theta = ang(rng);
      v0.push_back(polar(lam(rng), theta));
      v1.push_back(polar(lam(rng), theta));
    }
    const QuasiFreeModel m0(v0), m1(v1);
    const double b0 = beta(rng), b1 = beta(rng);
    const auto l0 = enumerate_levels(m0), l1 = enumerate_levels(m1);
    const double want = fidelity_commuting(l0, l1, b0, b1);
    CHECK(total(m0, b0, m1, b1) == doctest::Approx(want).epsilon(1e-12));
  }
}

TEST_CASE("partition function identity for identical models") {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> beta(0.01, 50.0);
  const auto m = xy(0.8, 1.2, 30);
  for (int i = 0; i < 50; ++i) {
    const double b0 = beta(rng), b1 = beta(rng);
    double log_want = 0.0;
    for (const auto& mode : m.modes()) {
      log_want += log_mode_partition(mode.lambda, 0.5 * (b0 + b1)) -
                  0.5 * (log_mode_partition(mode.lambda, b0) + log_mode_partition(mode.lambda, b1));
    }
    CHECK(total(m, b0, m, b1) == doctest::Approx(std::exp(log_want)).epsilon(1e-12));
  }
}

TEST_CASE("diagonal fermions") {
  const std::vector<double> e{0.5, -1.0, 2.0};
  CHECK(fidelity_diagonal_fermions(e, e, 3.0, 3.0) == doctest::Approx(1.0).epsilon(1e-15));

  const std::vector<double> a{1.0}, b{-1.0};
  CHECK(fidelity_diagonal_fermions(a, b, 2.0, 2.0) ==
        doctest::Approx(0.64805427366388539957497735).epsilon(1e-14));

  const std::vector<double> flip0{0.5, -1.0, 2.0}, flip1{0.5, 1.0, 2.0};
  CHECK(fidelity_diagonal_fermions(flip0, flip1, kInfiniteBeta, kInfiniteBeta) == 0.0);
  const std::vector<double> same_sign{0.7, -3.0, 0.1};
  CHECK(fidelity_diagonal_fermions(flip0, same_sign, kInfiniteBeta, kInfiniteBeta) == 1.0);

  // the finite-beta values approach the limit
  CHECK(fidelity_diagonal_fermions(flip0, same_sign, 200.0, 200.0) ==
        doctest::Approx(1.0).epsilon(1e-6));
  CHECK(fidelity_diagonal_fermions(flip0, flip1, 200.0, 200.0) < 1e-40);

  CHECK_THROWS_AS(fidelity_diagonal_fermions(a, b, 1.0, kInfiniteBeta), DomainError);
  CHECK_THROWS_AS(fidelity_diagonal_fermions(a, e, 1.0, 1.0), DimensionMismatch);
}

TEST_CASE("bures distance") {
  CHECK(bures_distance(1.0) == 0.0);
  CHECK(bures_distance(0.0) == doctest::Approx(std::sqrt(2.0)).epsilon(1e-16));
  CHECK(bures_distance(0.5) == doctest::Approx(1.0).epsilon(1e-16));
  CHECK(bures_distance(1.0 + 1e-13) == 0.0);
  CHECK_THROWS_AS(bures_distance(1.1), DomainError);
  CHECK_THROWS_AS(bures_distance(-0.1), DomainError);
  CHECK_THROWS_AS(bures_distance(std::nan("")), DomainError);
}

TEST_CASE("symmetry and range") {
  std::mt19937_64 rng(19);
  std::uniform_real_distribution<double> g(0.0, 1.5), l(0.0, 2.0), beta(0.01, 100.0);
  for (int i = 0; i < 100; ++i) {
    const auto m0 = xy(g(rng), l(rng), 40);
    const auto m1 = xy(g(rng), l(rng), 40);
    const double b0 = beta(rng), b1 = beta(rng);
    const auto f01 = thermal_fidelity(ThermalState(m0, b0), ThermalState(m1, b1));
    const auto f10 = thermal_fidelity(ThermalState(m1, b1), ThermalState(m0, b0));
    CHECK(f01.total == doctest::Approx(f10.total).epsilon(1e-12));
    CHECK(f01.total >= 0.0);
    CHECK(f01.total <= 1.0 + kUnitTolerance);
    CHECK(f01.max_excursion <= kUnitTolerance);
    for (double v : f01.per_mode) {
      CHECK(v >= 0.0);
      CHECK(v <= 1.0);
    }
  }
}

TEST_CASE("no overflow at large beta and energy") {
  for (double beta : {1e2, 1e3, 1e4}) {
    for (double lam : {1e-3, 1.0, 1e2}) {
      const double f = mode_fidelity(polar(lam, 0.3), polar(lam * 1.01, 0.31), beta, beta * 0.9);
      CHECK(std::isfinite(f));
      CHECK(f >= 0.0);
      CHECK(f <= 1.0);
    }
  }
  const auto f = thermal_fidelity(ThermalState(xy(1.0, 1.0), 1e4), ThermalState(xy(1.01, 1.01), 1e4));
  CHECK(std::isfinite(f.total));
  CHECK(std::isfinite(f.log_total));
}

TEST_CASE("zero-temperature convergence") {
  // gapped chain, min Lambda = 0.5
  const auto m0 = xy(1.0, 1.5, 20);
  const auto m1 = xy(1.0, 1.52, 20);
  double lambda_min = 1e300;
  for (const auto* m : {&m0, &m1}) {
    for (double v : lambda_spectrum(*m)) lambda_min = std::min(lambda_min, v);
  }
  REQUIRE(lambda_min > 0.49);
  const double ground = ground_state_fidelity(m0, m1).total;
  double previous = 1e300;
  for (double beta : {10.0, 20.0, 40.0, 80.0, 160.0}) {
    const double gap = std::fabs(total(m0, beta, m1, beta) - ground);
    CHECK(gap <= previous);
    if (beta * lambda_min >= 40.0) CHECK(gap < 1e-6);
    previous = gap;
  }
}

TEST_CASE("pairwise sum is order-fixed") {
  std::vector<double> v;
  for (int i = 0; i < 1000; ++i) v.push_back(1.0 / (i + 1));
  const double s = detail::pairwise_sum(v);
  CHECK(s == detail::pairwise_sum(v));
  CHECK(s == doctest::Approx(7.485470860550345).epsilon(1e-14));
  CHECK(detail::pairwise_sum({}) == 0.0);
}
