#include "thermalfid/fidelity.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>
#include <utility>

#include "thermalfid/error.hpp"

namespace thermalfid {

namespace {

void require_same_length(std::size_t a, std::size_t b, const char* what) {
  if (a != b) {
    throw DimensionMismatch(std::string(what) + ": lengths differ (" + std::to_string(a) +
                            " vs " + std::to_string(b) + ")");
  }
}

// log(1 + e^x) without overflow.
double softplus(double x) {
  if (x > 0.0) return x + std::log1p(std::exp(-x));
  return std::log1p(std::exp(x));
}

double log_sum_exp(std::span<const double> xs) {
  const double top = *std::max_element(xs.begin(), xs.end());
  if (top == -std::numeric_limits<double>::infinity()) return top;
  std::vector<double> shifted;
  shifted.reserve(xs.size());
  for (double x : xs) shifted.push_back(std::exp(x - top));
  return top + std::log(detail::pairwise_sum(shifted));
}

double cos_half_squared(double dtheta) {
  const double c = std::cos(0.5 * dtheta);
  return c * c;
}

}  // namespace

double ScaledValue::value() const { return mantissa * std::exp(log_scale); }

double ScaledValue::log() const { return std::log(mantissa) + log_scale; }

double mode_partition(double lambda, double beta) {
  validate_finite_beta(beta);
  if (!(lambda >= 0.0)) throw DomainError("mode_partition: lambda must be >= 0");
  const double z = 2.0 + 2.0 * std::cosh(beta * lambda);
  if (!std::isfinite(z)) {
    throw NumericalError("mode_partition: 2 + 2cosh(beta*lambda) overflows, use the log form");
  }
  return z;
}

double log_mode_partition(double lambda, double beta) {
  validate_finite_beta(beta);
  if (!(lambda >= 0.0)) throw DomainError("log_mode_partition: lambda must be >= 0");
  // 2 + 2cosh(a) = e^a (1 + e^-a)^2
  const double a = beta * lambda;
  return a + 2.0 * std::log1p(std::exp(-a));
}

ScaledValue mode_trace_product(const MomentumMode& m0, const MomentumMode& m1, double beta0,
                               double beta1) {
  validate_finite_beta(beta0);
  validate_finite_beta(beta1);
  const double a = beta0 * m0.lambda;
  const double b = beta1 * m1.lambda;
  const double ea = std::exp(-2.0 * a);
  const double eb = std::exp(-2.0 * b);
  // 2[cosh a cosh b + sinh a sinh b cos dtheta]
  //   = e^{a+b} [(ea + eb) + (1 - ea)(1 - eb) cos^2(dtheta/2)]
  // with every term nonnegative.
  const double mantissa =
      (ea + eb) + std::expm1(-2.0 * a) * std::expm1(-2.0 * b) *
                      cos_half_squared(m0.theta - m1.theta);
  return {mantissa, a + b};
}

namespace detail {

double raw_mode_fidelity(const MomentumMode& m0, const MomentumMode& m1, double beta0,
                         double beta1) {
  const ScaledValue trace = mode_trace_product(m0, m1, beta0, beta1);
  const double a = beta0 * m0.lambda;
  const double b = beta1 * m1.lambda;
  // (2 + sqrt(T + 2)) / sqrt(Z0 Z1) with numerator and denominator scaled by e^{-(a+b)/2}.
  const double half = std::exp(-0.5 * trace.log_scale);
  const double numerator = 2.0 * half + std::sqrt(trace.mantissa + 2.0 * half * half);
  const double denominator = (1.0 + std::exp(-a)) * (1.0 + std::exp(-b));
  return numerator / denominator;
}

double pairwise_sum(std::span<const double> values) {
  if (values.empty()) return 0.0;
  if (values.size() == 1) return values[0];
  if (values.size() <= 8) {
    double s = 0.0;
    for (double v : values) s += v;
    return s;
  }
  const std::size_t half = values.size() / 2;
  return pairwise_sum(values.first(half)) + pairwise_sum(values.subspan(half));
}

FidelityBreakdown assemble(std::vector<double> per_mode) {
  FidelityBreakdown out;
  std::vector<double> logs;
  logs.reserve(per_mode.size());
  for (double& f : per_mode) {
    if (f > 1.0) {
      out.max_excursion = std::max(out.max_excursion, f - 1.0);
      ++out.clamped;
      f = 1.0;
    }
    if (f < 0.0) f = 0.0;
    logs.push_back(std::log(f));
  }
  out.per_mode = std::move(per_mode);
  out.log_total = pairwise_sum(logs);
  out.total = std::exp(out.log_total);
  return out;
}

}  // namespace detail

double mode_fidelity(const MomentumMode& m0, const MomentumMode& m1, double beta0, double beta1) {
  return std::clamp(detail::raw_mode_fidelity(m0, m1, beta0, beta1), 0.0, 1.0);
}

double ground_mode_fidelity(const MomentumMode& m0, const MomentumMode& m1) {
  // |cos(dtheta/2)| = |u0 + u1| / (|u0| + |u1|) for the unit vectors along
  // (eps, delta); antiparallel modes give exactly 0, equal ones exactly 1.
  const auto unit = [](const MomentumMode& m) -> std::pair<double, double> {
    if (m.lambda == 0.0) return {1.0, 0.0};
    return {m.epsilon / m.lambda, m.delta / m.lambda};
  };
  const auto [x0, y0] = unit(m0);
  const auto [x1, y1] = unit(m1);
  return std::min(1.0, std::hypot(x0 + x1, y0 + y1) / (std::hypot(x0, y0) + std::hypot(x1, y1)));
}

FidelityBreakdown ground_state_fidelity(const QuasiFreeModel& m0, const QuasiFreeModel& m1) {
  require_same_length(m0.size(), m1.size(), "ground_state_fidelity");
  std::vector<double> per_mode;
  per_mode.reserve(m0.size());
  for (std::size_t i = 0; i < m0.size(); ++i) per_mode.push_back(ground_mode_fidelity(m0[i], m1[i]));
  return detail::assemble(std::move(per_mode));
}

FidelityBreakdown thermal_fidelity(const ThermalState& s0, const ThermalState& s1) {
  const auto& m0 = s0.model();
  const auto& m1 = s1.model();
  require_same_length(m0.size(), m1.size(), "thermal_fidelity");
  if (s0.is_ground_state() != s1.is_ground_state()) {
    throw DomainError("thermal_fidelity: betas must be both finite or both infinite");
  }
  if (s0.is_ground_state()) return ground_state_fidelity(m0, m1);

  std::vector<double> per_mode;
  per_mode.reserve(m0.size());
  for (std::size_t i = 0; i < m0.size(); ++i) {
    per_mode.push_back(detail::raw_mode_fidelity(m0[i], m1[i], s0.beta(), s1.beta()));
  }
  return detail::assemble(std::move(per_mode));
}

double fidelity_commuting(std::span<const double> spectrum0, std::span<const double> spectrum1,
                          double beta0, double beta1) {
  require_same_length(spectrum0.size(), spectrum1.size(), "fidelity_commuting");
  if (spectrum0.empty()) throw DomainError("fidelity_commuting: empty spectrum");
  validate_finite_beta(beta0);
  validate_finite_beta(beta1);

  std::vector<double> mixed, w0, w1;
  for (std::size_t n = 0; n < spectrum0.size(); ++n) {
    mixed.push_back(-0.5 * (beta0 * spectrum0[n] + beta1 * spectrum1[n]));
    w0.push_back(-beta0 * spectrum0[n]);
    w1.push_back(-beta1 * spectrum1[n]);
  }
  const double log_f = log_sum_exp(mixed) - 0.5 * (log_sum_exp(w0) + log_sum_exp(w1));
  return std::min(1.0, std::exp(log_f));
}

double fidelity_diagonal_fermions(std::span<const double> eps0, std::span<const double> eps1,
                                  double beta0, double beta1) {
  require_same_length(eps0.size(), eps1.size(), "fidelity_diagonal_fermions");
  validate_beta(beta0);
  validate_beta(beta1);
  const bool ground0 = beta0 == kInfiniteBeta;
  const bool ground1 = beta1 == kInfiniteBeta;
  if (ground0 != ground1) {
    throw DomainError("fidelity_diagonal_fermions: betas must be both finite or both infinite");
  }

  std::vector<double> logs;
  logs.reserve(eps0.size());
  for (std::size_t k = 0; k < eps0.size(); ++k) {
    const double e0 = eps0[k];
    const double e1 = eps1[k];
    if (ground0) {
      // softplus(beta u) = beta max(u, 0) + [u == 0] log 2 + o(1) as beta -> inf.
      const double u = -0.5 * (e0 + e1);
      const double rate = std::max(u, 0.0) - 0.5 * (std::max(-e0, 0.0) + std::max(-e1, 0.0));
      if (rate < 0.0) return 0.0;
      const double ln2 = std::numbers::ln2;
      logs.push_back((u == 0.0 ? ln2 : 0.0) - 0.5 * ((e0 == 0.0 ? ln2 : 0.0) + (e1 == 0.0 ? ln2 : 0.0)));
    } else {
      logs.push_back(softplus(-0.5 * (beta0 * e0 + beta1 * e1)) -
                     0.5 * (softplus(-beta0 * e0) + softplus(-beta1 * e1)));
    }
  }
  return std::min(1.0, std::exp(detail::pairwise_sum(logs)));
}

double bures_distance(double f) {
  if (!(f >= 0.0 && f <= 1.0 + kUnitTolerance)) {
    throw DomainError("bures_distance: fidelity " + std::to_string(f) + " outside [0, 1]");
  }
  return std::sqrt(2.0 * (1.0 - std::min(f, 1.0)));
}

}  // namespace thermalfid
