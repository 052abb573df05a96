#include "thermalfid/loschmidt.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "thermalfid/error.hpp"

namespace thermalfid {

namespace {

void validate_time(double t) {
  if (!(t >= 0.0) || !std::isfinite(t)) {
    throw DomainError("echo time must be finite and >= 0, got " + std::to_string(t));
  }
}

void require_comparable(const QuasiFreeModel& m0, const QuasiFreeModel& m1) {
  if (!m0.comparable_with(m1)) {
    throw DimensionMismatch("echo: models have " + std::to_string(m0.size()) + " and " +
                            std::to_string(m1.size()) + " modes");
  }
}

// Time-independent pieces of one mode's echo factor. With x = beta Lambda0,
// A = theta0 - theta1, B = Lambda1 t and S = sin^2 A sin^2 B the factor is
//   [1 + cosh x sqrt(1 - S tanh^2 x)] / (1 + cosh x),
// evaluated after dividing through by cosh x.
struct EchoTerms {
  double sech = 0.0;
  double sech2 = 0.0;
  double tanh2 = 1.0;
  double sin2_angle = 0.0;
  double cos2_angle = 1.0;
  double lambda1 = 0.0;

  EchoTerms(const MomentumMode& m0, const MomentumMode& m1, double beta) : lambda1(m1.lambda) {
    if (beta != kInfiniteBeta) {
      const double x = beta * m0.lambda;
      const double c = std::cosh(x);
      sech = 1.0 / c;
      sech2 = sech * sech;
      const double th = std::tanh(x);
      tanh2 = th * th;
    }
    const double a = m0.theta - m1.theta;
    const double s = std::sin(a);
    const double c = std::cos(a);
    sin2_angle = s * s;
    cos2_angle = c * c;
  }

  double factor(double t) const {
    const double phase = lambda1 * t;
    const double sb = std::sin(phase);
    const double strength = sin2_angle * sb * sb;
    double radicand;
    if (strength <= 0.5) {
      radicand = 1.0 - strength * tanh2;
    } else {
      const double cb = std::cos(phase);
      radicand = cos2_angle + sin2_angle * cb * cb + strength * sech2;
    }
    return (sech + std::sqrt(radicand)) / (sech + 1.0);
  }
};

}  // namespace

void validate(const EchoQuery& q) {
  require_comparable(q.model0, q.model1);
  validate_beta(q.beta);
  validate_time(q.time);
}

double mode_echo(const MomentumMode& m0, const MomentumMode& m1, double beta, double t) {
  validate_finite_beta(beta);
  validate_time(t);
  return std::clamp(EchoTerms(m0, m1, beta).factor(t), 0.0, 1.0);
}

double ground_mode_echo(const MomentumMode& m0, const MomentumMode& m1, double t) {
  validate_time(t);
  return std::clamp(EchoTerms(m0, m1, kInfiniteBeta).factor(t), 0.0, 1.0);
}

FidelityBreakdown thermal_echo(const EchoQuery& q) {
  validate(q);
  std::vector<double> per_mode;
  per_mode.reserve(q.model0.size());
  for (std::size_t i = 0; i < q.model0.size(); ++i) {
    per_mode.push_back(EchoTerms(q.model0[i], q.model1[i], q.beta).factor(q.time));
  }
  return detail::assemble(std::move(per_mode));
}

FidelityBreakdown ground_state_echo(const QuasiFreeModel& m0, const QuasiFreeModel& m1, double t) {
  return thermal_echo(EchoQuery{m0, m1, kInfiniteBeta, t});
}

std::vector<double> echo_time_series(const QuasiFreeModel& m0, const QuasiFreeModel& m1,
                                     double beta, std::span<const double> times) {
  require_comparable(m0, m1);
  validate_beta(beta);
  for (double t : times) validate_time(t);

  std::vector<EchoTerms> terms;
  terms.reserve(m0.size());
  for (std::size_t i = 0; i < m0.size(); ++i) terms.emplace_back(m0[i], m1[i], beta);

  std::vector<double> out;
  out.reserve(times.size());
  std::vector<double> per_mode(terms.size());
  for (double t : times) {
    for (std::size_t i = 0; i < terms.size(); ++i) per_mode[i] = terms[i].factor(t);
    out.push_back(detail::assemble(per_mode).total);
  }
  return out;
}

}  // namespace thermalfid
