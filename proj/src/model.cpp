#include "thermalfid/model.hpp"

#include <cmath>
#include <numbers>
#include <string>
#include <utility>

#include "thermalfid/error.hpp"

namespace thermalfid {

namespace {

// (cos, sin) of 2 pi num / den. Reduces to the first octant in integer
// arithmetic so multiples of pi/4 come out exact and mirrored phases give
// mirrored values bit for bit.
std::pair<double, double> unit_circle(long long num, long long den) {
  const long long full = 4 * den;
  long long t = (4 * num) % full;
  if (t < 0) t += full;
  const long long quadrant = t / den;
  const long long rem = t % den;

  double c = 0.0;
  double s = 0.0;
  const double quarter = std::numbers::pi / 2.0;
  if (2 * rem > den) {
    const double y = quarter * static_cast<double>(den - rem) / static_cast<double>(den);
    c = std::sin(y);
    s = std::cos(y);
  } else {
    const double x = quarter * static_cast<double>(rem) / static_cast<double>(den);
    c = std::cos(x);
    s = std::sin(x);
  }
  switch (quadrant) {
    case 0: return {c, s};
    case 1: return {-s, c};
    case 2: return {-c, -s};
    default: return {s, -c};
  }
}

}  // namespace

MomentumMode make_mode(double epsilon, double delta) {
  if (!std::isfinite(epsilon) || !std::isfinite(delta)) {
    throw DomainError("make_mode: epsilon and delta must be finite");
  }
  MomentumMode m;
  // + 0.0 drops signed zeros, so theta never lands on -pi
  m.epsilon = epsilon + 0.0;
  m.delta = delta + 0.0;
  m.lambda = std::hypot(epsilon, delta);
  if (m.lambda > 0.0) {
    m.theta = std::atan2(m.delta, m.epsilon);
  }
  return m;
}

QuasiFreeModel::QuasiFreeModel(std::vector<MomentumMode> modes) : modes_(std::move(modes)) {
  if (modes_.empty()) throw DomainError("QuasiFreeModel: at least one mode is required");
}

void validate(const XYParams& p) {
  if (p.n_sites < 2 || p.n_sites % 2 != 0) {
    throw DomainError("XYParams: n_sites must be even and >= 2, got " + std::to_string(p.n_sites));
  }
  if (!std::isfinite(p.gamma) || !std::isfinite(p.lambda)) {
    throw DomainError("XYParams: gamma and lambda must be finite");
  }
}

QuasiFreeModel xy_to_quasifree(const XYParams& p) {
  validate(p);
  const int pairs = p.n_sites / 2;
  std::vector<MomentumMode> modes;
  modes.reserve(static_cast<std::size_t>(pairs));
  for (int j = 1; j <= pairs; ++j) {
    const auto [c, s] = p.grid == Grid::Integer ? unit_circle(j, p.n_sites)
                                                : unit_circle(2LL * j - 1, 2LL * p.n_sites);
    modes.push_back(make_mode(c - p.lambda, p.gamma * s));
  }
  return QuasiFreeModel(std::move(modes));
}

std::vector<double> lambda_spectrum(const QuasiFreeModel& m) {
  std::vector<double> out;
  out.reserve(m.size());
  for (const auto& mode : m.modes()) out.push_back(mode.lambda);
  return out;
}

void validate_beta(double beta) {
  if (beta == kInfiniteBeta) return;
  validate_finite_beta(beta);
}

void validate_finite_beta(double beta) {
  if (!(beta > 0.0) || !std::isfinite(beta)) {
    throw DomainError("inverse temperature must be finite and > 0, got " + std::to_string(beta));
  }
}

ThermalState::ThermalState(QuasiFreeModel model, double beta)
    : model_(std::move(model)), beta_(beta) {
  validate_beta(beta);
}

}  // namespace thermalfid
