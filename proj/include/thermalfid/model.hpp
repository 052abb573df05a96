#pragma once

#include <cstddef>
#include <limits>
#include <span>
#include <vector>

namespace thermalfid {

/// One (k, -k) momentum pair of a quasi-free fermionic Hamiltonian,
///   H_k = epsilon (n_k + n_-k) + delta (-i c_k^+ c_-k^+ + h.c.).
/// `lambda` is the quasiparticle energy sqrt(epsilon^2 + delta^2) and `theta`
/// the Bogoliubov angle, the polar angle of (epsilon, delta) in (-pi, pi].
struct MomentumMode {
  double epsilon = 0.0;
  double delta = 0.0;
  double lambda = 0.0;
  double theta = 0.0;

  friend bool operator==(const MomentumMode&, const MomentumMode&) = default;
};

/// Builds a mode from its kinetic and pairing amplitudes. Throws DomainError
/// on non-finite input. theta is 0 for the degenerate epsilon = delta = 0 mode.
MomentumMode make_mode(double epsilon, double delta);

/// H = sum_k H_k over an ordered, non-empty list of momentum pairs. Two models
/// are compared index-wise, so they must have the same mode count.
class QuasiFreeModel {
 public:
  explicit QuasiFreeModel(std::vector<MomentumMode> modes);

  std::span<const MomentumMode> modes() const noexcept { return modes_; }
  std::size_t size() const noexcept { return modes_.size(); }
  const MomentumMode& operator[](std::size_t i) const { return modes_[i]; }

  bool comparable_with(const QuasiFreeModel& other) const noexcept {
    return size() == other.size();
  }

  friend bool operator==(const QuasiFreeModel&, const QuasiFreeModel&) = default;

 private:
  std::vector<MomentumMode> modes_;
};

enum class Grid {
  Integer,      // phi_j = 2 pi j / N,         j = 1..N/2
  HalfInteger,  // phi_j = 2 pi (j - 1/2) / N, j = 1..N/2
};

/// XY chain sum_i [(1+g)/2 sx sx + (1-g)/2 sy sy + lambda sz] on N sites.
struct XYParams {
  double gamma = 1.0;
  double lambda = 0.0;
  int n_sites = 2;
  Grid grid = Grid::Integer;
};

void validate(const XYParams& p);

/// Fermionic picture of the XY chain: N/2 modes with
/// epsilon_j = cos(phi_j) - lambda, delta_j = gamma sin(phi_j).
QuasiFreeModel xy_to_quasifree(const XYParams& p);

std::vector<double> lambda_spectrum(const QuasiFreeModel& m);

inline constexpr double kInfiniteBeta = std::numeric_limits<double>::infinity();

/// Gibbs state Z^-1 exp(-beta H). beta = kInfiniteBeta denotes the ground state.
class ThermalState {
 public:
  ThermalState(QuasiFreeModel model, double beta);

  const QuasiFreeModel& model() const noexcept { return model_; }
  double beta() const noexcept { return beta_; }
  bool is_ground_state() const noexcept { return beta_ == kInfiniteBeta; }

 private:
  QuasiFreeModel model_;
  double beta_;
};

/// Throws DomainError unless beta > 0 (finite) or beta == kInfiniteBeta.
void validate_beta(double beta);

/// Throws DomainError unless beta is finite and > 0.
void validate_finite_beta(double beta);

}  // namespace thermalfid
