#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "thermalfid/model.hpp"

namespace thermalfid {

/// Value represented as mantissa * exp(log_scale); used where the linear form
/// overflows (cosh(2 beta Lambda) at beta = 100 already does).
struct ScaledValue {
  double mantissa = 0.0;
  double log_scale = 0.0;

  double value() const;  // may be +inf
  double log() const;
};

/// Per-mode factors and their product. Factors are clamped to 1; the amount
/// by which rounding pushed a factor above 1 is recorded in `max_excursion`.
struct FidelityBreakdown {
  std::vector<double> per_mode;
  double log_total = 0.0;
  double total = 1.0;
  std::size_t clamped = 0;
  double max_excursion = 0.0;
};

inline constexpr double kUnitTolerance = 1e-12;

/// Z_k = 2 + 2 cosh(beta Lambda), the partition function of one mode pair.
/// Throws NumericalError when the linear form overflows; use log_mode_partition.
double mode_partition(double lambda, double beta);
double log_mode_partition(double lambda, double beta);

/// Tr[rho_k^0(beta0) rho_k^1(beta1)] over the even sector, with
/// rho_k(beta) = exp(-beta Lambda_k J_k).
ScaledValue mode_trace_product(const MomentumMode& m0, const MomentumMode& m1, double beta0,
                               double beta1);

/// Uhlmann fidelity between the thermal states of one mode pair,
/// (2 + sqrt(T + 2)) / sqrt(Z0 Z1), clamped to [0, 1].
double mode_fidelity(const MomentumMode& m0, const MomentumMode& m1, double beta0, double beta1);

/// Zero-temperature per-mode factor |cos((theta0 - theta1)/2)|.
double ground_mode_fidelity(const MomentumMode& m0, const MomentumMode& m1);

/// Product over index-paired modes. Both betas finite, or both infinite
/// (ground-state limit). Throws DimensionMismatch for incomparable models.
FidelityBreakdown thermal_fidelity(const ThermalState& s0, const ThermalState& s1);

FidelityBreakdown ground_state_fidelity(const QuasiFreeModel& m0, const QuasiFreeModel& m1);

/// Fidelity of thermal states whose Hamiltonians share an eigenbasis; the
/// spectra are index-aligned eigenvalues of H0 and H1.
double fidelity_commuting(std::span<const double> spectrum0, std::span<const double> spectrum1,
                          double beta0, double beta1);

/// Diagonal fermions H = sum_k eps_k n_k. Betas both finite or both infinite.
double fidelity_diagonal_fermions(std::span<const double> eps0, std::span<const double> eps1,
                                  double beta0, double beta1);

/// sqrt(2 (1 - f)); f must lie in [0, 1 + kUnitTolerance].
double bures_distance(double f);

namespace detail {

/// mode_fidelity before clamping.
double raw_mode_fidelity(const MomentumMode& m0, const MomentumMode& m1, double beta0,
                         double beta1);

/// Clamps factors to [0, 1], accumulates the log in a fixed pairwise order.
FidelityBreakdown assemble(std::vector<double> per_mode);

/// Sum in a fixed pairwise tree so results do not depend on evaluation order.
double pairwise_sum(std::span<const double> values);

}  // namespace detail

}  // namespace thermalfid
