#pragma once

#include <span>
#include <vector>

#include "thermalfid/fidelity.hpp"
#include "thermalfid/model.hpp"

namespace thermalfid {

/// Finite-temperature Loschmidt echo: the state Z0^-1 exp(-beta H0) is
/// compared with its image under U1(t)^+ U0(t). `beta` may be kInfiniteBeta.
struct EchoQuery {
  QuasiFreeModel model0;  // preparation Hamiltonian
  QuasiFreeModel model1;  // evolution Hamiltonian
  double beta = 1.0;
  double time = 0.0;
};

void validate(const EchoQuery& q);

/// Per-mode echo factor in [0, 1].
double mode_echo(const MomentumMode& m0, const MomentumMode& m1, double beta, double t);

double ground_mode_echo(const MomentumMode& m0, const MomentumMode& m1, double t);

FidelityBreakdown thermal_echo(const EchoQuery& q);

/// prod_k sqrt(1 - sin^2(theta0 - theta1) sin^2(Lambda1 t)).
FidelityBreakdown ground_state_echo(const QuasiFreeModel& m0, const QuasiFreeModel& m1, double t);

/// Total echo at each time; per-mode constants are computed once.
std::vector<double> echo_time_series(const QuasiFreeModel& m0, const QuasiFreeModel& m1,
                                     double beta, std::span<const double> times);

}  // namespace thermalfid
