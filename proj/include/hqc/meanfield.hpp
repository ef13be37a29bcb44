#pragma once

#include <cstdint>
#include <vector>

#include "hqc/classical.hpp"
#include "hqc/model.hpp"
#include "hqc/propagation.hpp"
#include "hqc/record.hpp"

namespace hqc {

struct MeanFieldState {
    QuantumState psi;
    ClassicalState classical;
};

/// -V'(X) - lambda <x>: the force the particle feels in the mean-field model.
double meanfield_force(const PotentialSpec& V, double lambda, double X, double x_expect);

/// One deterministic step of the mean-field equations.
///
/// Kick-drift-kick on the particle, with the quantum state advanced by the
/// exact exponential of H0 + lambda X x evaluated at the midpoint of the
/// drift. Second order overall; with lambda = 0 the quantum step is exact.
MeanFieldState meanfield_step(const MeanFieldState& state, const HybridModel& model, ExactPropagator& unitary);

/// Full mean-field run, rows as in run_trajectory (x_bar = <x>, dW = 0).
TrajectoryRecord run_meanfield(const HybridModel& model, std::uint64_t master_seed = 0,
                               std::uint64_t stream_index = 0, const StateObserver& observer = {});

/// First moments (X, P, <x>, <p>) of the linear mean-field system.
struct EhrenfestPoint {
    double t;
    double X;
    double P;
    double x;
    double p;
};

/// RK4 solution of
///   dX/dt = P/M,  dP/dt = -V'(X) - lambda <x>,
///   d<x>/dt = <p>/m,  d<p>/dt = -m omega^2 <x> - lambda X
/// sampled at `t_grid` (ascending, starting at or after 0) with internal
/// step `dt` / 10. UnsupportedPotential unless V is free, harmonic or a
/// polynomial of degree at most 2.
std::vector<EhrenfestPoint> ehrenfest_oracle(const HybridConfig& config, const EhrenfestPoint& initial,
                                             const std::vector<double>& t_grid, double dt);

}  // namespace hqc
