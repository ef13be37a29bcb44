#pragma once

#include <cstdint>

#include "hqc/model.hpp"
#include "hqc/record.hpp"

namespace hqc {

/// One hybrid trajectory. Each step, in order:
///   1. draw dW from the stream keyed by (master_seed, stream_index);
///   2. take <x> from the current state;
///   3. form the record x_bar (x_bar = <x> when lambda = 0);
///   4. advance the quantum state with the current X;
///   5. advance the particle with -V'(X) + hybrid_force(...) and the same dW.
/// Errors keep their type and gain the step index in the message.
TrajectoryRecord run_trajectory(const HybridModel& model, std::uint64_t master_seed, std::uint64_t stream_index = 0,
                                const StateObserver& observer = {});

/// Runs the trajectory type selected by `model.config().mode`.
TrajectoryRecord simulate(const HybridModel& model, std::uint64_t master_seed, std::uint64_t stream_index = 0,
                          const StateObserver& observer = {});

/// sigma = sqrt(2 M gamma kBT) / hbar. InvalidParameter unless every
/// argument is positive.
double thermal_sigma(double M, double gamma, double kBT, double hbar);

/// Distance between two doubles in units in the last place.
double ulp_distance(double a, double b);

}  // namespace hqc
