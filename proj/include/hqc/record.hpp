#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "hqc/config.hpp"

namespace hqc {

/// One output row. Row k describes the state at t_k together with the
/// step that leaves t_k: its noise increment, record sample and
/// pre-normalization norm. The terminal row has dW = 0, x_bar = <x> and
/// prenorm = 1.
struct TrajectoryRow {
    double t = 0.0;
    double X = 0.0;
    double P = 0.0;
    double x_expect = 0.0;
    double p_expect = 0.0;
    double x_variance = 0.0;
    double x_bar = 0.0;
    double prenorm = 1.0;
    double dW = 0.0;

    bool operator==(const TrajectoryRow&) const = default;
};

struct TrajectoryRecord {
    std::vector<TrajectoryRow> rows;

    std::string config_hash;
    std::uint64_t seed = 0;
    std::uint64_t stream_index = 0;
    Convention convention = Convention::ChainConsistent;
    Mode mode = Mode::Hybrid;

    std::uint64_t steps = 0;
    /// Counter values consumed from the trajectory's noise stream.
    std::uint64_t noise_position = 0;
    std::uint64_t gaussian_draws = 0;
    /// Steps where -lambda * x_bar and -lambda <x> - hbar sigma dW/dt were
    /// not bitwise equal, and the largest gap in units in the last place.
    std::uint64_t force_identity_mismatches = 0;
    double force_identity_max_ulps = 0.0;
    /// Chain mode: sum over steps of log p(x_bar_k | history).
    double log_path_weight = 0.0;

    /// State at t_final. Not serialized.
    std::optional<QuantumState> final_state;
};

/// Called with (row index, t, state) for every output row a trajectory
/// driver emits, the terminal row included.
using StateObserver = std::function<void(std::size_t, double, const QuantumState&)>;

}  // namespace hqc
