#pragma once

// Helpers shared by the three trajectory drivers. Not installed.

#include <cstddef>
#include <string>

#include "hqc/classical.hpp"
#include "hqc/errors.hpp"
#include "hqc/model.hpp"
#include "hqc/record.hpp"

namespace hqc::detail {

inline TrajectoryRecord start_record(const HybridModel& model, std::uint64_t seed, std::uint64_t index) {
    TrajectoryRecord r;
    r.config_hash = model.config_hash();
    r.seed = seed;
    r.stream_index = index;
    r.convention = model.config().convention;
    r.mode = model.config().mode;
    r.rows.reserve(model.config().n_steps() / static_cast<std::size_t>(model.config().numerics.output_stride) + 1);
    return r;
}

inline TrajectoryRow make_row(double t, const ClassicalState& c, const QuantumState& psi,
                              const OscillatorOperators& ops, double x_bar, double prenorm, double dW) {
    const PositionMoments mx = position_moments(ops.x, psi.amplitudes());
    TrajectoryRow row;
    row.t = t;
    row.X = c.X;
    row.P = c.P;
    row.x_expect = ops.x.expect(psi.amplitudes());  // same value the drivers use
    row.p_expect = ops.p.expect(psi.amplitudes());
    row.x_variance = mx.variance;
    row.x_bar = x_bar;
    row.prenorm = prenorm;
    row.dW = dW;
    return row;
}

/// Terminal row: no step leaves t_final.
inline TrajectoryRow final_row(double t, const ClassicalState& c, const QuantumState& psi,
                               const OscillatorOperators& ops) {
    TrajectoryRow row = make_row(t, c, psi, ops, 0.0, 1.0, 0.0);
    row.x_bar = row.x_expect;
    return row;
}

/// Call from inside a catch block: rethrows the active library error as the
/// same type with the step index prepended.
[[noreturn]] inline void rethrow_at_step(std::size_t step) {
    const std::string prefix = "step " + std::to_string(step) + ": ";
    try {
        throw;
    } catch (const TruncationError& e) {
        throw TruncationError(prefix + e.what());
    } catch (const NumericalBlowup& e) {
        throw NumericalBlowup(prefix + e.what());
    } catch (const DegenerateState& e) {
        throw DegenerateState(prefix + e.what());
    }
}

}  // namespace hqc::detail
