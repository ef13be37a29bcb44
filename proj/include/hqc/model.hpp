#pragma once

#include <string>

#include "hqc/config.hpp"
#include "hqc/propagation.hpp"
#include "hqc/sse.hpp"

namespace hqc {

/// Validated configuration plus everything derived from it once: operators,
/// the position spectrum, SDE coefficients and the initial state. Immutable
/// after construction and safe to share between trajectory workers.
class HybridModel {
public:
    explicit HybridModel(HybridConfig config);

    const HybridConfig& config() const { return config_; }
    const OscillatorOperators& ops() const { return ops_; }
    const PositionSpectrum& spectrum() const { return spectrum_; }
    const SdeCoefficients& coefficients() const { return coeffs_; }
    const QuantumState& initial_state() const { return initial_; }
    const std::string& config_hash() const { return hash_; }

    /// Dense operators (built once).
    const OperatorMatrix& position() const { return x_dense_; }

private:
    HybridConfig config_;
    OscillatorOperators ops_;
    PositionSpectrum spectrum_;
    SdeCoefficients coeffs_;
    QuantumState initial_;
    std::string hash_;
    OperatorMatrix x_dense_;
};

/// Normalized superposition of the configured coherent packets.
QuantumState initial_state(const HybridConfig& config);

}  // namespace hqc
