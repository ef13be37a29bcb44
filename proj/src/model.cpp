#include "hqc/model.hpp"

#include <vector>

#include "hqc/errors.hpp"
#include "hqc/io.hpp"

namespace hqc {

QuantumState initial_state(const HybridConfig& config) {
    std::vector<QuantumState> states;
    std::vector<cplx> amps;
    for (const auto& packet : config.packets) {
        states.push_back(coherent_state(config.quantum, packet.x, packet.p).state);
        amps.push_back(packet.amplitude);
    }
    return superpose(states, amps).state;
}

namespace {
HybridConfig validated(HybridConfig c) {
    c.validate();
    return c;
}
}  // namespace

HybridModel::HybridModel(HybridConfig config)
    : config_(validated(std::move(config))),
      ops_(build_operators(config_.quantum)),
      spectrum_(position_spectrum(ops_)),
      coeffs_(make_coefficients(config_.coupling.lambda, config_.coupling.sigma, config_.hbar(),
                                config_.convention)),
      initial_(hqc::initial_state(config_)),
      hash_(hqc::config_hash(config_)),
      x_dense_(ops_.position()) {}

}  // namespace hqc
