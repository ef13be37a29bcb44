#pragma once

#include <cstdint>
#include <optional>
#include <string_view>
#include <vector>

#include "hqc/classical.hpp"
#include "hqc/oscillator.hpp"
#include "hqc/sse.hpp"

namespace hqc {

enum class Mode { Hybrid, MeanField, Chain };

std::string_view to_string(Mode m);
Mode mode_from_string(std::string_view s);

/// One coherent component of the initial quantum state.
struct PacketSpec {
    double x = 0.0;
    double p = 0.0;
    cplx amplitude{1.0, 0.0};

    bool operator==(const PacketSpec&) const = default;
};

struct ClassicalConfig {
    double mass = 1.0;
    PotentialSpec potential;
    double x0 = 0.0;
    double p0 = 0.0;
    /// Hold X and P at their initial values (frozen-X diagnostic mode).
    bool frozen = false;
    double blowup_bound = kDefaultBlowupBound;
};

struct CouplingConfig {
    double lambda = 0.0;
    double sigma = 0.0;
};

struct NumericsConfig {
    double dt = 1e-3;
    double t_final = 1.0;
    int output_stride = 1;
    SseScheme scheme = SseScheme::SplitUnitary;
    double truncation_tol = kTruncationTolerance;
};

struct AnalysisConfig {
    /// Branch classification radius; defaults to three position standard
    /// deviations of a coherent state.
    std::optional<double> classification_radius;
};

/// Every physical and numerical parameter of one run. hbar lives in
/// `quantum.hbar` and is shared by all sectors.
struct HybridConfig {
    FockBasis quantum;
    std::vector<PacketSpec> packets{PacketSpec{}};
    ClassicalConfig classical;
    CouplingConfig coupling;
    NumericsConfig numerics;
    AnalysisConfig analysis;
    Convention convention = Convention::ChainConsistent;
    std::uint64_t seed = 0;
    Mode mode = Mode::Hybrid;

    double hbar() const { return quantum.hbar; }

    /// Throws ConfigError naming the offending field.
    void validate() const;

    /// round(t_final / dt)
    std::size_t n_steps() const;

    double classification_radius() const;
};

bool operator==(const PotentialSpec& a, const PotentialSpec& b);
bool operator==(const HybridConfig& a, const HybridConfig& b);

}  // namespace hqc
