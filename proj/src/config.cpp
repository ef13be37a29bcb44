#include "hqc/config.hpp"

#include <cmath>
#include <string>

#include "hqc/errors.hpp"

namespace hqc {

std::string_view to_string(Mode m) {
    switch (m) {
        case Mode::Hybrid: return "hybrid";
        case Mode::MeanField: return "meanfield";
        case Mode::Chain: return "chain";
    }
    return "hybrid";
}

Mode mode_from_string(std::string_view s) {
    if (s == "hybrid") return Mode::Hybrid;
    if (s == "meanfield") return Mode::MeanField;
    if (s == "chain") return Mode::Chain;
    throw InvalidParameter("unknown mode '" + std::string(s) + "'");
}

namespace {
void require(bool ok, const char* field, const std::string& reason) {
    if (!ok) throw ConfigError(field, reason);
}
}  // namespace

void HybridConfig::validate() const {
    require(quantum.dim >= 2, "quantum.dim", "must be >= 2");
    require(quantum.m > 0.0 && std::isfinite(quantum.m), "quantum.mass", "must be positive");
    require(quantum.omega > 0.0 && std::isfinite(quantum.omega), "quantum.omega", "must be positive");
    require(quantum.hbar > 0.0 && std::isfinite(quantum.hbar), "coupling.hbar", "must be positive");
    require(!packets.empty(), "quantum.packets", "at least one packet is required");

    require(classical.mass > 0.0 && std::isfinite(classical.mass), "classical.mass", "must be positive");
    require(std::isfinite(classical.x0), "classical.x0", "must be finite");
    require(std::isfinite(classical.p0), "classical.p0", "must be finite");
    require(classical.blowup_bound > 0.0, "classical.blowup_bound", "must be positive");
    try {
        classical.potential.validate();
    } catch (const InvalidParameter& e) {
        throw ConfigError("classical.potential", e.what());
    }

    require(std::isfinite(coupling.lambda), "coupling.lambda", "must be finite");
    require(coupling.sigma >= 0.0 && std::isfinite(coupling.sigma), "coupling.sigma", "must be >= 0");
    require(coupling.lambda == 0.0 || coupling.sigma > 0.0, "coupling.sigma",
            "must be positive when lambda != 0");

    require(numerics.dt > 0.0 && std::isfinite(numerics.dt), "numerics.dt", "must be positive");
    require(numerics.t_final >= numerics.dt, "numerics.t_final", "must be >= dt");
    require(numerics.output_stride >= 1, "numerics.output_stride", "must be >= 1");
    require(numerics.truncation_tol > 0.0, "numerics.truncation_tol", "must be positive");
    const double steps = numerics.t_final / numerics.dt;
    require(std::abs(steps - std::round(steps)) <= 1e-9 * std::max(1.0, steps), "numerics.t_final",
            "must be an integer multiple of dt");
    require(n_steps() % static_cast<std::size_t>(numerics.output_stride) == 0, "numerics.output_stride",
            "must divide the number of steps");

    if (analysis.classification_radius)
        require(*analysis.classification_radius > 0.0, "analysis.classification_radius", "must be positive");
}

std::size_t HybridConfig::n_steps() const {
    return static_cast<std::size_t>(std::llround(numerics.t_final / numerics.dt));
}

double HybridConfig::classification_radius() const {
    return analysis.classification_radius.value_or(3.0 * std::sqrt(quantum.coherent_variance()));
}

bool operator==(const PotentialSpec& a, const PotentialSpec& b) {
    return a.kind == b.kind && a.stiffness == b.stiffness && a.coefficients == b.coefficients;
}

bool operator==(const HybridConfig& a, const HybridConfig& b) {
    const auto basis_eq = a.quantum.dim == b.quantum.dim && a.quantum.m == b.quantum.m &&
                          a.quantum.omega == b.quantum.omega && a.quantum.hbar == b.quantum.hbar;
    const auto cl = a.classical.mass == b.classical.mass && a.classical.potential == b.classical.potential &&
                    a.classical.x0 == b.classical.x0 && a.classical.p0 == b.classical.p0 &&
                    a.classical.frozen == b.classical.frozen &&
                    a.classical.blowup_bound == b.classical.blowup_bound;
    const auto num = a.numerics.dt == b.numerics.dt && a.numerics.t_final == b.numerics.t_final &&
                     a.numerics.output_stride == b.numerics.output_stride &&
                     a.numerics.scheme == b.numerics.scheme &&
                     a.numerics.truncation_tol == b.numerics.truncation_tol;
    return basis_eq && a.packets == b.packets && cl && a.coupling.lambda == b.coupling.lambda &&
           a.coupling.sigma == b.coupling.sigma && num &&
           a.analysis.classification_radius == b.analysis.classification_radius &&
           a.convention == b.convention && a.seed == b.seed && a.mode == b.mode;
}

}  // namespace hqc
