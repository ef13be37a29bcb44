#include "hqc/hybrid.hpp"

#include <bit>
#include <cmath>
#include <cstdint>
#include <limits>

#include "hqc/errors.hpp"
#include "hqc/meanfield.hpp"
#include "hqc/povm_chain.hpp"
#include "hqc/sse.hpp"
#include "trajectory_common.hpp"

namespace hqc {

double ulp_distance(double a, double b) {
    if (a == b) return 0.0;
    if (!std::isfinite(a) || !std::isfinite(b)) return std::numeric_limits<double>::infinity();
    // Map to a monotone integer line.
    auto key = [](double v) {
        const auto bits = std::bit_cast<std::int64_t>(v);
        return bits < 0 ? std::numeric_limits<std::int64_t>::min() - bits : bits;
    };
    const long double d = static_cast<long double>(key(a)) - static_cast<long double>(key(b));
    return static_cast<double>(d < 0 ? -d : d);
}

TrajectoryRecord run_trajectory(const HybridModel& model, std::uint64_t master_seed, std::uint64_t stream_index,
                                const StateObserver& observer) {
    const HybridConfig& cfg = model.config();
    if (cfg.mode != Mode::Hybrid) throw InvalidParameter("run_trajectory: config mode must be hybrid");
    const OscillatorOperators& ops = model.ops();
    const double dt = cfg.numerics.dt;
    const double lambda = cfg.coupling.lambda;
    const double sigma = cfg.coupling.sigma;
    const double hbar = cfg.hbar();
    const auto stride = static_cast<std::size_t>(cfg.numerics.output_stride);
    const std::size_t n = cfg.n_steps();

    const SseIntegrator integrator(ops, model.spectrum(), lambda, model.coefficients(), dt, cfg.numerics.scheme,
                                   cfg.numerics.truncation_tol);
    NoiseStream stream(master_seed, stream_index);
    TrajectoryRecord rec = detail::start_record(model, master_seed, stream_index);

    QuantumState psi = model.initial_state();
    ClassicalState c{cfg.classical.x0, cfg.classical.p0};

    for (std::size_t k = 0; k < n; ++k) {
        try {
            const NoiseIncrement noise = stream.increment(dt);
            const double x_expect = ops.x.expect(psi.amplitudes());
            const double x_bar = lambda != 0.0 ? record_sample(x_expect, lambda, sigma, hbar, noise) : x_expect;

            StepResult q = integrator.step(psi, c.X, noise);

            const double f_noise = hybrid_force(lambda, x_expect, sigma, hbar, noise);
            if (lambda != 0.0) {
                const double f_record = -lambda * x_bar;
                if (f_record != f_noise) {
                    ++rec.force_identity_mismatches;
                    rec.force_identity_max_ulps = std::max(rec.force_identity_max_ulps, ulp_distance(f_record, f_noise));
                }
            }

            if (k % stride == 0) {
                const double t = static_cast<double>(k) * dt;
                if (observer) observer(rec.rows.size(), t, psi);
                rec.rows.push_back(detail::make_row(t, c, psi, ops, x_bar, q.prenorm, noise.dW));
            }
            psi = std::move(q.psi);
            if (!cfg.classical.frozen) {
                const double F = potential_force(cfg.classical.potential, c.X) + f_noise;
                c = classical_step(c, cfg.classical.mass, F, dt, cfg.classical.blowup_bound);
            }
        } catch (const Error&) {
            detail::rethrow_at_step(k);
        }
    }
    if (observer) observer(rec.rows.size(), static_cast<double>(n) * dt, psi);
    rec.rows.push_back(detail::final_row(static_cast<double>(n) * dt, c, psi, ops));
    rec.steps = n;
    rec.noise_position = stream.position();
    rec.gaussian_draws = stream.gaussian_draws();
    rec.final_state = std::move(psi);
    return rec;
}

TrajectoryRecord simulate(const HybridModel& model, std::uint64_t master_seed, std::uint64_t stream_index,
                          const StateObserver& observer) {
    switch (model.config().mode) {
        case Mode::Hybrid: return run_trajectory(model, master_seed, stream_index, observer);
        case Mode::MeanField: return run_meanfield(model, master_seed, stream_index, observer);
        case Mode::Chain: return run_chain(model, master_seed, stream_index, observer);
    }
    throw InvalidParameter("simulate: unknown mode");
}

double thermal_sigma(double M, double gamma, double kBT, double hbar) {
    if (!(M > 0.0) || !(gamma > 0.0) || !(kBT > 0.0) || !(hbar > 0.0))
        throw InvalidParameter("thermal_sigma: M, gamma, kBT and hbar must all be positive");
    return std::sqrt(2.0 * M * gamma * kBT) / hbar;
}

}  // namespace hqc
