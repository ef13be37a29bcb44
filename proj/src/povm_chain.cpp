#include "hqc/povm_chain.hpp"

#include <cmath>
#include <numbers>

#include "hqc/errors.hpp"
#include "trajectory_common.hpp"

namespace hqc {

double KrausWidth::delta() const { return std::sqrt(delta_sq); }

KrausWidth width_from_continuum(double lambda, double sigma, double hbar, double delta_t) {
    if (lambda == 0.0 || !std::isfinite(lambda))
        throw InvalidParameter("width_from_continuum: lambda must be finite and nonzero");
    if (!(sigma > 0.0)) throw InvalidParameter("width_from_continuum: sigma must be positive");
    if (!(hbar > 0.0)) throw InvalidParameter("width_from_continuum: hbar must be positive");
    if (!(delta_t > 0.0)) throw InvalidParameter("width_from_continuum: delta_t must be positive");
    const double product = (hbar * sigma / lambda) * (hbar * sigma / lambda);
    return {product / delta_t, delta_t};
}

MeasurementOutcome measure_position(CVector& pos, const RVector& eigenvalues, const KrausWidth& width,
                                    NoiseStream& rng) {
    const Eigen::Index n = pos.size();
    if (eigenvalues.size() != n) throw DimensionMismatch("measure_position: spectrum and state differ in size");
    if (!(width.delta_sq > 0.0)) throw InvalidParameter("measure_position: delta^2 must be positive");

    const RVector probs = pos.cwiseAbs2();
    const double total = probs.sum();

    // Stage one: which eigenvalue.
    const double target = rng.uniform() * total;
    Eigen::Index s = n - 1;
    double acc = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
        acc += probs(i);
        if (target < acc) {
            s = i;
            break;
        }
    }
    while (s > 0 && probs(s) == 0.0) --s;

    // Stage two: blur it.
    const double x_bar = eigenvalues(s) + width.delta() * rng.gaussian();

    // Kraus factor, with the largest exponent among occupied levels pulled
    // out so nothing underflows.
    const double inv4 = 1.0 / (4.0 * width.delta_sq);
    double emax = -std::numeric_limits<double>::infinity();
    for (Eigen::Index i = 0; i < n; ++i) {
        if (probs(i) == 0.0) continue;
        const double d = eigenvalues(i) - x_bar;
        emax = std::max(emax, -d * d * inv4);
    }
    double kept_sq = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
        const double d = eigenvalues(i) - x_bar;
        const double g = std::exp(-d * d * inv4 - emax);
        pos(i) *= g;
        kept_sq += probs(i) * g * g;
    }
    const double norm = std::sqrt(kept_sq);
    if (!(norm > 1e-300)) throw DegenerateState("measure_position: post-measurement norm underflowed");
    pos /= norm;

    MeasurementOutcome out;
    out.x_bar = x_bar;
    out.kept_norm = std::exp(emax) * norm / std::sqrt(total);
    out.log_density =
        -0.5 * std::log(2.0 * std::numbers::pi * width.delta_sq) + 2.0 * emax + std::log(kept_sq / total);
    return out;
}

ChainStepResult chain_step(const QuantumState& psi, double X, const KrausWidth& width,
                           const PositionSpectrum& spectrum, ExactPropagator& unitary, NoiseStream& rng,
                           double truncation_tol) {
    CVector pos = spectrum.to_position(unitary.apply(psi.amplitudes(), X));
    const MeasurementOutcome outcome = measure_position(pos, spectrum.eigenvalues, width, rng);
    CVector fock = spectrum.to_fock(pos);
    check_truncation(fock, truncation_tol, "chain_step");
    return {QuantumState::unchecked(std::move(fock)), outcome};
}

CMatrix chain_channel_step(const CMatrix& rho, double X, const KrausWidth& width, const PositionSpectrum& spectrum,
                           ExactPropagator& unitary) {
    const Eigen::Index n = spectrum.eigenvalues.size();
    if (rho.rows() != n || rho.cols() != n) throw DimensionMismatch("chain_channel_step: rho has the wrong size");
    const CMatrix u = unitary.matrix(X);
    const CMatrix v = spectrum.eigenvectors.cast<cplx>();
    CMatrix pos = v.transpose() * (u * rho * u.adjoint()) * v;
    const double inv8 = 1.0 / (8.0 * width.delta_sq);
    for (Eigen::Index j = 0; j < n; ++j) {
        for (Eigen::Index i = 0; i < n; ++i) {
            const double d = spectrum.eigenvalues(i) - spectrum.eigenvalues(j);
            pos(i, j) *= std::exp(-d * d * inv8);
        }
    }
    return v * pos * v.transpose();
}

CMatrix povm_square_integral(const PositionSpectrum& spectrum, const KrausWidth& width, int points_per_delta) {
    const RVector& x = spectrum.eigenvalues;
    const double delta = width.delta();
    const double lo = x.minCoeff() - 6.0 * delta;
    const double hi = x.maxCoeff() + 6.0 * delta;
    const double h = delta / points_per_delta;
    const auto m = static_cast<Eigen::Index>(std::ceil((hi - lo) / h));
    const double step = (hi - lo) / static_cast<double>(m);
    const double pref = 1.0 / (4.0 * std::numbers::pi * width.delta_sq);

    RVector diag = RVector::Zero(x.size());
    for (Eigen::Index j = 0; j <= m; ++j) {
        const double xb = lo + step * static_cast<double>(j);
        const double w = (j == 0 || j == m) ? 0.5 * step : step;
        for (Eigen::Index s = 0; s < x.size(); ++s) {
            const double d = x(s) - xb;
            diag(s) += w * pref * std::exp(-d * d / (2.0 * width.delta_sq));
        }
    }
    const RMatrix& v = spectrum.eigenvectors;
    return (v * diag.asDiagonal() * v.transpose()).cast<cplx>();
}

TrajectoryRecord run_chain(const HybridModel& model, std::uint64_t master_seed, std::uint64_t stream_index,
                           const StateObserver& observer) {
    const HybridConfig& cfg = model.config();
    if (cfg.mode != Mode::Chain) throw InvalidParameter("run_chain: config mode must be chain");
    const OscillatorOperators& ops = model.ops();
    const double dt = cfg.numerics.dt;
    const double lambda = cfg.coupling.lambda;
    const double sigma = cfg.coupling.sigma;
    const double hbar = cfg.hbar();
    const double tol = cfg.numerics.truncation_tol;
    const auto stride = static_cast<std::size_t>(cfg.numerics.output_stride);
    const std::size_t n = cfg.n_steps();
    const bool measured = lambda != 0.0;
    const KrausWidth width = measured ? width_from_continuum(lambda, sigma, hbar, dt) : KrausWidth{};

    ExactPropagator unitary(ops, lambda, dt);
    NoiseStream rng(master_seed, stream_index);
    TrajectoryRecord rec = detail::start_record(model, master_seed, stream_index);

    QuantumState psi = model.initial_state();
    ClassicalState c{cfg.classical.x0, cfg.classical.p0};

    for (std::size_t k = 0; k < n; ++k) {
        try {
            const double t = static_cast<double>(k) * dt;
            const double mean = ops.x.expect(psi.amplitudes());
            double x_bar = mean;
            double kept = 1.0;
            double dW = 0.0;
            QuantumState next = psi;
            if (measured) {
                ChainStepResult r = chain_step(psi, c.X, width, model.spectrum(), unitary, rng, tol);
                x_bar = r.outcome.x_bar;
                kept = r.outcome.kept_norm;
                dW = lambda * (x_bar - mean) * dt / (hbar * sigma);
                rec.log_path_weight += r.outcome.log_density;
                next = std::move(r.psi);
            } else {
                CVector v = unitary.apply(psi.amplitudes(), c.X);
                check_truncation(v, tol, "chain_step");
                next = QuantumState::unchecked(std::move(v));
            }
            if (k % stride == 0) {
                if (observer) observer(rec.rows.size(), t, psi);
                rec.rows.push_back(detail::make_row(t, c, psi, ops, x_bar, kept, dW));
            }
            psi = std::move(next);
            if (!cfg.classical.frozen) {
                const double F = potential_force(cfg.classical.potential, c.X) - lambda * x_bar;
                c = classical_step(c, cfg.classical.mass, F, dt, cfg.classical.blowup_bound);
            }
        } catch (const Error&) {
            detail::rethrow_at_step(k);
        }
    }
    if (observer) observer(rec.rows.size(), static_cast<double>(n) * dt, psi);
    rec.rows.push_back(detail::final_row(static_cast<double>(n) * dt, c, psi, ops));
    rec.steps = n;
    rec.noise_position = rng.position();
    rec.gaussian_draws = rng.gaussian_draws();
    rec.final_state = std::move(psi);
    return rec;
}

}  // namespace hqc
