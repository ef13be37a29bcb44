#include "hqc/meanfield.hpp"

#include <array>
#include <cmath>

#include "hqc/errors.hpp"
#include "trajectory_common.hpp"

namespace hqc {

double meanfield_force(const PotentialSpec& V, double lambda, double X, double x_expect) {
    return potential_force(V, X) - lambda * x_expect;
}

MeanFieldState meanfield_step(const MeanFieldState& state, const HybridModel& model, ExactPropagator& unitary) {
    const HybridConfig& cfg = model.config();
    const OscillatorOperators& ops = model.ops();
    const double dt = unitary.dt();
    const double lambda = cfg.coupling.lambda;
    const PotentialSpec& V = cfg.classical.potential;
    const double M = cfg.classical.mass;
    const double bound = cfg.classical.blowup_bound;

    if (cfg.classical.frozen) {
        CVector v = unitary.apply(state.psi.amplitudes(), state.classical.X);
        check_truncation(v, cfg.numerics.truncation_tol, "meanfield_step");
        return {QuantumState::unchecked(std::move(v)), state.classical};
    }

    const double x0 = ops.x.expect(state.psi.amplitudes());
    const double p_half = state.classical.P + 0.5 * dt * meanfield_force(V, lambda, state.classical.X, x0);
    const double x_next = state.classical.X + dt * p_half / M;

    CVector v = unitary.apply(state.psi.amplitudes(), 0.5 * (state.classical.X + x_next));
    check_truncation(v, cfg.numerics.truncation_tol, "meanfield_step");
    QuantumState psi = QuantumState::unchecked(std::move(v));

    const double x1 = ops.x.expect(psi.amplitudes());
    const double p_next = p_half + 0.5 * dt * meanfield_force(V, lambda, x_next, x1);
    if (!(std::abs(x_next) <= bound) || !(std::abs(p_next) <= bound))
        throw NumericalBlowup("meanfield_step: |X| or |P| exceeded " + std::to_string(bound));
    return {std::move(psi), {x_next, p_next}};
}

TrajectoryRecord run_meanfield(const HybridModel& model, std::uint64_t master_seed, std::uint64_t stream_index,
                               const StateObserver& observer) {
    const HybridConfig& cfg = model.config();
    if (cfg.mode != Mode::MeanField) throw InvalidParameter("run_meanfield: config mode must be meanfield");
    const OscillatorOperators& ops = model.ops();
    const double dt = cfg.numerics.dt;
    const auto stride = static_cast<std::size_t>(cfg.numerics.output_stride);
    const std::size_t n = cfg.n_steps();

    ExactPropagator unitary(ops, cfg.coupling.lambda, dt);
    TrajectoryRecord rec = detail::start_record(model, master_seed, stream_index);
    MeanFieldState s{model.initial_state(), {cfg.classical.x0, cfg.classical.p0}};

    for (std::size_t k = 0; k < n; ++k) {
        if (k % stride == 0) {
            const double t = static_cast<double>(k) * dt;
            if (observer) observer(rec.rows.size(), t, s.psi);
            rec.rows.push_back(detail::final_row(t, s.classical, s.psi, ops));
        }
        try {
            s = meanfield_step(s, model, unitary);
        } catch (const Error&) {
            detail::rethrow_at_step(k);
        }
    }
    if (observer) observer(rec.rows.size(), static_cast<double>(n) * dt, s.psi);
    rec.rows.push_back(detail::final_row(static_cast<double>(n) * dt, s.classical, s.psi, ops));
    rec.steps = n;
    rec.final_state = std::move(s.psi);
    return rec;
}

namespace {

using Vec4 = std::array<double, 4>;

Vec4 axpy(const Vec4& y, double a, const Vec4& x) {
    return {y[0] + a * x[0], y[1] + a * x[1], y[2] + a * x[2], y[3] + a * x[3]};
}

}  // namespace

std::vector<EhrenfestPoint> ehrenfest_oracle(const HybridConfig& config, const EhrenfestPoint& initial,
                                             const std::vector<double>& t_grid, double dt) {
    const PotentialSpec& V = config.classical.potential;
    // Linear force -k0 - k1 X.
    double k0 = 0.0;
    double k1 = 0.0;
    switch (V.kind) {
        case PotentialSpec::Kind::Free: break;
        case PotentialSpec::Kind::Harmonic: k1 = V.stiffness; break;
        case PotentialSpec::Kind::Polynomial:
            for (std::size_t k = 3; k < V.coefficients.size(); ++k) {
                if (V.coefficients[k] != 0.0)
                    throw UnsupportedPotential("ehrenfest_oracle: the first-moment system closes only for "
                                               "potentials of degree <= 2");
            }
            if (V.coefficients.size() > 1) k0 = V.coefficients[1];
            if (V.coefficients.size() > 2) k1 = 2.0 * V.coefficients[2];
            break;
    }
    if (!(dt > 0.0)) throw InvalidParameter("ehrenfest_oracle: dt must be positive");

    const double M = config.classical.mass;
    const double m = config.quantum.m;
    const double w2 = config.quantum.omega * config.quantum.omega;
    const double lambda = config.coupling.lambda;
    auto rhs = [&](const Vec4& y) -> Vec4 {
        return {y[1] / M, -k0 - k1 * y[0] - lambda * y[2], y[3] / m, -m * w2 * y[2] - lambda * y[0]};
    };

    const double h_max = dt / 10.0;
    Vec4 y{initial.X, initial.P, initial.x, initial.p};
    double t = initial.t;
    std::vector<EhrenfestPoint> out;
    out.reserve(t_grid.size());
    for (double target : t_grid) {
        if (target < t) throw InvalidParameter("ehrenfest_oracle: t_grid must be ascending");
        const auto steps = static_cast<long>(std::ceil((target - t) / h_max - 1e-9));
        const double h = steps > 0 ? (target - t) / static_cast<double>(steps) : 0.0;
        for (long i = 0; i < steps; ++i) {
            const Vec4 a = rhs(y);
            const Vec4 b = rhs(axpy(y, 0.5 * h, a));
            const Vec4 c = rhs(axpy(y, 0.5 * h, b));
            const Vec4 d = rhs(axpy(y, h, c));
            for (int j = 0; j < 4; ++j) y[j] += h / 6.0 * (a[j] + 2.0 * b[j] + 2.0 * c[j] + d[j]);
        }
        t = target;
        out.push_back({t, y[0], y[1], y[2], y[3]});
    }
    return out;
}

}  // namespace hqc
