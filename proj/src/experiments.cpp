#include "hqc/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <random>
#include <thread>

#include "hqc/errors.hpp"
#include "hqc/povm_chain.hpp"

namespace hqc {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Calls f(i) for i in [0, n) from a small pool. f must only write to
// per-index storage; callers reduce afterwards in index order.
template <class F>
void parallel_for(std::size_t n, unsigned threads, F&& f) {
    std::atomic<std::size_t> next{0};
    auto work = [&] {
        for (std::size_t i = next++; i < n; i = next++) f(i);
    };
    if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
    threads = static_cast<unsigned>(std::min<std::size_t>(threads, n));
    if (threads <= 1) {
        work();
        return;
    }
    std::vector<std::jthread> pool;
    for (unsigned i = 0; i < threads; ++i) pool.emplace_back(work);
}

json number(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

json numbers(const std::vector<double>& v) {
    json a = json::array();
    for (double x : v) a.push_back(number(x));
    return a;
}

// A single dummy center: these runs do not classify branches.
BranchSpec unclassified() { return BranchSpec{{{0.0, 0.0}}, {cplx{1.0, 0.0}}, 1.0}; }

ConventionRun run_convention(const HybridConfig& cfg, std::size_t n, std::uint64_t seed, unsigned threads) {
    const HybridModel model(cfg);
    EnsembleOptions opts;
    opts.threads = threads;
    opts.branches = unclassified();
    const EnsembleSummary s = run_ensemble(model, n, seed, opts);
    std::vector<double> fx;
    std::vector<double> iv;
    for (const auto& o : s.outcomes) {
        if (o.failed) continue;
        fx.push_back(o.final_x);
        iv.push_back(o.integrated_variance);
    }
    ConventionRun r;
    r.mode = cfg.mode;
    r.convention = cfg.convention;
    r.final_x = sample_stats(fx);
    r.integrated_variance = sample_stats(iv);
    r.x_expect = s.x_expect;
    r.x_variance = s.x_variance;
    return r;
}

int basis_for_separation(double separation, const HybridConfig& base) {
    const double alpha = 0.5 * separation / (2.0 * std::sqrt(base.quantum.coherent_variance()));
    const double need = 1.5 * (alpha * alpha + 5.0 * alpha);
    const int rounded = 16 * static_cast<int>(std::ceil(need / 16.0));
    return std::max(base.quantum.dim, rounded);
}

ScalingPoint scaling_point(const HybridConfig& base, double separation, double sigma, const ScalingOptions& o,
                           std::uint64_t seed) {
    HybridConfig cfg = base;
    cfg.mode = Mode::Hybrid;
    cfg.classical.frozen = true;
    cfg.coupling.sigma = sigma;
    cfg.packets = {PacketSpec{-0.5 * separation, 0.0, {1.0, 0.0}}, PacketSpec{0.5 * separation, 0.0, {1.0, 0.0}}};
    cfg.quantum.dim = basis_for_separation(separation, base);
    const double c = make_coefficients(cfg.coupling.lambda, sigma, cfg.hbar(), cfg.convention).c_diff;
    const double t_final = o.horizon / (c * c * separation * separation);
    cfg.numerics.t_final = t_final;
    cfg.numerics.dt = t_final / static_cast<double>(o.steps);
    cfg.numerics.output_stride = 1;
    cfg.analysis.classification_radius = o.classification_radius;
    cfg.validate();

    const HybridModel model(cfg);
    EnsembleOptions eo;
    eo.threads = o.threads;
    const EnsembleSummary s = run_ensemble(model, o.n, seed, eo);

    ScalingPoint p;
    p.separation = separation;
    p.sigma = sigma;
    p.dt = cfg.numerics.dt;
    p.t_final = t_final;
    p.dim = cfg.quantum.dim;
    p.n = o.n;
    for (const auto& out : s.outcomes) {
        const bool ok = !out.failed && out.localization.time;
        p.times.push_back(ok ? *out.localization.time : kInf);
        if (ok) ++p.localized;
    }
    std::vector<double> sorted = p.times;
    std::sort(sorted.begin(), sorted.end());
    p.median = censored_quantile(sorted, 0.5);
    p.q1 = censored_quantile(sorted, 0.25);
    p.q3 = censored_quantile(sorted, 0.75);
    return p;
}

// Percentile bootstrap of the exponent, resampling trajectories within each
// point. Resamples with an infinite median are dropped.
std::optional<Interval> bootstrap_exponent(const std::vector<ScalingPoint>& points,
                                           double ScalingPoint::*abscissa, std::size_t samples,
                                           std::uint64_t seed) {
    if (samples == 0 || points.size() < 2) return std::nullopt;
    std::mt19937_64 rng(mix64(seed));
    std::vector<double> slopes;
    std::vector<double> x;
    for (const auto& p : points) x.push_back(p.*abscissa);
    std::vector<double> buf;
    for (std::size_t b = 0; b < samples; ++b) {
        std::vector<double> y;
        for (const auto& p : points) {
            std::uniform_int_distribution<std::size_t> pick(0, p.times.size() - 1);
            buf.resize(p.times.size());
            for (auto& v : buf) v = p.times[pick(rng)];
            std::sort(buf.begin(), buf.end());
            y.push_back(censored_quantile(buf, 0.5));
        }
        if (std::all_of(y.begin(), y.end(), [](double v) { return std::isfinite(v) && v > 0.0; }))
            slopes.push_back(fit_power_law(x, y).exponent);
    }
    if (slopes.size() * 2 < samples) return std::nullopt;
    std::sort(slopes.begin(), slopes.end());
    return Interval{quantile_sorted(slopes, 0.025), quantile_sorted(slopes, 0.975)};
}

PowerLawFit fit_points(const std::vector<ScalingPoint>& points, double ScalingPoint::*abscissa,
                       std::size_t samples, std::uint64_t seed) {
    std::vector<double> x;
    std::vector<double> y;
    for (const auto& p : points) {
        x.push_back(p.*abscissa);
        y.push_back(p.median);
    }
    PowerLawFit f = fit_power_law(x, y);
    f.exponent_ci = bootstrap_exponent(points, abscissa, samples, seed);
    return f;
}

}  // namespace

SampleStats sample_stats(const std::vector<double>& v) {
    SampleStats s;
    s.n = v.size();
    if (v.empty()) return s;
    double sum = 0.0;
    for (double x : v) sum += x;
    s.mean = sum / static_cast<double>(s.n);
    double m2 = 0.0;
    double m4 = 0.0;
    for (double x : v) {
        const double d = (x - s.mean) * (x - s.mean);
        m2 += d;
        m4 += d * d;
    }
    s.variance = s.n > 1 ? m2 / static_cast<double>(s.n - 1) : 0.0;
    s.fourth_moment = m4 / static_cast<double>(s.n);
    return s;
}

double z_means(const SampleStats& a, const SampleStats& b) {
    const double se = std::sqrt(a.variance / static_cast<double>(a.n) + b.variance / static_cast<double>(b.n));
    return (a.mean - b.mean) / se;
}

double z_variances(const SampleStats& a, const SampleStats& b) {
    auto se2 = [](const SampleStats& s) {
        return std::max(0.0, s.fourth_moment - s.variance * s.variance) / static_cast<double>(s.n);
    };
    return (a.variance - b.variance) / std::sqrt(se2(a) + se2(b));
}

QuadratureRule gauss_hermite(int n_nodes) {
    if (n_nodes < 1) throw InvalidParameter("gauss_hermite: need at least one node");
    RMatrix J = RMatrix::Zero(n_nodes, n_nodes);
    for (int k = 0; k + 1 < n_nodes; ++k) J(k, k + 1) = J(k + 1, k) = std::sqrt(k + 1.0);
    Eigen::SelfAdjointEigenSolver<RMatrix> es(J);
    return {es.eigenvalues(), es.eigenvectors().row(0).array().square().transpose()};
}

PowerLawFit fit_power_law(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() != y.size() || x.size() < 2) throw InvalidParameter("fit_power_law: need two or more points");
    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (!(x[i] > 0.0) || !(y[i] > 0.0) || !std::isfinite(y[i])) return {std::nan(""), std::nan(""), {}};
        const double lx = std::log(x[i]);
        const double ly = std::log(y[i]);
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
    }
    const double n = static_cast<double>(x.size());
    const double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    return {slope, std::exp((sy - slope * sx) / n), {}};
}

ConventionComparison compare_conventions(const HybridConfig& base, const ConventionComparisonOptions& options) {
    HybridConfig narrow = base;
    narrow.classical.frozen = true;
    narrow.packets = {PacketSpec{}};
    HybridConfig broad = narrow;
    broad.packets = {PacketSpec{-0.5 * options.broad_separation, 0.0, {1.0, 0.0}},
                     PacketSpec{0.5 * options.broad_separation, 0.0, {1.0, 0.0}}};

    // Separate seeds per run keep the chain and SDE samples independent.
    std::uint64_t run_id = 0;
    auto run = [&](HybridConfig cfg, Mode mode, Convention conv) {
        cfg.mode = mode;
        cfg.convention = conv;
        cfg.validate();
        return run_convention(cfg, options.n, derive_seed(options.master_seed, run_id++), options.threads);
    };

    ConventionComparison c;
    c.chain_narrow = run(narrow, Mode::Chain, Convention::ChainConsistent);
    c.chain_broad = run(broad, Mode::Chain, Convention::ChainConsistent);
    for (Convention conv : {Convention::ChainConsistent, Convention::PaperLiteral}) {
        ConventionSide& side = conv == Convention::ChainConsistent ? c.chain_consistent : c.paper_literal;
        side.convention = conv;
        side.narrow = run(narrow, Mode::Hybrid, conv);
        side.broad = run(broad, Mode::Hybrid, conv);
        side.z_mean = z_means(c.chain_narrow.final_x, side.narrow.final_x);
        side.z_variance = z_variances(c.chain_narrow.final_x, side.narrow.final_x);
        side.z_decay = z_means(c.chain_broad.integrated_variance, side.broad.integrated_variance);
    }
    const double zc = std::abs(c.chain_consistent.z_decay);
    const double zp = std::abs(c.paper_literal.z_decay);
    if (zc < 3.0 && zp > 3.0) {
        c.selected = Convention::ChainConsistent;
        c.discrimination = zp;
    } else if (zp < 3.0 && zc > 3.0) {
        c.selected = Convention::PaperLiteral;
        c.discrimination = zc;
    }
    return c;
}

ScalingReport localization_scaling(const HybridConfig& base, const ScalingOptions& options) {
    if (options.n < 1 || options.steps < 1) throw InvalidParameter("localization_scaling: n and steps must be >= 1");
    ScalingReport r;
    std::uint64_t run_id = 0;
    for (double sep : options.separations)
        r.separation_sweep.push_back(scaling_point(base, sep, base.coupling.sigma, options,
                                                   derive_seed(options.master_seed, run_id++)));
    for (double sigma : options.sigmas)
        r.sigma_sweep.push_back(scaling_point(base, options.sigma_sweep_separation, sigma, options,
                                              derive_seed(options.master_seed, run_id++)));
    if (r.separation_sweep.size() >= 2)
        r.separation_fit = fit_points(r.separation_sweep, &ScalingPoint::separation, options.bootstrap_samples,
                                      options.master_seed);
    if (r.sigma_sweep.size() >= 2) {
        r.sigma_fit =
            fit_points(r.sigma_sweep, &ScalingPoint::sigma, options.bootstrap_samples, options.master_seed + 1);
        bool up = true, down = true;
        for (std::size_t i = 0; i + 1 < r.sigma_sweep.size(); ++i) {
            const double a = r.sigma_sweep[i].median;
            const double b = r.sigma_sweep[i + 1].median;
            up = up && b > a;
            down = down && b < a;
        }
        r.sigma_trend = up ? 1 : (down ? -1 : 0);
    }
    return r;
}

OracleComparison oracle_comparison(const HybridConfig& base, const OracleComparisonOptions& options) {
    HybridConfig cfg = base;
    cfg.classical.frozen = true;
    cfg.validate();
    const HybridModel model(cfg);

    const std::size_t stride = static_cast<std::size_t>(cfg.numerics.output_stride);
    const std::size_t last_row = cfg.n_steps() / stride;
    const std::size_t k = std::max<std::size_t>(1, std::min(options.curve_intervals, last_row));
    std::vector<std::size_t> rows;
    for (std::size_t j = 0; j <= k; ++j) {
        const std::size_t r = (j * last_row) / k;
        if (rows.empty() || rows.back() != r) rows.push_back(r);
    }

    OracleComparison out;
    out.convention = cfg.convention;
    out.D_xx = dissipation_rate(model.coefficients());
    for (std::size_t r : rows)
        out.t.push_back(std::min(static_cast<double>(r * stride) * cfg.numerics.dt, cfg.numerics.t_final));

    const double X = cfg.classical.x0;
    const LindbladResult oracle = lindblad_oracle(model.ops(), cfg.coupling.lambda, out.D_xx,
                                                  density_matrix(model.initial_state()),
                                                  [X](double) { return X; }, out.t, cfg.numerics.dt);
    out.max_purity_increase = oracle.max_purity_increase;

    EnsembleOptions eo;
    eo.threads = options.threads;
    eo.branches = unclassified();
    eo.density_rows = rows;
    const EnsembleSummary s = run_ensemble(model, options.n, options.master_seed, eo);
    for (std::size_t j = 0; j < rows.size(); ++j) {
        out.distance.push_back(ensemble_vs_oracle(s.densities[j], oracle.rho[j]));
        out.oracle_purity.push_back((oracle.rho[j] * oracle.rho[j]).trace().real());
        out.ensemble_purity.push_back((s.densities[j] * s.densities[j]).trace().real());
    }
    return out;
}

WeakConvergenceReport weak_convergence(const HybridConfig& base, const WeakConvergenceOptions& options) {
    if (options.dts.size() < 2 || options.n < 2)
        throw InvalidParameter("weak_convergence: need two or more step sizes and trajectories");
    if (!base.classical.frozen || base.coupling.lambda * base.classical.x0 != 0.0)
        throw InvalidParameter("weak_convergence: needs frozen X with lambda X = 0");
    if (base.numerics.scheme != SseScheme::SplitUnitary)
        throw InvalidParameter("weak_convergence: needs the split-unitary scheme");
    const double T = base.numerics.t_final;
    const double fine = *std::min_element(options.dts.begin(), options.dts.end());
    const auto n_fine = static_cast<std::size_t>(std::llround(T / fine));
    std::vector<std::size_t> agg;
    for (double dt : options.dts) {
        const auto a = static_cast<std::size_t>(std::llround(dt / fine));
        if (std::abs(static_cast<double>(a) * fine - dt) > 1e-9 * dt || n_fine % a != 0 ||
            std::abs(static_cast<double>(n_fine) * fine - T) > 1e-9 * T)
            throw InvalidParameter("weak_convergence: step sizes must nest and divide t_final");
        agg.push_back(a);
    }

    HybridConfig cfg = base;
    cfg.mode = Mode::Hybrid;
    cfg.numerics.dt = fine;
    cfg.validate();
    const HybridModel model(cfg);
    const auto& ops = model.ops();
    const SdeCoefficients& coeffs = model.coefficients();
    const double w = cfg.quantum.omega;
    const double mw = cfg.quantum.m * w;
    const QuadratureRule gh = gauss_hermite(options.quadrature_nodes);
    const std::size_t L = options.dts.size();

    std::vector<SseIntegrator> integrators;
    for (double dt : options.dts)
        integrators.emplace_back(ops, model.spectrum(), cfg.coupling.lambda, coeffs, dt, SseScheme::SplitUnitary,
                                 cfg.numerics.truncation_tol);

    // contributions[i * L + l]: telescoped estimate of path i at level l
    std::vector<double> contributions(options.n * L, 0.0);
    std::vector<std::string> errors(options.n);
    parallel_for(options.n, options.threads, [&](std::size_t i) {
        try {
            NoiseStream ns(options.master_seed, i);
            std::vector<double> increments(n_fine);
            for (double& v : increments) v = ns.increment(fine).dW;
            for (std::size_t l = 0; l < L; ++l) {
                const double dt = options.dts[l];
                const std::size_t steps = n_fine / agg[l];
                QuantumState psi = model.initial_state();
                double acc = 0.0;
                for (std::size_t k = 0; k < steps; ++k) {
                    const double tau = T - static_cast<double>(k) * dt;
                    const double cs = std::cos(w * tau);
                    const double sn = std::sin(w * tau) / mw;
                    const CVector& a = psi.amplitudes();
                    double expected = 0.0;
                    for (Eigen::Index q = 0; q < gh.nodes.size(); ++q) {
                        const CVector phi =
                            measurement_update(a, ops.x, coeffs, {gh.nodes(q) * std::sqrt(dt), dt});
                        expected += gh.weights(q) * (cs * ops.x.expect(phi) + sn * ops.p.expect(phi)) /
                                    phi.squaredNorm();
                    }
                    acc += expected - (cs * ops.x.expect(a) + sn * ops.p.expect(a));
                    double dW = 0.0;
                    for (std::size_t j = 0; j < agg[l]; ++j) dW += increments[k * agg[l] + j];
                    psi = integrators[l].step(psi, 0.0, {dW, dt}).psi;
                }
                contributions[i * L + l] = acc;
            }
        } catch (const Error& e) {
            errors[i] = e.what();
        }
    });
    for (std::size_t i = 0; i < options.n; ++i)
        if (!errors[i].empty()) throw NumericalBlowup("weak_convergence: path " + std::to_string(i) + ": " + errors[i]);

    WeakConvergenceReport r;
    r.dt = options.dts;
    const CVector& a0 = model.initial_state().amplitudes();
    r.unitary_value = std::cos(w * T) * ops.x.expect(a0) + std::sin(w * T) / mw * ops.p.expect(a0);

    const CMatrix x_dense = model.position().entries;
    const CMatrix rho0 = density_matrix(model.initial_state());
    for (std::size_t l = 0; l < L; ++l) {
        std::vector<double> v(options.n);
        for (std::size_t i = 0; i < options.n; ++i) v[i] = contributions[i * L + l];
        const SampleStats st = sample_stats(v);

        const double dt = options.dts[l];
        ExactPropagator unitary(ops, cfg.coupling.lambda, dt);
        CMatrix rho = rho0;
        if (cfg.coupling.lambda != 0.0) {
            const KrausWidth width = width_from_continuum(cfg.coupling.lambda, cfg.coupling.sigma, cfg.hbar(), dt);
            for (std::size_t k = 0; k < n_fine / agg[l]; ++k)
                rho = chain_channel_step(rho, 0.0, width, model.spectrum(), unitary);
        } else {
            const CMatrix U = unitary.matrix(0.0);
            for (std::size_t k = 0; k < n_fine / agg[l]; ++k) rho = U * rho * U.adjoint();
        }
        const double oracle = (rho * x_dense).trace().real();
        r.chain_oracle.push_back(oracle);
        r.error.push_back(r.unitary_value + st.mean - oracle);
        r.sem.push_back(std::sqrt(st.variance / static_cast<double>(st.n)));
    }
    std::vector<double> abs_err;
    for (double e : r.error) abs_err.push_back(std::abs(e));
    r.fit = fit_power_law(r.dt, abs_err);
    return r;
}

json to_json(const SampleStats& s) {
    return {{"n", s.n}, {"mean", number(s.mean)}, {"variance", number(s.variance)}};
}

json to_json(const MomentCurve& c) {
    return {{"t", numbers(c.t)}, {"mean", numbers(c.mean)}, {"sem", numbers(c.sem)}};
}

json to_json(const EnsembleSummary& s, bool include_outcomes) {
    json j;
    j["n_trajectories"] = s.n_trajectories;
    j["master_seed"] = s.master_seed;
    j["failures"] = s.failures;
    j["unresolved"] = s.unresolved;
    json branches = json::array();
    for (std::size_t c = 0; c < s.branch_counts.size(); ++c) {
        branches.push_back({{"branch", c},
                            {"count", s.branch_counts[c]},
                            {"frequency", number(s.branch_frequencies[c])},
                            {"wilson_95", {number(s.branch_intervals[c].lo), number(s.branch_intervals[c].hi)}}});
    }
    j["branches"] = branches;
    j["localization"] = {{"localized", s.localization_samples.size()},
                         {"not_localized", s.not_localized},
                         {"median", number(s.localization_median)},
                         {"q1", number(s.localization_q1)},
                         {"q3", number(s.localization_q3)},
                         {"censored_median", number(s.localization_censored_median)},
                         {"samples", numbers(s.localization_samples)}};
    j["curves"] = {{"x_expect", to_json(s.x_expect)},
                   {"p_expect", to_json(s.p_expect)},
                   {"X", to_json(s.X)},
                   {"x_variance", to_json(s.x_variance)}};
    if (include_outcomes) {
        json outs = json::array();
        for (const auto& o : s.outcomes) {
            json e = {{"index", o.index}, {"failed", o.failed}};
            if (o.failed) {
                e["error"] = o.error;
            } else {
                e["branch"] = o.localization.branch ? json(*o.localization.branch) : json(nullptr);
                e["localization_time"] = o.localization.time ? number(*o.localization.time) : json(nullptr);
                e["final"] = {{"X", number(o.final_X)},
                              {"P", number(o.final_P)},
                              {"x_expect", number(o.final_x)},
                              {"p_expect", number(o.final_p)},
                              {"x_variance", number(o.final_variance)}};
                e["integrated_variance"] = number(o.integrated_variance);
            }
            outs.push_back(std::move(e));
        }
        j["outcomes"] = outs;
    }
    return j;
}

namespace {

json run_json(const ConventionRun& r) {
    return {{"mode", to_string(r.mode)},
            {"convention", to_string(r.convention)},
            {"final_x", to_json(r.final_x)},
            {"integrated_variance", to_json(r.integrated_variance)},
            {"x_expect", to_json(r.x_expect)},
            {"x_variance", to_json(r.x_variance)}};
}

json side_json(const ConventionSide& s) {
    return {{"convention", to_string(s.convention)},
            {"narrow", run_json(s.narrow)},
            {"broad", run_json(s.broad)},
            {"z_mean", number(s.z_mean)},
            {"z_variance", number(s.z_variance)},
            {"z_decay", number(s.z_decay)}};
}

json fit_json(const PowerLawFit& f) {
    json j = {{"exponent", number(f.exponent)}, {"prefactor", number(f.prefactor)}};
    j["exponent_ci_95"] =
        f.exponent_ci ? json{number(f.exponent_ci->lo), number(f.exponent_ci->hi)} : json(nullptr);
    return j;
}

json point_json(const ScalingPoint& p) {
    return {{"separation", p.separation}, {"sigma", p.sigma},     {"dt", p.dt},
            {"t_final", p.t_final},       {"dim", p.dim},         {"n", p.n},
            {"localized", p.localized},   {"median", number(p.median)},
            {"q1", number(p.q1)},         {"q3", number(p.q3)}};
}

}  // namespace

json to_json(const ConventionComparison& c) {
    return {{"chain_narrow", run_json(c.chain_narrow)},
            {"chain_broad", run_json(c.chain_broad)},
            {"chain_consistent", side_json(c.chain_consistent)},
            {"paper_literal", side_json(c.paper_literal)},
            {"selected", c.selected ? json(to_string(*c.selected)) : json(nullptr)},
            {"discrimination", number(c.discrimination)}};
}

json to_json(const ScalingReport& r) {
    json sep = json::array();
    for (const auto& p : r.separation_sweep) sep.push_back(point_json(p));
    json sig = json::array();
    for (const auto& p : r.sigma_sweep) sig.push_back(point_json(p));
    return {{"separation_sweep", sep},
            {"sigma_sweep", sig},
            {"separation_fit", fit_json(r.separation_fit)},
            {"sigma_fit", fit_json(r.sigma_fit)},
            {"sigma_trend", r.sigma_trend > 0 ? "increasing" : (r.sigma_trend < 0 ? "decreasing" : "not monotone")}};
}

json to_json(const OracleComparison& o) {
    return {{"convention", to_string(o.convention)},
            {"D_xx", number(o.D_xx)},
            {"t", numbers(o.t)},
            {"trace_distance", numbers(o.distance)},
            {"oracle_purity", numbers(o.oracle_purity)},
            {"ensemble_purity", numbers(o.ensemble_purity)},
            {"max_purity_increase", number(o.max_purity_increase)}};
}

json to_json(const WeakConvergenceReport& w) {
    return {{"dt", numbers(w.dt)},
            {"weak_error", numbers(w.error)},
            {"sem", numbers(w.sem)},
            {"chain_oracle", numbers(w.chain_oracle)},
            {"unitary_value", number(w.unitary_value)},
            {"fit", fit_json(w.fit)}};
}

}  // namespace hqc
