#include "hqc/ensemble.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <mutex>
#include <thread>

#include "hqc/errors.hpp"
#include "hqc/hybrid.hpp"

namespace hqc {

BranchSpec BranchSpec::from_config(const HybridConfig& config) {
    BranchSpec spec;
    for (const auto& p : config.packets) {
        spec.centers.push_back({p.x, p.p});
        spec.amplitudes.push_back(p.amplitude);
    }
    spec.classification_radius = config.classification_radius();
    return spec;
}

void BranchSpec::validate() const {
    if (centers.empty()) throw InvalidParameter("BranchSpec: no centers");
    if (!amplitudes.empty() && amplitudes.size() != centers.size())
        throw InvalidParameter("BranchSpec: centers and amplitudes differ in length");
    if (!(classification_radius > 0.0)) throw InvalidParameter("BranchSpec: radius must be positive");
    for (std::size_t i = 0; i < centers.size(); ++i) {
        for (std::size_t j = i + 1; j < centers.size(); ++j) {
            const double d = std::hypot(centers[i].x - centers[j].x, centers[i].p - centers[j].p);
            if (!(d > 2.0 * classification_radius))
                throw InvalidParameter("BranchSpec: centers " + std::to_string(i) + " and " + std::to_string(j) +
                                       " are not separated by more than twice the radius");
        }
    }
}

Localization localize(const TrajectoryRecord& record, const BranchSpec& spec, const HybridConfig& config) {
    spec.validate();
    const auto& rows = record.rows;
    if (rows.empty()) return {};
    const double m = config.quantum.m;
    const double w = config.quantum.omega;
    const double lambda = config.coupling.lambda;
    const double var_bound = 2.0 * config.quantum.coherent_variance();
    const double r = spec.classification_radius;
    const std::size_t nc = spec.centers.size();

    // Centers in (x, p / (m omega)) coordinates, one set per row.
    std::vector<std::vector<std::pair<double, double>>> track(rows.size(), std::vector<std::pair<double, double>>(nc));
    for (std::size_t c = 0; c < nc; ++c) track[0][c] = {spec.centers[c].x, spec.centers[c].p / (m * w)};
    for (std::size_t j = 0; j + 1 < rows.size(); ++j) {
        const double eq = -lambda * rows[j].X / (m * w * w);
        const double phase = w * (rows[j + 1].t - rows[j].t);
        const double cs = std::cos(phase);
        const double sn = std::sin(phase);
        for (std::size_t c = 0; c < nc; ++c) {
            const auto [x, q] = track[j][c];
            track[j + 1][c] = {eq + (x - eq) * cs + q * sn, -(x - eq) * sn + q * cs};
        }
    }

    auto inside = [&](std::size_t j, std::size_t c) {
        const double dx = rows[j].x_expect - track[j][c].first;
        const double dq = rows[j].p_expect / (m * w) - track[j][c].second;
        return std::hypot(dx, dq) <= r && rows[j].x_variance <= var_bound;
    };

    const std::size_t last = rows.size() - 1;
    std::optional<std::size_t> branch;
    for (std::size_t c = 0; c < nc; ++c) {
        if (inside(last, c)) {
            branch = c;
            break;
        }
    }
    if (!branch) return {};

    std::size_t first = last;
    while (first > 0 && inside(first - 1, *branch)) --first;
    return {branch, rows[first].t};
}

std::optional<double> localization_time(const TrajectoryRecord& record, const BranchSpec& spec,
                                        const HybridConfig& config) {
    return localize(record, spec, config).time;
}

Interval wilson_interval(std::size_t k, std::size_t n, double z) {
    if (n == 0) return {0.0, 1.0};
    const double nn = static_cast<double>(n);
    const double p = static_cast<double>(k) / nn;
    const double z2 = z * z;
    const double denom = 1.0 + z2 / nn;
    const double center = (p + z2 / (2.0 * nn)) / denom;
    const double half = z * std::sqrt(p * (1.0 - p) / nn + z2 / (4.0 * nn * nn)) / denom;
    return {std::max(0.0, center - half), std::min(1.0, center + half)};
}

double quantile_sorted(const std::vector<double>& sorted, double q) {
    if (sorted.empty()) return std::nan("");
    const double pos = q * static_cast<double>(sorted.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
    const double frac = pos - static_cast<double>(lo);
    return sorted[lo] + frac * (sorted[hi] - sorted[lo]);
}

double censored_quantile(const std::vector<double>& sorted, double q) {
    if (sorted.empty()) return std::nan("");
    const double pos = q * static_cast<double>(sorted.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
    if (std::isinf(sorted[lo])) return sorted[lo];
    if (std::isinf(sorted[hi])) return pos == static_cast<double>(lo) ? sorted[lo] : sorted[hi];
    return quantile_sorted(sorted, q);
}

namespace {

constexpr std::size_t kBlock = 32;

// Running sums of one block of consecutive trajectories.
struct Block {
    std::vector<TrajectoryOutcome> outcomes;
    std::vector<double> t;
    std::size_t ok = 0;
    // sums and sums of squares for <x>, <p>, X, Var(x) per row
    std::array<std::vector<double>, 4> s1;
    std::array<std::vector<double>, 4> s2;
    CMatrix rho;
    std::vector<CMatrix> rhos;
};

double row_value(const TrajectoryRow& r, int q) {
    switch (q) {
        case 0: return r.x_expect;
        case 1: return r.p_expect;
        case 2: return r.X;
        default: return r.x_variance;
    }
}

MomentCurve finish_curve(const std::vector<double>& t, const std::vector<double>& s1, const std::vector<double>& s2,
                         std::size_t n) {
    MomentCurve c;
    c.t = t;
    c.mean.resize(t.size());
    c.sem.resize(t.size());
    const double nn = static_cast<double>(n);
    for (std::size_t i = 0; i < t.size(); ++i) {
        const double mean = n ? s1[i] / nn : std::nan("");
        const double var = n > 1 ? std::max(0.0, (s2[i] - nn * mean * mean) / (nn - 1.0)) : 0.0;
        c.mean[i] = mean;
        c.sem[i] = n ? std::sqrt(var / nn) : std::nan("");
    }
    return c;
}

}  // namespace

EnsembleSummary run_ensemble(const HybridModel& model, std::size_t n, std::uint64_t master_seed,
                             const EnsembleOptions& options) {
    if (n < 1) throw InvalidParameter("run_ensemble: n must be >= 1");
    const HybridConfig& cfg = model.config();
    const BranchSpec spec = options.branches.value_or(BranchSpec::from_config(cfg));
    spec.validate();
    const Eigen::Index dim = cfg.quantum.dim;
    const std::size_t stride = static_cast<std::size_t>(cfg.numerics.output_stride);
    const std::size_t n_rows = (cfg.n_steps() + stride - 1) / stride + 1;
    for (std::size_t r : options.density_rows)
        if (r >= n_rows)
            throw InvalidParameter("density row " + std::to_string(r) + " is past the last row " +
                                   std::to_string(n_rows - 1));

    const std::size_t n_blocks = (n + kBlock - 1) / kBlock;
    std::vector<Block> blocks(n_blocks);
    std::atomic<std::size_t> next{0};
    std::mutex callback_mutex;

    auto work = [&] {
        for (std::size_t b = next++; b < n_blocks; b = next++) {
            Block& blk = blocks[b];
            if (options.keep_final_density) blk.rho = CMatrix::Zero(dim, dim);
            blk.rhos.assign(options.density_rows.size(), CMatrix::Zero(dim, dim));
            std::vector<CMatrix> rhos(options.density_rows.size());
            StateObserver observer;
            if (!options.density_rows.empty()) {
                observer = [&](std::size_t row, double, const QuantumState& psi) {
                    for (std::size_t q = 0; q < options.density_rows.size(); ++q)
                        if (options.density_rows[q] == row) rhos[q] = density_matrix(psi);
                };
            }
            const std::size_t end = std::min(n, (b + 1) * kBlock);
            for (std::size_t i = b * kBlock; i < end; ++i) {
                TrajectoryOutcome out;
                out.index = i;
                try {
                    const TrajectoryRecord rec = simulate(model, master_seed, i, observer);

                    const auto& rows = rec.rows;
                    const TrajectoryRow& fin = rows.back();
                    out.localization = localize(rec, spec, cfg);
                    out.final_X = fin.X;
                    out.final_P = fin.P;
                    out.final_x = fin.x_expect;
                    out.final_p = fin.p_expect;
                    out.final_variance = fin.x_variance;
                    for (std::size_t j = 0; j + 1 < rows.size(); ++j)
                        out.integrated_variance +=
                            0.5 * (rows[j].x_variance + rows[j + 1].x_variance) * (rows[j + 1].t - rows[j].t);
                    if (blk.t.empty()) {
                        for (const auto& r : rows) blk.t.push_back(r.t);
                        for (int q = 0; q < 4; ++q) {
                            blk.s1[q].assign(rows.size(), 0.0);
                            blk.s2[q].assign(rows.size(), 0.0);
                        }
                    }
                    for (std::size_t j = 0; j < rows.size(); ++j) {
                        for (int q = 0; q < 4; ++q) {
                            const double v = row_value(rows[j], q);
                            blk.s1[q][j] += v;
                            blk.s2[q][j] += v * v;
                        }
                    }
                    if (options.keep_final_density) blk.rho += density_matrix(*rec.final_state);
                    for (std::size_t q = 0; q < rhos.size(); ++q) blk.rhos[q] += rhos[q];
                    ++blk.ok;
                    if (options.on_record) {
                        std::lock_guard lock(callback_mutex);
                        options.on_record(rec);
                    }
                } catch (const Error& e) {
                    out.failed = true;
                    out.error = e.what();
                }
                blk.outcomes.push_back(std::move(out));
            }
        }
    };

    unsigned threads = options.threads ? options.threads : std::max(1u, std::thread::hardware_concurrency());
    threads = static_cast<unsigned>(std::min<std::size_t>(threads, n_blocks));
    if (threads <= 1) {
        work();
    } else {
        std::vector<std::jthread> pool;
        for (unsigned i = 0; i < threads; ++i) pool.emplace_back(work);
    }

    EnsembleSummary s;
    s.n_trajectories = n;
    s.master_seed = master_seed;
    s.branch_counts.assign(spec.centers.size(), 0);
    std::vector<double> t;
    std::array<std::vector<double>, 4> s1;
    std::array<std::vector<double>, 4> s2;
    std::size_t ok = 0;
    CMatrix rho = CMatrix::Zero(dim, dim);
    std::vector<CMatrix> rhos(options.density_rows.size(), CMatrix::Zero(dim, dim));
    for (Block& blk : blocks) {
        for (auto& o : blk.outcomes) {
            if (o.failed) {
                ++s.failures;
                ++s.unresolved;
            } else if (o.localization.branch) {
                ++s.branch_counts[*o.localization.branch];
            } else {
                ++s.unresolved;
            }
            if (!o.failed) {
                if (o.localization.time)
                    s.localization_samples.push_back(*o.localization.time);
                else
                    ++s.not_localized;
            }
            s.outcomes.push_back(std::move(o));
        }
        if (blk.ok == 0) continue;
        if (t.empty()) {
            t = blk.t;
            for (int q = 0; q < 4; ++q) {
                s1[q].assign(t.size(), 0.0);
                s2[q].assign(t.size(), 0.0);
            }
        }
        for (int q = 0; q < 4; ++q) {
            for (std::size_t j = 0; j < t.size(); ++j) {
                s1[q][j] += blk.s1[q][j];
                s2[q][j] += blk.s2[q][j];
            }
        }
        if (options.keep_final_density) rho += blk.rho;
        for (std::size_t q = 0; q < rhos.size(); ++q) rhos[q] += blk.rhos[q];
        ok += blk.ok;
    }

    if (static_cast<double>(s.failures) > options.max_failure_fraction * static_cast<double>(n)) {
        std::string first;
        for (const auto& o : s.outcomes) {
            if (o.failed) {
                first = "trajectory " + std::to_string(o.index) + ": " + o.error;
                break;
            }
        }
        throw EnsembleFailure(std::to_string(s.failures) + " of " + std::to_string(n) +
                              " trajectories failed; first: " + first);
    }

    for (std::size_t c = 0; c < s.branch_counts.size(); ++c) {
        s.branch_frequencies.push_back(static_cast<double>(s.branch_counts[c]) / static_cast<double>(n));
        s.branch_intervals.push_back(wilson_interval(s.branch_counts[c], n));
    }
    std::sort(s.localization_samples.begin(), s.localization_samples.end());
    s.localization_median = quantile_sorted(s.localization_samples, 0.5);
    s.localization_q1 = quantile_sorted(s.localization_samples, 0.25);
    s.localization_q3 = quantile_sorted(s.localization_samples, 0.75);
    std::vector<double> all = s.localization_samples;
    all.resize(all.size() + s.not_localized + s.failures, std::numeric_limits<double>::infinity());
    s.localization_censored_median = censored_quantile(all, 0.5);

    s.x_expect = finish_curve(t, s1[0], s2[0], ok);
    s.p_expect = finish_curve(t, s1[1], s2[1], ok);
    s.X = finish_curve(t, s1[2], s2[2], ok);
    s.x_variance = finish_curve(t, s1[3], s2[3], ok);
    if (options.keep_final_density && ok > 0) s.final_density = rho / static_cast<double>(ok);
    if (ok > 0)
        for (auto& r : rhos) s.densities.push_back(r / static_cast<double>(ok));
    return s;
}

double dissipation_rate(const SdeCoefficients& coeffs) { return 0.5 * coeffs.c_diff * coeffs.c_diff; }

CMatrix density_matrix(const QuantumState& psi) {
    const CVector& v = psi.amplitudes();
    return v * v.adjoint();
}

double trace_distance(const CMatrix& a, const CMatrix& b) {
    if (a.rows() != b.rows() || a.cols() != b.cols() || a.rows() != a.cols())
        throw DimensionMismatch("trace_distance: matrices differ in size");
    const CMatrix d = a - b;
    const CMatrix h = 0.5 * (d + d.adjoint());
    Eigen::SelfAdjointEigenSolver<CMatrix> es(h, Eigen::EigenvaluesOnly);
    return 0.5 * es.eigenvalues().cwiseAbs().sum();
}

double ensemble_vs_oracle(const CMatrix& ensemble_rho, const CMatrix& oracle_rho) {
    return trace_distance(ensemble_rho, oracle_rho);
}

namespace {

void check_density(const CMatrix& rho, Eigen::Index dim) {
    if (rho.rows() != dim || rho.cols() != dim) throw DimensionMismatch("lindblad_oracle: rho0 has the wrong size");
    if ((rho - rho.adjoint()).cwiseAbs().maxCoeff() > 1e-10)
        throw InvalidDensityMatrix("lindblad_oracle: rho0 is not Hermitian");
    if (std::abs(rho.trace() - cplx(1.0, 0.0)) > 1e-10)
        throw InvalidDensityMatrix("lindblad_oracle: rho0 does not have unit trace");
    const CMatrix h = 0.5 * (rho + rho.adjoint());
    Eigen::SelfAdjointEigenSolver<CMatrix> es(h, Eigen::EigenvaluesOnly);
    if (es.eigenvalues().minCoeff() < -1e-10)
        throw InvalidDensityMatrix("lindblad_oracle: rho0 is not positive semidefinite");
}

double purity(const CMatrix& rho) { return rho.cwiseAbs2().sum(); }

}  // namespace

LindbladResult lindblad_oracle(const OscillatorOperators& ops, double lambda, double D_xx, const CMatrix& rho0,
                               const std::function<double(double)>& X_of_t, const std::vector<double>& t_grid,
                               double dt) {
    check_density(rho0, ops.x.dim());
    if (!(dt > 0.0)) throw InvalidParameter("lindblad_oracle: dt must be positive");
    if (!(D_xx >= 0.0)) throw InvalidParameter("lindblad_oracle: D_xx must be non-negative");
    const cplx mi(0.0, -1.0 / ops.basis.hbar);

    auto rhs = [&](double t, const CMatrix& rho) -> CMatrix {
        const double shift = lambda * X_of_t(t);
        CMatrix h_rho = ops.h0.left(rho);
        CMatrix rho_h = ops.h0.right(rho);
        const CMatrix x_rho = ops.x.left(rho);
        const CMatrix rho_x = ops.x.right(rho);
        if (shift != 0.0) {
            h_rho += shift * x_rho;
            rho_h += shift * rho_x;
        }
        CMatrix out = mi * (h_rho - rho_h);
        if (D_xx != 0.0) {
            const CMatrix comm = x_rho - rho_x;
            out -= D_xx * (ops.x.left(comm) - ops.x.right(comm));
        }
        return out;
    };

    LindbladResult res;
    CMatrix rho = rho0;
    double t = 0.0;
    double last_purity = purity(rho);
    res.purity.push_back(last_purity);
    res.max_purity_increase = -std::numeric_limits<double>::infinity();
    for (double target : t_grid) {
        if (target < t - 1e-12) throw InvalidParameter("lindblad_oracle: t_grid must be ascending and >= 0");
        const auto steps = static_cast<long>(std::ceil((target - t) / dt - 1e-9));
        const double h = steps > 0 ? (target - t) / static_cast<double>(steps) : 0.0;
        for (long i = 0; i < steps; ++i) {
            const double t0 = t + static_cast<double>(i) * h;
            const CMatrix k1 = rhs(t0, rho);
            const CMatrix k2 = rhs(t0 + 0.5 * h, rho + (0.5 * h) * k1);
            const CMatrix k3 = rhs(t0 + 0.5 * h, rho + (0.5 * h) * k2);
            const CMatrix k4 = rhs(t0 + h, rho + h * k3);
            rho += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
            const double p = purity(rho);
            res.max_purity_increase = std::max(res.max_purity_increase, p - last_purity);
            res.purity.push_back(p);
            last_purity = p;
        }
        t = target;
        res.t.push_back(t);
        res.rho.push_back(rho);
    }
    if (res.purity.size() == 1) res.max_purity_increase = 0.0;
    return res;
}

}  // namespace hqc
