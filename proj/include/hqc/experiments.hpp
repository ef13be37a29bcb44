#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "hqc/ensemble.hpp"
#include "hqc/io.hpp"
#include "hqc/model.hpp"

namespace hqc {

struct SampleStats {
    std::size_t n = 0;
    double mean = 0.0;
    double variance = 0.0;      ///< unbiased
    double fourth_moment = 0.0; ///< central, 1/n normalized
};

SampleStats sample_stats(const std::vector<double>& v);

/// Two-sample z statistic for a difference of means.
double z_means(const SampleStats& a, const SampleStats& b);

/// Two-sample z statistic for a difference of variances, with the
/// large-sample standard error sqrt((m4 - s^4) / n) on each side.
double z_variances(const SampleStats& a, const SampleStats& b);

/// Probabilists' Gauss-Hermite rule (weight exp(-x^2/2)/sqrt(2 pi)) by
/// Golub-Welsch. Weights sum to one.
struct QuadratureRule {
    RVector nodes;
    RVector weights;
};
QuadratureRule gauss_hermite(int n_nodes);

/// Least-squares line through (log x, log y): y ~ prefactor * x^exponent.
struct PowerLawFit {
    double exponent = 0.0;
    double prefactor = 0.0;
    /// Percentile bootstrap interval, when one was computed.
    std::optional<Interval> exponent_ci;
};
PowerLawFit fit_power_law(const std::vector<double>& x, const std::vector<double>& y);

// ---------------------------------------------------------------------------
// Chain versus SDE conventions

struct ConventionRun {
    Mode mode = Mode::Hybrid;
    Convention convention = Convention::ChainConsistent;
    SampleStats final_x;              ///< <x>(t_final) across trajectories
    SampleStats integrated_variance;  ///< per-trajectory integral of Var(x)
    MomentCurve x_expect;
    MomentCurve x_variance;
};

struct ConventionSide {
    Convention convention = Convention::ChainConsistent;
    ConventionRun narrow;
    ConventionRun broad;
    /// Narrow start, chain minus SDE, on <x>(t_final).
    double z_mean = 0.0;
    double z_variance = 0.0;
    /// Broad start, chain minus SDE, on the integrated Var(x) decay curve.
    double z_decay = 0.0;
};

struct ConventionComparisonOptions {
    std::size_t n = 2000;
    std::uint64_t master_seed = 7;
    /// The broad start is an equal superposition at +-separation/2.
    double broad_separation = 4.0;
    unsigned threads = 0;
};

struct ConventionComparison {
    ConventionRun chain_narrow;
    ConventionRun chain_broad;
    ConventionSide chain_consistent;
    ConventionSide paper_literal;
    /// The one convention whose |z_decay| stays below 3 while the other's
    /// exceeds it; empty when the data do not single one out.
    std::optional<Convention> selected;
    /// |z_decay| of the rejected convention (0 when nothing is selected).
    double discrimination = 0.0;
};

/// Frozen-X runs of the chain and both SDE conventions from the ground
/// state and from a broad two-packet state. Coupling, numerics, basis and
/// the frozen X come from `base`; packets, mode and convention are set here.
ConventionComparison compare_conventions(const HybridConfig& base, const ConventionComparisonOptions& options = {});

// ---------------------------------------------------------------------------
// Localization-time scaling

struct ScalingPoint {
    double separation = 0.0;
    double sigma = 0.0;
    double dt = 0.0;
    double t_final = 0.0;
    int dim = 0;
    std::size_t n = 0;
    std::size_t localized = 0;
    double median = 0.0;  ///< censored: unresolved runs count as +inf
    double q1 = 0.0;
    double q3 = 0.0;
    /// Per-trajectory localization times in index order, +inf if none.
    std::vector<double> times;
};

struct ScalingOptions {
    std::vector<double> separations{4.0, 8.0, 16.0};
    std::vector<double> sigmas{0.5, 1.0, 2.0, 4.0};
    double sigma_sweep_separation = 8.0;
    std::size_t n = 1000;
    /// t_final = horizon / (c_diff^2 separation^2).
    double horizon = 8.0;
    std::size_t steps = 2000;
    double classification_radius = 1.9;
    std::uint64_t master_seed = 11;
    std::size_t bootstrap_samples = 1000;
    unsigned threads = 0;
};

struct ScalingReport {
    std::vector<ScalingPoint> separation_sweep;
    std::vector<ScalingPoint> sigma_sweep;
    PowerLawFit separation_fit;
    PowerLawFit sigma_fit;
    /// +1 if the median rises strictly with sigma, -1 if it falls strictly,
    /// 0 otherwise.
    int sigma_trend = 0;
};

/// Equal two-packet superpositions at +-separation/2 with frozen X. The
/// basis grows with the separation so the packets stay well inside it.
ScalingReport localization_scaling(const HybridConfig& base, const ScalingOptions& options = {});

// ---------------------------------------------------------------------------
// Ensemble versus master equation

struct OracleComparisonOptions {
    std::size_t n = 5000;
    std::uint64_t master_seed = 5;
    /// Number of intervals in the trace-distance curve.
    std::size_t curve_intervals = 10;
    unsigned threads = 0;
};

struct OracleComparison {
    Convention convention = Convention::ChainConsistent;
    double D_xx = 0.0;
    std::vector<double> t;
    std::vector<double> distance;
    std::vector<double> oracle_purity;
    std::vector<double> ensemble_purity;
    double max_purity_increase = 0.0;
};

/// Frozen-X ensemble of `base` (its mode and convention) against the
/// Lindblad oracle with D_xx = dissipation_rate, both holding X = x0.
OracleComparison oracle_comparison(const HybridConfig& base, const OracleComparisonOptions& options = {});

// ---------------------------------------------------------------------------
// Weak convergence in dt

struct WeakConvergenceOptions {
    std::vector<double> dts{4e-3, 2e-3, 1e-3};
    std::size_t n = 400;
    std::uint64_t master_seed = 17;
    int quadrature_nodes = 12;
    unsigned threads = 0;
};

struct WeakConvergenceReport {
    std::vector<double> dt;
    std::vector<double> error;  ///< E[<x>(t_final)] at dt minus the chain oracle
    std::vector<double> sem;
    std::vector<double> chain_oracle;
    double unitary_value = 0.0;
    PowerLawFit fit;  ///< of |error| against dt
};

/// Weak error of the split-unitary SDE scheme on <x>(t_final).
///
/// The estimator telescopes E[g(psi_N)] - g(psi_0) with
/// g_k(psi) = <psi| x_H(t_final - t_k) |psi>, where x_H is the free
/// Heisenberg position (exact in the truncated basis because H0 is
/// diagonal). Each step contributes the conditional expectation of the
/// measurement update, integrated over dW by Gauss-Hermite quadrature, so
/// only the discretization error survives and the Monte Carlo noise is that
/// of a smooth functional. Paths at every dt share one Brownian motion.
/// InvalidParameter unless X is frozen with lambda X = 0, the scheme is
/// SplitUnitary, and every dt divides t_final and is a multiple of the
/// smallest.
WeakConvergenceReport weak_convergence(const HybridConfig& base, const WeakConvergenceOptions& options = {});

// ---------------------------------------------------------------------------
// Serialization of reports (non-finite numbers become null)

json to_json(const SampleStats& s);
json to_json(const MomentCurve& c);
json to_json(const EnsembleSummary& s, bool include_outcomes);
json to_json(const ConventionComparison& c);
json to_json(const ScalingReport& r);
json to_json(const OracleComparison& o);
json to_json(const WeakConvergenceReport& w);

}  // namespace hqc
