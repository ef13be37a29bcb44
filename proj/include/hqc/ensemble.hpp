#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "hqc/model.hpp"
#include "hqc/record.hpp"

namespace hqc {

/// Phase-space centers of the packets an initial superposition is made of.
struct BranchSpec {
    struct Center {
        double x = 0.0;
        double p = 0.0;
    };
    std::vector<Center> centers;
    std::vector<cplx> amplitudes;
    double classification_radius = 0.0;

    /// Centers, amplitudes and radius taken from the configured packets.
    static BranchSpec from_config(const HybridConfig& config);

    /// InvalidParameter when centers are closer than twice the radius or the
    /// lists disagree in length.
    void validate() const;
};

/// Outcome of classifying one trajectory.
struct Localization {
    /// Index into BranchSpec::centers; empty if the run never localized.
    std::optional<std::size_t> branch;
    /// First row time after which the state stays within the radius of that
    /// center with Var(x) <= hbar / (m omega). Empty means not localized.
    std::optional<double> time;
};

/// Centers move with the free oscillator flow around the equilibrium
/// -lambda X / (m omega^2), with X read from the record row that starts each
/// interval. Distances are measured in phase space with p scaled by
/// 1 / (m omega).
Localization localize(const TrajectoryRecord& record, const BranchSpec& spec, const HybridConfig& config);

/// localize(...).time
std::optional<double> localization_time(const TrajectoryRecord& record, const BranchSpec& spec,
                                        const HybridConfig& config);

struct Interval {
    double lo = 0.0;
    double hi = 0.0;
};

/// Wilson score interval for `k` successes in `n` trials.
Interval wilson_interval(std::size_t k, std::size_t n, double z = 1.959964);

/// Linear-interpolation quantile of sorted data, q in [0, 1].
double quantile_sorted(const std::vector<double>& sorted, double q);

/// quantile_sorted for data that may end in +inf entries (censored
/// observations). Returns +inf whenever the interpolation touches one.
double censored_quantile(const std::vector<double>& sorted, double q);

struct MomentCurve {
    std::vector<double> t;
    std::vector<double> mean;
    std::vector<double> sem;  ///< standard error of the mean
};

/// Per-trajectory scalars retained in the summary, ordered by index.
struct TrajectoryOutcome {
    std::uint64_t index = 0;
    bool failed = false;
    std::string error;
    Localization localization;
    double final_X = 0.0;
    double final_P = 0.0;
    double final_x = 0.0;
    double final_p = 0.0;
    double final_variance = 0.0;
    /// Trapezoid integral of Var(x) over the output rows.
    double integrated_variance = 0.0;
};

struct EnsembleSummary {
    std::size_t n_trajectories = 0;
    std::size_t failures = 0;
    std::uint64_t master_seed = 0;

    std::vector<std::size_t> branch_counts;
    std::size_t unresolved = 0;
    std::vector<double> branch_frequencies;
    std::vector<Interval> branch_intervals;

    std::vector<double> localization_samples;  ///< localized trajectories only, ascending
    std::size_t not_localized = 0;
    double localization_median = 0.0;
    double localization_q1 = 0.0;
    double localization_q3 = 0.0;
    /// Median with every unresolved or failed trajectory counted as an
    /// infinite localization time; +inf once those are half the ensemble.
    double localization_censored_median = 0.0;

    MomentCurve x_expect;
    MomentCurve p_expect;
    MomentCurve X;
    MomentCurve x_variance;

    std::vector<TrajectoryOutcome> outcomes;

    /// Average of |psi><psi| over the final states, when requested.
    std::optional<CMatrix> final_density;
    /// Averages of |psi><psi| at EnsembleOptions::density_rows, same order.
    std::vector<CMatrix> densities;
};

struct EnsembleOptions {
    /// 0 means one worker per hardware thread.
    unsigned threads = 0;
    /// Branch centers; defaults to BranchSpec::from_config.
    std::optional<BranchSpec> branches;
    bool keep_final_density = false;
    /// Output-row indices at which to average |psi><psi| as well.
    std::vector<std::size_t> density_rows;
    /// Called once per finished trajectory, from a worker thread.
    std::function<void(const TrajectoryRecord&)> on_record;
    /// Fail the ensemble if more than this fraction of trajectories error.
    double max_failure_fraction = 0.01;
};

/// Runs trajectories 0..n-1 with streams keyed by (master_seed, index) and
/// reduces them in index order, so the result does not depend on how the
/// workers were scheduled. Throws EnsembleFailure when too many fail.
EnsembleSummary run_ensemble(const HybridModel& model, std::size_t n, std::uint64_t master_seed,
                             const EnsembleOptions& options = {});

/// Lindblad dissipation rate implied by the measurement, c_diff^2 / 2.
double dissipation_rate(const SdeCoefficients& coeffs);

struct LindbladResult {
    std::vector<double> t;
    std::vector<CMatrix> rho;
    /// Purity after every internal step, starting with the initial state.
    std::vector<double> purity;
    /// Largest step-to-step increase in purity (<= 0 when monotone).
    double max_purity_increase = 0.0;
};

/// RK4 integration of
///   d rho/dt = -(i/hbar)[H0 + lambda X(t) x, rho] - D_xx [x, [x, rho]]
/// with step `dt`, sampled at `t_grid` (ascending, >= 0). InvalidDensityMatrix
/// unless rho0 is Hermitian, of unit trace and positive semidefinite to 1e-10.
LindbladResult lindblad_oracle(const OscillatorOperators& ops, double lambda, double D_xx, const CMatrix& rho0,
                               const std::function<double(double)>& X_of_t, const std::vector<double>& t_grid,
                               double dt);

CMatrix density_matrix(const QuantumState& psi);

/// (1/2) || a - b ||_1 for Hermitian a, b. DimensionMismatch on size mismatch.
double trace_distance(const CMatrix& a, const CMatrix& b);

/// Trace distance between an ensemble-averaged density matrix and the
/// oracle's.
double ensemble_vs_oracle(const CMatrix& ensemble_rho, const CMatrix& oracle_rho);

}  // namespace hqc
