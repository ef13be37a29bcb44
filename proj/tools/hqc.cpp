// hqc: command-line front end for the hybrid quantum-classical simulator.

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "hqc/errors.hpp"
#include "hqc/experiments.hpp"
#include "hqc/hybrid.hpp"
#include "hqc/io.hpp"

namespace fs = std::filesystem;
using namespace hqc;

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitNumerical = 3;
constexpr int kExitAssertion = 4;

class AssertionFailure : public Error {
public:
    using Error::Error;
};

// Scalar numerics that may come from a flag or an environment variable.
struct Overrides {
    std::optional<double> dt, t_final, lambda, sigma;
    std::optional<std::uint64_t> seed;
    std::optional<int> stride, dim;
};

template <class T>
std::optional<T> env_value(const char* name) {
    const char* raw = std::getenv(name);
    if (!raw || !*raw) return std::nullopt;
    std::istringstream in(raw);
    T v{};
    in >> v;
    if (!in || !(in >> std::ws).eof()) throw ConfigError(name, std::string("cannot parse '") + raw + "'");
    return v;
}

// flag > env > file
HybridConfig resolve_config(const std::string& path, const Overrides& flags) {
    HybridConfig c = parse_config(path);
    auto pick = [](auto& field, const auto& flag, const char* env) {
        using T = std::decay_t<decltype(field)>;
        if (flag)
            field = static_cast<T>(*flag);
        else if (auto e = env_value<T>(env))
            field = *e;
    };
    pick(c.numerics.dt, flags.dt, "HQC_DT");
    pick(c.numerics.t_final, flags.t_final, "HQC_T_FINAL");
    pick(c.coupling.lambda, flags.lambda, "HQC_LAMBDA");
    pick(c.coupling.sigma, flags.sigma, "HQC_SIGMA");
    pick(c.seed, flags.seed, "HQC_SEED");
    pick(c.numerics.output_stride, flags.stride, "HQC_STRIDE");
    pick(c.quantum.dim, flags.dim, "HQC_DIM");
    c.validate();
    return c;
}

void add_overrides(CLI::App* app, Overrides& o) {
    app->add_option("--dt", o.dt, "Time step (env HQC_DT)");
    app->add_option("--t-final", o.t_final, "Final time (env HQC_T_FINAL)");
    app->add_option("--lambda", o.lambda, "Coupling strength (env HQC_LAMBDA)");
    app->add_option("--sigma", o.sigma, "Record noise parameter (env HQC_SIGMA)");
    app->add_option("--seed", o.seed, "Master seed (env HQC_SEED)");
    app->add_option("--stride", o.stride, "Output stride (env HQC_STRIDE)");
    app->add_option("--dim", o.dim, "Fock basis size (env HQC_DIM)");
}

void require(bool ok, const std::string& what) {
    if (!ok) throw AssertionFailure("assertion failed: " + what);
}

void write_text(const fs::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write " + path.string());
    out << text;
}

std::string csv_table(const std::vector<std::string>& header, const std::vector<std::vector<double>>& rows) {
    std::string s = "# ";
    for (std::size_t i = 0; i < header.size(); ++i) s += (i ? "," : "") + header[i];
    s += "\n";
    for (const auto& r : rows) {
        for (std::size_t i = 0; i < r.size(); ++i) s += (i ? "," : "") + format_double(r[i]);
        s += "\n";
    }
    return s;
}

struct Run {
    Run(std::string cmd, fs::path dir) : command(std::move(cmd)), out(std::move(dir)) {}

    std::string command;
    fs::path out;
    std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();
    std::vector<std::string> files;

    void finish(const HybridConfig& cfg, json options, std::uint64_t trajectories, std::uint64_t steps) {
        RunManifest m;
        m.command = command;
        m.options = std::move(options);
        m.config = cfg;
        m.master_seed = cfg.seed;
        m.trajectories = trajectories;
        m.steps = steps;
        m.wall_clock_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        write_manifest(out, m, files);
        // digests must recompute from what is on disk
        for (const auto& f : read_manifest(out / "manifest.json").outputs)
            require(file_sha256(out / f.path) == f.sha256, "digest of " + f.path + " recomputes");
    }
};

int cmd_simulate(const std::string& config_path, const Overrides& o, const fs::path& out, const std::string& mode) {
    HybridConfig cfg = resolve_config(config_path, o);
    if (!mode.empty()) cfg.mode = mode_from_string(mode);
    cfg.validate();
    Run run{"simulate", out};
    fs::create_directories(out);
    const HybridModel model(cfg);
    const TrajectoryRecord rec = simulate(model, cfg.seed, 0);
    write_trajectory_csv(out / "trajectory.csv", rec);
    run.files.push_back("trajectory.csv");
    require(read_trajectory_csv(out / "trajectory.csv") == rec.rows, "CSV rows read back unchanged");
    run.finish(cfg, {{"mode", to_string(cfg.mode)}}, 1, rec.steps);
    std::cout << "wrote " << rec.rows.size() << " rows to " << (out / "trajectory.csv").string() << "\n";
    if (cfg.mode == Mode::Hybrid && cfg.coupling.lambda != 0.0)
        std::cout << "force identity: " << rec.force_identity_mismatches << " mismatched steps, max "
                  << rec.force_identity_max_ulps << " ulp\n";
    return 0;
}

int cmd_ensemble(const std::string& config_path, const Overrides& o, const fs::path& out, std::size_t n,
                 unsigned threads, bool per_trajectory, bool outcomes) {
    const HybridConfig cfg = resolve_config(config_path, o);
    Run run{"ensemble", out};
    fs::create_directories(out);
    EnsembleOptions eo;
    eo.threads = threads;
    if (per_trajectory) {
        fs::create_directories(out / "trajectories");
        eo.on_record = [&](const TrajectoryRecord& rec) {
            std::ostringstream name;
            name << "trajectories/traj_" << std::setw(6) << std::setfill('0') << rec.stream_index << ".csv";
            write_trajectory_csv(out / name.str(), rec);
        };
    }
    const HybridModel model(cfg);
    const EnsembleSummary s = run_ensemble(model, n, cfg.seed, eo);
    if (per_trajectory)
        for (const auto& oc : s.outcomes)
            if (!oc.failed) {
                std::ostringstream name;
                name << "trajectories/traj_" << std::setw(6) << std::setfill('0') << oc.index << ".csv";
                run.files.push_back(name.str());
            }

    std::size_t total = s.unresolved;
    for (auto c : s.branch_counts) total += c;
    require(total == s.n_trajectories, "branch counts and unresolved sum to n");
    for (const auto& iv : s.branch_intervals) require(iv.lo >= 0.0 && iv.hi <= 1.0, "Wilson interval inside [0, 1]");

    write_json(out / "summary.json", to_json(s, outcomes));
    run.files.push_back("summary.json");
    std::vector<std::vector<double>> table;
    for (std::size_t c = 0; c < s.branch_counts.size(); ++c)
        table.push_back({static_cast<double>(c), static_cast<double>(s.branch_counts[c]), s.branch_frequencies[c],
                         s.branch_intervals[c].lo, s.branch_intervals[c].hi});
    write_text(out / "branches.csv", csv_table({"branch", "count", "frequency", "wilson_lo", "wilson_hi"}, table));
    run.files.push_back("branches.csv");
    run.finish(cfg, {{"n", n}, {"per_trajectory", per_trajectory}}, n, cfg.n_steps());

    std::cout << "branch  count  frequency  95% Wilson\n";
    for (const auto& r : table)
        std::cout << std::setw(6) << r[0] << std::setw(7) << r[1] << std::setw(11) << std::setprecision(4) << r[2]
                  << "  [" << r[3] << ", " << r[4] << "]\n";
    std::cout << "unresolved " << s.unresolved << " (failures " << s.failures << "), median localization time "
              << s.localization_median << "\n";
    return 0;
}

int cmd_compare(const std::string& config_path, const Overrides& o, const fs::path& out, std::size_t n,
                unsigned threads, double separation) {
    const HybridConfig cfg = resolve_config(config_path, o);
    Run run{"compare-conventions", out};
    fs::create_directories(out);
    ConventionComparisonOptions co;
    co.n = n;
    co.master_seed = cfg.seed;
    co.threads = threads;
    co.broad_separation = separation;
    const ConventionComparison c = compare_conventions(cfg, co);
    for (const auto* side : {&c.chain_consistent, &c.paper_literal})
        require(std::isfinite(side->z_mean) && std::isfinite(side->z_decay), "comparison statistics finite");

    write_json(out / "conventions.json", to_json(c));
    run.files.push_back("conventions.json");
    std::vector<std::vector<double>> rows;
    const auto& t = c.chain_broad.x_variance.t;
    for (std::size_t i = 0; i < t.size(); ++i)
        rows.push_back({t[i], c.chain_broad.x_variance.mean[i], c.chain_broad.x_variance.sem[i],
                        c.chain_consistent.broad.x_variance.mean[i], c.chain_consistent.broad.x_variance.sem[i],
                        c.paper_literal.broad.x_variance.mean[i], c.paper_literal.broad.x_variance.sem[i]});
    write_text(out / "variance_decay.csv",
               csv_table({"t", "chain_mean", "chain_sem", "chain_consistent_mean", "chain_consistent_sem",
                          "paper_literal_mean", "paper_literal_sem"},
                         rows));
    run.files.push_back("variance_decay.csv");
    run.finish(cfg, {{"n", n}, {"broad_separation", separation}}, 6 * n, cfg.n_steps());

    for (const auto* side : {&c.chain_consistent, &c.paper_literal})
        std::cout << to_string(side->convention) << ": z_mean " << side->z_mean << ", z_var " << side->z_variance
                  << ", z_decay " << side->z_decay << "\n";
    std::cout << "selected: " << (c.selected ? std::string(to_string(*c.selected)) : "none")
              << ", discrimination " << c.discrimination << "\n";
    return 0;
}

int cmd_scaling(const std::string& config_path, const Overrides& o, const fs::path& out, const ScalingOptions& so) {
    const HybridConfig cfg = resolve_config(config_path, o);
    Run run{"scaling", out};
    fs::create_directories(out);
    ScalingOptions opts = so;
    opts.master_seed = cfg.seed;
    const ScalingReport r = localization_scaling(cfg, opts);
    write_json(out / "scaling.json", to_json(r));
    run.files.push_back("scaling.json");
    std::vector<std::vector<double>> rows;
    for (const auto* sweep : {&r.separation_sweep, &r.sigma_sweep})
        for (const auto& p : *sweep)
            rows.push_back({p.separation, p.sigma, p.median, p.q1, p.q3, static_cast<double>(p.localized),
                            static_cast<double>(p.n)});
    write_text(out / "scaling.csv", csv_table({"separation", "sigma", "median", "q1", "q3", "localized", "n"}, rows));
    run.files.push_back("scaling.csv");
    run.finish(cfg, {{"n", opts.n}, {"steps", opts.steps}, {"horizon", opts.horizon}},
               opts.n * (opts.separations.size() + opts.sigmas.size()), opts.steps);

    auto show = [](const char* name, const PowerLawFit& f) {
        std::cout << name << " exponent " << f.exponent;
        if (f.exponent_ci) std::cout << " (95% bootstrap " << f.exponent_ci->lo << ", " << f.exponent_ci->hi << ")";
        std::cout << "\n";
    };
    for (const auto& row : rows)
        std::cout << "separation " << row[0] << " sigma " << row[1] << " median " << row[2] << "\n";
    show("separation", r.separation_fit);
    show("sigma", r.sigma_fit);
    std::cout << "sigma trend: "
              << (r.sigma_trend > 0 ? "increasing" : (r.sigma_trend < 0 ? "decreasing" : "not monotone")) << "\n";
    return 0;
}

int cmd_oracle(const std::string& config_path, const Overrides& o, const fs::path& out, std::size_t n,
               unsigned threads, std::size_t intervals) {
    const HybridConfig cfg = resolve_config(config_path, o);
    Run run{"oracle", out};
    fs::create_directories(out);
    OracleComparisonOptions oo;
    oo.n = n;
    oo.master_seed = cfg.seed;
    oo.threads = threads;
    oo.curve_intervals = intervals;
    const OracleComparison r = oracle_comparison(cfg, oo);
    require(r.max_purity_increase <= 1e-12, "oracle purity non-increasing");
    write_json(out / "oracle.json", to_json(r));
    run.files.push_back("oracle.json");
    std::vector<std::vector<double>> rows;
    for (std::size_t i = 0; i < r.t.size(); ++i)
        rows.push_back({r.t[i], r.distance[i], r.oracle_purity[i], r.ensemble_purity[i]});
    write_text(out / "trace_distance.csv",
               csv_table({"t", "trace_distance", "oracle_purity", "ensemble_purity"}, rows));
    run.files.push_back("trace_distance.csv");
    run.finish(cfg, {{"n", n}, {"intervals", intervals}}, n, cfg.n_steps());
    for (const auto& row : rows) std::cout << "t " << row[0] << "  trace distance " << row[1] << "\n";
    return 0;
}

int cmd_weak(const std::string& config_path, const Overrides& o, const fs::path& out,
             const WeakConvergenceOptions& wo) {
    const HybridConfig cfg = resolve_config(config_path, o);
    Run run{"weak-convergence", out};
    fs::create_directories(out);
    WeakConvergenceOptions opts = wo;
    opts.master_seed = cfg.seed;
    const WeakConvergenceReport r = weak_convergence(cfg, opts);
    write_json(out / "weak_convergence.json", to_json(r));
    run.files.push_back("weak_convergence.json");
    run.finish(cfg, {{"n", opts.n}, {"dts", opts.dts}, {"quadrature_nodes", opts.quadrature_nodes}}, opts.n,
               cfg.n_steps());
    for (std::size_t i = 0; i < r.dt.size(); ++i)
        std::cout << "dt " << r.dt[i] << "  weak error " << r.error[i] << " +- " << r.sem[i] << "\n";
    std::cout << "order " << r.fit.exponent << "\n";
    return 0;
}

// Reruns a `simulate` manifest and compares digests.
int cmd_replay(const fs::path& manifest_path, const fs::path& out) {
    const RunManifest m = read_manifest(manifest_path);
    if (m.command != "simulate") throw ConfigError("command", "replay supports simulate manifests only");
    fs::create_directories(out);
    const HybridModel model(m.config);
    const TrajectoryRecord rec = simulate(model, m.master_seed, 0);
    write_trajectory_csv(out / "trajectory.csv", rec);
    bool same = true;
    for (const auto& f : m.outputs) {
        const bool ok = file_sha256(out / f.path) == f.sha256;
        std::cout << f.path << (ok ? " identical" : " DIFFERS") << "\n";
        same = same && ok;
    }
    require(same, "replayed outputs are byte-identical");
    return 0;
}

int error_exit(const std::string& type, const std::string& message, int code) {
    json j = {{"error", {{"type", type}, {"message", message}, {"exit_code", code}}}};
    std::cerr << j.dump() << "\n";
    return code;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Hybrid quantum-classical trajectory simulator"};
    app.require_subcommand(1);

    std::string config_path;
    std::string out_dir = "out";
    Overrides ov;
    unsigned threads = 0;

    auto common = [&](CLI::App* sub) {
        sub->add_option("config", config_path, "JSON config file")->required();
        sub->add_option("-o,--out", out_dir, "Output directory");
        add_overrides(sub, ov);
    };

    auto* sim = app.add_subcommand("simulate", "One trajectory to CSV");
    common(sim);
    std::string mode;
    sim->add_option("--mode", mode, "hybrid | meanfield | chain (overrides the file)");

    auto* ens = app.add_subcommand("ensemble", "Branch statistics over n trajectories");
    common(ens);
    std::size_t n = 2000;
    bool per_traj = false;
    bool outcomes = false;
    ens->add_option("-n,--trajectories", n, "Number of trajectories");
    ens->add_option("--threads", threads, "Worker threads (0 = all cores)");
    ens->add_flag("--per-trajectory", per_traj, "Also write one CSV per trajectory");
    ens->add_flag("--outcomes", outcomes, "Include per-trajectory outcomes in summary.json");

    auto* cmp = app.add_subcommand("compare-conventions", "Chain versus both SDE drift conventions");
    common(cmp);
    double separation = 4.0;
    cmp->add_option("-n,--trajectories", n, "Trajectories per run");
    cmp->add_option("--threads", threads, "Worker threads");
    cmp->add_option("--broad-separation", separation, "Packet separation of the broad start");

    auto* scl = app.add_subcommand("scaling", "Localization time versus separation and sigma");
    common(scl);
    ScalingOptions so;
    scl->add_option("-n,--trajectories", so.n, "Trajectories per point");
    scl->add_option("--threads", so.threads, "Worker threads");
    scl->add_option("--separations", so.separations, "Packet separations");
    scl->add_option("--sigmas", so.sigmas, "Sigma values");
    scl->add_option("--sigma-separation", so.sigma_sweep_separation, "Separation used in the sigma sweep");
    scl->add_option("--steps", so.steps, "Steps per run");
    scl->add_option("--horizon", so.horizon, "t_final in units of 1/(c^2 separation^2)");
    scl->add_option("--radius", so.classification_radius, "Classification radius");
    scl->add_option("--bootstrap", so.bootstrap_samples, "Bootstrap resamples for the exponent interval");

    auto* orc = app.add_subcommand("oracle", "Frozen-X ensemble versus the master equation");
    common(orc);
    std::size_t intervals = 10;
    orc->add_option("-n,--trajectories", n, "Trajectories");
    orc->add_option("--threads", threads, "Worker threads");
    orc->add_option("--intervals", intervals, "Points in the trace-distance curve minus one");

    auto* wk = app.add_subcommand("weak-convergence", "Weak error of the SDE scheme against the chain oracle");
    common(wk);
    WeakConvergenceOptions wo;
    wk->add_option("-n,--trajectories", wo.n, "Brownian paths");
    wk->add_option("--threads", wo.threads, "Worker threads");
    wk->add_option("--dts", wo.dts, "Step sizes (nested)");
    wk->add_option("--nodes", wo.quadrature_nodes, "Gauss-Hermite nodes");

    auto* rep = app.add_subcommand("replay", "Rerun a simulate manifest and compare digests");
    std::string manifest;
    rep->add_option("manifest", manifest, "manifest.json of a simulate run")->required();
    rep->add_option("-o,--out", out_dir, "Output directory for the rerun");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        return error_exit("UsageError", e.what(), kExitConfig);
    }

    try {
        const fs::path out = out_dir;
        if (*sim) return cmd_simulate(config_path, ov, out, mode);
        if (*ens) return cmd_ensemble(config_path, ov, out, n, threads, per_traj, outcomes);
        if (*cmp) return cmd_compare(config_path, ov, out, n, threads, separation);
        if (*scl) return cmd_scaling(config_path, ov, out, so);
        if (*orc) return cmd_oracle(config_path, ov, out, n, threads, intervals);
        if (*wk) return cmd_weak(config_path, ov, out, wo);
        if (*rep) return cmd_replay(manifest, out);
    } catch (const AssertionFailure& e) {
        return error_exit("AssertionFailure", e.what(), kExitAssertion);
    } catch (const ConfigError& e) {
        return error_exit("ConfigError", e.what(), kExitConfig);
    } catch (const InvalidParameter& e) {
        return error_exit("InvalidParameter", e.what(), kExitConfig);
    } catch (const TruncationError& e) {
        return error_exit("TruncationError", e.what(), kExitNumerical);
    } catch (const NumericalBlowup& e) {
        return error_exit("NumericalBlowup", e.what(), kExitNumerical);
    } catch (const EnsembleFailure& e) {
        return error_exit("EnsembleFailure", e.what(), kExitNumerical);
    } catch (const Error& e) {
        return error_exit("Error", e.what(), kExitNumerical);
    } catch (const std::exception& e) {
        return error_exit("InternalError", e.what(), kExitNumerical);
    }
    return 0;
}
