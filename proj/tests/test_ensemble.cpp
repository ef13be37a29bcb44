#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <vector>

#include "hqc/ensemble.hpp"
#include "hqc/errors.hpp"
#include "hqc/hybrid.hpp"
#include "hqc/propagation.hpp"

using namespace hqc;

namespace {

HybridConfig cat_config(double separation, cplx a = 1.0, cplx b = 1.0) {
    HybridConfig c;
    c.seed = 3;
    c.coupling = {1.0, 1.0};
    c.packets = {PacketSpec{-separation / 2, 0, a}, PacketSpec{separation / 2, 0, b}};
    c.classical.potential = PotentialSpec::harmonic(4.0);
    c.numerics.t_final = 1.5;
    c.numerics.output_stride = 10;
    c.analysis.classification_radius = 2.0;
    return c;
}

}  // namespace

TEST_CASE("Wilson interval") {
    const auto w = wilson_interval(50, 100);
    CHECK(w.lo == doctest::Approx(0.4038).epsilon(1e-3));
    CHECK(w.hi == doctest::Approx(0.5962).epsilon(1e-3));
    for (std::size_t k : {0u, 1u, 99u, 100u}) {
        const auto i = wilson_interval(k, 100);
        CHECK(i.lo >= 0.0);
        CHECK(i.hi <= 1.0);
        CHECK(i.lo <= k / 100.0);
        CHECK(i.hi >= k / 100.0);
    }
}

TEST_CASE("quantiles") {
    const std::vector<double> v{1, 2, 3, 4, 5};
    CHECK(quantile_sorted(v, 0.5) == 3.0);
    CHECK(quantile_sorted(v, 0.25) == 2.0);
    CHECK(quantile_sorted(v, 0.1) == doctest::Approx(1.4));
    const double inf = std::numeric_limits<double>::infinity();
    CHECK(censored_quantile({1, 2, 3, inf, inf}, 0.5) == 3.0);
    CHECK(std::isinf(censored_quantile({1, 2, inf, inf}, 0.5)));
    CHECK(censored_quantile({1, 2, 3, 4}, 0.5) == 2.5);
}

TEST_CASE("branch spec") {
    const auto spec = BranchSpec::from_config(cat_config(6.0));
    CHECK(spec.centers.size() == 2);
    CHECK(spec.centers[0].x == -3.0);
    CHECK(spec.classification_radius == 2.0);
    BranchSpec bad = spec;
    bad.classification_radius = 3.5;
    CHECK_THROWS_AS(bad.validate(), InvalidParameter);
    bad = spec;
    bad.amplitudes.pop_back();
    CHECK_THROWS_AS(bad.validate(), InvalidParameter);
}

TEST_CASE("single packet localizes at once") {
    HybridConfig c = cat_config(6.0);
    c.packets = {PacketSpec{0.5, 0.0, 1.0}};
    const auto s = run_ensemble(HybridModel(c), 16, 1);
    REQUIRE(s.branch_counts.size() == 1);
    CHECK(s.branch_counts[0] == 16);
    CHECK(s.unresolved == 0);
    CHECK(s.localization_median == 0.0);
    CHECK(s.localization_censored_median == 0.0);
}

TEST_CASE("two-branch ensembles") {
    const HybridConfig c = cat_config(6.0);
    const HybridModel model(c);
    EnsembleOptions one;
    one.threads = 1;
    EnsembleOptions three;
    three.threads = 3;
    const auto a = run_ensemble(model, 48, 21, one);
    const auto b = run_ensemble(model, 48, 21, three);

    CHECK(a.branch_counts[0] + a.branch_counts[1] + a.unresolved == 48);
    for (const auto& w : a.branch_intervals) {
        CHECK(w.lo >= 0.0);
        CHECK(w.hi <= 1.0);
    }
    CHECK(a.branch_counts[0] > 0);
    CHECK(a.branch_counts[1] > 0);

    SUBCASE("scheduling does not change the result") {
        CHECK(a.branch_counts == b.branch_counts);
        CHECK(a.localization_samples == b.localization_samples);
        CHECK(a.x_expect.mean == b.x_expect.mean);
        CHECK(a.X.sem == b.X.sem);
    }
    SUBCASE("global phase is irrelevant") {
        const cplx phase = std::polar(1.0, 0.9);
        const auto p = run_ensemble(HybridModel(cat_config(6.0, phase, phase)), 48, 21, one);
        CHECK(p.branch_counts == a.branch_counts);
    }
    SUBCASE("relabelling the packets relabels the branches") {
        HybridConfig swapped = c;
        std::swap(swapped.packets[0], swapped.packets[1]);
        const auto r = run_ensemble(HybridModel(swapped), 48, 21, one);
        CHECK(r.branch_counts[0] == a.branch_counts[1]);
        CHECK(r.branch_counts[1] == a.branch_counts[0]);
        CHECK(r.unresolved == a.unresolved);
    }
    SUBCASE("per-trajectory records match standalone runs") {
        for (std::uint64_t i : {0u, 17u, 47u}) {
            const auto rec = run_trajectory(model, 21, i);
            CHECK(a.outcomes[i].final_x == rec.rows.back().x_expect);
            CHECK(a.outcomes[i].final_X == rec.rows.back().X);
        }
    }
}

TEST_CASE("frozen-X ensemble mean follows the shifted oscillator") {
    HybridConfig c;
    c.coupling = {1.0, 1.0};
    c.packets = {PacketSpec{1.0, 0.0, 1.0}};
    c.classical.frozen = true;
    c.classical.x0 = 0.5;
    c.numerics.t_final = 3.0;
    c.numerics.output_stride = 250;
    const auto s = run_ensemble(HybridModel(c), 200, 4);
    for (std::size_t i = 0; i < s.x_expect.t.size(); ++i) {
        const double t = s.x_expect.t[i];
        const double shift = -0.5;
        const double exact = shift + (1.0 - shift) * std::cos(t);
        CHECK(std::abs(s.x_expect.mean[i] - exact) <= 4 * s.x_expect.sem[i] + 1e-9);
        CHECK(s.X.mean[i] == 0.5);
    }
}

TEST_CASE("failures") {
    HybridConfig c = cat_config(6.0);
    c.classical.blowup_bound = 0.05;
    CHECK_THROWS_AS(run_ensemble(HybridModel(c), 8, 1), EnsembleFailure);
    EnsembleOptions lenient;
    lenient.max_failure_fraction = 1.0;
    const auto s = run_ensemble(HybridModel(c), 8, 1, lenient);
    CHECK(s.failures > 0);
    CHECK(std::isinf(s.localization_censored_median));
    EnsembleOptions rows;
    rows.density_rows = {1000};
    CHECK_THROWS_AS(run_ensemble(HybridModel(cat_config(6.0)), 2, 1, rows), InvalidParameter);
}

TEST_CASE("Lindblad oracle") {
    const FockBasis basis{40, 1, 1, 1};
    const auto ops = build_operators(basis);
    const auto cat = superpose(std::vector<QuantumState>{coherent_state(basis, -2, 0).state,
                                                          coherent_state(basis, 2, 0).state},
                               std::vector<cplx>{1.0, 1.0})
                         .state;
    const CMatrix rho0 = density_matrix(cat);
    auto zero = [](double) { return 0.0; };

    SUBCASE("without dissipation it is unitary") {
        const std::vector<double> grid{0.0, 0.5, 1.0};
        const auto r = lindblad_oracle(ops, 0.7, 0.0, rho0, [](double) { return 0.3; }, grid, 1e-3);
        ExactPropagator u(ops, 0.7, 1.0);
        const CVector psi = u.apply(cat.amplitudes(), 0.3);
        CHECK((r.rho.back() - psi * psi.adjoint()).cwiseAbs().maxCoeff() < 1e-8);
        CHECK(trace_distance(r.rho.front(), rho0) < 1e-14);
    }
    SUBCASE("purity falls at 4 D Var(x) and never rises") {
        const double D = 0.5, t = 1e-3;
        const auto r = lindblad_oracle(ops, 0.0, D, rho0, zero, {0.0, t, 1.0}, 1e-4);
        const double rate = (1.0 - r.purity.at(10)) / t;
        CHECK(rate == doctest::Approx(4 * D * variance(ops.position(), cat)).epsilon(0.02));
        CHECK(r.max_purity_increase <= 1e-12);
        for (const auto& rho : r.rho) CHECK(rho.trace().real() == doctest::Approx(1.0).epsilon(1e-10));
    }
    SUBCASE("coherences between the packets decay as exp(-D dx^2 t)") {
        const double D = 0.05, t = 0.2;
        // free rotation is slow compared with the dephasing over this time
        const auto r = lindblad_oracle(ops, 0.0, D, rho0, zero, {0.0, t}, 1e-4);
        const auto spec_x = ops.position().entries;
        Eigen::SelfAdjointEigenSolver<CMatrix> es(spec_x);
        auto coherence = [&](const CMatrix& rho) {
            const CMatrix rx = es.eigenvectors().adjoint() * rho * es.eigenvectors();
            double off = 0;
            for (Eigen::Index i = 0; i < 40; ++i)
                for (Eigen::Index j = 0; j < 40; ++j)
                    if (es.eigenvalues()(i) * es.eigenvalues()(j) < 0) off += std::abs(rx(i, j));
            return off;
        };
        const double ratio = coherence(r.rho.back()) / coherence(r.rho.front());
        CHECK(-std::log(ratio) / t == doctest::Approx(D * 16.0).epsilon(0.1));
    }
    SUBCASE("invalid inputs") {
        CMatrix bad = rho0;
        bad(0, 1) += 0.1;
        CHECK_THROWS_AS(lindblad_oracle(ops, 0, 0, bad, zero, {0.0}, 1e-3), InvalidDensityMatrix);
        CHECK_THROWS_AS(lindblad_oracle(ops, 0, 0, 2.0 * rho0, zero, {0.0}, 1e-3), InvalidDensityMatrix);
        CHECK_THROWS_AS(trace_distance(rho0, CMatrix::Identity(3, 3)), DimensionMismatch);
    }
}

TEST_CASE("trace distance") {
    CMatrix a = CMatrix::Zero(2, 2), b = CMatrix::Zero(2, 2);
    a(0, 0) = 1;
    b(1, 1) = 1;
    CHECK(trace_distance(a, b) == doctest::Approx(1.0));
    CHECK(trace_distance(a, a) == 0.0);
    CMatrix plus = CMatrix::Constant(2, 2, 0.5);
    CHECK(trace_distance(a, plus) == doctest::Approx(std::sqrt(0.5)));
}

TEST_CASE("dissipation rate") {
    const auto c = make_coefficients(2.0, 0.5, 1.0, Convention::ChainConsistent);
    CHECK(dissipation_rate(c) == doctest::Approx(c.c_diff * c.c_diff / 2));
}
