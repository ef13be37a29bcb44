#include <doctest.h>

#include <cmath>
#include <vector>

#include "hqc/errors.hpp"
#include "hqc/noise.hpp"
#include "hqc/oscillator.hpp"
#include "hqc/propagation.hpp"
#include "hqc/sse.hpp"

using namespace hqc;

namespace {

struct Mean {
    double mean, se;
};

Mean mean_se(const std::vector<double>& v) {
    double s = 0, s2 = 0;
    for (double x : v) s += x;
    const double m = s / v.size();
    for (double x : v) s2 += (x - m) * (x - m);
    return {m, std::sqrt(s2 / (v.size() - 1) / v.size())};
}

// x|psi> with x_{n,n+1} = sqrt((n+1)/2), m = omega = hbar = 1, written out
// per component.
std::vector<cplx> apply_x(const std::vector<cplx>& v) {
    const std::size_t n = v.size();
    std::vector<cplx> out(n, 0.0);
    for (std::size_t k = 0; k < n; ++k) {
        if (k + 1 < n) out[k] += std::sqrt((k + 1) / 2.0) * v[k + 1];
        if (k > 0) out[k] += std::sqrt(k / 2.0) * v[k - 1];
    }
    return out;
}

}  // namespace

TEST_CASE("coefficient conventions") {
    const auto zero = make_coefficients(0.0, 1.0, 1.0, Convention::PaperLiteral);
    CHECK(zero.c_drift == 0.0);
    CHECK(zero.c_diff == 0.0);
    CHECK(make_coefficients(0.0, 0.0, 1.0, Convention::ChainConsistent).c_diff == 0.0);

    const auto pl = make_coefficients(1.0, 1.0, 1.0, Convention::PaperLiteral);
    CHECK(pl.c_drift == 0.25);
    CHECK(pl.c_diff == 0.5);
    const auto cc = make_coefficients(1.0, 1.0, 1.0, Convention::ChainConsistent);
    CHECK(cc.c_drift == 0.125);
    CHECK(cc.c_diff == 0.5);

    for (double lambda : {0.5, 1.0, 2.0, 4.0}) {
        for (double sigma : {0.25, 1.0, 2.0}) {
            const auto c = make_coefficients(lambda, sigma, 1.0, Convention::ChainConsistent);
            CHECK(2 * c.c_drift == c.c_diff * c.c_diff);
            const auto p = make_coefficients(lambda, sigma, 1.0, Convention::PaperLiteral);
            CHECK(p.c_drift == p.c_diff * p.c_diff);
        }
    }
    CHECK_THROWS_AS(make_coefficients(1.0, 0.0, 1.0, Convention::ChainConsistent), InvalidParameter);
    CHECK_THROWS_AS(make_coefficients(1.0, -1.0, 1.0, Convention::PaperLiteral), InvalidParameter);
    CHECK(to_string(Convention::PaperLiteral) == "paper_literal");
    CHECK(convention_from_string("chain_consistent") == Convention::ChainConsistent);
    CHECK_THROWS_AS(convention_from_string("ito"), InvalidParameter);
}

TEST_CASE("noise stream") {
    SUBCASE("deterministic per key and independent across keys") {
        NoiseStream a(5, 3), b(5, 3), c(5, 4), d(6, 3);
        for (int i = 0; i < 10; ++i) {
            const double va = a.gaussian();
            CHECK(va == b.gaussian());
            CHECK(va != c.gaussian());
            CHECK(va != d.gaussian());
        }
    }
    SUBCASE("two counter values per Gaussian") {
        NoiseStream s(1, 0);
        s.gaussian();
        s.increment(0.1);
        CHECK(s.position() == 4);
        CHECK(s.gaussian_draws() == 2);
        s.uniform();
        CHECK(s.position() == 5);
    }
    SUBCASE("moments of dW") {
        NoiseStream s(99, 0);
        const double dt = 1e-3;
        std::vector<double> dw, dw2;
        for (int i = 0; i < 100000; ++i) {
            const double v = s.increment(dt).dW;
            dw.push_back(v);
            dw2.push_back(v * v);
        }
        const Mean m1 = mean_se(dw);
        const Mean m2 = mean_se(dw2);
        CHECK(std::abs(m1.mean) < 3 * m1.se);
        CHECK(std::abs(m2.mean - dt) < 3 * m2.se);
    }
    SUBCASE("uniforms stay inside (0, 1)") {
        NoiseStream s(0, 0);
        for (int i = 0; i < 10000; ++i) {
            const double u = s.uniform();
            CHECK((u > 0.0 && u < 1.0));
        }
    }
    CHECK_THROWS_AS(NoiseStream(0, 0).increment(0.0), InvalidParameter);
}

TEST_CASE("one Euler-Maruyama step against a component-wise evaluation") {
    const FockBasis b{64, 1, 1, 1};
    const auto ops = build_operators(b);
    const auto coeffs = make_coefficients(1.0, 1.0, 1.0, Convention::ChainConsistent);
    const NoiseIncrement noise{0.0237, 1e-3};
    const auto psi = QuantumState::fock(64, 0);

    const auto got = sse_step(psi, 0.0, 1.0, coeffs, ops, noise);

    std::vector<cplx> v(64, 0.0);
    v[0] = 1.0;
    const auto xv = apply_x(v);
    double mean = 0;
    for (int k = 0; k < 64; ++k) mean += std::real(std::conj(v[k]) * xv[k]);
    std::vector<cplx> a(64), a2(64);
    for (int k = 0; k < 64; ++k) a[k] = xv[k] - mean * v[k];
    const auto xa = apply_x(a);
    for (int k = 0; k < 64; ++k) a2[k] = xa[k] - mean * a[k];
    std::vector<cplx> out(64);
    double nrm = 0;
    for (int k = 0; k < 64; ++k) {
        const double energy = k + 0.5;
        out[k] = v[k] + cplx(0, -1) * energy * v[k] * noise.dt - coeffs.c_drift * a2[k] * noise.dt +
                 coeffs.c_diff * a[k] * noise.dW;
        nrm += std::norm(out[k]);
    }
    nrm = std::sqrt(nrm);
    CHECK(got.prenorm == doctest::Approx(nrm).epsilon(1e-13));
    for (int k = 0; k < 64; ++k) CHECK(std::abs(got.psi.amplitudes()(k) - out[k] / nrm) < 1e-12);
    CHECK(got.psi.amplitudes().norm() == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("lambda = 0 step is an explicit Euler unitary step") {
    const FockBasis b{64, 1, 1, 1};
    const auto ops = build_operators(b);
    const auto coeffs = make_coefficients(0.0, 1.0, 1.0, Convention::ChainConsistent);
    const auto psi = coherent_state(b, 1.0, 0.5).state;
    auto infidelity = [&](double dt) {
        const auto got = sse_step(psi, 3.0, 0.0, coeffs, ops, {0.7, dt});
        CVector exact = psi.amplitudes();
        for (int n = 0; n < 64; ++n) exact(n) *= std::exp(cplx(0, -(n + 0.5) * dt));
        return 1.0 - std::abs(exact.dot(got.psi.amplitudes()));
    };
    const double e1 = infidelity(1e-2);
    const double e2 = infidelity(5e-3);
    CHECK(e1 < 1e-3);
    CHECK(e1 / e2 > 3.0);  // at least second order in dt
}

TEST_CASE("position eigenstates are untouched by the measurement terms") {
    const FockBasis b{16, 1, 1, 1};
    const auto ops = build_operators(b);
    const auto spec = position_spectrum(ops);
    const auto coeffs = make_coefficients(1.0, 1.0, 1.0, Convention::PaperLiteral);
    const CVector v = spec.eigenvectors.col(5).cast<cplx>();
    const auto psi = QuantumState::unchecked(v);
    const NoiseIncrement noise{0.05, 1e-3};
    const auto got = sse_step(psi, 0.0, 1.0, coeffs, ops, noise, 1.0);
    CVector ref = v + cplx(0, -noise.dt) * ops.h0.apply(v);
    ref.normalize();
    CHECK((got.psi.amplitudes() - ref).norm() < 1e-10);
    CHECK((measurement_update(v, ops.x, coeffs, noise) - v).norm() < 1e-10);
}

TEST_CASE("split-unitary integrator: measurement then exact free phases at lambda X = 0") {
    const FockBasis b{64, 1, 1, 1};
    const auto ops = build_operators(b);
    const auto spec = position_spectrum(ops);
    const auto coeffs = make_coefficients(1.0, 1.0, 1.0, Convention::ChainConsistent);
    const SseIntegrator integ(ops, spec, 1.0, coeffs, 1e-3, SseScheme::SplitUnitary);
    const auto psi = coherent_state(b, 1.5, -0.5).state;
    const NoiseIncrement noise{-0.031, 1e-3};
    const auto got = integ.step(psi, 0.0, noise);
    CVector ref = measurement_update(psi.amplitudes(), ops.x, coeffs, noise);
    const double prenorm = ref.norm();
    for (int n = 0; n < 64; ++n) ref(n) *= std::exp(cplx(0, -(n + 0.5) * 1e-3));
    CHECK(got.prenorm == doctest::Approx(prenorm).epsilon(1e-14));
    CHECK((got.psi.amplitudes() - ref / prenorm).norm() < 1e-13);
    CHECK_THROWS_AS(integ.step(psi, 0.0, {0.0, 2e-3}), InvalidParameter);
}

TEST_CASE("step guards") {
    const FockBasis b{64, 1, 1, 1};
    const auto ops = build_operators(b);
    const auto coeffs = make_coefficients(1.0, 1.0, 1.0, Convention::ChainConsistent);
    const auto cat = [&] {
        const QuantumState s[] = {coherent_state(b, -3, 0).state, coherent_state(b, 3, 0).state};
        const cplx a[] = {1.0, 1.0};
        return superpose(s, a).state;
    }();
    CHECK_THROWS_AS(sse_step(cat, 0.0, 1.0, coeffs, ops, {50.0, 1e-3}), NumericalBlowup);
    CHECK_THROWS_AS(sse_step(cat, 0.0, 1.0, coeffs, ops, {0.0, 0.0}), InvalidParameter);

    CVector high = CVector::Zero(64);
    high(61) = 1.0;
    CHECK_THROWS_AS(sse_step(QuantumState::unchecked(high), 0.0, 1.0, coeffs, ops, {0.0, 1e-3}), TruncationError);
}

TEST_CASE("unitary limit over t = 10") {
    const FockBasis b{64, 1, 1, 1};
    const auto ops = build_operators(b);
    const auto spec = position_spectrum(ops);
    const auto coeffs = make_coefficients(0.0, 1.0, 1.0, Convention::ChainConsistent);
    const SseIntegrator integ(ops, spec, 0.0, coeffs, 1e-3, SseScheme::SplitUnitary);
    QuantumState psi = coherent_state(b, 1.0, 0.0).state;
    NoiseStream ns(42, 0);
    for (int k = 0; k < 10000; ++k) psi = integ.step(psi, 0.0, ns.increment(1e-3)).psi;
    // coherent orbit: x(t) = cos t, p(t) = -sin t, global phase irrelevant
    const double t = 10.0;
    const auto exact = coherent_state(b, std::cos(t), -std::sin(t)).state;
    CHECK(1.0 - exact.overlap_abs(psi) < 1e-6);
}

TEST_CASE("the squared norm is a martingale only for the chain-consistent drift") {
    const FockBasis b{64, 1, 1, 1};
    const auto ops = build_operators(b);
    const QuantumState s[] = {coherent_state(b, -2, 0).state, coherent_state(b, 2, 0).state};
    const cplx a[] = {1.0, 1.0};
    const auto psi = superpose(s, a).state;
    const double dt = 1e-3;
    auto sample = [&](Convention conv) {
        const auto coeffs = make_coefficients(1.0, 1.0, 1.0, conv);
        NoiseStream ns(2024, static_cast<std::uint64_t>(conv));
        std::vector<double> d;
        for (int i = 0; i < 100000; ++i) {
            const auto r = measurement_update(psi.amplitudes(), ops.x, coeffs, ns.increment(dt));
            d.push_back(r.squaredNorm() - 1.0);
        }
        return mean_se(d);
    };
    const Mean cc = sample(Convention::ChainConsistent);
    const Mean pl = sample(Convention::PaperLiteral);
    CHECK(std::abs(cc.mean) < 3 * cc.se);
    CHECK(std::abs(pl.mean) > 3 * pl.se);
}

TEST_CASE("measurement record") {
    const FockBasis b{64, 1, 1, 1};
    const auto ops = build_operators(b);
    const auto psi = coherent_state(b, 2.0, 0.0).state;
    CHECK(record_sample(psi, ops, 1.0, 1.0, 1.0, {0.0, 1e-3}) == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(record_sample(psi, ops, 1.0, 1.0, 1.0, {1e-3, 1e-3}) == doctest::Approx(3.0).epsilon(1e-12));
    CHECK_THROWS_AS(record_sample(psi, ops, 0.0, 1.0, 1.0, {0.0, 1e-3}), InvalidParameter);

    const double lambda = 0.8, sigma = 1.5, dt = 1e-3;
    NoiseStream ns(3, 0);
    std::vector<double> dev2;
    for (int i = 0; i < 20000; ++i) {
        const double d = record_sample(0.0, lambda, sigma, 1.0, ns.increment(dt));
        dev2.push_back(d * d);
    }
    const Mean m = mean_se(dev2);
    const double expected = std::pow(sigma / lambda, 2) / dt;
    CHECK(std::abs(m.mean - expected) < 3 * m.se);
}
