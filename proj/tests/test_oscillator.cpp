#include <doctest.h>

#include <cmath>
#include <vector>

#include "hqc/errors.hpp"
#include "hqc/oscillator.hpp"

using namespace hqc;

namespace {

// Ladder operator a on the truncated basis, built entry by entry.
CMatrix ladder(int n) {
    CMatrix a = CMatrix::Zero(n, n);
    for (int k = 1; k < n; ++k) a(k - 1, k) = std::sqrt(static_cast<double>(k));
    return a;
}

double factorial(int n) { return n <= 1 ? 1.0 : n * factorial(n - 1); }

}  // namespace

TEST_CASE("basis validation") {
    CHECK_NOTHROW(FockBasis{}.validate());
    CHECK_THROWS_AS((FockBasis{1, 1, 1, 1}.validate()), InvalidParameter);
    CHECK_THROWS_AS((FockBasis{8, 0, 1, 1}.validate()), InvalidParameter);
    CHECK_THROWS_AS((FockBasis{8, 1, -1, 1}.validate()), InvalidParameter);
    CHECK_THROWS_AS((FockBasis{8, 1, 1, 0}.validate()), InvalidParameter);
}

TEST_CASE("dim 2 position operator") {
    const auto ops = build_operators(FockBasis{2, 1, 1, 1});
    const CMatrix x = ops.position().entries;
    const double s = 1.0 / std::sqrt(2.0);
    CHECK(std::abs(x(0, 0)) < 1e-15);
    CHECK(std::abs(x(1, 1)) < 1e-15);
    CHECK(std::abs(x(0, 1) - s) < 1e-15);
    CHECK(std::abs(x(1, 0) - s) < 1e-15);
}

TEST_CASE("operators match the ladder construction for non-unit parameters") {
    const FockBasis b{12, 1.7, 0.6, 0.9};
    const auto ops = build_operators(b);
    const CMatrix a = ladder(b.dim);
    const CMatrix ad = a.adjoint();
    const CMatrix x = std::sqrt(b.hbar / (2 * b.m * b.omega)) * (a + ad);
    const CMatrix p = cplx(0, 1) * std::sqrt(b.hbar * b.m * b.omega / 2) * (ad - a);
    const CMatrix h = b.hbar * b.omega * (ad * a + 0.5 * CMatrix::Identity(b.dim, b.dim));
    CHECK((ops.position().entries - x).cwiseAbs().maxCoeff() < 1e-14);
    CHECK((ops.momentum().entries - p).cwiseAbs().maxCoeff() < 1e-14);
    CHECK((ops.hamiltonian0().entries - h).cwiseAbs().maxCoeff() < 1e-13);
    for (const auto& op : {ops.position(), ops.momentum(), ops.hamiltonian0()}) CHECK(is_hermitian(op.entries));
}

TEST_CASE("truncated commutator deviates only in the corner, by N hbar") {
    for (double hbar : {1.0, 0.5}) {
        const FockBasis b{10, 1.0, 1.0, hbar};
        const auto ops = build_operators(b);
        const CMatrix x = ops.position().entries;
        const CMatrix p = ops.momentum().entries;
        const CMatrix dev = x * p - p * x - cplx(0, hbar) * CMatrix::Identity(10, 10);
        for (int i = 0; i < 10; ++i)
            for (int j = 0; j < 10; ++j)
                if (i != 9 || j != 9) CHECK(std::abs(dev(i, j)) < 1e-13);
        CHECK(std::abs(dev(9, 9)) == doctest::Approx(10 * hbar).epsilon(1e-12));
    }
}

TEST_CASE("ground state energy is hbar omega / 2") {
    const FockBasis b{16, 1.0, 2.5, 0.8};
    const auto ops = build_operators(b);
    CHECK(expect(ops.hamiltonian0(), QuantumState::fock(16, 0)) == doctest::Approx(0.5 * 0.8 * 2.5));
}

TEST_CASE("coherent states") {
    const FockBasis b{64, 1, 1, 1};
    const auto ops = build_operators(b);

    SUBCASE("origin is the ground state") {
        const auto c = coherent_state(b, 0.0, 0.0);
        CHECK(std::abs(c.state.amplitudes()(0) - 1.0) < 1e-15);
        CHECK(c.state.amplitudes().tail(63).norm() < 1e-15);
    }
    SUBCASE("amplitudes follow alpha^n / sqrt(n!)") {
        const cplx alpha = coherent_alpha(b, 1.3, -0.7);
        CHECK(std::abs(alpha - cplx(1.3 / std::sqrt(2.0), -0.7 / std::sqrt(2.0))) < 1e-15);
        const auto c = coherent_state(b, 1.3, -0.7);
        const double norm0 = std::exp(-0.5 * std::norm(alpha));
        for (int n = 0; n < 20; ++n) {
            const cplx ref = norm0 * std::pow(alpha, n) / std::sqrt(factorial(n));
            CHECK(std::abs(c.state.amplitudes()(n) - ref) < 1e-12);
        }
        CHECK(c.leakage < 1e-12);
    }
    SUBCASE("mean and minimal variance") {
        for (auto [x0, p0] : std::vector<std::pair<double, double>>{{0.5, 0}, {-3, 1}, {4, -2}, {-6, 0}}) {
            const auto c = coherent_state(b, x0, p0);
            CHECK(expect(ops.position(), c.state) == doctest::Approx(x0).epsilon(1e-8));
            CHECK(expect(ops.momentum(), c.state) == doctest::Approx(p0).epsilon(1e-8));
            CHECK(variance(ops.position(), c.state) == doctest::Approx(0.5).epsilon(1e-8));
        }
    }
    SUBCASE("overlaps") {
        const auto a = coherent_state(b, 1.0, 0.5).state;
        const auto c = coherent_state(b, -0.5, 1.5).state;
        const double d2 = std::norm(coherent_alpha(b, 1.0, 0.5) - coherent_alpha(b, -0.5, 1.5));
        CHECK(std::pow(a.overlap_abs(c), 2) == doctest::Approx(std::exp(-d2)).epsilon(1e-6));
    }
    SUBCASE("packets outside the basis are rejected") {
        CHECK_THROWS_AS(coherent_state(FockBasis{16, 1, 1, 1}, 6.0, 0.0), TruncationError);
    }
}

TEST_CASE("superpositions") {
    const FockBasis b{64, 1, 1, 1};
    const auto ops = build_operators(b);
    const auto left = coherent_state(b, -5, 0).state;
    const auto right = coherent_state(b, 5, 0).state;

    SUBCASE("single state is unchanged") {
        const QuantumState s[] = {left};
        const cplx a[] = {1.0};
        const auto sup = superpose(s, a);
        CHECK((sup.state.amplitudes() - left.amplitudes()).norm() < 1e-15);
        CHECK(sup.prenorm == doctest::Approx(1.0));
    }
    SUBCASE("equal amplitudes are symmetric") {
        const QuantumState s[] = {left, right};
        const cplx a[] = {1.0, 1.0};
        CHECK(std::abs(expect(ops.position(), superpose(s, a).state)) < 1e-6);
    }
    SUBCASE("weights 0.3 / 0.7") {
        const QuantumState s[] = {left, right};
        const cplx a[] = {std::sqrt(0.3), std::sqrt(0.7)};
        CHECK(expect(ops.position(), superpose(s, a).state) == doctest::Approx(0.3 * -5 + 0.7 * 5).epsilon(1e-6));
    }
    SUBCASE("errors") {
        const QuantumState s[] = {left, left};
        const cplx cancel[] = {1.0, -1.0};
        CHECK_THROWS_AS(superpose(s, cancel), DegenerateSuperposition);
        const cplx one[] = {1.0};
        CHECK_THROWS_AS(superpose(s, one), InvalidParameter);
        CHECK_THROWS_AS(superpose(std::span<const QuantumState>{}, std::span<const cplx>{}), InvalidParameter);
    }
}

TEST_CASE("expectation values and variances") {
    const FockBasis b{32, 1.3, 0.7, 1.1};
    const auto ops = build_operators(b);
    const auto one = QuantumState::fock(32, 1);
    const OperatorMatrix id{CMatrix::Identity(32, 32), OperatorRole::Generic};
    CHECK(expect(id, coherent_state(b, 1, 1).state) == doctest::Approx(1.0));
    CHECK(std::abs(expect(ops.position(), one)) < 1e-15);
    CHECK(variance(ops.position(), one) == doctest::Approx(3 * b.hbar / (2 * b.m * b.omega)).epsilon(1e-12));

    SUBCASE("linearity and shift invariance") {
        const auto psi = coherent_state(b, 0.8, -1.2).state;
        const OperatorMatrix combo{2.0 * ops.position().entries + 3.0 * ops.momentum().entries,
                                   OperatorRole::Generic};
        CHECK(expect(combo, psi) ==
              doctest::Approx(2 * expect(ops.position(), psi) + 3 * expect(ops.momentum(), psi)));
        const OperatorMatrix shifted{ops.position().entries + 4.0 * CMatrix::Identity(32, 32),
                                     OperatorRole::Generic};
        CHECK(variance(shifted, psi) == doctest::Approx(variance(ops.position(), psi)).epsilon(1e-10));
    }
    SUBCASE("non-Hermitian operator") {
        CMatrix m = CMatrix::Zero(32, 32);
        m(0, 1) = 1.0;
        CHECK_THROWS_AS(expect(OperatorMatrix{m, OperatorRole::Generic}, one), NonHermitian);
    }
    SUBCASE("tridiagonal moments agree with dense ones") {
        const auto psi = coherent_state(b, -1.5, 0.4).state;
        const auto mom = position_moments(ops.x, psi.amplitudes());
        CHECK(mom.mean == doctest::Approx(expect(ops.position(), psi)).epsilon(1e-12));
        CHECK(mom.variance == doctest::Approx(variance(ops.position(), psi)).epsilon(1e-10));
    }
}

TEST_CASE("state constructors normalize and guard the truncation") {
    CVector v = CVector::Zero(8);
    v(0) = 3.0;
    v(1) = cplx(0, 4.0);
    const auto s = QuantumState::from_amplitudes(v);
    CHECK(s.amplitudes().norm() == doctest::Approx(1.0).epsilon(1e-15));
    CVector top = CVector::Zero(8);
    top(7) = 1.0;
    CHECK_THROWS_AS(QuantumState::from_amplitudes(top), TruncationError);
    CHECK_THROWS_AS(QuantumState::from_amplitudes(CVector::Zero(8)), DegenerateState);
    CHECK(QuantumState::unchecked(top).top_occupation() == doctest::Approx(1.0));
}
