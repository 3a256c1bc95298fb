#include "fullerlab/problems.hpp"

#include "fullerlab/liecone.hpp"

#include <doctest.h>

using namespace fullerlab;

TEST_CASE("fuller_classic shape") {
    AffineSystem sys = fuller_classic();
    CHECK(sys.n == 2);
    CHECK(sys.m == 1);
    CHECK(sys.f0 == Poly::from_text("1/2 * x0^2", 2));
    CHECK(sys.K == Poly::constant(1, Rational(1)));
}

TEST_CASE("fuller_multi contract checks") {
    QMatrix spd = QMatrix::from_rows({{Rational(2), Rational(1)}, {Rational(1), Rational(2)}});
    QMatrix sym_inv = QMatrix::from_rows({{Rational(1), Rational(0)}, {Rational(0), Rational(3)}});
    CHECK_NOTHROW(fuller_multi(spd, sym_inv));

    QMatrix not_spd = QMatrix::from_rows({{Rational(1), Rational(2)}, {Rational(2), Rational(1)}});
    CHECK_THROWS_WITH_AS(fuller_multi(not_spd, sym_inv),
                         "fuller_multi: M1 must be positive definite", std::invalid_argument);

    QMatrix not_sym = QMatrix::from_rows({{Rational(1), Rational(1)}, {Rational(0), Rational(1)}});
    CHECK_THROWS_AS(fuller_multi(spd, not_sym), std::invalid_argument);

    QMatrix singular = QMatrix::from_rows({{Rational(1), Rational(1)}, {Rational(1), Rational(1)}});
    CHECK_THROWS_WITH_AS(fuller_multi(spd, singular), "fuller_multi: M2 must be invertible",
                         std::invalid_argument);
}

TEST_CASE("hamiltonian_family hypothesis checks") {
    QMatrix t = QMatrix::identity(2);
    QMatrix m = QMatrix::identity(2);
    Poly q0 = Poly(2);
    Poly c = Poly::from_text("1/2 * x0^2 + 1/2 * x1^2", 2);

    CHECK_NOTHROW(hamiltonian_family(t, m, q0, c));
    // Quartic potential still satisfies P(0) = 0.
    CHECK_NOTHROW(hamiltonian_family(t, m, Poly::from_text("1/4 * x0^4", 2), c));

    // c == 1 violates c(0) = 0.
    CHECK_THROWS_WITH_AS(
        hamiltonian_family(t, m, q0, Poly::constant(2, Rational(1))),
        "hamiltonian_family: hypothesis violated: c(0) = 0 (fully singular arcs are excluded otherwise)",
        std::invalid_argument);

    // P must vanish at the origin: Q = x0 gives P = (-1, 0).
    CHECK_THROWS_AS(hamiltonian_family(t, m, Poly::from_text("x0", 2), c), std::invalid_argument);

    // grad c(0) != 0.
    CHECK_THROWS_AS(hamiltonian_family(t, m, q0, Poly::from_text("x0 + x0^2 + x1^2", 2)),
                    std::invalid_argument);

    // Indefinite Hessian.
    CHECK_THROWS_AS(hamiltonian_family(t, m, q0, Poly::from_text("x0^2 - x1^2", 2)),
                    std::invalid_argument);

    // T not positive definite.
    QMatrix bad_t = QMatrix::from_rows({{Rational(-1), Rational(0)}, {Rational(0), Rational(1)}});
    CHECK_THROWS_AS(hamiltonian_family(bad_t, m, q0, c), std::invalid_argument);
}

TEST_CASE("time_optimal_di has unit running cost") {
    AffineSystem sys = time_optimal_di();
    CHECK(sys.f0 == Poly::constant(2, Rational(1)));
    CHECK(sys.f == fuller_classic().f);
}

TEST_CASE("coupled-family ladder entries equal the closed-form chain, symbolically") {
    // <p, ad_f g_i>   = -(M2 M1 p1)_i
    // <p, ad_f^2 g_i> = -(M2 M1 x)_i      (after p0 -> -1)
    // <p, ad_f^3 g_i> = -(M2 M1^2 v)_i
    // <p, ad_f^4 g_i> = 0
    QMatrix m1 = QMatrix::from_rows({{Rational(2), Rational(1)}, {Rational(1), Rational(2)}});
    QMatrix m2 = QMatrix::from_rows({{Rational(1), Rational(0)}, {Rational(0), Rational(3)}});
    AugmentedSystem aug = augment(fuller_multi(m1, m2));
    LadderReport rep = ab_matrices(aug);
    REQUIRE(rep.k == 4);
    const int n = 2, N = aug.N, nv = 2 * N;

    QMatrix m1m2 = m1 * m2;
    QMatrix m1m1m2 = m1 * m1m2;
    // Variable layout of the entry polynomials: z = (x0, x, v) at 0..N-1,
    // p = (p0, p1, p2) at N..2N-1.
    auto var = [&](int idx) { return Poly::variable(nv, idx); };
    for (int i = 0; i < n; ++i) {
        Poly lvl1(nv), lvl2(nv), lvl3(nv);
        for (int k = 0; k < n; ++k) {
            lvl1 += var(N + 1 + k).scaled(-m1m2.at(k, i));         // -(M1 M2)_{ki} p1_k
            lvl2 += (var(1 + k) * var(N)).scaled(m1m2.at(k, i));   // (M1 M2)_{ki} x_k p0
            lvl3 += (var(1 + n + k) * var(N)).scaled(m1m1m2.at(k, i));
        }
        auto pairing = [&](const PolyVec& field) {
            Poly acc(nv);
            for (int kk = 0; kk < N; ++kk) acc += field[kk].lift(nv, 0) * var(N + kk);
            return acc;
        };
        CHECK(pairing(rep.ad_fields[1][static_cast<size_t>(i)].field) == lvl1);
        CHECK(pairing(rep.ad_fields[2][static_cast<size_t>(i)].field) == lvl2);
        CHECK(pairing(rep.ad_fields[3][static_cast<size_t>(i)].field) == lvl3);
        CHECK(rep.ad_fields[4][static_cast<size_t>(i)].field.is_zero());
    }
}

TEST_CASE("quadratic-cost family matches the coupled extension") {
    // T = M1, M = M2, Q = 0, c = |x|^2/2 gives the same augmented fields.
    QMatrix m1 = QMatrix::from_rows({{Rational(2), Rational(1)}, {Rational(1), Rational(2)}});
    QMatrix m2 = QMatrix::from_rows({{Rational(1), Rational(0)}, {Rational(0), Rational(3)}});
    Poly c = Poly::from_text("1/2 * x0^2 + 1/2 * x1^2", 2);
    AffineSystem a = hamiltonian_family(m1, m2, Poly(2), c);
    AffineSystem b = fuller_multi(m1, m2);
    CHECK(augment(a).fbar == augment(b).fbar);
    for (int i = 0; i < a.m; ++i) CHECK(augment(a).gbar[static_cast<size_t>(i)] ==
                                        augment(b).gbar[static_cast<size_t>(i)]);
}
