#include "fullerlab/problems.hpp"

#include <stdexcept>

namespace fullerlab {

namespace {

Poly unit_bound() {
    return Poly::constant(1, Rational(1));
}

// Matrix-vector contraction into polynomial components:
// out_j = sum_k mat(j,k) * vars[base + k].
std::vector<Poly> mat_times_vars(const QMatrix& mat, int nvars, int base) {
    std::vector<Poly> out;
    out.reserve(static_cast<size_t>(mat.rows));
    for (int j = 0; j < mat.rows; ++j) {
        Poly pj(nvars);
        for (int k = 0; k < mat.cols; ++k) {
            if (mat.at(j, k).is_zero()) continue;
            pj += Poly::variable(nvars, base + k).scaled(mat.at(j, k));
        }
        out.push_back(std::move(pj));
    }
    return out;
}

} // namespace

AffineSystem fuller_classic() {
    AffineSystem sys;
    sys.name = "fuller-classic";
    sys.n = 2;
    sys.m = 1;
    Poly x = Poly::variable(2, 0);
    Poly v = Poly::variable(2, 1);
    sys.f = PolyVec({v, Poly(2)});
    sys.g = {PolyVec({Poly(2), Poly::constant(2, Rational(1))})};
    sys.f0 = (x * x).scaled(Rational(1, 2));
    sys.g0 = {Poly(2)};
    sys.K = unit_bound();
    sys.validate();
    return sys;
}

AffineSystem fuller_multi(const QMatrix& m1, const QMatrix& m2) {
    int n = m1.rows;
    if (m1.rows != m1.cols || m2.rows != m2.cols || m2.rows != n)
        throw std::invalid_argument("fuller_multi: M1 and M2 must be square of equal size");
    if (!m1.is_symmetric())
        throw std::invalid_argument("fuller_multi: M1 must be symmetric");
    if (!m1.is_positive_definite())
        throw std::invalid_argument("fuller_multi: M1 must be positive definite");
    if (!m2.is_symmetric())
        throw std::invalid_argument("fuller_multi: M2 must be symmetric");
    if (m2.determinant().is_zero())
        throw std::invalid_argument("fuller_multi: M2 must be invertible");

    AffineSystem sys;
    sys.name = "fuller-multi";
    sys.n = 2 * n;
    sys.m = n;
    int nv = sys.n;

    // State layout: x block at 0..n-1, v block at n..2n-1.
    std::vector<Poly> drift = mat_times_vars(m1, nv, n); // M1 v
    for (int j = 0; j < n; ++j) drift.push_back(Poly(nv));
    sys.f = PolyVec(std::move(drift));

    for (int i = 0; i < n; ++i) {
        std::vector<Poly> gi(static_cast<size_t>(nv), Poly(nv));
        for (int j = 0; j < n; ++j)
            gi[static_cast<size_t>(n + j)] = Poly::constant(nv, m2.at(j, i));
        sys.g.emplace_back(std::move(gi));
        sys.g0.push_back(Poly(nv));
    }

    Poly cost(nv);
    for (int j = 0; j < n; ++j) {
        Poly xj = Poly::variable(nv, j);
        cost += (xj * xj).scaled(Rational(1, 2));
    }
    sys.f0 = cost;
    sys.K = unit_bound();
    sys.validate();
    return sys;
}

AffineSystem hamiltonian_family(const QMatrix& t_mat, const QMatrix& m_mat,
                                const Poly& q_poly, const Poly& c_poly) {
    int n = t_mat.rows;
    if (t_mat.rows != t_mat.cols || m_mat.rows != m_mat.cols || m_mat.rows != n)
        throw std::invalid_argument("hamiltonian_family: T and M must be square of equal size");
    if (!t_mat.is_symmetric())
        throw std::invalid_argument("hamiltonian_family: hypothesis violated: T must be symmetric");
    if (!t_mat.is_positive_definite())
        throw std::invalid_argument("hamiltonian_family: hypothesis violated: T must be positive definite");
    if (!m_mat.is_symmetric())
        throw std::invalid_argument("hamiltonian_family: hypothesis violated: M must be symmetric");
    if (m_mat.determinant().is_zero())
        throw std::invalid_argument("hamiltonian_family: hypothesis violated: M must be invertible");
    if (q_poly.nvars() != n)
        throw std::invalid_argument("hamiltonian_family: Q must be a polynomial in the n position variables");
    if (c_poly.nvars() != n)
        throw std::invalid_argument("hamiltonian_family: c must be a polynomial in the n position variables");

    std::vector<Rational> origin(static_cast<size_t>(n), Rational(0));

    // P = -grad Q must vanish at the origin.
    std::vector<Poly> p_field;
    p_field.reserve(static_cast<size_t>(n));
    for (int j = 0; j < n; ++j) p_field.push_back(-q_poly.partial(j));
    for (const auto& pj : p_field)
        if (!pj.eval(std::span<const Rational>(origin)).is_zero())
            throw std::invalid_argument("hamiltonian_family: hypothesis violated: P = -grad Q must vanish at 0");

    if (!c_poly.eval(std::span<const Rational>(origin)).is_zero())
        throw std::invalid_argument(
            "hamiltonian_family: hypothesis violated: c(0) = 0 (fully singular arcs are excluded otherwise)");
    for (int j = 0; j < n; ++j)
        if (!c_poly.partial(j).eval(std::span<const Rational>(origin)).is_zero())
            throw std::invalid_argument("hamiltonian_family: hypothesis violated: grad c(0) = 0");

    QMatrix hess(n, n);
    for (int r = 0; r < n; ++r)
        for (int c = 0; c < n; ++c)
            hess.at(r, c) = c_poly.partial(r).partial(c).eval(std::span<const Rational>(origin));
    if (!hess.is_positive_definite())
        throw std::invalid_argument(
            "hamiltonian_family: hypothesis violated: Hessian of c at 0 must be positive definite");

    AffineSystem sys;
    sys.name = "hamiltonian-family";
    sys.n = 2 * n;
    sys.m = n;
    int nv = sys.n;

    std::vector<Poly> drift = mat_times_vars(t_mat, nv, n); // T v
    for (int j = 0; j < n; ++j) drift.push_back(p_field[static_cast<size_t>(j)].lift(nv, 0));
    sys.f = PolyVec(std::move(drift));

    for (int i = 0; i < n; ++i) {
        std::vector<Poly> gi(static_cast<size_t>(nv), Poly(nv));
        for (int j = 0; j < n; ++j)
            gi[static_cast<size_t>(n + j)] = Poly::constant(nv, m_mat.at(j, i));
        sys.g.emplace_back(std::move(gi));
        sys.g0.push_back(Poly(nv));
    }

    sys.f0 = c_poly.lift(nv, 0);
    sys.K = unit_bound();
    sys.validate();
    return sys;
}

AffineSystem time_optimal_di() {
    AffineSystem sys = fuller_classic();
    sys.name = "time-optimal-di";
    sys.f0 = Poly::constant(2, Rational(1));
    sys.validate();
    return sys;
}

} // namespace fullerlab
