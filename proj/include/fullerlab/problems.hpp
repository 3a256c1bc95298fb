#pragma once

#include "fullerlab/qmatrix.hpp"
#include "fullerlab/system.hpp"

namespace fullerlab {

/// Minimum-integral-of-x^2/2 double integrator: xdot = v, vdot = u,
/// |u| <= 1. State order (x, v), single input.
AffineSystem fuller_classic();

/// Coupled generalization: xdot = M1 v, vdot = M2 u with cost |x|^2/2 and
/// |u_i| <= 1. Requires M1 symmetric positive definite and M2 symmetric
/// invertible (checked exactly); state order (x_1..x_n, v_1..v_n).
AffineSystem fuller_multi(const QMatrix& m1, const QMatrix& m2);

/// Mechanical family: xdot = T v, vdot = P(x) + M u with P = -grad Q and
/// running cost c(x). Hypotheses, all checked exactly on the polynomial
/// data: T symmetric positive definite; M symmetric invertible; P(0) = 0;
/// c(0) = 0; grad c(0) = 0; Hessian of c at 0 positive definite.
/// Q and c are polynomials in the n state variables x0..x{n-1}.
AffineSystem hamiltonian_family(const QMatrix& t_mat, const QMatrix& m_mat,
                                const Poly& q_poly, const Poly& c_poly);

/// Minimum-time double integrator: same dynamics as fuller_classic with
/// running cost identically 1.
AffineSystem time_optimal_di();

} // namespace fullerlab
