#pragma once

#include "fullerlab/poly.hpp"

#include <span>
#include <string>
#include <vector>

namespace fullerlab {

/// Affine optimal-control problem: minimize the integral of
/// f0(x) + sum_i g0_i(x) u_i subject to xdot = f(x) + sum_i g_i(x) u_i and
/// |u_i(t)| <= K(t). All fields are polynomial over the n state variables;
/// K is polynomial in the single variable t and must stay strictly positive
/// on any horizon of interest.
struct AffineSystem {
    int n = 0; // state dimension
    int m = 0; // input count
    PolyVec f;               // drift, dim n over x
    std::vector<PolyVec> g;  // control fields, m entries of dim n
    Poly f0;                 // running-cost drift term
    std::vector<Poly> g0;    // running-cost control terms
    Poly K;                  // control bound, one variable (t)
    std::string name;        // optional label for reports

    void validate() const;

    /// Asserts K(t) > 0 on `samples`+1 evenly spaced points of [t0, t1].
    void check_bound_positive(double t0, double t1, int samples = 256) const;
};

/// The same problem with the running cost adjoined as state component 0:
/// z = (x_0, x), fbar = (f0, f), gbar_i = (g0_i, g_i). No field depends on
/// x_0. Jacobians are precomputed; instances are immutable after
/// construction and safe to share across threads.
struct AugmentedSystem {
    int N = 0; // n + 1
    int m = 0;
    PolyVec fbar;
    std::vector<PolyVec> gbar;
    Poly K;
    std::string name;

    // jac_fbar[j*N + k] = d fbar_j / d z_k, likewise per input for gbar.
    std::vector<Poly> jac_fbar;
    std::vector<std::vector<Poly>> jac_gbar;
};

/// One sample of an extremal: time, augmented state z, augmented adjoint p
/// (component 0 stores -lambda), and the control in effect.
struct ExtremalPoint {
    double t = 0.0;
    std::vector<double> z;
    std::vector<double> p;
    std::vector<double> u;
};

/// Builds the augmented system and precomputes all Jacobians.
AugmentedSystem augment(const AffineSystem& sys);

/// H = <p, fbar(z)> + sum_i <p, gbar_i(z)> u_i with p[0] = -lambda.
double hamiltonian_eval(const AugmentedSystem& aug, std::span<const double> z,
                        std::span<const double> p, std::span<const double> u);

/// Extremal vector field: dz = fbar + sum gbar_i u_i,
/// dp_j = -sum_k p_k d(fbar_k + sum_i u_i gbar_{i,k}) / dz_j. dp[0] is
/// identically zero since no field depends on z_0.
void extremal_rhs(const AugmentedSystem& aug, std::span<const double> z,
                  std::span<const double> p, std::span<const double> u,
                  std::span<double> dz, std::span<double> dp);

/// Switching vector phi_i = <p, gbar_i(z)>.
std::vector<double> switching_vector(const AugmentedSystem& aug, std::span<const double> z,
                                     std::span<const double> p);

} // namespace fullerlab
