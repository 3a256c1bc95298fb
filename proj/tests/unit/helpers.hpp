#pragma once

#include "fullerlab/poly.hpp"
#include "fullerlab/rng.hpp"
#include "fullerlab/system.hpp"

#include <vector>

namespace fullerlab::testing {

// Classic fixed-step RK4 on the extremal field with frozen u; oracle-side,
// independent of the production integrator.
inline void rk4_flow(const AugmentedSystem& aug, std::vector<double>& z, std::vector<double>& p,
                     const std::vector<double>& u, double dt, int steps) {
    int N = aug.N;
    std::vector<double> k1z(N), k1p(N), k2z(N), k2p(N), k3z(N), k3p(N), k4z(N), k4p(N), tz(N), tp(N);
    for (int s = 0; s < steps; ++s) {
        extremal_rhs(aug, z, p, u, k1z, k1p);
        for (int i = 0; i < N; ++i) {
            tz[i] = z[i] + 0.5 * dt * k1z[i];
            tp[i] = p[i] + 0.5 * dt * k1p[i];
        }
        extremal_rhs(aug, tz, tp, u, k2z, k2p);
        for (int i = 0; i < N; ++i) {
            tz[i] = z[i] + 0.5 * dt * k2z[i];
            tp[i] = p[i] + 0.5 * dt * k2p[i];
        }
        extremal_rhs(aug, tz, tp, u, k3z, k3p);
        for (int i = 0; i < N; ++i) {
            tz[i] = z[i] + dt * k3z[i];
            tp[i] = p[i] + dt * k3p[i];
        }
        extremal_rhs(aug, tz, tp, u, k4z, k4p);
        for (int i = 0; i < N; ++i) {
            z[i] += dt / 6.0 * (k1z[i] + 2 * k2z[i] + 2 * k3z[i] + k4z[i]);
            p[i] += dt / 6.0 * (k1p[i] + 2 * k2p[i] + 2 * k3p[i] + k4p[i]);
        }
    }
}

inline Rational random_rational(SplitMix64& rng, long max_num = 6, long max_den = 4) {
    long num = rng.integer(-max_num, max_num);
    long den = rng.integer(1, max_den);
    return Rational(num, den);
}

inline Poly random_poly(SplitMix64& rng, int nvars, int max_degree = 3, int max_terms = 5) {
    Poly p(nvars);
    long terms = rng.integer(0, max_terms);
    for (long t = 0; t < terms; ++t) {
        ExponentVec e(static_cast<size_t>(nvars), 0);
        int budget = static_cast<int>(rng.integer(0, max_degree));
        for (int b = 0; b < budget; ++b) {
            long v = rng.integer(0, nvars - 1);
            e[static_cast<size_t>(v)] += 1;
        }
        p.add_term(e, random_rational(rng));
    }
    return p;
}

inline PolyVec random_polyvec(SplitMix64& rng, int dim, int nvars, int max_degree = 2) {
    std::vector<Poly> entries;
    entries.reserve(static_cast<size_t>(dim));
    for (int i = 0; i < dim; ++i) entries.push_back(random_poly(rng, nvars, max_degree));
    return PolyVec(std::move(entries));
}

inline std::vector<double> random_point(SplitMix64& rng, int dim, double scale = 1.0) {
    std::vector<double> p(static_cast<size_t>(dim));
    for (auto& v : p) v = scale * (2.0 * rng.uniform() - 1.0);
    return p;
}

} // namespace fullerlab::testing
