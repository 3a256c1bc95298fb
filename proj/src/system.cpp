#include "fullerlab/system.hpp"

#include <stdexcept>

namespace fullerlab {

void AffineSystem::validate() const {
    if (n <= 0) throw std::invalid_argument("AffineSystem: n must be positive");
    if (m < 0) throw std::invalid_argument("AffineSystem: m must be non-negative");
    if (f.dim != n) throw std::invalid_argument("AffineSystem: field 'f' has dim != n");
    if (f.nvars() != n) throw std::invalid_argument("AffineSystem: field 'f' has nvars != n");
    if (static_cast<int>(g.size()) != m)
        throw std::invalid_argument("AffineSystem: field 'g' must have m entries");
    for (const auto& gi : g) {
        if (gi.dim != n) throw std::invalid_argument("AffineSystem: field 'g' entry has dim != n");
        if (gi.nvars() != n) throw std::invalid_argument("AffineSystem: field 'g' entry has nvars != n");
    }
    if (f0.nvars() != n) throw std::invalid_argument("AffineSystem: field 'f0' has nvars != n");
    if (static_cast<int>(g0.size()) != m)
        throw std::invalid_argument("AffineSystem: field 'g0' must have m entries");
    for (const auto& gi : g0)
        if (gi.nvars() != n) throw std::invalid_argument("AffineSystem: field 'g0' entry has nvars != n");
    if (K.nvars() != 1) throw std::invalid_argument("AffineSystem: field 'K' must be univariate in t");
}

void AffineSystem::check_bound_positive(double t0, double t1, int samples) const {
    for (int i = 0; i <= samples; ++i) {
        double t = t0 + (t1 - t0) * static_cast<double>(i) / samples;
        double v = K.eval(std::span<const double>(&t, 1));
        if (!(v > 0.0))
            throw std::domain_error("AffineSystem: control bound K(t) not strictly positive at t=" +
                                    std::to_string(t));
    }
}

AugmentedSystem augment(const AffineSystem& sys) {
    sys.validate();
    AugmentedSystem aug;
    aug.N = sys.n + 1;
    aug.m = sys.m;
    aug.K = sys.K;
    aug.name = sys.name;

    // Component 0 is the running cost; state fields shift to variables 1..n.
    std::vector<Poly> fb;
    fb.reserve(static_cast<size_t>(aug.N));
    fb.push_back(sys.f0.lift(aug.N, 1));
    for (int j = 0; j < sys.n; ++j) fb.push_back(sys.f[j].lift(aug.N, 1));
    aug.fbar = PolyVec(std::move(fb));

    aug.gbar.reserve(static_cast<size_t>(sys.m));
    for (int i = 0; i < sys.m; ++i) {
        std::vector<Poly> gb;
        gb.reserve(static_cast<size_t>(aug.N));
        gb.push_back(sys.g0[static_cast<size_t>(i)].lift(aug.N, 1));
        for (int j = 0; j < sys.n; ++j) gb.push_back(sys.g[static_cast<size_t>(i)][j].lift(aug.N, 1));
        aug.gbar.emplace_back(std::move(gb));
    }

    auto jacobian = [N = aug.N](const PolyVec& v) {
        std::vector<Poly> jac;
        jac.reserve(static_cast<size_t>(N) * N);
        for (int j = 0; j < N; ++j)
            for (int k = 0; k < N; ++k) jac.push_back(v[j].partial(k));
        return jac;
    };
    aug.jac_fbar = jacobian(aug.fbar);
    aug.jac_gbar.reserve(aug.gbar.size());
    for (const auto& gb : aug.gbar) aug.jac_gbar.push_back(jacobian(gb));

    return aug;
}

namespace {

void check_dims(const AugmentedSystem& aug, std::span<const double> z, std::span<const double> p,
                std::span<const double> u) {
    if (static_cast<int>(z.size()) != aug.N)
        throw std::invalid_argument("augmented state has wrong dimension");
    if (static_cast<int>(p.size()) != aug.N)
        throw std::invalid_argument("augmented adjoint has wrong dimension");
    if (static_cast<int>(u.size()) != aug.m)
        throw std::invalid_argument("control has wrong dimension");
}

} // namespace

double hamiltonian_eval(const AugmentedSystem& aug, std::span<const double> z,
                        std::span<const double> p, std::span<const double> u) {
    check_dims(aug, z, p, u);
    double h = 0.0;
    for (int j = 0; j < aug.N; ++j) h += p[static_cast<size_t>(j)] * aug.fbar[j].eval(z);
    for (int i = 0; i < aug.m; ++i) {
        double phi = 0.0;
        for (int j = 0; j < aug.N; ++j) phi += p[static_cast<size_t>(j)] * aug.gbar[static_cast<size_t>(i)][j].eval(z);
        h += phi * u[static_cast<size_t>(i)];
    }
    return h;
}

void extremal_rhs(const AugmentedSystem& aug, std::span<const double> z,
                  std::span<const double> p, std::span<const double> u,
                  std::span<double> dz, std::span<double> dp) {
    check_dims(aug, z, p, u);
    if (dz.size() != z.size() || dp.size() != p.size())
        throw std::invalid_argument("output spans have wrong dimension");

    for (int j = 0; j < aug.N; ++j) {
        double v = aug.fbar[j].eval(z);
        for (int i = 0; i < aug.m; ++i)
            v += aug.gbar[static_cast<size_t>(i)][j].eval(z) * u[static_cast<size_t>(i)];
        dz[static_cast<size_t>(j)] = v;
    }

    // dp_j = -sum_k p_k dF_k/dz_j with F the closed-loop field; column 0 of
    // every Jacobian is zero, hence dp[0] == 0 exactly.
    for (int j = 0; j < aug.N; ++j) {
        double acc = 0.0;
        for (int k = 0; k < aug.N; ++k) {
            double pk = p[static_cast<size_t>(k)];
            if (pk == 0.0) continue;
            double dFkj = aug.jac_fbar[static_cast<size_t>(k) * aug.N + j].eval(z);
            for (int i = 0; i < aug.m; ++i)
                dFkj += u[static_cast<size_t>(i)] *
                        aug.jac_gbar[static_cast<size_t>(i)][static_cast<size_t>(k) * aug.N + j].eval(z);
            acc += pk * dFkj;
        }
        dp[static_cast<size_t>(j)] = -acc;
    }
}

std::vector<double> switching_vector(const AugmentedSystem& aug, std::span<const double> z,
                                     std::span<const double> p) {
    if (static_cast<int>(z.size()) != aug.N || static_cast<int>(p.size()) != aug.N)
        throw std::invalid_argument("switching_vector: dimension mismatch");
    std::vector<double> phi(static_cast<size_t>(aug.m), 0.0);
    for (int i = 0; i < aug.m; ++i) {
        double v = 0.0;
        for (int j = 0; j < aug.N; ++j)
            v += p[static_cast<size_t>(j)] * aug.gbar[static_cast<size_t>(i)][j].eval(z);
        phi[static_cast<size_t>(i)] = v;
    }
    return phi;
}

} // namespace fullerlab
