#include "fullerlab/liecone.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace fullerlab {

PolyVec lie_bracket(const PolyVec& a, const PolyVec& b) {
    if (a.dim != b.dim) throw std::invalid_argument("lie_bracket: dimension mismatch");
    if (a.nvars() != b.nvars()) throw std::invalid_argument("lie_bracket: variable-space mismatch");
    int dim = a.dim;
    PolyVec r(dim, a.nvars());
    for (int j = 0; j < dim; ++j) {
        Poly acc(a.nvars());
        for (int k = 0; k < dim; ++k) {
            acc += b[j].partial(k) * a[k];
            acc -= a[j].partial(k) * b[k];
        }
        r[j] = std::move(acc);
    }
    return r;
}

namespace {

std::string ad_word(int l, int i) {
    if (l == 0) return "g" + std::to_string(i);
    if (l == 1) return "ad_f g" + std::to_string(i);
    return "ad_f^" + std::to_string(l) + " g" + std::to_string(i);
}

std::string b_word(int l, int i, int j) {
    return "[" + ad_word(0, j) + ", " + ad_word(l, i) + "]";
}

} // namespace

std::vector<std::vector<BracketField>> ad_ladder(const AugmentedSystem& aug, int max_depth) {
    if (max_depth < 1) throw std::invalid_argument("ad_ladder: max_depth must be >= 1");
    std::vector<std::vector<BracketField>> ladder;
    ladder.reserve(static_cast<size_t>(max_depth) + 1);
    std::vector<BracketField> level0;
    for (int i = 0; i < aug.m; ++i)
        level0.push_back({ad_word(0, i), aug.gbar[static_cast<size_t>(i)]});
    ladder.push_back(std::move(level0));
    for (int l = 1; l <= max_depth; ++l) {
        std::vector<BracketField> level;
        level.reserve(static_cast<size_t>(aug.m));
        for (int i = 0; i < aug.m; ++i)
            level.push_back({ad_word(l, i), lie_bracket(aug.fbar, ladder.back()[static_cast<size_t>(i)].field)});
        ladder.push_back(std::move(level));
    }
    return ladder;
}

bool LadderReport::A_identically_zero() const {
    return std::all_of(A_fields.begin(), A_fields.end(),
                       [](const BracketField& b) { return b.field.is_zero(); });
}

namespace {

// <p, h(z)> as a polynomial over 2N variables (z first, then p).
Poly pairing_poly(const PolyVec& h, int N) {
    Poly acc(2 * N);
    for (int k = 0; k < N; ++k) {
        Poly hk = h[k].lift(2 * N, 0);
        acc += hk * Poly::variable(2 * N, N + k);
    }
    return acc;
}

double pairing_eval(const PolyVec& h, std::span<const double> z, std::span<const double> p) {
    double acc = 0.0;
    for (int k = 0; k < h.dim; ++k) acc += p[static_cast<size_t>(k)] * h[k].eval(z);
    return acc;
}

} // namespace

Poly LadderReport::a_entry_poly(int i) const {
    return pairing_poly(A_fields[static_cast<size_t>(i)].field, N);
}

Poly LadderReport::b_entry_poly(int i, int j) const {
    return pairing_poly(B_fields[static_cast<size_t>(i)][static_cast<size_t>(j)].field, N);
}

Eigen::VectorXd LadderReport::a_eval(std::span<const double> z, std::span<const double> p) const {
    Eigen::VectorXd v(m);
    for (int i = 0; i < m; ++i) v(i) = pairing_eval(A_fields[static_cast<size_t>(i)].field, z, p);
    return v;
}

Eigen::MatrixXd LadderReport::b_eval(std::span<const double> z, std::span<const double> p) const {
    Eigen::MatrixXd b(m, m);
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j)
            b(i, j) = pairing_eval(B_fields[static_cast<size_t>(i)][static_cast<size_t>(j)].field, z, p);
    return b;
}

std::optional<QMatrix> LadderReport::b_matrix_at_adjoint(const std::vector<Rational>& p_dir) const {
    if (static_cast<int>(p_dir.size()) != N)
        throw std::invalid_argument("b_matrix_at_adjoint: adjoint direction has wrong dimension");
    QMatrix out(m, m);
    for (int i = 0; i < m; ++i) {
        for (int j = 0; j < m; ++j) {
            const PolyVec& field = B_fields[static_cast<size_t>(i)][static_cast<size_t>(j)].field;
            Poly entry(field.nvars());
            for (int k = 0; k < N; ++k) {
                if (p_dir[static_cast<size_t>(k)].is_zero()) continue;
                entry += field[k].scaled(p_dir[static_cast<size_t>(k)]);
            }
            if (!entry.is_constant()) return std::nullopt;
            out.at(i, j) = entry.constant_value();
        }
    }
    return out;
}

LadderReport ab_matrices(const AugmentedSystem& aug, int max_depth) {
    if (max_depth < 1) throw std::invalid_argument("ab_matrices: max_depth must be >= 1");
    LadderReport rep;
    rep.N = aug.N;
    rep.m = aug.m;
    rep.first_u_level.assign(static_cast<size_t>(aug.m), -1);

    // Level 0 of the ad ladder.
    std::vector<BracketField> current;
    for (int i = 0; i < aug.m; ++i) current.push_back({ad_word(0, i), aug.gbar[static_cast<size_t>(i)]});
    rep.ad_fields.push_back(current);

    int k = -1;
    std::vector<std::vector<BracketField>> b_at_k;
    for (int l = 1; l <= max_depth && k < 0; ++l) {
        // B entries of level l use the previous ad level.
        std::vector<std::vector<BracketField>> b_level(static_cast<size_t>(aug.m));
        bool any = false;
        for (int i = 0; i < aug.m; ++i) {
            bool row_hit = false;
            for (int j = 0; j < aug.m; ++j) {
                PolyVec br = lie_bracket(aug.gbar[static_cast<size_t>(j)],
                                         rep.ad_fields.back()[static_cast<size_t>(i)].field);
                if (!br.is_zero()) row_hit = true;
                b_level[static_cast<size_t>(i)].push_back({b_word(l - 1, i, j), std::move(br)});
            }
            if (row_hit && rep.first_u_level[static_cast<size_t>(i)] < 0)
                rep.first_u_level[static_cast<size_t>(i)] = l;
            any = any || row_hit;
        }
        if (any) {
            k = l;
            b_at_k = std::move(b_level);
        }
        // Next ad level (also the A fields when this level turned out to be k).
        std::vector<BracketField> next;
        next.reserve(static_cast<size_t>(aug.m));
        for (int i = 0; i < aug.m; ++i)
            next.push_back({ad_word(l, i),
                            lie_bracket(aug.fbar, rep.ad_fields.back()[static_cast<size_t>(i)].field)});
        rep.ad_fields.push_back(std::move(next));
        rep.levels_computed = l;
    }

    if (k < 0) {
        rep.status = LadderStatus::depth_exceeded;
        rep.status_detail = "order undetected up to depth " + std::to_string(max_depth);
        return rep;
    }

    rep.k = k;
    rep.k_odd = (k % 2 != 0);
    if (!rep.k_odd) rep.q = k / 2;
    rep.lower_B_identically_zero = true; // by construction of k
    rep.A_fields = rep.ad_fields[static_cast<size_t>(k)];
    rep.B_fields = std::move(b_at_k);

    // Rows whose first control appearance is not at level k make the uniform
    // vector formulation invalid; report the offending levels.
    bool mixed = false;
    for (int i = 0; i < aug.m; ++i)
        if (rep.first_u_level[static_cast<size_t>(i)] != k) mixed = true;
    if (mixed) {
        rep.status = LadderStatus::mixed_levels;
        std::ostringstream os;
        os << "control enters at level " << k << " for some inputs only; per-row levels:";
        for (int i = 0; i < aug.m; ++i) {
            os << " g" << i << "=";
            int li = rep.first_u_level[static_cast<size_t>(i)];
            if (li < 0)
                os << ">" << max_depth;
            else
                os << li;
        }
        rep.status_detail = os.str();
    }
    return rep;
}

GlcVerdict glc_check(const LadderReport& report, std::span<const double> z,
                     std::span<const double> p, double tau_eig) {
    if (report.k < 0 || report.k_odd) return GlcVerdict::inapplicable;
    Eigen::MatrixXd b = report.b_eval(z, p);
    Eigen::MatrixXd sym = 0.5 * (b + b.transpose());
    if (report.q.value() % 2 != 0) sym = -sym; // (-1)^q
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(sym);
    double max_eig = es.eigenvalues().maxCoeff();
    if (max_eig < -tau_eig) return GlcVerdict::strict;
    if (max_eig <= tau_eig) return GlcVerdict::semidefinite;
    return GlcVerdict::violated;
}

bool glc_satisfies_semidefinite(GlcVerdict v) {
    return v == GlcVerdict::strict || v == GlcVerdict::semidefinite;
}

std::vector<BracketField> delta_basis(const AugmentedSystem& aug, const LadderReport& report) {
    std::vector<BracketField> basis;
    basis.push_back({"f", aug.fbar});
    int top = report.k > 0 ? report.k - 1 : report.levels_computed;
    for (int l = 0; l <= top && l < static_cast<int>(report.ad_fields.size()); ++l)
        for (int i = 0; i < aug.m; ++i)
            basis.push_back(report.ad_fields[static_cast<size_t>(l)][static_cast<size_t>(i)]);
    return basis;
}

void normalize_annihilator(std::vector<double>& a) {
    double norm = 0.0;
    for (double v : a) norm += v * v;
    norm = std::sqrt(norm);
    if (norm == 0.0) return;
    if (std::abs(a[0]) > 1e-12 * norm) {
        double s = -1.0 / a[0];
        for (double& v : a) v *= s;
        return;
    }
    size_t imax = 0;
    for (size_t i = 1; i < a.size(); ++i)
        if (std::abs(a[i]) > std::abs(a[imax])) imax = i;
    double s = 1.0 / a[imax];
    for (double& v : a) v *= s;
}

void normalize_annihilator_exact(std::vector<Rational>& a) {
    if (!a.empty() && !a[0].is_zero()) {
        Rational s = Rational(-1) / a[0];
        for (auto& v : a) v *= s;
        return;
    }
    for (auto& v : a)
        if (!v.is_zero()) {
            Rational s = Rational(1) / v;
            for (auto& w : a) w *= s;
            return;
        }
}

DeltaReport delta_rank(const std::vector<BracketField>& basis,
                       const std::vector<std::vector<double>>& points, double tau_rank) {
    if (points.empty()) throw std::invalid_argument("delta_rank: no sample points");
    if (basis.empty()) throw std::invalid_argument("delta_rank: empty basis");
    DeltaReport rep;
    rep.N = basis.front().field.dim;
    rep.tau_rank = tau_rank;
    rep.basis_fields = basis;
    for (const auto& b : basis) rep.basis_words.push_back(b.word);
    rep.sample_points = points;

    for (const auto& pt : points) {
        if (static_cast<int>(pt.size()) != rep.N)
            throw std::invalid_argument("delta_rank: sample point has wrong dimension");
        Eigen::MatrixXd vals(rep.N, static_cast<int>(basis.size()));
        for (size_t c = 0; c < basis.size(); ++c) {
            std::vector<double> v = basis[c].field.eval(std::span<const double>(pt));
            for (int r = 0; r < rep.N; ++r) vals(r, static_cast<int>(c)) = v[static_cast<size_t>(r)];
        }
        Eigen::JacobiSVD<Eigen::MatrixXd> svd(vals, Eigen::ComputeFullU);
        const auto& sv = svd.singularValues();
        double smax = sv.size() > 0 ? sv(0) : 0.0;
        int rank = 0;
        for (int i = 0; i < sv.size(); ++i)
            if (sv(i) > tau_rank * std::max(smax, 1e-300)) ++rank;
        if (smax == 0.0) rank = 0;
        rep.basis_values.push_back(std::move(vals));
        rep.rank_per_point.push_back(rank);

        if (rank == rep.N - 1) {
            std::vector<double> ann(static_cast<size_t>(rep.N));
            for (int r = 0; r < rep.N; ++r) ann[static_cast<size_t>(r)] = svd.matrixU()(r, rep.N - 1);
            normalize_annihilator(ann);
            if (!rep.annihilator) {
                rep.annihilator = ann;

                // Exact direction at the same point: doubles are rationals,
                // so the evaluation matrix converts exactly.
                QMatrix exact(rep.N, static_cast<int>(basis.size()));
                std::vector<Rational> rpt;
                rpt.reserve(pt.size());
                for (double x : pt) rpt.push_back(Rational::from_double(x));
                for (size_t c = 0; c < basis.size(); ++c) {
                    std::vector<Rational> v = basis[c].field.eval(std::span<const Rational>(rpt));
                    for (int r = 0; r < rep.N; ++r)
                        exact.at(r, static_cast<int>(c)) = v[static_cast<size_t>(r)];
                }
                if (auto nv = exact.left_nullvector()) {
                    normalize_annihilator_exact(*nv);
                    rep.annihilator_exact = std::move(*nv);
                }
            }
            rep.annihilator_per_point.push_back(std::move(ann));
        } else {
            rep.annihilator_per_point.push_back(std::nullopt);
        }
    }
    rep.rank = *std::max_element(rep.rank_per_point.begin(), rep.rank_per_point.end());
    rep.no_singular_arc = (rep.rank == rep.N);
    return rep;
}

bool singular_necessary(const AugmentedSystem& aug, std::span<const double> z,
                        std::span<const double> p, double tol) {
    double pf = 0.0;
    for (int j = 0; j < aug.N; ++j) pf += p[static_cast<size_t>(j)] * aug.fbar[j].eval(z);
    if (std::abs(pf) > tol) return false;
    std::vector<double> phi = switching_vector(aug, z, p);
    for (double v : phi)
        if (std::abs(v) > tol) return false;
    return true;
}

bool delta_membership(const BracketField& field, DeltaReport& delta) {
    bool ok = true;
    for (size_t pi = 0; pi < delta.sample_points.size(); ++pi) {
        const auto& pt = delta.sample_points[pi];
        std::vector<double> v = field.field.eval(std::span<const double>(pt));
        Eigen::VectorXd b(delta.N);
        for (int r = 0; r < delta.N; ++r) b(r) = v[static_cast<size_t>(r)];
        double bnorm = b.norm();
        if (bnorm == 0.0) continue;
        const Eigen::MatrixXd& a = delta.basis_values[pi];
        Eigen::VectorXd sol = a.bdcSvd(Eigen::ComputeThinU | Eigen::ComputeThinV).solve(b);
        double residual = (a * sol - b).norm();
        if (residual > delta.tau_rank * bnorm) {
            ok = false;
            break;
        }
    }
    delta.membership_queries[field.word] = ok;
    return ok;
}

namespace {

// Determinant by cofactor expansion over polynomials in the unknown-entry
// variables; m stays small.
Poly det_poly(const std::vector<std::vector<Poly>>& a, std::vector<int>& cols, int row, int nvars) {
    if (row == static_cast<int>(a.size())) return Poly::constant(nvars, Rational(1));
    Poly acc(nvars);
    int sign = 1;
    for (size_t ci = 0; ci < cols.size(); ++ci) {
        int c = cols[ci];
        if (c >= 0) {
            const Poly& entry = a[static_cast<size_t>(row)][static_cast<size_t>(c)];
            if (!entry.is_zero()) {
                cols[ci] = -1;
                Poly sub = det_poly(a, cols, row + 1, nvars);
                cols[ci] = c;
                Poly term = entry * sub;
                if (sign < 0) term = -term;
                acc += term;
            }
            sign = -sign;
        }
    }
    return acc;
}

} // namespace

DecidabilityReport delta_inverse_decidable(const LadderReport& report, DeltaReport& delta) {
    DecidabilityReport out;
    int m = report.m;
    out.tags.assign(static_cast<size_t>(m), std::vector<int>(static_cast<size_t>(m), 2));
    out.constants.assign(static_cast<size_t>(m),
                         std::vector<Rational>(static_cast<size_t>(m), Rational(0)));

    std::optional<std::vector<Rational>> adjoint = delta.annihilator_exact;
    if (!adjoint && delta.annihilator) {
        std::vector<Rational> a;
        a.reserve(delta.annihilator->size());
        for (double x : *delta.annihilator) a.push_back(Rational::from_double(x));
        adjoint = std::move(a);
    }

    int unknowns = 0;
    for (int i = 0; i < m; ++i) {
        for (int j = 0; j < m; ++j) {
            const BracketField& bf = report.B_fields[static_cast<size_t>(i)][static_cast<size_t>(j)];
            if (bf.field.is_zero()) {
                out.tags[static_cast<size_t>(i)][static_cast<size_t>(j)] = 0;
                continue;
            }
            if (delta_membership(bf, delta)) {
                out.tags[static_cast<size_t>(i)][static_cast<size_t>(j)] = 0;
                continue;
            }
            if (adjoint) {
                Poly entry(bf.field.nvars());
                for (int kk = 0; kk < report.N; ++kk) {
                    if ((*adjoint)[static_cast<size_t>(kk)].is_zero()) continue;
                    entry += bf.field[kk].scaled((*adjoint)[static_cast<size_t>(kk)]);
                }
                if (entry.is_constant()) {
                    out.tags[static_cast<size_t>(i)][static_cast<size_t>(j)] = 1;
                    out.constants[static_cast<size_t>(i)][static_cast<size_t>(j)] = entry.constant_value();
                    continue;
                }
            }
            ++unknowns;
        }
    }

    // Symbolic determinant with one fresh variable per unknown entry.
    std::vector<std::vector<Poly>> sym(static_cast<size_t>(m),
                                       std::vector<Poly>(static_cast<size_t>(m), Poly(std::max(unknowns, 1))));
    int nvars = std::max(unknowns, 1);
    int next_var = 0;
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j) {
            int tag = out.tags[static_cast<size_t>(i)][static_cast<size_t>(j)];
            if (tag == 0)
                sym[static_cast<size_t>(i)][static_cast<size_t>(j)] = Poly(nvars);
            else if (tag == 1)
                sym[static_cast<size_t>(i)][static_cast<size_t>(j)] =
                    Poly::constant(nvars, out.constants[static_cast<size_t>(i)][static_cast<size_t>(j)]);
            else
                sym[static_cast<size_t>(i)][static_cast<size_t>(j)] = Poly::variable(nvars, next_var++);
        }

    std::vector<int> cols(static_cast<size_t>(m));
    for (int c = 0; c < m; ++c) cols[static_cast<size_t>(c)] = c;
    Poly det = det_poly(sym, cols, 0, nvars);

    if (det.is_zero()) {
        out.verdict = Decidability::singular;
        out.detail = "determinant vanishes identically over the entry tags";
    } else if (det.is_constant()) {
        out.verdict = Decidability::invertible;
        out.detail = "determinant reduces to the nonzero constant " + det.constant_value().str();
    } else {
        out.verdict = Decidability::undecidable;
        out.detail = "determinant still depends on " + std::to_string(unknowns) + " unknown entries";
    }
    delta.decidable = out.verdict;
    return out;
}

CertificateResult fuller_certificate(const AugmentedSystem& aug, const CertificateOptions& opts) {
    CertificateResult res;
    res.ladder = ab_matrices(aug, opts.max_depth);
    std::vector<double> point = opts.singular_point;
    if (point.empty()) point.assign(static_cast<size_t>(aug.N), 0.0);
    if (static_cast<int>(point.size()) != aug.N)
        throw std::invalid_argument("fuller_certificate: singular point has wrong dimension");

    std::vector<BracketField> basis = delta_basis(aug, res.ladder);
    res.delta = delta_rank(basis, {point}, opts.tau_rank);

    if (res.delta.rank == aug.N) {
        res.verdict = CertificateVerdict::no_singular_arc;
        return res;
    }
    if (res.ladder.status == LadderStatus::depth_exceeded) {
        res.verdict = CertificateVerdict::inconclusive;
        res.failing_hypothesis = res.ladder.status_detail;
        return res;
    }
    if (res.ladder.status == LadderStatus::mixed_levels) {
        res.verdict = CertificateVerdict::inconclusive;
        res.failing_hypothesis = "mixed ladder: " + res.ladder.status_detail;
        return res;
    }
    if (res.ladder.k_odd) {
        res.verdict = CertificateVerdict::inconclusive;
        res.failing_hypothesis = "problem order is not an integer (k = " +
                                 std::to_string(res.ladder.k) + " is odd)";
        return res;
    }
    if (res.ladder.q.value() % 2 != 0) {
        res.verdict = CertificateVerdict::inconclusive;
        res.failing_hypothesis = "problem order q = " + std::to_string(res.ladder.q.value()) +
                                 " is odd; the even-order hypothesis fails";
        return res;
    }

    for (const auto& af : res.ladder.A_fields) {
        if (!delta_membership(af, res.delta)) {
            res.verdict = CertificateVerdict::inconclusive;
            res.failing_hypothesis = af.word + " does not lie in the Pontryagin cone at the junction";
            return res;
        }
    }

    res.decidability = delta_inverse_decidable(res.ladder, res.delta);
    switch (res.decidability->verdict) {
        case Decidability::invertible:
            res.verdict = CertificateVerdict::fuller;
            return res;
        case Decidability::singular:
            res.verdict = CertificateVerdict::inconclusive;
            res.failing_hypothesis = "B is singular by the cone analysis (" + res.decidability->detail +
                                     "); order reduction is required and not performed";
            return res;
        case Decidability::undecidable:
        default:
            res.verdict = CertificateVerdict::inconclusive;
            res.failing_hypothesis = "B is not inverse-decidable from its zero and constant entries (" +
                                     res.decidability->detail + ")";
            return res;
    }
}

JunctionVerdict parity_oracle(int q, std::optional<int> r, const AValueInfo& a_info,
                              const Eigen::MatrixXd& b_at_tc, double k_at_tc, double tol_nonzero) {
    if (q < 1) throw std::invalid_argument("parity_oracle: q must be >= 1");
    JunctionVerdict v;
    v.q = q;
    v.r = r;
    if (r) v.parity_ok = ((q + *r) % 2 == 1);

    bool q_even = (q % 2 == 0);
    v.corollary2 = q_even && a_info.identically_zero;

    if (q_even && b_at_tc.rows() > 0) {
        int m = static_cast<int>(b_at_tc.rows());
        Eigen::VectorXd a = Eigen::VectorXd::Zero(m);
        bool have_a = false;
        if (a_info.value_at_tc) {
            a = *a_info.value_at_tc;
            have_a = true;
        } else if (a_info.identically_zero) {
            have_a = true;
        }
        if (have_a && m <= 24) {
            bool all_nonzero = true;
            for (long mask = 0; mask < (1L << m) && all_nonzero; ++mask) {
                Eigen::VectorXd sv(m);
                for (int i = 0; i < m; ++i) sv(i) = (mask >> i) & 1 ? 1.0 : -1.0;
                Eigen::VectorXd val = a + k_at_tc * (b_at_tc * sv);
                if (val.lpNorm<Eigen::Infinity>() <= tol_nonzero) all_nonzero = false;
            }
            v.corollary1 = all_nonzero;
        }
    }

    bool parity_violated = v.parity_ok.has_value() && !*v.parity_ok;
    v.conclusion = (v.corollary1 || v.corollary2 || parity_violated)
                       ? JunctionConclusion::non_analytic_forced
                       : JunctionConclusion::analytic_possible;
    return v;
}

} // namespace fullerlab
