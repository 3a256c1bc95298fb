#pragma once

#include "fullerlab/qmatrix.hpp"
#include "fullerlab/system.hpp"

#include <Eigen/Dense>

#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace fullerlab {

/// A named iterated bracket, e.g. "ad_f^2 g0" or "[g1, ad_f^3 g0]".
/// The word identifies the bracket; the field is its exact polynomial value
/// on the augmented state space.
struct BracketField {
    std::string word;
    PolyVec field;
};

/// Lie bracket with the convention [a, b] = (Db) a - (Da) b.
PolyVec lie_bracket(const PolyVec& a, const PolyVec& b);

/// ad_f^l g_i for l = 0..max_depth, exactly; result[l][i].
std::vector<std::vector<BracketField>> ad_ladder(const AugmentedSystem& aug, int max_depth);

enum class LadderStatus { ok, depth_exceeded, mixed_levels };

/// Result of walking the switching-function derivative ladder. On success,
/// k is the first derivative level whose expression depends explicitly on
/// the control, A holds <p, ad_f^k g_i> and B holds
/// <p, [g_j, ad_f^{k-1} g_i]>; q = k/2 is the problem order when k is even.
struct LadderReport {
    LadderStatus status = LadderStatus::ok;
    std::string status_detail;
    int N = 0;
    int m = 0;
    int k = -1;
    std::optional<int> q;
    bool k_odd = false;
    int levels_computed = 0;
    std::vector<int> first_u_level; // per input row, -1 when none found
    bool lower_B_identically_zero = false;
    std::vector<BracketField> A_fields;              // ad_f^k g_i
    std::vector<std::vector<BracketField>> B_fields; // row i, column j
    std::vector<std::vector<BracketField>> ad_fields; // [l][i], l <= levels_computed

    bool A_identically_zero() const;

    /// Entry polynomials over 2N variables: z at indices 0..N-1, the adjoint
    /// at indices N..2N-1.
    Poly a_entry_poly(int i) const;
    Poly b_entry_poly(int i, int j) const;

    Eigen::VectorXd a_eval(std::span<const double> z, std::span<const double> p) const;
    Eigen::MatrixXd b_eval(std::span<const double> z, std::span<const double> p) const;

    /// B with an exact adjoint direction substituted. Defined only when every
    /// entry becomes independent of the state; otherwise nullopt.
    std::optional<QMatrix> b_matrix_at_adjoint(const std::vector<Rational>& p_dir) const;
};

/// Walks derivative levels until some [g_j, ad_f^{l-1} g_i] is a nonzero
/// field. Mixed per-row levels and an exhausted depth cap are reported as
/// non-fatal statuses with the offending level named.
LadderReport ab_matrices(const AugmentedSystem& aug, int max_depth = 12);

enum class GlcVerdict { strict, semidefinite, violated, inapplicable };

/// Evaluates B at (z, p), symmetrizes, and tests the eigenvalues of
/// (-1)^q B against zero with tolerance tau_eig. Inapplicable when k is odd
/// or undetected.
GlcVerdict glc_check(const LadderReport& report, std::span<const double> z,
                     std::span<const double> p, double tau_eig = 1e-9);

/// strict satisfies the semidefinite condition as well.
bool glc_satisfies_semidefinite(GlcVerdict v);

/// Basis of the First Pontryagin Cone: f followed by ad_f^l g_i for
/// l = 0..k-1 (all computed levels when no k was detected).
std::vector<BracketField> delta_basis(const AugmentedSystem& aug, const LadderReport& report);

enum class Decidability { invertible, singular, undecidable };

/// Numeric evaluation of the cone at sample points: per-point rank via SVD
/// with relative tolerance tau_rank, the annihilator direction when the rank
/// is N-1 (normalized to p[0] = -1 when possible), plus an exact rational
/// annihilator when available at the first such point.
struct DeltaReport {
    int N = 0;
    double tau_rank = 1e-9;
    std::vector<BracketField> basis_fields;
    std::vector<std::string> basis_words;
    std::vector<std::vector<double>> sample_points;
    std::vector<Eigen::MatrixXd> basis_values; // per point, N x basis_count
    std::vector<int> rank_per_point;
    int rank = 0;             // max over points
    bool no_singular_arc = false; // rank == N
    // Normalized annihilating direction per point where the rank is N-1;
    // `annihilator` is the first of these, with an exact companion when the
    // rational elimination also finds a one-dimensional left null space.
    std::vector<std::optional<std::vector<double>>> annihilator_per_point;
    std::optional<std::vector<double>> annihilator;
    std::optional<std::vector<Rational>> annihilator_exact;
    std::map<std::string, bool> membership_queries;
    std::optional<Decidability> decidable;
};

DeltaReport delta_rank(const std::vector<BracketField>& basis,
                       const std::vector<std::vector<double>>& points, double tau_rank = 1e-9);

/// Necessary condition for a singular arc through (z, p): <p, fbar(z)> and
/// every switching component vanish within tol.
bool singular_necessary(const AugmentedSystem& aug, std::span<const double> z,
                        std::span<const double> p, double tol);

/// True when the field's value lies in the span of the basis values at every
/// sample point (least-squares residual <= tau_rank * field magnitude).
/// Records the query in the report.
bool delta_membership(const BracketField& field, DeltaReport& delta);

struct DecidabilityReport {
    Decidability verdict = Decidability::undecidable;
    // Entry tags: 0 = zero (field in the cone), 1 = constant, 2 = unknown.
    std::vector<std::vector<int>> tags;
    std::vector<std::vector<Rational>> constants; // meaningful where tag == 1
    std::string detail;
};

/// Classifies each B entry as zero / constant / unknown and decides
/// invertibility from the symbolic determinant over those tags.
DecidabilityReport delta_inverse_decidable(const LadderReport& report, DeltaReport& delta);

enum class CertificateVerdict { fuller, inconclusive, no_singular_arc };

struct CertificateOptions {
    std::vector<double> singular_point; // empty: origin
    double tau_rank = 1e-9;
    int max_depth = 12;
};

struct CertificateResult {
    CertificateVerdict verdict = CertificateVerdict::inconclusive;
    std::string failing_hypothesis;
    LadderReport ladder;
    DeltaReport delta;
    std::optional<DecidabilityReport> decidability;
};

/// Full chattering certificate at a candidate junction point: order even,
/// ad_f^{2q} g_i in the cone for every input, and B invertible by the
/// zero/constant entry analysis. Rank N at the point instead certifies that
/// no optimal singular arc exists.
CertificateResult fuller_certificate(const AugmentedSystem& aug,
                                     const CertificateOptions& opts = {});

enum class JunctionConclusion { analytic_possible, non_analytic_forced };

/// What is known about the A vector at the junction.
struct AValueInfo {
    std::optional<Eigen::VectorXd> value_at_tc;
    bool identically_zero = false;
};

struct JunctionVerdict {
    int q = 0;
    std::optional<int> r;
    std::optional<bool> parity_ok; // (q + r) odd, when r is known
    bool corollary1 = false;
    bool corollary2 = false;
    JunctionConclusion conclusion = JunctionConclusion::analytic_possible;
};

/// Junction parity analysis: an analytic junction of even problem order
/// forces q + r odd; either corollary (q even with A + K B v never zero over
/// the sign vectors, or q even with A identically zero) rules out an
/// analytic junction outright.
JunctionVerdict parity_oracle(int q, std::optional<int> r, const AValueInfo& a_info,
                              const Eigen::MatrixXd& b_at_tc, double k_at_tc,
                              double tol_nonzero = 0.0);

/// Direction with p[0] = -1 when the 0-component is nonvanishing, otherwise
/// unit scale with the largest component positive.
void normalize_annihilator(std::vector<double>& a);
void normalize_annihilator_exact(std::vector<Rational>& a);

} // namespace fullerlab
