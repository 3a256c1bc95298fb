#include "fullerlab/jsonio.hpp"

#include <stdexcept>

namespace fullerlab {

Json poly_to_json(const Poly& p) {
    Json terms = Json::array();
    // Descending grlex to match the text form.
    for (auto it = p.terms().rbegin(); it != p.terms().rend(); ++it) {
        Json term;
        term["coeff"] = it->second.str();
        term["exps"] = it->first;
        terms.push_back(std::move(term));
    }
    return terms;
}

Poly poly_from_json(const Json& j, int nvars) {
    if (!j.is_array()) throw std::invalid_argument("poly JSON: expected an array of terms");
    Poly p(nvars);
    for (const auto& term : j) {
        if (!term.contains("coeff") || !term.contains("exps"))
            throw std::invalid_argument("poly JSON: term needs 'coeff' and 'exps'");
        Rational c = Rational::from_string(term["coeff"].get<std::string>());
        ExponentVec e = term["exps"].get<ExponentVec>();
        if (static_cast<int>(e.size()) != nvars)
            throw std::invalid_argument("poly JSON: 'exps' length does not match the variable count");
        p.add_term(e, c);
    }
    return p;
}

Json polyvec_to_json(const PolyVec& v) {
    Json arr = Json::array();
    for (const auto& p : v.entries) arr.push_back(poly_to_json(p));
    return arr;
}

PolyVec polyvec_from_json(const Json& j, int nvars) {
    if (!j.is_array()) throw std::invalid_argument("polyvec JSON: expected an array");
    std::vector<Poly> entries;
    for (const auto& pj : j) entries.push_back(poly_from_json(pj, nvars));
    return PolyVec(std::move(entries));
}

Json problem_to_json(const AffineSystem& sys) {
    Json j;
    j["n"] = sys.n;
    j["m"] = sys.m;
    j["f"] = polyvec_to_json(sys.f);
    Json g = Json::array();
    for (const auto& gi : sys.g) g.push_back(polyvec_to_json(gi));
    j["g"] = g;
    j["f0"] = poly_to_json(sys.f0);
    Json g0 = Json::array();
    for (const auto& gi : sys.g0) g0.push_back(poly_to_json(gi));
    j["g0"] = g0;
    j["K"] = poly_to_json(sys.K);
    if (!sys.name.empty()) j["name"] = sys.name;
    return j;
}

namespace {

[[noreturn]] void bad_field(const std::string& field, const std::string& what) {
    throw std::invalid_argument("problem JSON: field '" + field + "': " + what);
}

} // namespace

AffineSystem problem_from_json(const Json& j) {
    AffineSystem sys;
    if (!j.is_object()) throw std::invalid_argument("problem JSON: expected an object");
    for (const char* field : {"n", "m", "f", "g", "f0", "g0", "K"})
        if (!j.contains(field)) bad_field(field, "missing");
    try {
        sys.n = j["n"].get<int>();
    } catch (const std::exception&) {
        bad_field("n", "not an integer");
    }
    try {
        sys.m = j["m"].get<int>();
    } catch (const std::exception&) {
        bad_field("m", "not an integer");
    }
    if (sys.n <= 0) bad_field("n", "must be positive");
    if (sys.m < 0) bad_field("m", "must be non-negative");

    try {
        sys.f = polyvec_from_json(j["f"], sys.n);
    } catch (const std::exception& e) {
        bad_field("f", e.what());
    }
    if (sys.f.dim != sys.n) bad_field("f", "needs n components");

    if (!j["g"].is_array()) bad_field("g", "expected an array of vector fields");
    for (size_t i = 0; i < j["g"].size(); ++i) {
        try {
            sys.g.push_back(polyvec_from_json(j["g"][i], sys.n));
        } catch (const std::exception& e) {
            bad_field("g[" + std::to_string(i) + "]", e.what());
        }
        if (sys.g.back().dim != sys.n) bad_field("g[" + std::to_string(i) + "]", "needs n components");
    }
    if (static_cast<int>(sys.g.size()) != sys.m) bad_field("g", "needs m vector fields");

    try {
        sys.f0 = poly_from_json(j["f0"], sys.n);
    } catch (const std::exception& e) {
        bad_field("f0", e.what());
    }
    if (!j["g0"].is_array()) bad_field("g0", "expected an array of polynomials");
    for (size_t i = 0; i < j["g0"].size(); ++i) {
        try {
            sys.g0.push_back(poly_from_json(j["g0"][i], sys.n));
        } catch (const std::exception& e) {
            bad_field("g0[" + std::to_string(i) + "]", e.what());
        }
    }
    if (static_cast<int>(sys.g0.size()) != sys.m) bad_field("g0", "needs m polynomials");

    try {
        sys.K = poly_from_json(j["K"], 1);
    } catch (const std::exception& e) {
        bad_field("K", e.what());
    }
    if (j.contains("name")) sys.name = j["name"].get<std::string>();
    sys.validate();
    return sys;
}

QMatrix qmatrix_from_json(const Json& j) {
    if (!j.is_array() || j.empty()) throw std::invalid_argument("matrix JSON: expected a non-empty array of rows");
    std::vector<std::vector<Rational>> rows;
    for (const auto& row : j) {
        if (!row.is_array()) throw std::invalid_argument("matrix JSON: each row must be an array");
        std::vector<Rational> r;
        for (const auto& v : row) {
            if (v.is_string())
                r.push_back(Rational::from_string(v.get<std::string>()));
            else if (v.is_number_integer())
                r.push_back(Rational(v.get<long>()));
            else
                throw std::invalid_argument("matrix JSON: entries must be rational strings or integers");
        }
        rows.push_back(std::move(r));
    }
    return QMatrix::from_rows(rows);
}

Json qmatrix_to_json(const QMatrix& m) {
    Json rows = Json::array();
    for (int r = 0; r < m.rows; ++r) {
        Json row = Json::array();
        for (int c = 0; c < m.cols; ++c) row.push_back(m.at(r, c).str());
        rows.push_back(std::move(row));
    }
    return rows;
}

std::string to_string(LadderStatus s) {
    switch (s) {
        case LadderStatus::ok: return "ok";
        case LadderStatus::depth_exceeded: return "depth-exceeded";
        case LadderStatus::mixed_levels: return "mixed-levels";
    }
    return "?";
}

std::string to_string(GlcVerdict v) {
    switch (v) {
        case GlcVerdict::strict: return "strict";
        case GlcVerdict::semidefinite: return "semidefinite";
        case GlcVerdict::violated: return "violated";
        case GlcVerdict::inapplicable: return "inapplicable";
    }
    return "?";
}

std::string to_string(Decidability d) {
    switch (d) {
        case Decidability::invertible: return "invertible";
        case Decidability::singular: return "singular";
        case Decidability::undecidable: return "undecidable";
    }
    return "?";
}

std::string to_string(CertificateVerdict v) {
    switch (v) {
        case CertificateVerdict::fuller: return "fuller";
        case CertificateVerdict::inconclusive: return "inconclusive";
        case CertificateVerdict::no_singular_arc: return "no-singular-arc";
    }
    return "?";
}

std::string to_string(JunctionConclusion c) {
    switch (c) {
        case JunctionConclusion::analytic_possible: return "analytic-possible";
        case JunctionConclusion::non_analytic_forced: return "non-analytic-forced";
    }
    return "?";
}

std::string to_string(StopReason r) {
    switch (r) {
        case StopReason::horizon: return "horizon";
        case StopReason::zeno_floor: return "zeno-floor";
        case StopReason::target_ball: return "target-ball";
        case StopReason::error: return "error";
    }
    return "?";
}

Json ladder_to_json(const LadderReport& report) {
    Json j;
    j["status"] = to_string(report.status);
    if (!report.status_detail.empty()) j["status_detail"] = report.status_detail;
    j["k"] = report.k;
    if (report.q) j["q"] = *report.q;
    j["k_odd"] = report.k_odd;
    j["levels_computed"] = report.levels_computed;
    j["first_u_level"] = report.first_u_level;
    j["lower_B_identically_zero"] = report.lower_B_identically_zero;
    if (report.k >= 0) {
        j["A_identically_zero"] = report.A_identically_zero();
        Json a = Json::array();
        for (const auto& af : report.A_fields) {
            Json e;
            e["word"] = af.word;
            Json comps = Json::array();
            for (const auto& p : af.field.entries) comps.push_back(p.to_text());
            e["field"] = comps;
            a.push_back(std::move(e));
        }
        j["A_fields"] = a;
        Json b = Json::array();
        Json bentry = Json::array();
        for (int i = 0; i < report.m; ++i) {
            Json row = Json::array();
            Json erow = Json::array();
            for (int jj = 0; jj < report.m; ++jj) {
                const auto& bf = report.B_fields[static_cast<size_t>(i)][static_cast<size_t>(jj)];
                Json e;
                e["word"] = bf.word;
                Json comps = Json::array();
                for (const auto& p : bf.field.entries) comps.push_back(p.to_text());
                e["field"] = comps;
                row.push_back(std::move(e));
                erow.push_back(report.b_entry_poly(i, jj).to_text());
            }
            b.push_back(std::move(row));
            bentry.push_back(std::move(erow));
        }
        j["B_fields"] = b;
        // <p, .> entry polynomials over 2N variables: x0..x{N-1} are the
        // state, x{N}..x{2N-1} the adjoint.
        j["B_entries"] = bentry;
        Json aentry = Json::array();
        for (int i = 0; i < report.m; ++i) aentry.push_back(report.a_entry_poly(i).to_text());
        j["A_entries"] = aentry;
    }
    return j;
}

Json delta_to_json(const DeltaReport& report) {
    Json j;
    j["basis"] = report.basis_words;
    j["sample_points"] = report.sample_points;
    j["rank_per_point"] = report.rank_per_point;
    j["rank"] = report.rank;
    j["no_singular_arc"] = report.no_singular_arc;
    j["tau_rank"] = report.tau_rank;
    if (report.annihilator) j["annihilator"] = *report.annihilator;
    {
        Json per = Json::array();
        for (const auto& a : report.annihilator_per_point)
            per.push_back(a ? Json(*a) : Json());
        j["annihilator_per_point"] = per;
    }
    if (report.annihilator_exact) {
        Json ann = Json::array();
        for (const auto& r : *report.annihilator_exact) ann.push_back(r.str());
        j["annihilator_exact"] = ann;
    }
    if (!report.membership_queries.empty()) {
        Json q;
        for (const auto& [word, ok] : report.membership_queries) q[word] = ok;
        j["membership"] = q;
    }
    if (report.decidable) j["decidable"] = to_string(*report.decidable);
    return j;
}

Json decidability_to_json(const DecidabilityReport& report) {
    Json j;
    j["verdict"] = to_string(report.verdict);
    j["detail"] = report.detail;
    Json tags = Json::array();
    Json consts = Json::array();
    for (size_t i = 0; i < report.tags.size(); ++i) {
        Json trow = Json::array();
        Json crow = Json::array();
        for (size_t jj = 0; jj < report.tags[i].size(); ++jj) {
            int tag = report.tags[i][jj];
            trow.push_back(tag == 0 ? "zero" : (tag == 1 ? "constant" : "unknown"));
            crow.push_back(tag == 1 ? report.constants[i][jj].str() : "");
        }
        tags.push_back(std::move(trow));
        consts.push_back(std::move(crow));
    }
    j["entry_tags"] = tags;
    j["entry_constants"] = consts;
    return j;
}

Json certificate_to_json(const CertificateResult& result) {
    Json j;
    j["verdict"] = to_string(result.verdict);
    if (!result.failing_hypothesis.empty()) j["failing_hypothesis"] = result.failing_hypothesis;
    j["ladder"] = ladder_to_json(result.ladder);
    j["delta"] = delta_to_json(result.delta);
    if (result.decidability) j["decidability"] = decidability_to_json(*result.decidability);
    return j;
}

Json junction_verdict_to_json(const JunctionVerdict& v) {
    Json j;
    j["q"] = v.q;
    if (v.r) j["r"] = *v.r;
    if (v.parity_ok) j["parity_ok"] = *v.parity_ok;
    j["corollary1"] = v.corollary1;
    j["corollary2"] = v.corollary2;
    j["conclusion"] = to_string(v.conclusion);
    return j;
}

Json chatter_to_json(const ChatterReport& report) {
    Json j;
    Json inputs = Json::array();
    for (const auto& ci : report.inputs) {
        Json c;
        c["input"] = ci.input_index;
        c["status"] = ci.status;
        c["switch_count"] = ci.switch_count;
        c["switch_times"] = ci.switch_times;
        c["intervals"] = ci.intervals;
        if (ci.rho) c["rho"] = *ci.rho;
        c["fit_r2"] = ci.fit_r2;
        if (ci.accumulation_time) c["accumulation_time"] = *ci.accumulation_time;
        c["accumulation"] = ci.accumulation;
        inputs.push_back(std::move(c));
    }
    j["inputs"] = inputs;
    j["any_accumulation"] = report.any_accumulation;
    return j;
}

} // namespace fullerlab
