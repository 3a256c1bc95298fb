#pragma once

#include "fullerlab/liecone.hpp"
#include "fullerlab/qmatrix.hpp"
#include "fullerlab/simulate.hpp"
#include "fullerlab/system.hpp"

#include <json.hpp>

#include <string>

namespace fullerlab {

using Json = nlohmann::json;

/// Poly JSON form: list of {"coeff": "p/q", "exps": [e0,...]} in descending
/// graded-lex order.
Json poly_to_json(const Poly& p);
Poly poly_from_json(const Json& j, int nvars);

Json polyvec_to_json(const PolyVec& v);
PolyVec polyvec_from_json(const Json& j, int nvars);

/// Problem JSON: {"n", "m", "f", "g", "f0", "g0", "K"} plus optional "name".
Json problem_to_json(const AffineSystem& sys);
AffineSystem problem_from_json(const Json& j);

/// Matrix file: JSON array of rows of rational strings.
QMatrix qmatrix_from_json(const Json& j);
Json qmatrix_to_json(const QMatrix& m);

std::string to_string(LadderStatus s);
std::string to_string(GlcVerdict v);
std::string to_string(Decidability d);
std::string to_string(CertificateVerdict v);
std::string to_string(JunctionConclusion c);
std::string to_string(StopReason r);

Json ladder_to_json(const LadderReport& report);
Json delta_to_json(const DeltaReport& report);
Json decidability_to_json(const DecidabilityReport& report);
Json certificate_to_json(const CertificateResult& result);
Json junction_verdict_to_json(const JunctionVerdict& v);
Json chatter_to_json(const ChatterReport& report);

} // namespace fullerlab
