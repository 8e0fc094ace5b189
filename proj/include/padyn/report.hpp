#pragma once

// Structured reports. Every record is an ordered JSON object whose key order is
// fixed by the code that builds it, so identical runs serialize identically.

#include <string>

#include "json.hpp"
#include "padyn/dynamics.hpp"

namespace padyn {

using Json = nlohmann::ordered_json;

Json to_json(const Rational& r);
Json to_json(const Wideg& w);
Json to_json(const NewtonPolygon& poly);

Json to_json(const LTCheck& c);
Json to_json(const GroupAxioms& ax);
Json to_json(const EndoCheck& e);
/// Verdict, witness and precision floor; the law itself only if with_series.
Json to_json(const GroupFromLog& g, bool with_series);

Json to_json(const CommutingReport& r);
Json to_json(const FullReport& r);
Json to_json(const LambdaStats& s);
Json to_json(const FixedPointProfile& p);
Json to_json(const Recovery& r, bool with_series);
Json to_json(const MuCertificate& m);

/// Canonical serialization (two-space indent, trailing newline).
std::string dump_report(const Json& report);
/// Indented "key: value" rendering for people.
std::string render_text(const Json& report);

}  // namespace padyn
