#include "padyn/report.hpp"

#include <sstream>

#include "padyn/literal.hpp"

namespace padyn {

Json to_json(const Rational& r) { return r.to_string(); }

Json to_json(const Wideg& w) {
    if (w.finite()) return w.value;
    return w.to_string();
}

Json to_json(const NewtonPolygon& poly) {
    Json j;
    j["vertices"] = Json::array();
    for (const auto& v : poly.vertices) j["vertices"].push_back(Json::array({v.index, to_json(v.valuation)}));
    j["segments"] = Json::array();
    for (const auto& s : poly.segments)
        j["segments"].push_back(Json{{"slope", to_json(s.slope)}, {"length", s.length}, {"height", to_json(s.height())}});
    j["root_count"] = poly.root_count();
    return j;
}

Json to_json(const LTCheck& c) {
    Json j{{"ok", c.ok}};
    if (!c.ok) {
        j["index"] = c.index;
        j["reason"] = c.reason;
    }
    return j;
}

Json to_json(const GroupAxioms& ax) {
    Json j{{"ok", ax.ok()}, {"identity", ax.identity}, {"commutative", ax.commutative}, {"associative", ax.associative}, {"min_precision", ax.min_prec}};
    if (!ax.witness.empty()) j["witness"] = ax.witness;
    return j;
}

Json to_json(const EndoCheck& e) {
    Json j{{"ok", e.ok}, {"min_precision", e.min_prec}};
    if (!e.ok) {
        j["monomial"] = Json::array({e.i, e.j});
        j["witness"] = e.witness;
    }
    return j;
}

Json to_json(const GroupFromLog& g, bool with_series) {
    Json j{{"integral", to_string(g.integral)}};
    if (g.integral == Tri::no) {
        j["monomial"] = Json::array({g.bad_i, g.bad_j});
        j["witness"] = g.witness;
    }
    j["precision_floor"] = g.group.series().precision_floor();
    if (with_series) j["group_law"] = format_series(g.group.series());
    return j;
}

Json to_json(const CommutingReport& r) {
    Json j{{"ok", r.ok}, {"pairs_checked", r.pairs}};
    if (!r.ok) j["witness"] = Json{{"alpha", r.alpha}, {"beta", r.beta}, {"degree", r.index}};
    return j;
}

Json to_json(const FullReport& r) {
    Json j{{"ok", r.ok()}};
    j["derivatives"] = Json{{"ok", r.derivative_ok}};
    if (!r.derivative_ok) j["derivatives"]["witness"] = r.derivative_witness;
    j["wideg_pi"] = Json{{"value", to_json(r.wideg_pi)}, {"ok", r.wideg_ok}};
    j["unit_quotient"] = Json{{"ok", r.unit_ok}};
    if (!r.unit_witness.empty()) j["unit_quotient"]["witness"] = r.unit_witness;
    if (r.serg_ran) {
        Json s{{"ok", r.serg_ok}};
        if (r.serg_d >= 0) {
            s["d"] = r.serg_d;
            s["inner"] = format_residue_series(r.serg_inner);
        }
        if (!r.serg_witness.empty()) s["witness"] = r.serg_witness;
        j["residue_decomposition"] = s;
    }
    return j;
}

Json to_json(const LambdaStats& s) {
    Json v = Json::array();
    for (const auto& x : s.valuations) v.push_back(to_json(x));
    return Json{{"ok", s.ok},
                {"n", s.n},
                {"count", s.count},
                {"expected_count", s.expected_count},
                {"root_valuations", v},
                {"expected_valuation", to_json(s.expected_valuation)},
                {"total_roots", s.total_roots},
                {"polygon", to_json(s.polygon)}};
}

Json to_json(const FixedPointProfile& p) {
    return Json{{"ok", p.ok()},
                {"alpha", format_elem(*p.alpha.ring(), p.alpha.elem())},
                {"n_alpha", p.n_alpha},
                {"wideg", to_json(p.wideg)},
                {"wideg_ok", p.wideg_ok},
                {"polygon_ok", p.polygon_ok},
                {"polygon", to_json(p.polygon)}};
}

Json to_json(const Recovery& r, bool with_series) {
    Json j{{"ok", r.ok()}};
    j["logarithm"] = Json{{"precision_floor", r.log.L.precision_floor()}, {"divisions", r.log.divisions}};
    if (with_series) j["logarithm"]["series"] = format_series(r.log.L);
    j["group"] = to_json(r.group, with_series);
    j["endomorphisms"] = Json::array();
    for (const auto& e : r.evidence) {
        Json x{{"alpha", e.alpha}, {"endo", to_json(e.endo)}, {"exp_ok", e.exp_ok}, {"exp_degree", e.exp_degree}};
        j["endomorphisms"].push_back(x);
    }
    return j;
}

Json to_json(const MuCertificate& m) {
    Json j{{"found", m.found}, {"evaluations", m.evaluations}};
    if (m.found) {
        j["mu"] = format_elem(*m.mu.ring(), m.mu.elem());
        j["digits"] = m.digits;
        j["digits_determined"] = m.digits_determined;
        j["congruence_degree"] = m.congruence_degree;
        j["wideg_ok"] = m.wideg_ok;
        j["lubin_tate"] = m.lubin_tate;
    } else {
        j["best_degree"] = m.best_degree;
        if (m.first_bad > 0) j["first_bad_coefficient"] = m.first_bad;
        j["diagnostic"] = m.diagnostic;
    }
    return j;
}

std::string dump_report(const Json& report) { return report.dump(2) + "\n"; }

namespace {

bool scalar_array(const Json& a) {
    for (const auto& x : a)
        if (x.is_object() || (x.is_array() && !scalar_array(x))) return false;
    return true;
}

std::string scalar(const Json& v) {
    if (v.is_string()) return v.get<std::string>();
    if (v.is_array()) {
        std::string s = "[";
        for (std::size_t i = 0; i < v.size(); ++i) s += (i ? ", " : "") + scalar(v[i]);
        return s + "]";
    }
    return v.dump();
}

void render(std::ostringstream& os, const Json& v, int depth) {
    const std::string pad(static_cast<std::size_t>(depth) * 2, ' ');
    for (auto it = v.begin(); it != v.end(); ++it) {
        const Json& x = it.value();
        if (x.is_object()) {
            os << pad << it.key() << ":\n";
            render(os, x, depth + 1);
        } else if (x.is_array() && !scalar_array(x)) {
            os << pad << it.key() << ":\n";
            for (std::size_t i = 0; i < x.size(); ++i) {
                if (x[i].is_object()) {
                    os << pad << "  - " << i << "\n";
                    render(os, x[i], depth + 2);
                } else {
                    os << pad << "  - " << scalar(x[i]) << "\n";
                }
            }
        } else {
            os << pad << it.key() << ": " << scalar(x) << "\n";
        }
    }
}

}  // namespace

std::string render_text(const Json& report) {
    std::ostringstream os;
    render(os, report, 0);
    return os.str();
}

}  // namespace padyn
