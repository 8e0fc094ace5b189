#include "padyn/cli.hpp"

#include <algorithm>
#include <cctype>
#include <filesystem>
#include <fstream>
#include <functional>
#include <optional>
#include <ostream>
#include <sstream>

#include "CLI11.hpp"
#include "padyn/dynamics.hpp"
#include "padyn/literal.hpp"
#include "padyn/report.hpp"

namespace padyn {

namespace {

struct Options {
    std::string command;
    std::string ring;
    std::optional<int> degree;
    std::optional<int> precision;
    std::vector<std::string> samples;
    int max_digits = 4;
    std::string format = "text";
    std::string family;
    std::string series;
    std::string law;
    std::vector<std::string> alpha;
    std::vector<int> n;
    bool with_series = false;
};

constexpr int kDefaultDegree = 64;

std::string trim(std::string s) {
    auto sp = [](unsigned char c) { return std::isspace(c) != 0; };
    s.erase(s.begin(), std::find_if_not(s.begin(), s.end(), sp));
    s.erase(std::find_if_not(s.rbegin(), s.rend(), sp).base(), s.end());
    return s;
}

// A file path if one exists, otherwise the text itself.
std::string slurp(const std::string& src) {
    std::error_code ec;
    if (src.size() < 4096 && std::filesystem::is_regular_file(src, ec)) {
        std::ifstream in(src);
        if (!in) throw UsageError("cannot read " + src);
        std::ostringstream os;
        os << in.rdbuf();
        return trim(os.str());
    }
    return trim(src);
}

RingDescriptor ring_from_text(const std::string& text) {
    if (!text.empty() && text.front() == '{') return parse_descriptor(text);
    if (text.size() > 1 && (text[0] == 'Z' || text[0] == 'z') &&
        std::all_of(text.begin() + 1, text.end(), [](unsigned char c) { return std::isdigit(c) != 0; })) {
        RingDescriptor d;
        d.p = std::stoull(text.substr(1));
        return d;
    }
    return parse_ring_tag(text);
}

// The first series literal inside a family descriptor, searched depth first.
std::optional<std::string> first_literal(const nlohmann::json& j) {
    if (!j.is_object()) return std::nullopt;
    for (const char* key : {"f", "U", "series"})
        if (j.contains(key) && j[key].is_string()) return j[key].get<std::string>();
    for (const char* key : {"inner", "table"}) {
        if (!j.contains(key)) continue;
        if (j[key].is_array()) {
            for (const auto& e : j[key])
                if (auto s = first_literal(e)) return s;
        } else if (auto s = first_literal(j[key])) {
            return s;
        }
    }
    return std::nullopt;
}

struct Context {
    Options opt;
    RingPtr ring;
    int D = kDefaultDegree;
    std::string family_text, series_text, law_text;
    Json invocation;
};

void resolve_ring(Context& cx) {
    RingDescriptor desc;
    if (!cx.opt.ring.empty()) {
        desc = ring_from_text(slurp(cx.opt.ring));
    } else {
        std::string lit;
        if (!cx.series_text.empty()) {
            lit = cx.series_text;
        } else if (!cx.law_text.empty()) {
            lit = cx.law_text;
        } else if (!cx.family_text.empty()) {
            nlohmann::json j;
            try {
                j = nlohmann::json::parse(cx.family_text);
            } catch (const nlohmann::json::exception& ex) {
                throw UsageError(std::string("family descriptor: ") + ex.what());
            }
            if (auto s = first_literal(j)) lit = *s;
        }
        if (lit.empty()) throw UsageError("no ring given: pass --ring or a literal that names its ring");
        desc = ring_of_literal(lit)->descriptor();
    }
    if (cx.opt.precision) desc.N = *cx.opt.precision;
    cx.ring = make_ring(desc);
}

Series1 read_series(const Context& cx, const std::string& text) {
    Series1 s = parse_series(cx.ring, text);
    return s.D() == cx.D ? s : Series1(cx.ring, cx.D, s.coeffs());
}

Family read_family(const Context& cx) {
    if (!cx.family_text.empty()) return family_from_json(cx.family_text, cx.ring, cx.D);
    if (!cx.series_text.empty()) return family_from_lt(read_series(cx, cx.series_text));
    throw UsageError("this command needs --family or --series");
}

std::vector<OKValue> read_values(const Context& cx, const std::vector<std::string>& texts) {
    std::vector<OKValue> out;
    for (const auto& t : texts) out.emplace_back(cx.ring, parse_elem(*cx.ring, t));
    return out;
}

std::vector<OKValue> samples_of(const Context& cx, const Family& fam) {
    return cx.opt.samples.empty() ? default_samples(fam) : read_values(cx, cx.opt.samples);
}

std::vector<OKValue> units_of(const std::vector<OKValue>& xs) {
    std::vector<OKValue> out;
    for (const auto& x : xs)
        if (!x.is_zero() && x.elem().val == 0) out.push_back(x);
    return out;
}

Json sample_list(const std::vector<OKValue>& xs) {
    Json a = Json::array();
    for (const auto& x : xs) a.push_back(format_elem(*x.ring(), x.elem()));
    return a;
}

struct Outcome {
    Json result;
    bool pass = false;
};

Outcome cmd_lt_construct(const Context& cx) {
    if (cx.series_text.empty()) throw UsageError("lt-construct needs --series");
    const Series1 f = read_series(cx, cx.series_text);
    Outcome o;
    const LTCheck lt = is_lt_series(f);
    o.result["lubin_tate"] = to_json(lt);
    if (!lt.ok) return o;
    const GroupLaw G = lt_group_law(f);
    const GroupAxioms ax = check_group_axioms(G);
    const EndoCheck e = endo_check(f, G);
    o.result["axioms"] = to_json(ax);
    o.result["f_is_endomorphism"] = to_json(e);
    if (cx.opt.with_series) o.result["group_law"] = format_series(G.series());
    o.pass = ax.ok() && e.ok;
    return o;
}

Outcome cmd_endo(const Context& cx) {
    if (cx.series_text.empty() || cx.law_text.empty()) throw UsageError("endo needs --series F and --law G");
    const Series1 F = read_series(cx, cx.series_text);
    Series2 G2 = parse_series2(cx.ring, cx.law_text);
    if (G2.D() != cx.D) G2 = Series2(cx.ring, cx.D, G2.truncate(std::min(G2.D(), cx.D)).coeffs());
    const EndoCheck e = endo_check(F, GroupLaw(std::move(G2)));
    Outcome o;
    o.result["endo"] = to_json(e);
    o.pass = e.ok;
    return o;
}

Outcome cmd_log(const Context& cx) {
    Outcome o;
    if (!cx.family_text.empty()) {
        const Family fam = read_family(cx);
        const LogSeries L = lubin_log(fam, samples_of(cx, fam));
        const LimitLog lim = lubin_log_limit(fam);
        const SeriesDiff d = compare(L.L, lim.L);
        o.result["recurrence"] = Json{{"precision_floor", L.L.precision_floor()}, {"divisions", L.divisions}};
        o.result["limit"] = Json{{"precision_floor", lim.L.precision_floor()},
                                 {"max_iterations", lim.iterations.empty() ? 0 : *std::max_element(lim.iterations.begin(), lim.iterations.end())}};
        Json agree{{"ok", d.equal}, {"min_precision", d.min_prec}};
        if (!d.equal) agree["index"] = d.index;
        o.result["agreement"] = agree;
        if (cx.opt.with_series) o.result["logarithm"] = format_series(L.L);
        o.pass = d.equal;
        return o;
    }
    // a logarithm given directly: build L^-1(L(X) + L(Y)) and judge integrality
    if (cx.series_text.empty()) throw UsageError("log needs --family, or --series with a logarithm");
    const Series1 L = read_series(cx, cx.series_text);
    int divisions = 0;
    for (int m = 1; m <= L.D(); ++m)
        if (!L.coeff(m).is_zero()) divisions = std::max(divisions, -L[m].val);
    const GroupFromLog g = group_from_log(LogSeries{L, divisions});
    o.result["group"] = to_json(g, cx.opt.with_series);
    if (g.integral == Tri::unknown) throw PrecisionError("integrality of the group law is undecidable at this precision");
    o.pass = g.integral == Tri::yes;
    return o;
}

Outcome cmd_family_check(const Context& cx) {
    const Family fam = read_family(cx);
    const auto samples = samples_of(cx, fam);
    const CommutingReport c = check_commuting(fam, samples);
    const FullReport full = check_full(fam, units_of(samples));
    Outcome o;
    o.result["backend"] = to_string(fam.backend());
    o.result["samples"] = sample_list(samples);
    o.result["commuting"] = to_json(c);
    o.result["full"] = to_json(full);
    o.pass = c.ok && full.ok();
    return o;
}

Outcome cmd_lambda_stats(const Context& cx) {
    const Family fam = read_family(cx);
    std::vector<int> ns = cx.opt.n;
    if (ns.empty()) {
        long long qn = 1;
        for (int k = 1; k <= 3; ++k) {
            qn *= static_cast<long long>(fam.ring()->q());
            if (qn <= fam.D()) ns.push_back(k);
        }
    }
    Outcome o;
    o.pass = true;
    o.result["levels"] = Json::array();
    int total = 0;
    for (int n : ns) {
        const LambdaStats s = lambda_stats(fam, n);
        total += s.count;
        o.result["levels"].push_back(to_json(s));
        o.pass = o.pass && s.ok;
    }
    o.result["total_count"] = total;
    return o;
}

Outcome cmd_profile(const Context& cx) {
    if (cx.opt.alpha.empty()) throw UsageError("profile needs --alpha");
    const Family fam = read_family(cx);
    Outcome o;
    o.pass = true;
    o.result["profiles"] = Json::array();
    for (const auto& a : read_values(cx, cx.opt.alpha)) {
        const FixedPointProfile p = fixedpoint_profile(fam, a);
        o.result["profiles"].push_back(to_json(p));
        o.pass = o.pass && p.ok();
    }
    return o;
}

Outcome cmd_recover_group(const Context& cx) {
    const Family fam = read_family(cx);
    const auto samples = samples_of(cx, fam);
    Outcome o;
    o.result["samples"] = sample_list(samples);
    const Recovery r = recover_group(fam, samples);
    if (r.group.integral == Tri::unknown) throw PrecisionError("integrality of the recovered group law is undecidable at this precision");
    o.result["recovery"] = to_json(r, cx.opt.with_series);
    o.pass = r.ok();
    return o;
}

Outcome cmd_mu_search(const Context& cx) {
    const Family fam = read_family(cx);
    const MuCertificate m = mu_search(fam, cx.opt.max_digits);
    Outcome o;
    o.result["certificate"] = to_json(m);
    if (!m.found) return o;
    bool ok = m.wideg_ok && m.lubin_tate && m.congruence_degree >= fam.D();
    if (m.lubin_tate) {
        const GroupLaw G = lt_group_law(fam(m.mu));
        const auto samples = samples_of(cx, fam);
        Json ev = Json::array();
        for (const auto& a : samples) {
            const EndoCheck e = endo_check(fam(a), G);
            ev.push_back(Json{{"alpha", format_elem(*a.ring(), a.elem())}, {"endo", to_json(e)}});
            ok = ok && e.ok;
        }
        o.result["endomorphisms"] = ev;
    }
    o.pass = ok;
    return o;
}

using Handler = std::function<Outcome(const Context&)>;

struct Command {
    const char* name;
    const char* help;
    Handler run;
};

const std::vector<Command>& commands() {
    static const std::vector<Command> cmds{
        {"lt-construct", "Check a Lubin-Tate series and build its formal group", cmd_lt_construct},
        {"endo", "Check that F is an endomorphism of the group law G", cmd_endo},
        {"log", "Family logarithm by both methods, or the group law of a given logarithm", cmd_log},
        {"family-check", "Commutation and full-family conditions", cmd_family_check},
        {"lambda-stats", "Torsion counts and valuations from Newton polygons", cmd_lambda_stats},
        {"profile", "Fixed-point profile of F_alpha", cmd_profile},
        {"recover-group", "Recover the formal group from the family logarithm", cmd_recover_group},
        {"mu-search", "Search for mu with F_mu = T^q mod pi", cmd_mu_search},
    };
    return cmds;
}

Json make_invocation(const Context& cx) {
    Json j;
    j["command"] = cx.opt.command;
    j["ring"] = Json::parse(format_descriptor(cx.ring->descriptor()));
    j["degree"] = cx.D;
    if (!cx.family_text.empty()) j["family"] = cx.family_text;
    if (!cx.series_text.empty()) j["series"] = cx.series_text;
    if (!cx.law_text.empty()) j["law"] = cx.law_text;
    if (!cx.opt.samples.empty()) j["samples"] = cx.opt.samples;
    if (!cx.opt.alpha.empty()) j["alpha"] = cx.opt.alpha;
    if (!cx.opt.n.empty()) j["n"] = cx.opt.n;
    if (cx.opt.command == "mu-search") j["max_digits"] = cx.opt.max_digits;
    if (cx.opt.with_series) j["with_series"] = true;
    return j;
}

void emit(std::ostream& out, const Options& opt, const Json& report) {
    out << (opt.format == "json" ? dump_report(report) : render_text(report));
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    Options opt;
    CLI::App app{"p-adic power series engine for Lubin-Tate formal groups and commuting families", "padyn"};
    app.require_subcommand(1);
    for (const auto& c : commands()) {
        CLI::App* sub = app.add_subcommand(c.name, c.help);
        sub->add_option("--ring", opt.ring, "Ring: file, JSON descriptor, ring tag, or Zp");
        sub->add_option("--degree", opt.degree, "Truncation degree D (default 64)")->check(CLI::Range(1, 4096));
        sub->add_option("--precision", opt.precision, "Working precision N in digits")->check(CLI::Range(1, 4096));
        sub->add_option("--format", opt.format, "Report format")->check(CLI::IsMember({"text", "json"}));
        sub->add_flag("--with-series", opt.with_series, "Include computed series in the report");
        const std::string name = c.name;
        if (name == "lt-construct" || name == "endo" || name == "log")
            sub->add_option("--series", opt.series, "Series literal or file");
        else
            sub->add_option("--family,--series", opt.family, "Family descriptor (JSON), or a Lubin-Tate series literal");
        if (name == "log") sub->add_option("--family", opt.family, "Family descriptor (JSON) or file");
        if (name == "endo") sub->add_option("--law", opt.law, "Two-variable group law literal or file");
        if (name == "log" || name == "family-check" || name == "recover-group" || name == "mu-search")
            sub->add_option("--samples", opt.samples, "Sample values alpha (element literals)");
        if (name == "mu-search") sub->add_option("--max-digits", opt.max_digits, "Digits of mu to search")->check(CLI::Range(1, 16));
        if (name == "profile") sub->add_option("--alpha", opt.alpha, "Unit alpha (element literal)")->required();
        if (name == "lambda-stats") sub->add_option("--n", opt.n, "Torsion levels (default all n <= 3 with q^n <= D)");
        sub->callback([&opt, name] { opt.command = name; });
    }

    std::vector<std::string> rev(args.rbegin(), args.rend());
    try {
        app.parse(rev);
    } catch (const CLI::CallForHelp&) {
        const auto subs = app.get_subcommands();
        out << (subs.empty() ? app.help() : subs.front()->help());
        return kExitPass;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return kExitPass;
    } catch (const CLI::ParseError& e) {
        err << "padyn: " << e.what() << "\n";
        return kExitError;
    }

    Context cx;
    cx.opt = opt;
    Json report;
    int code = kExitError;
    try {
        if (!opt.family.empty()) {
            const std::string text = slurp(opt.family);
            if (!text.empty() && text.front() == '{') cx.family_text = text;
            else cx.series_text = text;
        }
        if (!opt.series.empty()) cx.series_text = slurp(opt.series);
        if (!opt.law.empty()) cx.law_text = slurp(opt.law);
        if (opt.degree) cx.D = *opt.degree;
        resolve_ring(cx);
        cx.invocation = make_invocation(cx);
        report["invocation"] = cx.invocation;

        const auto it = std::find_if(commands().begin(), commands().end(), [&](const Command& c) { return opt.command == c.name; });
        const Outcome o = it->run(cx);
        code = o.pass ? kExitPass : kExitFail;
        report["status"] = o.pass ? "pass" : "fail";
        report["result"] = o.result;
    } catch (const MathError& e) {
        code = kExitFail;
        report["status"] = "fail";
        report["error"] = Json{{"kind", "math"}, {"message", e.what()}};
    } catch (const PrecisionError& e) {
        report["status"] = "undecided";
        report["error"] = Json{{"kind", "precision"}, {"message", e.what()}};
    } catch (const Error& e) {
        report["status"] = "error";
        report["error"] = Json{{"kind", "usage"}, {"message", e.what()}};
    }
    report["exit_code"] = code;
    if (report.contains("error")) err << "padyn: " << report["error"]["message"].get<std::string>() << "\n";
    emit(out, opt, report);
    return code;
}

}  // namespace padyn
