#include "padyn/literal.hpp"

#include <algorithm>
#include <cctype>
#include <climits>
#include <sstream>
#include <vector>

namespace padyn {

namespace {

struct Cursor {
    std::string_view s;
    std::size_t i = 0;

    void ws() {
        while (i < s.size() && std::isspace(static_cast<unsigned char>(s[i]))) ++i;
    }
    bool peek(std::string_view w) {
        ws();
        return s.substr(i, w.size()) == w;
    }
    bool eat(std::string_view w) {
        if (!peek(w)) return false;
        i += w.size();
        return true;
    }
    bool done() {
        ws();
        return i >= s.size();
    }
    [[noreturn]] void fail(const std::string& msg) const {
        throw UsageError("literal \"" + std::string(s) + "\": " + msg);
    }
    void expect(std::string_view w) {
        if (!eat(w)) fail("expected '" + std::string(w) + "'");
    }
    long long integer() {
        ws();
        const bool neg = i < s.size() && s[i] == '-';
        if (neg || (i < s.size() && s[i] == '+')) ++i;
        if (i >= s.size() || !std::isdigit(static_cast<unsigned char>(s[i]))) fail("expected an integer");
        long long v = 0;
        while (i < s.size() && std::isdigit(static_cast<unsigned char>(s[i]))) {
            if (v > (LLONG_MAX - 9) / 10) fail("integer out of range");
            v = v * 10 + (s[i++] - '0');
        }
        return neg ? -v : v;
    }
};

int digit_value(char c) {
    if (c >= '0' && c <= '9') return c - '0';
    if (c >= 'a' && c <= 'z') return c - 'a' + 10;
    return -1;
}

/// Signed integer literal reduced to a word modulo p^M.
std::uint64_t parse_number(Cursor& cur, const Ring& R) {
    cur.ws();
    bool neg = false;
    if (cur.i < cur.s.size() && cur.s[cur.i] == '-') {
        neg = true;
        ++cur.i;
    }
    const std::uint64_t m = R.modulus();
    unsigned __int128 x = 0;
    std::size_t start = cur.i;
    if (cur.i < cur.s.size() && cur.s[cur.i] == '#') {
        start = ++cur.i;
        while (cur.i < cur.s.size() && std::isdigit(static_cast<unsigned char>(cur.s[cur.i])))
            x = (x * 10 + static_cast<unsigned>(cur.s[cur.i++] - '0')) % m;
    } else {
        if (R.p() > 36) cur.fail("base-p digits need p <= 36; use '#' decimal");
        while (cur.i < cur.s.size()) {
            const int d = digit_value(cur.s[cur.i]);
            if (d < 0) break;
            if (static_cast<std::uint64_t>(d) >= R.p()) cur.fail("digit '" + std::string(1, cur.s[cur.i]) + "' out of range for p = " + std::to_string(R.p()));
            x = (x * R.p() + static_cast<unsigned>(d)) % m;
            ++cur.i;
        }
    }
    if (cur.i == start) cur.fail("expected digits");
    const auto w = static_cast<std::uint64_t>(x);
    return neg ? R.sub_w(0, w) : w;
}

std::string digits(std::uint64_t v, std::uint64_t p) {
    if (p > 36) return "#" + std::to_string(v);
    if (v == 0) return "0";
    std::string s;
    while (v > 0) {
        const auto d = static_cast<int>(v % p);
        s.push_back(static_cast<char>(d < 10 ? '0' + d : 'a' + d - 10));
        v /= p;
    }
    return {s.rbegin(), s.rend()};
}

std::uint64_t ipow(std::uint64_t p, int k) {
    std::uint64_t r = 1;
    for (int i = 0; i < k; ++i) r *= p;
    return r;
}

/// Balanced coordinates of a raw value known modulo pi^r.
std::string format_raw(const Ring& R, const Coords& raw, int r) {
    const Coords c = R.raw_canonical(raw, r);
    std::vector<std::string> parts;
    for (int j = 0; j < R.e(); ++j) {
        const int kj = r - j <= 0 ? 0 : std::min((r - j + R.e() - 1) / R.e(), R.storage_digits());
        const std::uint64_t mod = ipow(R.p(), kj);
        for (int i = 0; i < R.f(); ++i) {
            const std::uint64_t v = c[static_cast<std::size_t>(j * R.f() + i)];
            parts.push_back(v != 0 && v > mod / 2 ? "-" + digits(mod - v, R.p()) : digits(v, R.p()));
        }
    }
    if (parts.size() == 1) return parts[0];
    std::string s = "(";
    for (std::size_t k = 0; k < parts.size(); ++k) s += (k ? "," : "") + parts[k];
    return s + ")";
}

std::vector<std::string> split_top(std::string_view s, char sep) {
    std::vector<std::string> out;
    int depth = 0;
    std::size_t start = 0;
    for (std::size_t i = 0; i < s.size(); ++i) {
        if (s[i] == '(' || s[i] == '[') ++depth;
        if (s[i] == ')' || s[i] == ']') --depth;
        if (s[i] == sep && depth == 0) {
            out.emplace_back(s.substr(start, i - start));
            start = i + 1;
        }
    }
    out.emplace_back(s.substr(start));
    return out;
}

std::string trim(std::string_view s) {
    std::size_t a = 0;
    std::size_t b = s.size();
    while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
    while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
    return std::string(s.substr(a, b - a));
}

struct SeriesHeader {
    int D = 0;
    std::string tag;
    std::vector<std::string> terms;
};

SeriesHeader parse_header(std::string_view text) {
    const auto parts = split_top(text, ';');
    if (parts.size() != 3) throw UsageError("series literal: expected 'deg D; ring-tag; terms'");
    SeriesHeader h;
    Cursor c{parts[0]};
    c.expect("deg");
    const long long D = c.integer();
    if (!c.done() || D < 0 || D > 4096) throw UsageError("series literal: bad degree in '" + parts[0] + "'");
    h.D = static_cast<int>(D);
    h.tag = trim(parts[1]);
    for (const auto& t : split_top(parts[2], ',')) {
        std::string tt = trim(t);
        if (!tt.empty()) h.terms.push_back(tt);
    }
    return h;
}

// The working precision N is not part of the ring's identity: a literal written
// at one precision can be read at another.
void check_tag(const Ring& R, const std::string& tag) {
    if (tag == "*" || tag.empty()) return;
    RingDescriptor d = parse_ring_tag(tag);
    d.N = R.N();
    if (!(d == R.descriptor())) throw UsageError("ring mismatch: series literal for " + tag + " used with " + R.tag());
}

std::string series_tail(const Ring& R, const Elem& e) {
    return format_elem(R, e);
}

bool exact_zero(const Ring& R, const Elem& e) { return e.is_zero() && e.prec >= R.N(); }

}  // namespace

Elem parse_elem(const Ring& R, std::string_view text) {
    Cursor cur{text};
    bool neg = false;
    if (cur.eat("-")) neg = true;
    Coords raw{};
    long long shift = 0;
    if (cur.eat("pi")) {
        raw = R.raw_from_int(1);
        shift = cur.eat("^") ? cur.integer() : 1;
    } else if (cur.eat("(")) {
        int k = 0;
        do {
            if (k >= R.dim()) cur.fail("too many coordinates for a ring of degree " + std::to_string(R.dim()));
            raw[static_cast<std::size_t>(k++)] = parse_number(cur, R);
        } while (cur.eat(","));
        cur.expect(")");
    } else {
        raw[0] = parse_number(cur, R);
    }
    if (cur.eat("*")) {
        cur.expect("pi");
        shift += cur.eat("^") ? cur.integer() : 1;
    }
    long long rel = INT_MAX / 4;
    if (cur.eat("+")) {
        cur.expect("O(");
        cur.expect("pi");
        const long long P = cur.eat("^") ? cur.integer() : 1;
        cur.expect(")");
        rel = P - shift;
    }
    if (!cur.done()) cur.fail("unexpected trailing text");
    if (shift < -R.N() - 1 || shift > 4 * R.N() + 4) cur.fail("exponent out of range");
    if (neg) raw = R.raw_neg(raw);
    if (shift >= R.N()) return R.zero(static_cast<int>(std::min<long long>(R.N(), shift + std::max(0LL, rel))));
    return R.normalize(raw, static_cast<int>(shift), static_cast<int>(std::clamp<long long>(rel, INT_MIN / 4, INT_MAX / 4)));
}

std::string format_elem(const Ring& R, const Elem& x) {
    if (x.is_zero()) return x.prec >= R.N() ? "0" : "0+O(pi^" + std::to_string(x.prec) + ")";
    std::string s;
    int default_prec = R.N();
    if (x.val >= 0) {
        s = format_raw(R, R.to_raw(x), x.prec);
    } else {
        s = format_raw(R, x.unit, x.prec - x.val) + "*pi^" + std::to_string(x.val);
        default_prec = R.N() + x.val;
    }
    if (x.prec < default_prec) s += "+O(pi^" + std::to_string(x.prec) + ")";
    return s;
}

KValue parse_value(const RingPtr& ring, std::string_view text) { return {ring, parse_elem(*ring, text)}; }

std::string format_value(const KValue& x) { return format_elem(*x.ring(), x.elem()); }

std::string format_residue(const Ring& R, const ResidueValue& c) {
    if (R.f() == 1) return std::to_string(c.c[0]);
    std::string s = "(";
    for (int i = 0; i < R.f(); ++i) s += (i ? "," : "") + std::to_string(c.c[static_cast<std::size_t>(i)]);
    return s + ")";
}

std::string format_residue_series(const ResidueSeries& s) {
    std::string out;
    for (int i = 0; i <= s.D; ++i) {
        const ResidueValue& c = s.c[static_cast<std::size_t>(i)];
        if (c == ResidueValue{}) continue;
        if (!out.empty()) out += ", ";
        out += std::to_string(i) + ":" + format_residue(*s.ring, c);
    }
    return "deg " + std::to_string(s.D) + "; " + (out.empty() ? "0" : out);
}

RingDescriptor parse_ring_tag(std::string_view tag) {
    Cursor c{tag};
    auto poly = [&]() {
        std::vector<std::int64_t> v;
        c.expect("[");
        if (!c.eat("]")) {
            do v.push_back(c.integer());
            while (c.eat(","));
            c.expect("]");
        }
        return v;
    };
    RingDescriptor d;
    c.expect("p");
    const long long p = c.integer();
    if (p < 2) c.fail("bad prime");
    d.p = static_cast<std::uint64_t>(p);
    c.expect(":u");
    d.unram_poly = poly();
    c.expect(":e");
    d.eis_poly = poly();
    c.expect(":N");
    d.N = static_cast<int>(c.integer());
    if (!c.done()) c.fail("unexpected trailing text");
    return d;
}

Series1 parse_series(const RingPtr& ring, std::string_view text) {
    const SeriesHeader h = parse_header(text);
    check_tag(*ring, h.tag);
    Series1 s(ring, h.D);
    for (const auto& t : h.terms) {
        const auto colon = t.find(':');
        if (colon == std::string::npos) throw UsageError("series literal: term '" + t + "' lacks 'i:'");
        Cursor ci{std::string_view(t).substr(0, colon)};
        const long long i = ci.integer();
        if (!ci.done()) throw UsageError("series literal: bad index in '" + t + "'");
        if (i < 0 || i > h.D) throw UsageError("series literal: index " + std::to_string(i) + " outside 0.." + std::to_string(h.D));
        s.set(static_cast<int>(i), parse_elem(*ring, std::string_view(t).substr(colon + 1)));
    }
    return s;
}

std::string format_series(const Series1& s) {
    const Ring& R = *s.ring();
    std::ostringstream os;
    os << "deg " << s.D() << "; " << R.tag() << ";";
    bool first = true;
    for (int i = 0; i <= s.D(); ++i) {
        if (exact_zero(R, s[i])) continue;
        os << (first ? " " : ", ") << i << ":" << series_tail(R, s[i]);
        first = false;
    }
    return os.str();
}

Series2 parse_series2(const RingPtr& ring, std::string_view text) {
    const SeriesHeader h = parse_header(text);
    check_tag(*ring, h.tag);
    Series2 s(ring, h.D);
    for (const auto& t : h.terms) {
        const auto colon = t.find(':');
        if (colon == std::string::npos) throw UsageError("series literal: term '" + t + "' lacks 'i.j:'");
        Cursor ci{std::string_view(t).substr(0, colon)};
        const long long i = ci.integer();
        ci.expect(".");
        const long long j = ci.integer();
        if (!ci.done() || i < 0 || j < 0 || i + j > h.D)
            throw UsageError("series literal: bad index in '" + t + "'");
        s.set(static_cast<int>(i), static_cast<int>(j), parse_elem(*ring, std::string_view(t).substr(colon + 1)));
    }
    return s;
}

std::string format_series(const Series2& s) {
    const Ring& R = *s.ring();
    std::ostringstream os;
    os << "deg " << s.D() << "; " << R.tag() << ";";
    bool first = true;
    for (int t = 0; t <= s.D(); ++t)
        for (int j = 0; j <= t; ++j) {
            const Elem& e = s.at(t - j, j);
            if (exact_zero(R, e)) continue;
            os << (first ? " " : ", ") << (t - j) << "." << j << ":" << series_tail(R, e);
            first = false;
        }
    return os.str();
}

RingPtr ring_of_literal(std::string_view text) {
    const SeriesHeader h = parse_header(text);
    if (h.tag == "*" || h.tag.empty()) throw UsageError("series literal does not name its ring");
    return make_ring(parse_ring_tag(h.tag));
}

}  // namespace padyn
