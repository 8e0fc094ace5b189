#include "padyn/family.hpp"

#include <map>
#include <mutex>

#include "json.hpp"
#include "padyn/error.hpp"
#include "padyn/literal.hpp"
#include "padyn/lubin_tate.hpp"

namespace padyn {

std::string to_string(Backend b) {
    switch (b) {
        case Backend::lubin_tate: return "lubin-tate";
        case Backend::conjugated: return "conjugated";
        default: return "tabulated";
    }
}

struct Family::Impl {
    RingPtr ring;
    int D = 0;
    Backend backend = Backend::lubin_tate;
    OKValue pi;
    Series1 f;            // lubin_tate
    Series1 U, U_inv;     // conjugated
    Family inner_family;  // conjugated
    std::vector<TableEntry> table;

    mutable std::mutex mu;
    mutable std::map<std::string, Series1> memo;

    [[nodiscard]] Series1 compute(const OKValue& a) const {
        switch (backend) {
            case Backend::lubin_tate:
                // uniqueness: [f'(0)]_{f,f} is f itself
                if (ring->equal(a.elem(), f[1]) && a.prec() >= f[1].prec) return f;
                return lt_endo(a, f, f);
            case Backend::conjugated: return compose(U_inv, compose(inner_family(a), U));
            default:
                for (const auto& e : table)
                    if (ring->equal(e.alpha.elem(), a.elem())) return e.series;
                throw UsageError("tabulated family has no member for alpha = " + format_elem(*ring, a.elem()));
        }
    }
};

namespace {

const Family::Impl& checked(const std::shared_ptr<const Family::Impl>& p) {
    if (!p) throw UsageError("empty family");
    return *p;
}

}  // namespace

const RingPtr& Family::ring() const { return checked(impl_).ring; }
int Family::D() const { return checked(impl_).D; }
Backend Family::backend() const { return checked(impl_).backend; }
const OKValue& Family::pi() const { return checked(impl_).pi; }

const Series1& Family::lt_series() const {
    if (backend() != Backend::lubin_tate) throw UsageError("family is not of Lubin-Tate type");
    return impl_->f;
}
const Series1& Family::conjugator() const {
    if (backend() != Backend::conjugated) throw UsageError("family is not conjugated");
    return impl_->U;
}
const Family& Family::inner() const {
    if (backend() != Backend::conjugated) throw UsageError("family is not conjugated");
    return impl_->inner_family;
}
const std::vector<TableEntry>& Family::table() const {
    if (backend() != Backend::tabulated) throw UsageError("family is not tabulated");
    return impl_->table;
}

Series1 Family::operator()(const OKValue& alpha) const {
    const Impl& im = checked(impl_);
    require_same_ring(*im.ring, *alpha.ring());
    const Ring& R = *im.ring;
    const std::string key = format_elem(R, alpha.elem());
    {
        std::lock_guard<std::mutex> lock(im.mu);
        auto it = im.memo.find(key);
        if (it != im.memo.end()) return it->second;
    }
    Series1 F = im.compute(alpha).truncate(im.D);
    if (!F[0].is_zero()) throw MathError("family member for alpha = " + key + " has a nonzero constant term");
    if (!R.equal(F[1], alpha.elem()))
        throw MathError("family member for alpha = " + key + " has derivative " + format_elem(R, F[1]) + " at 0");
    std::lock_guard<std::mutex> lock(im.mu);
    return im.memo.emplace(key, std::move(F)).first->second;
}

Family family_from_lt(const Series1& f) {
    const LTCheck c = is_lt_series(f);
    if (!c.ok) throw MathError("family_from_lt: not a Lubin-Tate series (" + c.reason + ")");
    auto im = std::make_shared<Family::Impl>();
    im->ring = f.ring();
    im->D = f.D();
    im->backend = Backend::lubin_tate;
    im->f = f;
    im->pi = OKValue(f.ring(), f[1]);
    return Family(std::move(im));
}

Family family_conjugate(const Series1& U, const Family& fam) {
    require_same_ring(*U.ring(), *fam.ring());
    const Ring& R = *U.ring();
    if (U.integral() != Tri::yes) throw UsageError("family_conjugate: U is not integral");
    if (!U[0].is_zero() || U[0].prec < R.N()) throw UsageError("family_conjugate: U(0) is not 0");
    if (U.D() < 1 || U[1].is_zero() || U[1].val != 0) throw MathError("family_conjugate: U'(0) is not a unit, U is not invertible");
    auto im = std::make_shared<Family::Impl>();
    im->ring = fam.ring();
    im->D = std::min(U.D(), fam.D());
    im->backend = Backend::conjugated;
    im->U = U.truncate(im->D);
    im->U_inv = comp_inverse(im->U);
    im->inner_family = fam;
    im->pi = fam.pi();
    return Family(std::move(im));
}

Family family_tabulated(const RingPtr& ring, int D, const OKValue& pi, std::vector<TableEntry> table) {
    bool has_pi = false;
    for (const auto& e : table) {
        require_same_ring(*ring, *e.series.ring());
        if (e.series.D() < D) throw UsageError("family_tabulated: entry truncated below degree " + std::to_string(D));
        if (ring->equal(e.alpha.elem(), pi.elem())) has_pi = true;
    }
    if (!has_pi) throw UsageError("family_tabulated: the table has no entry for pi");
    if (pi.is_zero() || pi.elem().val != 1) throw UsageError("family_tabulated: pi must have valuation 1");
    auto im = std::make_shared<Family::Impl>();
    im->ring = ring;
    im->D = D;
    im->backend = Backend::tabulated;
    im->pi = pi;
    im->table = std::move(table);
    for (auto& e : im->table) e.series = e.series.truncate(D);
    return Family(std::move(im));
}

Family tabulate(const Family& fam, const std::vector<OKValue>& alphas) {
    std::vector<TableEntry> t;
    t.push_back({fam.pi(), fam.f_pi()});
    for (const auto& a : alphas)
        if (!fam.ring()->equal(a.elem(), fam.pi().elem())) t.push_back({a, fam(a)});
    return family_tabulated(fam.ring(), fam.D(), fam.pi(), std::move(t));
}

namespace {

using nlohmann::json;
using nlohmann::ordered_json;

Series1 series_field(const json& j, const char* key, RingPtr& ring, int degree) {
    if (!j.contains(key) || !j[key].is_string()) throw UsageError(std::string("family descriptor: missing series field '") + key + "'");
    const std::string text = j[key].get<std::string>();
    if (!ring) ring = ring_of_literal(text);
    Series1 s = parse_series(ring, text);
    if (degree >= 0 && degree != s.D()) s = Series1(ring, degree, s.coeffs());
    return s;
}

Family from_json(const json& j, RingPtr ring, int degree) {
    if (!j.is_object() || !j.contains("backend")) throw UsageError("family descriptor: expected an object with a 'backend' field");
    if (j.contains("degree")) degree = j["degree"].get<int>();
    const std::string b = j["backend"].get<std::string>();
    if (b == "lubin-tate") return family_from_lt(series_field(j, "f", ring, degree));
    if (b == "conjugated") {
        if (!j.contains("inner")) throw UsageError("family descriptor: conjugated family without 'inner'");
        const Series1 U = series_field(j, "U", ring, degree);
        return family_conjugate(U, from_json(j["inner"], ring, degree));
    }
    if (b == "tabulated") {
        if (!j.contains("table") || !j["table"].is_array() || j["table"].empty())
            throw UsageError("family descriptor: tabulated family needs a non-empty 'table'");
        std::vector<TableEntry> t;
        for (const auto& e : j["table"]) {
            const Series1 s = series_field(e, "series", ring, degree);
            if (!e.contains("alpha")) throw UsageError("family descriptor: table entry without 'alpha'");
            t.push_back({OKValue(ring, parse_elem(*ring, e["alpha"].get<std::string>())), s});
        }
        const OKValue pi = j.contains("pi") ? OKValue(ring, parse_elem(*ring, j["pi"].get<std::string>())) : OKValue::uniformizer(ring);
        int D = t.front().series.D();
        for (const auto& e : t) D = std::min(D, e.series.D());
        return family_tabulated(ring, D, pi, std::move(t));
    }
    throw UsageError("family descriptor: unknown backend '" + b + "'");
}

ordered_json to_json(const Family& fam) {
    ordered_json j;
    j["backend"] = to_string(fam.backend());
    switch (fam.backend()) {
        case Backend::lubin_tate: j["f"] = format_series(fam.lt_series()); break;
        case Backend::conjugated:
            j["U"] = format_series(fam.conjugator());
            j["inner"] = to_json(fam.inner());
            break;
        default:
            j["pi"] = format_elem(*fam.ring(), fam.pi().elem());
            j["table"] = ordered_json::array();
            for (const auto& e : fam.table())
                j["table"].push_back(ordered_json{{"alpha", format_elem(*fam.ring(), e.alpha.elem())}, {"series", format_series(e.series)}});
    }
    return j;
}

}  // namespace

Family family_from_json(std::string_view text, const RingPtr& fallback, int degree) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception& ex) {
        throw UsageError(std::string("family descriptor: ") + ex.what());
    }
    try {
        return from_json(j, fallback, degree);
    } catch (const json::exception& ex) {
        throw UsageError(std::string("family descriptor: ") + ex.what());
    }
}

std::string family_to_json(const Family& fam) { return to_json(fam).dump(); }

}  // namespace padyn
