#include "padyn/lubin_tate.hpp"

#include <algorithm>
#include <climits>
#include <functional>
#include <mutex>

#include "kernels.hpp"
#include "padyn/error.hpp"
#include "padyn/literal.hpp"

namespace padyn {

using detail::ElemOps;
using detail::kExact;
using detail::RawOps;
using detail::RawVal;
using detail::tri_index;
using detail::tri_size;

namespace {

using Block = std::vector<RawVal>;

// out += a * b for homogeneous blocks (entry j is the coefficient of Y^j).
template <class Ops, class Vec>
void block_fma(const Ops& ops, Vec& out, const Vec& a, const Vec& b) {
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (ops.negligible(a[i])) continue;
        for (std::size_t j = 0; j < b.size(); ++j) {
            if (ops.negligible(b[j])) continue;
            ops.fma(out[i + j], a[i], b[j]);
        }
    }
}

// Entries j <= half of a * b for homogeneous blocks.
void block_fma_half(const RawOps& ops, Block& out, const Block& a, const Block& b, std::size_t half) {
    for (std::size_t i = 0; i < a.size() && i <= half; ++i) {
        if (ops.negligible(a[i])) continue;
        for (std::size_t j = 0; j < b.size() && i + j <= half; ++j) {
            if (ops.negligible(b[j])) continue;
            ops.fma(out[i + j], a[i], b[j]);
        }
    }
}

Elem raw_to_elem(const Ring& R, const RawVal& v) { return R.from_raw(v.c, std::min(v.prec, R.N())); }

Elem capped(const Ring& R, const Elem& e, int cap) { return e.prec > cap ? R.with_prec(e, cap) : e; }

RawVal assumed_exact(const Ring& R, const Elem& e) { return {R.to_raw(e), kExact}; }

std::string monomial(int i, int j) { return "X^" + std::to_string(i) + " Y^" + std::to_string(j); }

int vp_int(std::int64_t n, std::uint64_t p) {
    int v = 0;
    while (n != 0 && n % static_cast<std::int64_t>(p) == 0) {
        n /= static_cast<std::int64_t>(p);
        ++v;
    }
    return v;
}

void require_lt(const Series1& f, const char* who) {
    const LTCheck c = is_lt_series(f);
    if (!c.ok) throw MathError(std::string(who) + ": not a Lubin-Tate series (" + c.reason + ")");
}

// One successive-approximation step: H = E / d for the defect E.
Elem divide_defect(const Ring& R, const Elem& E, const Elem& d, int r, const char* who) {
    if (!E.is_zero() && E.val < d.val)
        throw MathError(std::string(who) + ": defect not divisible at degree " + std::to_string(r));
    if (E.is_zero() && E.prec < d.val)
        throw PrecisionError(std::string(who) + ": precision exhausted at degree " + std::to_string(r));
    return R.div(E, d);
}

}  // namespace

LTCheck is_lt_series(const Series1& f) {
    const Ring& R = *f.ring();
    LTCheck out;
    auto fail = [&](int i, std::string why) {
        out.index = i;
        out.reason = std::move(why);
        return out;
    };
    if (f.D() < 1) return fail(-1, "truncation degree below 1");
    if (!f[0].is_zero()) return fail(0, "constant term is not 0");
    const Elem& c1 = f[1];
    if (c1.is_zero()) {
        if (c1.prec < 2) throw PrecisionError("is_lt_series: linear coefficient known only to precision " + std::to_string(c1.prec));
        return fail(1, "linear coefficient has valuation >= 2");
    }
    if (c1.val != 1) return fail(1, "linear coefficient has valuation " + std::to_string(c1.val) + ", expected 1");
    const std::uint64_t q = R.q();
    for (int i = 2; i <= f.D(); ++i) {
        const Elem c = static_cast<std::uint64_t>(i) == q ? R.sub(f[i], R.one()) : f[i];
        if (c.is_zero()) {
            if (c.prec < 1) throw PrecisionError("is_lt_series: coefficient " + std::to_string(i) + " undecidable mod pi");
            continue;
        }
        if (c.val >= 1) continue;
        if (f[i].val < 0 && !f[i].is_zero()) return fail(i, "coefficient " + std::to_string(i) + " is not integral");
        return fail(i, static_cast<std::uint64_t>(i) == q ? "coefficient of T^q is not 1 mod pi"
                                                          : "coefficient " + std::to_string(i) + " is not 0 mod pi");
    }
    out.ok = true;
    return out;
}

// Successive approximation for G with f(G) = G(f, f). The degree-r layer H
// satisfies (f1 - f1^r) H = [G_<r(f(X), f(Y))]_r - [f(G_<r)]_r. Lower layers
// enter the defect as if exact; their own error propagates with one extra
// digit of room (f' = 0 mod pi and f = T^q mod pi), except through the
// layer r/q which is hit by T^q and keeps its error unchanged.
struct GroupLaw::Cache {
    std::once_flag log_once;
    LogSeries log;
    // powers G^k, k = 0..D, raw when G is integral
    std::once_flag pow_once;
    bool raw = false;
    std::vector<std::vector<RawVal>> raw_pw;
    std::vector<std::vector<Elem>> elem_pw;
};

namespace {

// Power cache from the blocks pw[k][r] of G^k built alongside an integral G;
// block r is capped by floor[r], the least precision of the layers of G up to r.
std::shared_ptr<GroupLaw::Cache> seeded_powers(const Ring& R, const Series2& G, const std::vector<std::vector<Block>>& pw,
                                               const std::vector<int>& floor) {
    const int D = G.D();
    auto cache = std::make_shared<GroupLaw::Cache>();
    cache->raw = true;
    cache->raw_pw.assign(static_cast<std::size_t>(D) + 1, std::vector<RawVal>(tri_size(D)));
    cache->raw_pw[0][0] = RawVal{R.raw_from_int(1)};
    if (D >= 1) cache->raw_pw[1] = detail::to_raw(R, G.coeffs());
    for (int k = 2; k <= D; ++k) {
        auto& dst = cache->raw_pw[static_cast<std::size_t>(k)];
        for (int r = k; r <= D; ++r) {
            const Block& b = pw[static_cast<std::size_t>(k)][static_cast<std::size_t>(r)];
            for (int j = 0; j <= r; ++j) {
                RawVal v = b[static_cast<std::size_t>(j)];
                v.prec = std::min(v.prec, floor[static_cast<std::size_t>(r)]);
                dst[tri_index(r - j, j)] = v;
            }
        }
    }
    std::call_once(cache->pow_once, [] {});
    return cache;
}

}  // namespace

GroupLaw lt_group_law(const Series1& f) {
    require_lt(f, "lt_group_law");
    const RingPtr& ring = f.ring();
    const Ring& R = *ring;
    const RawOps ops{R};
    const int D = f.D();
    const auto q = static_cast<long long>(R.q());
    const auto fr = detail::to_raw(R, f.coeffs());

    // pf[i] = f^i as coefficient vectors
    std::vector<std::vector<RawVal>> pf(static_cast<std::size_t>(D) + 1);
    pf[0].assign(static_cast<std::size_t>(D) + 1, RawVal{});
    pf[0][0].c = R.raw_from_int(1);
    for (int i = 1; i <= D; ++i) pf[static_cast<std::size_t>(i)] = detail::mul1(ops, pf[static_cast<std::size_t>(i - 1)], fr, D);

    Series2 G(ring, D);
    std::vector<Block> g(static_cast<std::size_t>(D) + 1);       // g[t][j]: coefficient of X^(t-j) Y^j
    std::vector<std::vector<Block>> pw(static_cast<std::size_t>(D) + 1);  // pw[k][t]: block t of G^k
    std::vector<int> P(static_cast<std::size_t>(D) + 1, R.N());
    std::vector<int> floor(static_cast<std::size_t>(D) + 1, R.N());  // min precision of layers <= r
    if (D >= 1) {
        G.set(1, 0, R.one());
        G.set(0, 1, R.one());
        g[1] = {RawVal{R.raw_from_int(1)}, RawVal{R.raw_from_int(1)}};
    }
    for (auto& row : pw) row.resize(static_cast<std::size_t>(D) + 1);
    const Elem f1 = f[1];
    int prev_min = R.N();
    for (int r = 2; r <= D; ++r) {
        const auto rs = static_cast<std::size_t>(r);
        // blocks r of G^k, k >= 2, from lower blocks
        // G and its powers are symmetric in X, Y: only entries j <= r/2 are computed
        const std::size_t half = rs / 2;
        for (int k = 2; k <= r; ++k) {
            Block acc(rs + 1);
            for (int s = 1; s <= r - k + 1; ++s) {
                const Block& lower = k == 2 ? g[static_cast<std::size_t>(r - s)] : pw[static_cast<std::size_t>(k - 1)][static_cast<std::size_t>(r - s)];
                block_fma_half(ops, acc, g[static_cast<std::size_t>(s)], lower, half);
            }
            for (std::size_t j = half + 1; j <= rs; ++j) acc[j] = acc[rs - j];
            pw[static_cast<std::size_t>(k)][rs] = std::move(acc);
        }
        Block E(rs + 1);
        // [G_<r(f(X), f(Y))]_r
        for (int j = 0; j <= static_cast<int>(half); ++j) {
            RawVal& e = E[static_cast<std::size_t>(j)];
            const int a = r - j;
            for (int t = 1; t < r; ++t)
                for (int jj = std::max(0, t - a); jj <= std::min(t, j); ++jj) {
                    const RawVal& c = g[static_cast<std::size_t>(t)][static_cast<std::size_t>(jj)];
                    if (ops.negligible(c)) continue;
                    const RawVal x = ops.mul(pf[static_cast<std::size_t>(t - jj)][static_cast<std::size_t>(a)],
                                             pf[static_cast<std::size_t>(jj)][static_cast<std::size_t>(j)]);
                    ops.fma(e, c, x);
                }
        }
        // minus [f(G_<r)]_r
        for (int k = 2; k <= r; ++k) {
            const RawVal fk = fr[static_cast<std::size_t>(k)];
            if (ops.negligible(fk)) continue;
            const Block& b = pw[static_cast<std::size_t>(k)][rs];
            for (std::size_t j = 0; j <= half; ++j) E[j] = ops.sub(E[j], ops.mul(fk, b[j]));
        }
        for (std::size_t j = half + 1; j <= rs; ++j) E[j] = E[rs - j];
        int cap = prev_min + 1;
        if (r % q == 0) cap = std::min(cap, P[static_cast<std::size_t>(r / q)]);
        const Elem d = R.sub(f1, R.pow(f1, static_cast<std::uint64_t>(r)));
        Block layer(rs + 1);
        int pr = R.N();
        for (int j = 0; j <= r; ++j) {
            const Elem e = capped(R, raw_to_elem(R, E[static_cast<std::size_t>(j)]), cap);
            const Elem h = divide_defect(R, e, d, r, "lt_group_law");
            pr = std::min(pr, h.prec);
            G.set(r - j, j, h);
            layer[static_cast<std::size_t>(j)] = assumed_exact(R, h);
        }
        if (pr < 1) throw PrecisionError("lt_group_law: precision exhausted at degree " + std::to_string(r));
        P[rs] = pr;
        prev_min = std::min(prev_min, pr);
        floor[rs] = prev_min;
        g[rs] = std::move(layer);
    }
    auto cache = seeded_powers(R, G, pw, floor);
    return GroupLaw(std::move(G), std::move(cache));
}

// Same scheme in one variable: (f1 - f1^r) H = [phi_<r(g)]_r - [f(phi_<r)]_r.
Series1 lt_endo(const OKValue& a, const Series1& f, const Series1& g) {
    require_same_ring(*f.ring(), *g.ring());
    require_same_ring(*f.ring(), *a.ring());
    require_lt(f, "lt_endo");
    require_lt(g, "lt_endo");
    const RingPtr& ring = f.ring();
    const Ring& R = *ring;
    if (!R.equal(f[1], g[1])) throw UsageError("lt_endo: f'(0) and g'(0) differ");
    const RawOps ops{R};
    const int D = std::min(f.D(), g.D());
    const auto q = static_cast<long long>(R.q());
    const auto fr = detail::to_raw(R, f.truncate(D).coeffs());
    const auto gr = detail::to_raw(R, g.truncate(D).coeffs());

    std::vector<std::vector<RawVal>> pg(static_cast<std::size_t>(D) + 1);
    pg[0].assign(static_cast<std::size_t>(D) + 1, RawVal{});
    pg[0][0].c = R.raw_from_int(1);
    for (int i = 1; i <= D; ++i) pg[static_cast<std::size_t>(i)] = detail::mul1(ops, pg[static_cast<std::size_t>(i - 1)], gr, D);

    Series1 out(ring, D);
    if (D < 1) return out;
    out.set(1, a.elem());
    std::vector<RawVal> phi(static_cast<std::size_t>(D) + 1);
    phi[1] = assumed_exact(R, a.elem());
    std::vector<int> P(static_cast<std::size_t>(D) + 1, R.N());
    P[1] = std::min(a.prec(), R.N());
    int prev_min = P[1];
    // pw[k][m]: coefficient of T^m in phi^k
    std::vector<std::vector<RawVal>> pw(static_cast<std::size_t>(D) + 1, std::vector<RawVal>(static_cast<std::size_t>(D) + 1));
    const Elem f1 = f[1];
    for (int r = 2; r <= D; ++r) {
        const auto rs = static_cast<std::size_t>(r);
        RawVal E{};
        for (int s = 1; s < r; ++s) ops.fma(E, phi[static_cast<std::size_t>(s)], pg[static_cast<std::size_t>(s)][rs]);
        for (int k = 2; k <= r; ++k) {
            RawVal acc{};
            for (int t = 1; t <= r - k + 1; ++t) {
                const RawVal& lower = k == 2 ? phi[static_cast<std::size_t>(r - t)] : pw[static_cast<std::size_t>(k - 1)][static_cast<std::size_t>(r - t)];
                ops.fma(acc, phi[static_cast<std::size_t>(t)], lower);
            }
            pw[static_cast<std::size_t>(k)][rs] = acc;
            E = ops.sub(E, ops.mul(fr[static_cast<std::size_t>(k)], acc));
        }
        int cap = prev_min + 1;
        if (r % q == 0) cap = std::min(cap, P[static_cast<std::size_t>(r / q)]);
        const Elem d = R.sub(f1, R.pow(f1, static_cast<std::uint64_t>(r)));
        const Elem h = divide_defect(R, capped(R, raw_to_elem(R, E), cap), d, r, "lt_endo");
        if (h.prec < 1) throw PrecisionError("lt_endo: precision exhausted at degree " + std::to_string(r));
        out.set(r, h);
        P[rs] = h.prec;
        prev_min = std::min(prev_min, h.prec);
        phi[rs] = assumed_exact(R, h);
    }
    return out;
}

GroupLaw::GroupLaw(Series2 G) : G_(std::move(G)), cache_(std::make_shared<Cache>()) {}

GroupLaw::GroupLaw(Series2 G, LogSeries L) : GroupLaw(std::move(G)) {
    std::call_once(cache_->log_once, [&] { cache_->log = std::move(L); });
}

GroupLaw::GroupLaw(Series2 G, std::shared_ptr<Cache> cache) : G_(std::move(G)), cache_(std::move(cache)) {}

GroupLaw::GroupLaw(Series2 G, LogSeries L, std::shared_ptr<Cache> cache) : G_(std::move(G)), cache_(std::move(cache)) {
    std::call_once(cache_->log_once, [&] { cache_->log = std::move(L); });
}

const LogSeries& GroupLaw::log() const {
    if (!cache_) throw UsageError("GroupLaw: empty group law");
    std::call_once(cache_->log_once, [this] { cache_->log = formal_log(*this); });
    return cache_->log;
}

namespace {

RawVal one_of(const RawOps& o) { return {o.R.raw_from_int(1)}; }
Elem one_of(const ElemOps& o) { return o.exact_one(); }

template <class Ops>
std::vector<std::vector<typename Ops::V>> bivariate_powers(const Ops& ops, const std::vector<typename Ops::V>& g, int D) {
    std::vector<std::vector<typename Ops::V>> pw(static_cast<std::size_t>(D) + 1);
    pw[0].assign(tri_size(D), ops.zero());
    pw[0][0] = one_of(ops);
    for (int i = 1; i <= D; ++i) {
        pw[static_cast<std::size_t>(i)] = i == 1 ? g : detail::mul2(ops, pw[static_cast<std::size_t>(i - 1)], g, D);
    }
    return pw;
}

}  // namespace

LogSeries formal_log(const GroupLaw& G) {
    const RingPtr& ring = G.ring();
    const Ring& R = *ring;
    const int D = G.D();
    if (D < 1) throw UsageError("formal_log: truncation degree below 1");
    Series1 dx(ring, D - 1);
    for (int j = 0; j <= D - 1; ++j) dx.set(j, G.series().at(1, j));
    LogSeries out;
    out.L = integrate(mul_inverse(dx));
    for (int m = 2; m <= D; ++m) out.divisions = std::max(out.divisions, R.e() * vp_int(m, R.p()));
    return out;
}

Series1 formal_exp(const LogSeries& L) { return comp_inverse(L.L); }

namespace {

// G_r = a_r (X^r + Y^r) - sum_{j>=2} a_j [G_<r^j]_r, all in K with tracked precision.
Series2 solve_group_naive(const Series1& L) {
    const RingPtr& ring = L.ring();
    const Ring& R = *ring;
    const ElemOps ops{R};
    const int D = L.D();
    Series2 G(ring, D);
    G.set(1, 0, R.one());
    G.set(0, 1, R.one());
    std::vector<std::vector<Elem>> g(static_cast<std::size_t>(D) + 1);
    g[1] = {ops.exact_one(), ops.exact_one()};  // X + Y exactly
    std::vector<std::vector<std::vector<Elem>>> pw(static_cast<std::size_t>(D) + 1, std::vector<std::vector<Elem>>(static_cast<std::size_t>(D) + 1));
    for (int r = 2; r <= D; ++r) {
        const auto rs = static_cast<std::size_t>(r);
        std::vector<Elem> layer(rs + 1, R.zero());
        layer[0] = L[r];
        layer[rs] = R.add(layer[rs], L[r]);
        for (int k = 2; k <= r; ++k) {
            std::vector<Elem> acc(rs + 1, R.zero());
            for (int s = 1; s <= r - k + 1; ++s)
                block_fma(ops, acc, g[static_cast<std::size_t>(s)], k == 2 ? g[static_cast<std::size_t>(r - s)] : pw[static_cast<std::size_t>(k - 1)][static_cast<std::size_t>(r - s)]);
            for (int j = 0; j <= r; ++j) layer[static_cast<std::size_t>(j)] = R.sub(layer[static_cast<std::size_t>(j)], R.mul(L[k], acc[static_cast<std::size_t>(j)]));
            pw[static_cast<std::size_t>(k)][rs] = std::move(acc);
        }
        for (int j = 0; j <= r; ++j) G.set(r - j, j, layer[static_cast<std::size_t>(j)]);
        g[rs] = std::move(layer);
    }
    return G;
}

}  // namespace

// With L' integral and G integral through degree r-1, an error of valuation
// >= B in the lower layers changes layer r by (L'(G) - 1) * error plus terms
// of valuation >= 2B - V, V the largest denominator of L.
GroupFromLog group_from_log(const LogSeries& log) {
    const Series1& L = log.L;
    const RingPtr& ring = L.ring();
    const Ring& R = *ring;
    const int D = L.D();
    if (D < 1) throw UsageError("group_from_log: truncation degree below 1");
    if (!L[0].is_zero()) throw UsageError("group_from_log: L(0) is not 0");
    if (!R.equal(L[1], R.one())) throw UsageError("group_from_log: L'(0) is not 1");
    int V = 0;
    for (int j = 1; j <= D; ++j)
        if (!L[j].is_zero()) V = std::max(V, -L[j].val);
    const bool omega_integral = derivative(L).integral() == Tri::yes;

    GroupFromLog out;
    Series2 G(ring, D);
    auto cache = std::make_shared<GroupLaw::Cache>();
    bool fast = omega_integral;
    if (fast) {
        const RawOps ops{R};
        G.set(1, 0, R.one());
        G.set(0, 1, R.one());
        std::vector<Block> g(static_cast<std::size_t>(D) + 1);
        g[1] = {RawVal{R.raw_from_int(1)}, RawVal{R.raw_from_int(1)}};
        std::vector<std::vector<Block>> pw(static_cast<std::size_t>(D) + 1, std::vector<Block>(static_cast<std::size_t>(D) + 1));
        std::vector<int> floor(static_cast<std::size_t>(D) + 1, R.N());  // min precision of layers <= r
        int B = R.N();
        // G and its powers are symmetric in X, Y: only entries j <= r/2 are computed
        for (int r = 2; r <= D && fast; ++r) {
            const auto rs = static_cast<std::size_t>(r);
            const std::size_t half = rs / 2;
            std::vector<Elem> layer(rs + 1, R.zero());
            layer[0] = L[r];
            layer[rs] = R.add(layer[rs], L[r]);
            for (int k = 2; k <= r; ++k) {
                Block acc(rs + 1);
                for (int s = 1; s <= r - k + 1; ++s)
                    block_fma_half(ops, acc, g[static_cast<std::size_t>(s)], k == 2 ? g[static_cast<std::size_t>(r - s)] : pw[static_cast<std::size_t>(k - 1)][static_cast<std::size_t>(r - s)], half);
                for (std::size_t j = half + 1; j <= rs; ++j) acc[j] = acc[rs - j];
                for (std::size_t j = 0; j <= half; ++j) layer[j] = R.sub(layer[j], R.mul(L[k], raw_to_elem(R, acc[j])));
                pw[static_cast<std::size_t>(k)][rs] = std::move(acc);
            }
            for (std::size_t j = half + 1; j <= rs; ++j) layer[j] = layer[rs - j];
            const int cap = std::min(B, 2 * B - V);
            Block next(rs + 1);
            int pr = R.N();
            for (int j = 0; j <= r; ++j) {
                const Elem h = capped(R, layer[static_cast<std::size_t>(j)], cap);
                if (!R.is_integral(h) || h.prec < 1) {
                    fast = false;
                    break;
                }
                pr = std::min(pr, h.prec);
                G.set(r - j, j, h);
                next[static_cast<std::size_t>(j)] = assumed_exact(R, h);
            }
            B = std::min(B, pr);
            floor[rs] = std::min(floor[rs - 1], pr);
            g[rs] = std::move(next);
        }
        if (fast) {
            cache = seeded_powers(R, G, pw, floor);
        }
    }
    if (!fast) {
        G = solve_group_naive(L);
        cache = std::make_shared<GroupLaw::Cache>();
    }

    out.integral = Tri::yes;
    for (int t = 0; t <= D && out.integral != Tri::no; ++t)
        for (int j = 0; j <= t; ++j) {
            const Elem& c = G.at(t - j, j);
            if (!c.is_zero() && c.val < 0) {
                out.integral = Tri::no;
                out.bad_i = t - j;
                out.bad_j = j;
                out.witness = "coefficient of " + monomial(t - j, j) + " is " + format_elem(R, c);
                break;
            }
        }
    if (out.integral == Tri::yes && G.precision_floor() < 1)
        throw PrecisionError("group_from_log: precision too low to decide integrality");
    out.group = GroupLaw(std::move(G), LogSeries{L, log.divisions}, std::move(cache));
    return out;
}

namespace {

void ensure_powers(const Series2& G, GroupLaw::Cache& c) {
    std::call_once(c.pow_once, [&] {
        const Ring& R = *G.ring();
        if (G.integral() == Tri::yes) {
            c.raw = true;
            c.raw_pw = bivariate_powers(RawOps{R}, detail::to_raw(R, G.coeffs()), G.D());
        } else {
            auto g = G.coeffs();
            g[0] = ElemOps::exact_zero();
            c.elem_pw = bivariate_powers(ElemOps{R}, g, G.D());
        }
    });
}

}  // namespace

EndoCheck endo_check(const Series1& F, const GroupLaw& G) {
    require_same_ring(*F.ring(), *G.ring());
    if (!G.cache_) throw UsageError("endo_check: empty group law");
    const Ring& R = *F.ring();
    const int D = std::min(F.D(), G.D());
    if (!F[0].is_zero() || F[0].prec < R.N()) throw UsageError("endo_check: F(0) is not 0");
    const Series1 Ft = F.truncate(D);
    const Series2 Gt = G.series().truncate(D);
    ensure_powers(G.series(), *G.cache_);
    const GroupLaw::Cache& c = *G.cache_;
    const std::size_t sz = tri_size(D);
    // F(G) = sum_k f_k G^k from the cached powers (entries beyond degree D are ignored)
    std::vector<Elem> lhs(sz, R.zero());
    if (c.raw && Ft.integral() == Tri::yes) {
        const RawOps ops{R};
        const auto fr = detail::to_raw(R, Ft.coeffs());
        std::vector<RawVal> acc(sz);
        for (int k = 1; k <= D && k < static_cast<int>(c.raw_pw.size()); ++k) {
            const RawVal& fk = fr[static_cast<std::size_t>(k)];
            if (ops.negligible(fk)) continue;
            const auto& pk = c.raw_pw[static_cast<std::size_t>(k)];
            for (std::size_t m = tri_index(k, 0); m < sz; ++m)
                if (!ops.negligible(pk[m])) ops.fma(acc[m], fk, pk[m]);
        }
        lhs = detail::from_raw(R, acc);
    } else {
        const std::size_t n = c.raw ? c.raw_pw.size() : c.elem_pw.size();
        for (int k = 1; k <= D; ++k) {
            const Elem& fk = Ft[k];
            if (c.raw && fk.is_zero() && fk.prec >= R.N()) continue;
            for (std::size_t m = tri_index(k, 0); m < sz; ++m) {
                // powers missing from the cache vanish mod pi^N
                const Elem pkm = k >= static_cast<int>(n) ? R.zero()
                                 : c.raw ? raw_to_elem(R, c.raw_pw[static_cast<std::size_t>(k)][m])
                                         : c.elem_pw[static_cast<std::size_t>(k)][m];
                lhs[m] = R.add(lhs[m], R.mul(fk, pkm));
            }
        }
    }
    const Series2 left(G.ring(), D, std::move(lhs));
    const Series2 rhs = subst2(Gt, Ft, Ft);
    const SeriesDiff d = compare(left, rhs);
    EndoCheck out;
    out.min_prec = d.min_prec;
    if (!d.equal) {
        out.ok = false;
        out.i = d.index - d.j;
        out.j = d.j;
        out.witness = monomial(out.i, out.j) + ": F(G) has " + format_elem(R, left.at(out.i, out.j)) + ", G(F,F) has " +
                      format_elem(R, rhs.at(out.i, out.j));
        return out;
    }
    if (d.min_prec < 1) throw PrecisionError("endo_check: precision too low to decide");
    return out;
}

namespace {

template <class Ops>
void check_associative(const Ops& ops, const std::vector<typename Ops::V>& g, const std::vector<std::vector<typename Ops::V>>& pw,
                       int D, GroupAxioms& out, const std::function<Elem(const typename Ops::V&)>& to_elem) {
    using V = typename Ops::V;
    out.associative = true;
    for (int t = 0; t <= D; ++t)
        for (int a = 0; a <= t; ++a)
            for (int b = 0; a + b <= t; ++b) {
                const int c = t - a - b;
                V left = ops.zero();
                for (int i = 0; i <= a + b && i + c <= D; ++i) ops.fma(left, g[tri_index(i, c)], pw[static_cast<std::size_t>(i)][tri_index(a, b)]);
                V right = ops.zero();
                for (int j = 0; j <= b + c && a + j <= D; ++j) ops.fma(right, g[tri_index(a, j)], pw[static_cast<std::size_t>(j)][tri_index(b, c)]);
                const Elem diff = to_elem(ops.sub(left, right));
                out.min_prec = std::min(out.min_prec, diff.prec);
                if (!diff.is_zero() && out.associative) {
                    out.associative = false;
                    out.witness = "associativity fails at X^" + std::to_string(a) + " Y^" + std::to_string(b) + " Z^" + std::to_string(c);
                }
            }
}

}  // namespace

GroupAxioms check_group_axioms(const GroupLaw& law) {
    if (!law.cache_) throw UsageError("check_group_axioms: empty group law");
    const Series2& G = law.series();
    const Ring& R = *G.ring();
    const int D = G.D();
    GroupAxioms out;
    out.min_prec = INT_MAX;
    auto note = [&](bool& flag, const Elem& diff, const std::string& where) {
        out.min_prec = std::min(out.min_prec, diff.prec);
        if (!diff.is_zero() && flag) {
            flag = false;
            if (out.witness.empty()) out.witness = where;
        }
    };
    out.identity = true;
    for (int i = 0; i <= D; ++i) {
        const Elem delta = i == 1 ? R.one() : R.zero();
        note(out.identity, R.sub(G.at(i, 0), delta), "G(X,0) differs from X at X^" + std::to_string(i));
        note(out.identity, R.sub(G.at(0, i), delta), "G(0,Y) differs from Y at Y^" + std::to_string(i));
    }
    out.commutative = true;
    for (int t = 0; t <= D; ++t)
        for (int j = 0; j < t - j; ++j) note(out.commutative, R.sub(G.at(t - j, j), G.at(j, t - j)), "G is not symmetric at " + monomial(t - j, j));

    ensure_powers(G, *law.cache_);
    const GroupLaw::Cache& c = *law.cache_;
    if (c.raw) {
        check_associative(RawOps{R}, detail::to_raw(R, G.coeffs()), c.raw_pw, D, out, [&](const RawVal& v) { return raw_to_elem(R, v); });
    } else {
        check_associative(ElemOps{R}, G.coeffs(), c.elem_pw, D, out, [](const Elem& e) { return e; });
    }
    if (out.ok() && out.min_prec < 1) throw PrecisionError("check_group_axioms: precision too low to decide");
    return out;
}

}  // namespace padyn
