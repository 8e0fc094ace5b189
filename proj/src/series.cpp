#include "padyn/series.hpp"

#include <algorithm>
#include <climits>

#include "kernels.hpp"

namespace padyn {

namespace detail {

std::vector<RawVal> to_raw(const Ring& R, const std::vector<Elem>& v) {
    std::vector<RawVal> r(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) {
        r[i].c = R.to_raw(v[i]);
        r[i].prec = v[i].prec;
    }
    return r;
}

std::vector<Elem> from_raw(const Ring& R, const std::vector<RawVal>& v) {
    std::vector<Elem> r(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) r[i] = R.from_raw(v[i].c, std::min(v[i].prec, R.N()));
    return r;
}

std::vector<Elem> inv1(const Ring& R, const std::vector<Elem>& a, int D) {
    std::vector<Elem> b(static_cast<std::size_t>(D) + 1, R.zero());
    const Elem i0 = R.inv(a[0]);
    b[0] = i0;
    for (int m = 1; m <= D; ++m) {
        Elem s = R.zero();
        for (int k = 1; k <= m; ++k) s = R.add(s, R.mul(a[static_cast<std::size_t>(k)], b[static_cast<std::size_t>(m - k)]));
        b[static_cast<std::size_t>(m)] = R.neg(R.mul(s, i0));
    }
    return b;
}

}  // namespace detail

using detail::ElemOps;
using detail::RawOps;
using detail::RawVal;

namespace {

Tri integral_of(const Ring& R, const std::vector<Elem>& c) {
    Tri t = Tri::yes;
    for (const Elem& e : c) {
        if (!e.is_zero() && e.val < 0) return Tri::no;
        if (e.is_zero() && e.prec < 0) t = Tri::unknown;
    }
    (void)R;
    return t;
}

int floor_of(const std::vector<Elem>& c) {
    int m = INT_MAX;
    for (const Elem& e : c) m = std::min(m, e.prec);
    return m;
}

/// Valuation lower bound of a coefficient (its precision when indistinguishable from 0).
int val_bound(const Elem& e) { return e.is_zero() ? e.prec : e.val; }

std::vector<Elem> head(const Series1& s, int D) {
    return {s.coeffs().begin(), s.coeffs().begin() + D + 1};
}

/// Checks a constant term meant to vanish; returns the precision cap it imposes.
int constant_cap(const Elem& c0, const char* what) {
    if (!c0.is_zero()) throw UsageError(std::string(what) + ": inner series has nonzero constant term");
    return c0.prec;
}

void cap_all(const Ring& R, std::vector<Elem>& v, int cap) {
    if (cap >= R.N()) return;
    for (Elem& e : v)
        if (e.prec > cap) e = R.with_prec(e, cap);
}

/// Calls emit(k, P) with P = G^k for k = 1..D while G^k is nonzero below D.
template <class Ops, class Emit>
void for_each_power(const Ops& ops, const std::vector<typename Ops::V>& g, int D, Emit&& emit) {
    std::vector<typename Ops::V> p = g;
    for (int k = 1; k <= D; ++k) {
        if (k > 1) p = detail::mul1(ops, p, g, D);
        if (detail::lowest(ops, p) > D) break;
        emit(k, p);
    }
}

}  // namespace

std::string to_string(Tri t) {
    switch (t) {
        case Tri::yes: return "yes";
        case Tri::no: return "no";
        default: return "unknown";
    }
}

// ---------------------------------------------------------------- Series1

Series1::Series1(RingPtr ring, int D) : ring_(std::move(ring)), D_(D) {
    if (D < 0) throw UsageError("series: negative truncation degree");
    c_.assign(static_cast<std::size_t>(D) + 1, ring_->zero());
}

Series1::Series1(RingPtr ring, int D, std::vector<Elem> coeffs) : ring_(std::move(ring)), D_(D), c_(std::move(coeffs)) {
    if (D < 0) throw UsageError("series: negative truncation degree");
    c_.resize(static_cast<std::size_t>(D) + 1, ring_->zero());    for (auto& e : c_)
        if (e.prec > ring_->N()) e = ring_->zero();
}

Series1 Series1::variable(const RingPtr& ring, int D) {
    Series1 s(ring, D);
    if (D >= 1) s.set(1, ring->one());
    return s;
}

Series1 Series1::from_ints(const RingPtr& ring, int D, const std::vector<std::int64_t>& c) {
    Series1 s(ring, D);
    for (std::size_t i = 0; i < c.size() && static_cast<int>(i) <= D; ++i) s.set(static_cast<int>(i), ring->from_int(c[i]));
    return s;
}

Series1 Series1::constant(const KValue& c, int D) {
    Series1 s(c.ring(), D);
    s.set(0, c.elem());
    return s;
}

void Series1::set(int i, const KValue& v) {
    require_same_ring(*ring_, *v.ring());
    set(i, v.elem());
}

Tri Series1::integral() const noexcept { return integral_of(*ring_, c_); }

int Series1::order() const noexcept {
    for (int i = 0; i <= D_; ++i)
        if (!c_[static_cast<std::size_t>(i)].is_zero()) return i;
    return -1;
}

int Series1::precision_floor() const noexcept { return floor_of(c_); }

Series1 Series1::truncate(int D) const {
    if (D > D_) throw UsageError("series: cannot extend truncation degree");
    return {ring_, D, head(*this, D)};
}

Series1 Series1::with_precision_cap(int P) const {
    Series1 r = *this;
    for (Elem& e : r.c_)
        if (e.prec > P) e = ring_->with_prec(e, P);
    return r;
}

Series1 operator+(const Series1& a, const Series1& b) {
    require_same_ring(*a.ring(), *b.ring());
    const Ring& R = *a.ring();
    const int D = std::min(a.D(), b.D());
    Series1 r(a.ring(), D);
    for (int i = 0; i <= D; ++i) r.set(i, R.add(a[i], b[i]));
    return r;
}

Series1 operator-(const Series1& a) {
    Series1 r(a.ring(), a.D());
    for (int i = 0; i <= a.D(); ++i) r.set(i, a.ring()->neg(a[i]));
    return r;
}

Series1 operator-(const Series1& a, const Series1& b) { return a + (-b); }

Series1 operator*(const Series1& a, const Series1& b) {
    require_same_ring(*a.ring(), *b.ring());
    const Ring& R = *a.ring();
    const int D = std::min(a.D(), b.D());
    if (a.integral() == Tri::yes && b.integral() == Tri::yes) {
        RawOps ops{R};
        auto c = detail::mul1(ops, detail::to_raw(R, head(a, D)), detail::to_raw(R, head(b, D)), D);
        return {a.ring(), D, detail::from_raw(R, c)};
    }
    ElemOps ops{R};
    return {a.ring(), D, detail::mul1(ops, head(a, D), head(b, D), D)};
}

Series1 scale(const Series1& a, const KValue& c) {
    require_same_ring(*a.ring(), *c.ring());
    Series1 r(a.ring(), a.D());
    for (int i = 0; i <= a.D(); ++i) r.set(i, a.ring()->mul(a[i], c.elem()));
    return r;
}

SeriesDiff compare(const Series1& a, const Series1& b) {
    require_same_ring(*a.ring(), *b.ring());
    const Ring& R = *a.ring();
    SeriesDiff d;
    d.min_prec = INT_MAX;
    const int D = std::min(a.D(), b.D());
    for (int i = 0; i <= D; ++i) {
        const Elem x = R.sub(a[i], b[i]);
        d.min_prec = std::min(d.min_prec, x.prec);
        if (!x.is_zero() && d.equal) {
            d.equal = false;
            d.index = i;
        }
    }
    return d;
}

bool operator==(const Series1& a, const Series1& b) { return compare(a, b).equal; }

Series1 compose(const Series1& F, const Series1& G) {
    require_same_ring(*F.ring(), *G.ring());
    const Ring& R = *F.ring();
    const int D = std::min(F.D(), G.D());
    const int c0 = constant_cap(G[0], "compose");
    int vF = 0;
    for (int k = 1; k <= D; ++k) vF = std::min(vF, val_bound(F[k]));

    std::vector<Elem> g = head(G, D);
    g[0] = R.zero();
    std::vector<Elem> f = head(F, D);
    std::vector<Elem> out(static_cast<std::size_t>(D) + 1, R.zero());
    out[0] = f[0];

    if (integral_of(R, g) == Tri::yes) {
        RawOps ops{R};
        if (integral_of(R, f) == Tri::yes) {
            std::vector<RawVal> acc(static_cast<std::size_t>(D) + 1);
            const auto fr = detail::to_raw(R, f);
            acc[0] = fr[0];
            for_each_power(ops, detail::to_raw(R, g), D, [&](int k, const std::vector<RawVal>& p) {
                const RawVal& fk = fr[static_cast<std::size_t>(k)];
                for (int m = k; m <= D; ++m) ops.fma(acc[static_cast<std::size_t>(m)], fk, p[static_cast<std::size_t>(m)]);
            });
            out = detail::from_raw(R, acc);
        } else {
            int last = 0;
            for_each_power(ops, detail::to_raw(R, g), D, [&](int k, const std::vector<RawVal>& p) {
                const auto pe = detail::from_raw(R, p);
                const Elem& fk = f[static_cast<std::size_t>(k)];
                for (int m = k; m <= D; ++m)
                    out[static_cast<std::size_t>(m)] = R.add(out[static_cast<std::size_t>(m)], R.mul(fk, pe[static_cast<std::size_t>(m)]));
                last = k;
            });
            // G^k = 0 mod pi^N from here on, still worth N + val(f_k) digits
            for (int k = last + 1; k <= D; ++k) {
                const Elem t = R.mul(f[static_cast<std::size_t>(k)], R.zero());
                for (int m = k; m <= D; ++m) out[static_cast<std::size_t>(m)] = R.add(out[static_cast<std::size_t>(m)], t);
            }
        }
    } else {
        ElemOps ops{R};
        g[0] = ElemOps::exact_zero();
        for_each_power(ops, g, D, [&](int k, const std::vector<Elem>& p) {
            const Elem& fk = f[static_cast<std::size_t>(k)];
            // G^k has order >= k; its lower entries are structural zeros
            for (int m = k; m <= D; ++m) ops.fma(out[static_cast<std::size_t>(m)], fk, p[static_cast<std::size_t>(m)]);
        });
    }
    if (c0 < R.N()) cap_all(R, out, c0 + vF);
    return {F.ring(), D, std::move(out)};
}

Series1 comp_inverse(const Series1& F) {
    const Ring& R = *F.ring();
    const int D = F.D();
    if (!F[0].is_zero()) throw UsageError("comp_inverse: F(0) != 0");
    if (D < 1) return {F.ring(), D};
    const Elem& f1 = F[1];
    if (f1.is_zero()) {
        if (f1.prec >= R.N()) throw MathError("comp_inverse: F'(0) = 0");
        throw PrecisionError("comp_inverse: F'(0) indistinguishable from 0 at precision " + std::to_string(f1.prec));
    }
    std::vector<Elem> f = F.coeffs();
    const int c0 = f[0].prec;
    f[0] = R.zero();
    std::vector<Elem> out;
    if (integral_of(R, f) == Tri::yes && f1.val == 0) {
        RawOps ops{R};
        const RawVal inv{R.raw_inv_unit(f1.unit), f1.prec};
        out = detail::from_raw(R, detail::reverse1(ops, detail::to_raw(R, f), inv, D));
        if (c0 < R.N()) cap_all(R, out, c0);
    } else {
        if (c0 < R.N()) throw PrecisionError("comp_inverse: constant term only known to precision " + std::to_string(c0));
        ElemOps ops{R};
        f[0] = ElemOps::exact_zero();
        out = detail::reverse1(ops, f, R.inv(f1), D);
    }
    return {F.ring(), D, std::move(out)};
}

Series1 iterate(const Series1& F, int n) {
    if (n < 0) return iterate(comp_inverse(F), -n);
    Series1 r = Series1::variable(F.ring(), F.D());
    for (int i = 0; i < n; ++i) r = i == 0 ? F : compose(F, r);
    return r;
}

Series1 mul_inverse(const Series1& F) {
    const Ring& R = *F.ring();
    if (F[0].is_zero()) {
        if (F[0].prec >= R.N()) throw MathError("mul_inverse: constant term is 0");
        throw PrecisionError("mul_inverse: constant term indistinguishable from 0");
    }
    return {F.ring(), F.D(), detail::inv1(R, F.coeffs(), F.D())};
}

Series1 derivative(const Series1& F) {
    const Ring& R = *F.ring();
    const int D = std::max(F.D() - 1, 0);
    Series1 r(F.ring(), D);
    for (int i = 0; i < F.D(); ++i) r.set(i, R.mul_int(F[i + 1], i + 1));
    return r;
}

Series1 integrate(const Series1& F) {
    const Ring& R = *F.ring();
    Series1 r(F.ring(), F.D() + 1);
    for (int m = 0; m <= F.D(); ++m) r.set(m + 1, R.div(F[m], R.from_int(m + 1)));
    return r;
}

Series1 shift_down(const Series1& F, int k) {
    if (k > F.D()) throw UsageError("shift_down: shift exceeds truncation degree");
    for (int i = 0; i < k; ++i)
        if (!F[i].is_zero()) throw MathError("shift_down: coefficient of T^" + std::to_string(i) + " does not vanish");
    Series1 r(F.ring(), F.D() - k);
    for (int i = k; i <= F.D(); ++i) r.set(i - k, F[i]);
    return r;
}

// ---------------------------------------------------------------- wideg / polygons

std::string Wideg::to_string() const {
    switch (kind) {
        case Kind::finite: return std::to_string(value);
        case Kind::beyond: return ">=" + std::to_string(value);
        default: return "undecidable at " + std::to_string(value);
    }
}

Wideg wideg(const Series1& F) {
    for (int i = 0; i <= F.D(); ++i) {
        const Elem& c = F[i];
        if (!c.is_zero()) {
            if (c.val < 0) throw MathError("wideg: coefficient of T^" + std::to_string(i) + " is not integral");
            if (c.val == 0) return {Wideg::Kind::finite, i};
        } else if (c.prec < 1) {
            return {Wideg::Kind::undecidable, i};
        }
    }
    return {Wideg::Kind::beyond, F.D() + 1};
}

int NewtonPolygon::root_count() const noexcept {
    int n = 0;
    for (const auto& s : segments) n += s.length;
    return n;
}

std::vector<std::pair<Rational, int>> NewtonPolygon::roots() const {
    std::vector<std::pair<Rational, int>> r;
    for (const auto& s : segments) r.emplace_back(-s.slope, s.length);
    return r;
}

NewtonPolygon newton_polygon(const Series1& F) {
    const Ring& R = *F.ring();
    struct Pt {
        long long x, y;
    };
    std::vector<Pt> pts;
    int vmin = INT_MAX;
    int limit = -1;
    for (int i = 0; i <= F.D(); ++i) {
        const Elem& c = F[i];
        if (c.is_zero()) continue;
        if (c.val < vmin) {
            vmin = c.val;
            limit = i;
        }
    }
    if (limit < 0) throw PrecisionError("newton_polygon: all coefficients indistinguishable from 0");
    for (int i = 0; i <= limit; ++i)
        if (!F[i].is_zero()) pts.push_back({i, F[i].val});

    std::vector<Pt> hull;
    for (const Pt& p : pts) {
        while (hull.size() >= 2) {
            const Pt& o = hull[hull.size() - 2];
            const Pt& a = hull.back();
            const long long cross = (a.x - o.x) * (p.y - o.y) - (a.y - o.y) * (p.x - o.x);
            if (cross > 0) break;
            hull.pop_back();
        }
        hull.push_back(p);
    }

    NewtonPolygon np;
    for (const Pt& p : hull) np.vertices.push_back({static_cast<int>(p.x), Rational(p.y)});
    for (std::size_t k = 0; k + 1 < hull.size(); ++k) {
        const auto len = hull[k + 1].x - hull[k].x;
        np.segments.push_back({Rational(hull[k + 1].y - hull[k].y, len), static_cast<int>(len)});
    }

    // Coefficients we could not resolve must lie on or above the hull.
    for (int i = 0; i <= limit; ++i) {
        const Elem& c = F[i];
        if (!c.is_zero() || c.prec >= R.N()) continue;
        if (i < hull.front().x)
            throw PrecisionError("newton_polygon: coefficient of T^" + std::to_string(i) +
                                 " is undecidable at precision " + std::to_string(c.prec));
        for (std::size_t k = 0; k + 1 < hull.size(); ++k) {
            if (i < hull[k].x || i > hull[k + 1].x) continue;
            const Rational h = Rational(hull[k].y) + np.segments[k].slope * Rational(i - hull[k].x);
            if (Rational(c.prec) < h)
                throw PrecisionError("newton_polygon: coefficient of T^" + std::to_string(i) +
                                     " is undecidable at precision " + std::to_string(c.prec));
            break;
        }
    }
    return np;
}

// ---------------------------------------------------------------- residue series

bool ResidueSeries::is_zero() const noexcept { return order() < 0; }

int ResidueSeries::order() const noexcept {
    for (std::size_t i = 0; i < c.size(); ++i)
        if (!(c[i] == ResidueValue{})) return static_cast<int>(i);
    return -1;
}

ResidueSeries residue_reduce(const Series1& F) {
    const Ring& R = *F.ring();
    ResidueSeries r{F.ring(), F.D(), std::vector<ResidueValue>(static_cast<std::size_t>(F.D()) + 1)};
    for (int i = 0; i <= F.D(); ++i) {
        const Elem& c = F[i];
        if (c.is_zero()) {
            if (c.prec < 1)
                throw PrecisionError("residue_reduce: coefficient of T^" + std::to_string(i) + " known to precision " +
                                     std::to_string(c.prec));
            continue;
        }
        if (c.val < 0) throw MathError("residue_reduce: coefficient of T^" + std::to_string(i) + " is not integral");
        if (c.val == 0) r.c[static_cast<std::size_t>(i)] = R.raw_residue(c.unit);
    }
    return r;
}

ResidueDecomposition residue_decompose(const ResidueSeries& Fbar) {
    const Ring& R = *Fbar.ring;
    if (!(Fbar.c.at(0) == ResidueValue{})) throw UsageError("residue_decompose: constant term is nonzero");
    const int i0 = Fbar.order();
    if (i0 < 0) throw MathError("residue_decompose: series vanishes up to degree " + std::to_string(Fbar.D));
    std::int64_t pd = 1;
    int d = 0;
    while (pd < i0) {
        pd *= static_cast<std::int64_t>(R.p());
        ++d;
    }
    if (pd != i0)
        throw MathError("residue_decompose: lowest term T^" + std::to_string(i0) +
                        " is not a p-power; inconsistent with a decomposition G(T^(p^d)) with G'(0) != 0");
    ResidueDecomposition out;
    out.d = d;
    out.inner.ring = Fbar.ring;
    out.inner.D = static_cast<int>(Fbar.D / pd);
    out.inner.c.assign(static_cast<std::size_t>(out.inner.D) + 1, ResidueValue{});
    for (int i = 1; i <= Fbar.D; ++i) {
        const ResidueValue& c = Fbar.c[static_cast<std::size_t>(i)];
        if (c == ResidueValue{}) continue;
        if (i % pd != 0)
            throw MathError("residue_decompose: term T^" + std::to_string(i) + " is not a power of T^" +
                            std::to_string(pd) + "; inconsistent at this truncation");
        out.inner.c[static_cast<std::size_t>(i / pd)] = c;
    }
    return out;
}

ResidueSeries residue_expand(const ResidueSeries& Gbar, int d, int D) {
    std::int64_t pd = 1;
    for (int i = 0; i < d; ++i) pd *= static_cast<std::int64_t>(Gbar.ring->p());
    ResidueSeries r{Gbar.ring, D, std::vector<ResidueValue>(static_cast<std::size_t>(D) + 1)};
    for (int k = 0; k <= Gbar.D && k * pd <= D; ++k) r.c[static_cast<std::size_t>(k * pd)] = Gbar.c[static_cast<std::size_t>(k)];
    return r;
}

// ---------------------------------------------------------------- Series2

Series2::Series2(RingPtr ring, int D) : ring_(std::move(ring)), D_(D) {
    if (D < 0) throw UsageError("series: negative truncation degree");
    c_.assign(detail::tri_size(D), ring_->zero());
}

Series2::Series2(RingPtr ring, int D, std::vector<Elem> coeffs) : ring_(std::move(ring)), D_(D), c_(std::move(coeffs)) {
    if (D < 0) throw UsageError("series: negative truncation degree");
    c_.resize(detail::tri_size(D), ring_->zero());
    for (auto& e : c_)
        if (e.prec > ring_->N()) e = ring_->zero();
}

Series2 Series2::x(const RingPtr& ring, int D) {
    Series2 s(ring, D);
    if (D >= 1) s.set(1, 0, ring->one());
    return s;
}

Series2 Series2::y(const RingPtr& ring, int D) {
    Series2 s(ring, D);
    if (D >= 1) s.set(0, 1, ring->one());
    return s;
}

Series2 Series2::in_x(const Series1& F) {
    Series2 s(F.ring(), F.D());
    for (int i = 0; i <= F.D(); ++i) s.set(i, 0, F[i]);
    return s;
}

Series2 Series2::in_y(const Series1& F) {
    Series2 s(F.ring(), F.D());
    for (int j = 0; j <= F.D(); ++j) s.set(0, j, F[j]);
    return s;
}

Tri Series2::integral() const noexcept { return integral_of(*ring_, c_); }

int Series2::precision_floor() const noexcept { return floor_of(c_); }

Series2 Series2::truncate(int D) const {
    if (D > D_) throw UsageError("series: cannot extend truncation degree");
    return {ring_, D, {c_.begin(), c_.begin() + static_cast<std::ptrdiff_t>(detail::tri_size(D))}};
}

namespace {

std::vector<Elem> head2(const Series2& s, int D) {
    return {s.coeffs().begin(), s.coeffs().begin() + static_cast<std::ptrdiff_t>(detail::tri_size(D))};
}

}  // namespace

Series2 operator+(const Series2& a, const Series2& b) {
    require_same_ring(*a.ring(), *b.ring());
    const Ring& R = *a.ring();
    const int D = std::min(a.D(), b.D());
    std::vector<Elem> c(detail::tri_size(D));
    for (std::size_t k = 0; k < c.size(); ++k) c[k] = R.add(a.coeffs()[k], b.coeffs()[k]);
    return {a.ring(), D, std::move(c)};
}

Series2 operator-(const Series2& a, const Series2& b) {
    require_same_ring(*a.ring(), *b.ring());
    const Ring& R = *a.ring();
    const int D = std::min(a.D(), b.D());
    std::vector<Elem> c(detail::tri_size(D));
    for (std::size_t k = 0; k < c.size(); ++k) c[k] = R.sub(a.coeffs()[k], b.coeffs()[k]);
    return {a.ring(), D, std::move(c)};
}

Series2 operator*(const Series2& a, const Series2& b) {
    require_same_ring(*a.ring(), *b.ring());
    const Ring& R = *a.ring();
    const int D = std::min(a.D(), b.D());
    if (a.integral() == Tri::yes && b.integral() == Tri::yes) {
        RawOps ops{R};
        auto c = detail::mul2(ops, detail::to_raw(R, head2(a, D)), detail::to_raw(R, head2(b, D)), D);
        return {a.ring(), D, detail::from_raw(R, c)};
    }
    ElemOps ops{R};
    return {a.ring(), D, detail::mul2(ops, head2(a, D), head2(b, D), D)};
}

Series2 scale(const Series2& a, const KValue& c) {
    require_same_ring(*a.ring(), *c.ring());
    std::vector<Elem> r(a.coeffs().size());
    for (std::size_t k = 0; k < r.size(); ++k) r[k] = a.ring()->mul(a.coeffs()[k], c.elem());
    return {a.ring(), a.D(), std::move(r)};
}

SeriesDiff compare(const Series2& a, const Series2& b) {
    require_same_ring(*a.ring(), *b.ring());
    const Ring& R = *a.ring();
    SeriesDiff d;
    d.min_prec = INT_MAX;
    const int D = std::min(a.D(), b.D());
    for (int t = 0; t <= D; ++t)
        for (int j = 0; j <= t; ++j) {
            const Elem x = R.sub(a.at(t - j, j), b.at(t - j, j));
            d.min_prec = std::min(d.min_prec, x.prec);
            if (!x.is_zero() && d.equal) {
                d.equal = false;
                d.index = t;
                d.j = j;
            }
        }
    return d;
}

bool operator==(const Series2& a, const Series2& b) { return compare(a, b).equal; }

namespace {

/// Univariate power table: pw[k] = A^k for k = 0..D.
template <class Ops>
std::vector<std::vector<typename Ops::V>> power_table(const Ops& ops, const std::vector<typename Ops::V>& a,
                                                      const typename Ops::V& one, int D) {
    std::vector<std::vector<typename Ops::V>> pw(static_cast<std::size_t>(D) + 1);
    pw[0].assign(static_cast<std::size_t>(D) + 1, ops.zero());
    pw[0][0] = one;
    for (int k = 1; k <= D; ++k) pw[static_cast<std::size_t>(k)] = detail::mul1(ops, pw[static_cast<std::size_t>(k - 1)], a, D);
    return pw;
}

template <class Ops>
std::vector<typename Ops::V> subst2_kernel(const Ops& ops, const std::vector<typename Ops::V>& g,
                                           const std::vector<typename Ops::V>& a,
                                           const std::vector<typename Ops::V>& b, const typename Ops::V& one, int D) {
    using V = typename Ops::V;
    const auto pa = power_table(ops, a, one, D);
    const auto pb = power_table(ops, b, one, D);
    // h[i][bdeg] = sum_j g_ij (B^j)_bdeg
    std::vector<std::vector<V>> h(static_cast<std::size_t>(D) + 1);
    for (int i = 0; i <= D; ++i) {
        auto& hi = h[static_cast<std::size_t>(i)];
        hi.assign(static_cast<std::size_t>(D - i) + 1, ops.zero());
        for (int j = 0; i + j <= D; ++j) {
            const V& gij = g[detail::tri_index(i, j)];
            if (ops.negligible(gij)) continue;
            const auto& pbj = pb[static_cast<std::size_t>(j)];
            for (int bd = j; i + bd <= D; ++bd) ops.fma(hi[static_cast<std::size_t>(bd)], gij, pbj[static_cast<std::size_t>(bd)]);
        }
    }
    std::vector<V> r(detail::tri_size(D), ops.zero());
    for (int i = 0; i <= D; ++i) {
        const auto& pai = pa[static_cast<std::size_t>(i)];
        const auto& hi = h[static_cast<std::size_t>(i)];
        for (int ad = i; ad <= D; ++ad) {
            const V& x = pai[static_cast<std::size_t>(ad)];
            if (ops.negligible(x)) continue;
            for (int bd = 0; ad + bd <= D && i + bd <= D; ++bd)
                ops.fma(r[detail::tri_index(ad, bd)], x, hi[static_cast<std::size_t>(bd)]);
        }
    }
    return r;
}

int series2_val_floor(const std::vector<Elem>& g) {
    int v = 0;
    for (const Elem& e : g) v = std::min(v, val_bound(e));
    return v;
}

}  // namespace

Series2 subst2(const Series2& G, const Series1& A, const Series1& B) {
    require_same_ring(*G.ring(), *A.ring());
    require_same_ring(*G.ring(), *B.ring());
    const Ring& R = *G.ring();
    const int D = std::min({G.D(), A.D(), B.D()});
    const int cap = std::min(constant_cap(A[0], "subst2"), constant_cap(B[0], "subst2"));
    std::vector<Elem> a = head(A, D);
    std::vector<Elem> b = head(B, D);
    a[0] = b[0] = R.zero();
    const std::vector<Elem> g = head2(G, D);
    std::vector<Elem> out;
    if (integral_of(R, g) == Tri::yes && integral_of(R, a) == Tri::yes && integral_of(R, b) == Tri::yes) {
        RawOps ops{R};
        const RawVal one{R.raw_from_int(1), detail::kExact};
        out = detail::from_raw(R, subst2_kernel(ops, detail::to_raw(R, g), detail::to_raw(R, a), detail::to_raw(R, b), one, D));
    } else {
        ElemOps ops{R};
        a[0] = b[0] = ElemOps::exact_zero();
        out = subst2_kernel(ops, g, a, b, ops.exact_one(), D);
    }
    if (cap < R.N()) cap_all(R, out, cap + series2_val_floor(g));
    return {G.ring(), D, std::move(out)};
}

Series1 subst2_diag(const Series2& G, const Series1& A, const Series1& B) {
    const Series2 s = subst2(G, A, B);
    const Ring& R = *G.ring();
    Series1 r(G.ring(), s.D());
    for (int t = 0; t <= s.D(); ++t) {
        Elem acc = R.zero();
        for (int j = 0; j <= t; ++j) acc = R.add(acc, s.at(t - j, j));
        r.set(t, acc);
    }
    return r;
}

Series2 compose(const Series1& F, const Series2& G) {
    require_same_ring(*F.ring(), *G.ring());
    const Ring& R = *F.ring();
    const int D = std::min(F.D(), G.D());
    const int c0 = constant_cap(G.at(0, 0), "compose");
    std::vector<Elem> g = head2(G, D);
    g[0] = ElemOps::exact_zero();
    const std::vector<Elem> f = head(F, D);
    std::vector<Elem> out(detail::tri_size(D), R.zero());
    out[0] = f[0];

    // G^k vanishes below total degree k; every other entry counts, even a zero
    auto accumulate = [&](int k, const std::vector<Elem>& p) {
        const Elem& fk = f[static_cast<std::size_t>(k)];
        for (std::size_t m = detail::tri_index(k, 0); m < p.size(); ++m) out[m] = R.add(out[m], R.mul(fk, p[m]));
    };
    if (integral_of(R, g) == Tri::yes) {
        RawOps ops{R};
        const auto gr = detail::to_raw(R, g);
        std::vector<RawVal> p = gr;
        const bool raw_acc = integral_of(R, f) == Tri::yes;
        std::vector<RawVal> acc(detail::tri_size(D));
        if (raw_acc) acc[0] = detail::to_raw(R, {f[0]})[0];
        const auto fr = raw_acc ? detail::to_raw(R, f) : std::vector<RawVal>{};
        // with everything integral, powers past the last nonzero f_k add nothing
        int last = D;
        if (raw_acc)
            while (last > 0 && ops.negligible(fr[static_cast<std::size_t>(last)])) --last;
        for (int k = 1; k <= last; ++k) {
            if (k > 1) p = detail::mul2(ops, p, gr, D);
            if (detail::lowest_block(ops, p, D) > D) {
                for (int r = k; r <= D && !raw_acc; ++r) {
                    const Elem t = R.mul(f[static_cast<std::size_t>(r)], R.zero());
                    for (std::size_t m = detail::tri_index(r, 0); m < out.size(); ++m) out[m] = R.add(out[m], t);
                }
                break;
            }
            if (raw_acc) {
                const RawVal& fk = fr[static_cast<std::size_t>(k)];
                for (std::size_t m = 0; m < p.size(); ++m)
                    if (!ops.negligible(p[m])) ops.fma(acc[m], fk, p[m]);
            } else {
                accumulate(k, detail::from_raw(R, p));
            }
        }
        if (raw_acc) out = detail::from_raw(R, acc);
    } else {
        ElemOps ops{R};
        std::vector<Elem> p = g;
        for (int k = 1; k <= D; ++k) {
            if (k > 1) p = detail::mul2(ops, p, g, D);
            if (detail::lowest_block(ops, p, D) > D) break;
            accumulate(k, p);
        }
    }
    if (c0 < R.N()) {
        int vF = 0;
        for (int k = 1; k <= D; ++k) vF = std::min(vF, val_bound(f[static_cast<std::size_t>(k)]));
        cap_all(R, out, c0 + vF);
    }
    return {F.ring(), D, std::move(out)};
}

Series2 subst2(const Series2& G, const Series2& A, const Series2& B) {
    require_same_ring(*G.ring(), *A.ring());
    require_same_ring(*G.ring(), *B.ring());
    const Ring& R = *G.ring();
    const int D = std::min({G.D(), A.D(), B.D()});
    if (!A.at(0, 0).is_zero() || !B.at(0, 0).is_zero()) throw UsageError("subst2: inner series has nonzero constant term");
    const Series2 a = A.truncate(D);
    const Series2 b = B.truncate(D);
    // B^j for j = 0..D
    std::vector<Series2> pb;
    Series2 one(G.ring(), D);
    one.set(0, 0, R.one());
    pb.push_back(one);
    for (int j = 1; j <= D; ++j) pb.push_back(pb.back() * b);
    // Horner in A over C_i = sum_j g_ij B^j.
    Series2 r(G.ring(), D);
    for (int i = D; i >= 0; --i) {
        Series2 ci(G.ring(), D);
        for (int j = 0; i + j <= D; ++j) {
            const Elem& gij = G.at(i, j);
            if (gij.is_zero() && gij.prec >= R.N()) continue;
            ci = ci + scale(pb[static_cast<std::size_t>(j)], KValue(G.ring(), gij));
        }
        r = i == D ? ci : r * a + ci;
    }
    const int cap = std::min(A.at(0, 0).prec, B.at(0, 0).prec);
    if (cap < R.N()) {
        std::vector<Elem> c = r.coeffs();
        cap_all(R, c, cap + series2_val_floor(G.coeffs()));
        return {G.ring(), D, std::move(c)};
    }
    return r;
}

}  // namespace padyn
