#include "padyn/ring.hpp"

#include <algorithm>
#include <sstream>

#include "json.hpp"

namespace padyn {
namespace {

bool is_prime(std::uint64_t n) {
    if (n < 2) return false;
    for (std::uint64_t d = 2; d * d <= n; ++d)
        if (n % d == 0) return false;
    return true;
}

std::int64_t mod_p(std::int64_t a, std::int64_t p) {
    std::int64_t r = a % p;
    return r < 0 ? r + p : r;
}

std::int64_t inv_mod_p(std::int64_t a, std::int64_t p) {
    a = mod_p(a, p);
    for (std::int64_t x = 1; x < p; ++x)
        if (a * x % p == 1) return x;
    throw MathError("no inverse modulo p");
}

// Dense polynomials over F_p, little-endian, trimmed.
using PolyFp = std::vector<std::int64_t>;

void trim(PolyFp& a) {
    while (!a.empty() && a.back() == 0) a.pop_back();
}

PolyFp poly_mod(PolyFp a, const PolyFp& m, std::int64_t p) {
    trim(a);
    const std::int64_t lc_inv = inv_mod_p(m.back(), p);
    while (a.size() >= m.size()) {
        std::int64_t c = a.back() * lc_inv % p;
        std::size_t off = a.size() - m.size();
        for (std::size_t i = 0; i < m.size(); ++i) a[off + i] = mod_p(a[off + i] - c * m[i], p);
        trim(a);
    }
    return a;
}

PolyFp poly_mulmod(const PolyFp& a, const PolyFp& b, const PolyFp& m, std::int64_t p) {
    if (a.empty() || b.empty()) return {};
    PolyFp r(a.size() + b.size() - 1, 0);
    for (std::size_t i = 0; i < a.size(); ++i)
        for (std::size_t j = 0; j < b.size(); ++j) r[i + j] = (r[i + j] + a[i] * b[j]) % p;
    return poly_mod(std::move(r), m, p);
}

PolyFp poly_gcd(PolyFp a, PolyFp b, std::int64_t p) {
    trim(a);
    trim(b);
    while (!b.empty()) {
        PolyFp r = poly_mod(a, b, p);
        a = std::move(b);
        b = std::move(r);
    }
    return a;
}

// Ben-Or: u is irreducible of degree f iff gcd(x^(p^i) - x, u) = 1 for i <= f/2.
bool irreducible_mod_p(PolyFp u, std::int64_t p) {
    trim(u);
    const std::size_t f = u.size() - 1;
    if (f <= 1) return true;
    PolyFp x{0, 1};
    PolyFp xp = x;
    for (std::size_t i = 1; i <= f / 2; ++i) {
        PolyFp acc{1};
        PolyFp base = xp;
        for (std::int64_t n = p; n > 0; n >>= 1) {
            if (n & 1) acc = poly_mulmod(acc, base, u, p);
            base = poly_mulmod(base, base, u, p);
        }
        xp = acc;
        PolyFp diff = xp;
        diff.resize(std::max<std::size_t>(diff.size(), 2), 0);
        diff[1] = mod_p(diff[1] - 1, p);
        trim(diff);
        if (diff.empty()) return false;
        PolyFp g = poly_gcd(u, diff, p);
        if (g.size() > 1) return false;
    }
    return true;
}

std::string join(const std::vector<std::int64_t>& v) {
    std::ostringstream os;
    for (std::size_t i = 0; i < v.size(); ++i) os << (i ? "," : "") << v[i];
    return os.str();
}

}  // namespace

Ring::Ring(const RingDescriptor& desc_in) : desc_(desc_in) {
    p_ = desc_.p;
    if (!is_prime(p_)) throw MathError("ring: p = " + std::to_string(p_) + " is not prime");
    if (p_ > (1u << 20)) throw UsageError("ring: p too large for word arithmetic");
    const auto p = static_cast<std::int64_t>(p_);
    if (desc_.N < 1) throw UsageError("ring: precision N must be positive");

    auto unram = desc_.unram_poly;
    while (!unram.empty() && unram.back() == 0) unram.pop_back();
    if (unram.size() < 2) throw MathError("ring: unramified polynomial must have degree >= 1");
    if (mod_p(unram.back(), p) == 0)
        throw MathError("ring: unramified polynomial has non-unit leading coefficient");
    PolyFp ubar(unram.size());
    for (std::size_t i = 0; i < unram.size(); ++i) ubar[i] = mod_p(unram[i], p);
    if (!irreducible_mod_p(ubar, p)) throw MathError("ring: unramified polynomial is reducible mod p");

    if (desc_.eis_poly.empty()) desc_.eis_poly = {-p, 1};
    auto eis = desc_.eis_poly;
    while (!eis.empty() && eis.back() == 0) eis.pop_back();
    if (eis.size() < 2) throw MathError("ring: Eisenstein polynomial must have degree >= 1");
    if (mod_p(eis.back(), p) == 0) throw MathError("ring: not Eisenstein: leading coefficient is not a unit");
    for (std::size_t i = 0; i + 1 < eis.size(); ++i)
        if (mod_p(eis[i], p) != 0)
            throw MathError("ring: not Eisenstein: coefficient of x^" + std::to_string(i) + " is a unit");
    if (mod_p(eis[0] / p, p) == 0) throw MathError("ring: not Eisenstein: constant term has valuation >= 2");

    f_ = static_cast<int>(unram.size()) - 1;
    e_ = static_cast<int>(eis.size()) - 1;
    dim_ = e_ * f_;
    if (dim_ > kMaxDim)
        throw UsageError("ring: e*f = " + std::to_string(dim_) + " exceeds supported " + std::to_string(kMaxDim));
    N_ = desc_.N;
    M_ = (N_ + e_ - 1) / e_ + 1;

    q_ = 1;
    for (int i = 0; i < f_; ++i) q_ *= p_;
    pow_p_.assign(static_cast<std::size_t>(M_) + 1, 1);
    for (int i = 1; i <= M_; ++i) {
        if (pow_p_[i - 1] > (std::uint64_t{1} << 62) / p_)
            throw UsageError("ring: p^M exceeds 2^62; lower the precision N");
        pow_p_[i] = pow_p_[i - 1] * p_;
    }
    m_ = pow_p_[static_cast<std::size_t>(M_)];
    pow2_ = p_ == 2;
    k_ = std::bit_width(m_);
    mu_ = static_cast<std::uint64_t>((static_cast<unsigned __int128>(1) << (2 * k_)) / m_);

    // Inverse of an integer unit modulo p^M by Newton lifting.
    auto inv_word = [&](std::int64_t a) {
        std::uint64_t aw = from_int_w(a);
        std::uint64_t x = from_int_w(inv_mod_p(a, p));
        for (int i = 0; i < 8; ++i) x = mul_w(x, sub_w(2, mul_w(aw, x)));
        return x;
    };

    const std::uint64_t ulc = inv_word(unram.back());
    unram_.resize(static_cast<std::size_t>(f_));
    unram_res_.resize(static_cast<std::size_t>(f_));
    const std::int64_t ulc_p = inv_mod_p(unram.back(), p);
    for (int i = 0; i < f_; ++i) {
        unram_[i] = mul_w(from_int_w(unram[i]), ulc);
        unram_res_[i] = static_cast<std::uint32_t>(mod_p(mod_p(unram[i], p) * ulc_p, p));
    }

    const std::uint64_t elc = inv_word(eis.back());
    eis_.resize(static_cast<std::size_t>(e_));
    Coords w{};
    for (int i = 0; i < e_; ++i) {
        eis_[i] = mul_w(from_int_w(eis[i]), elc);
        // pi^e = p * w with w = -sum (c_i / p) pi^i / lc
        w[static_cast<std::size_t>(i * f_)] = sub_w(0, mul_w(from_int_w(eis[i] / p), elc));
    }

    Coords pi{};
    if (e_ == 1)
        pi[0] = sub_w(0, eis_[0]);
    else
        pi[static_cast<std::size_t>(f_)] = 1;
    const int top = e_ * M_;
    pi_pow_.resize(static_cast<std::size_t>(top) + 1);
    pi_pow_[0] = raw_from_int(1);
    for (int k = 1; k <= top; ++k) pi_pow_[k] = raw_mul(pi_pow_[k - 1], pi);

    Coords winv = raw_inv_unit(w);
    w_inv_pow_.resize(static_cast<std::size_t>(M_) + 1);
    w_inv_pow_[0] = raw_from_int(1);
    for (int k = 1; k <= M_; ++k) w_inv_pow_[k] = raw_mul(w_inv_pow_[k - 1], winv);
}

std::string Ring::tag() const {
    std::ostringstream os;
    os << "p" << p_ << ":u[" << join(desc_.unram_poly) << "]:e[" << join(desc_.eis_poly) << "]:N" << N_;
    return os.str();
}

std::uint64_t Ring::from_int_w(std::int64_t n) const noexcept {
    if (n >= 0) return static_cast<std::uint64_t>(n) % m_;
    auto r = static_cast<std::uint64_t>(-(n + 1)) % m_;
    return m_ - 1 - r;
}

Coords Ring::raw_mul_general(const Coords& a, const Coords& b) const noexcept {
    const int f = f_;
    const int e = e_;
    std::uint64_t t[2 * kMaxDim][2 * kMaxDim];
    for (int j = 0; j < 2 * e - 1; ++j)
        for (int i = 0; i < 2 * f - 1; ++i) t[j][i] = 0;
    for (int ja = 0; ja < e; ++ja)
        for (int ia = 0; ia < f; ++ia) {
            const std::uint64_t av = a[static_cast<std::size_t>(ja * f + ia)];
            if (av == 0) continue;
            for (int jb = 0; jb < e; ++jb)
                for (int ib = 0; ib < f; ++ib) {
                    const std::uint64_t bv = b[static_cast<std::size_t>(jb * f + ib)];
                    if (bv == 0) continue;
                    t[ja + jb][ia + ib] = add_w(t[ja + jb][ia + ib], mul_w(av, bv));
                }
        }
    for (int j = 0; j <= 2 * e - 2; ++j)
        for (int k = 2 * f - 2; k >= f; --k) {
            const std::uint64_t c = t[j][k];
            if (c == 0) continue;
            for (int i = 0; i < f; ++i) t[j][k - f + i] = sub_w(t[j][k - f + i], mul_w(c, unram_[i]));
            t[j][k] = 0;
        }
    for (int k = 2 * e - 2; k >= e; --k)
        for (int i = 0; i < f; ++i) {
            const std::uint64_t c = t[k][i];
            if (c == 0) continue;
            for (int l = 0; l < e; ++l) t[k - e + l][i] = sub_w(t[k - e + l][i], mul_w(c, eis_[l]));
            t[k][i] = 0;
        }
    Coords r{};
    for (int j = 0; j < e; ++j)
        for (int i = 0; i < f; ++i) r[static_cast<std::size_t>(j * f + i)] = t[j][i];
    return r;
}

Coords Ring::raw_pow(Coords base, std::uint64_t n) const noexcept {
    Coords acc = raw_from_int(1);
    while (n > 0) {
        if (n & 1) acc = raw_mul(acc, base);
        n >>= 1;
        if (n) base = raw_mul(base, base);
    }
    return acc;
}

int Ring::raw_val(const Coords& a, int cap) const noexcept {
    int v = cap;
    for (int j = 0; j < e_; ++j) {
        int vp = M_;
        for (int i = 0; i < f_; ++i) {
            const std::uint64_t c = a[static_cast<std::size_t>(j * f_ + i)];
            if (c != 0) vp = std::min(vp, vp_w(c));
        }
        if (vp == M_) continue;
        v = std::min(v, e_ * vp + j);
        if (v <= j) break;
    }
    return v;
}

Coords Ring::raw_div_pi_pow(const Coords& a, int v) const noexcept {
    if (v <= 0) return a;
    const int s = (e_ - v % e_) % e_;
    const int ap = (v + s) / e_;
    Coords y = s == 0 ? a : raw_mul(a, pi_pow_[static_cast<std::size_t>(s)]);
    const std::uint64_t d = pow_p_[static_cast<std::size_t>(std::min(ap, M_))];
    for (int i = 0; i < dim_; ++i) y[i] /= d;
    return raw_mul(y, w_inv_pow_[static_cast<std::size_t>(std::min(ap, M_))]);
}

Coords Ring::raw_canonical(Coords a, int r) const noexcept {
    for (int j = 0; j < e_; ++j) {
        const int kj = r - j <= 0 ? 0 : (r - j + e_ - 1) / e_;
        if (kj >= M_) continue;
        const std::uint64_t mod = pow_p_[static_cast<std::size_t>(kj)];
        for (int i = 0; i < f_; ++i) {
            auto& c = a[static_cast<std::size_t>(j * f_ + i)];
            c = pow2_ ? (c & (mod - 1)) : c % mod;
        }
    }
    return a;
}

Coords Ring::raw_inv_unit(const Coords& a) const {
    const ResidueValue r = raw_residue(a);
    if (r_is_zero(r)) throw MathError("not a unit");
    Coords y = raw_lift(r_inv(r));
    const Coords two = raw_from_int(2);
    const int steps = std::bit_width(static_cast<unsigned>(e_ * M_)) + 1;
    for (int i = 0; i < steps; ++i) y = raw_mul(y, raw_sub(two, raw_mul(a, y)));
    return y;
}

Coords Ring::raw_teichmuller(const ResidueValue& c) const {
    Coords x = raw_lift(c);
    for (int it = 0; it <= M_ + 2; ++it) {
        Coords nx = raw_pow(x, q_);
        if (nx == x) break;
        x = nx;
    }
    return x;
}

ResidueValue Ring::raw_residue(const Coords& a) const noexcept {
    ResidueValue r{};
    for (int i = 0; i < f_; ++i) r.c[i] = static_cast<std::uint32_t>(a[i] % p_);
    return r;
}

Coords Ring::raw_lift(const ResidueValue& c) const noexcept {
    Coords r{};
    for (int i = 0; i < f_; ++i) r[i] = c.c[i];
    return r;
}

ResidueValue Ring::r_add(const ResidueValue& a, const ResidueValue& b) const noexcept {
    ResidueValue r{};
    for (int i = 0; i < f_; ++i) r.c[i] = static_cast<std::uint32_t>((a.c[i] + b.c[i]) % p_);
    return r;
}

ResidueValue Ring::r_sub(const ResidueValue& a, const ResidueValue& b) const noexcept {
    ResidueValue r{};
    for (int i = 0; i < f_; ++i) r.c[i] = static_cast<std::uint32_t>((a.c[i] + p_ - b.c[i]) % p_);
    return r;
}

ResidueValue Ring::r_mul(const ResidueValue& a, const ResidueValue& b) const noexcept {
    std::uint64_t t[2 * kMaxDim] = {};
    for (int i = 0; i < f_; ++i)
        for (int j = 0; j < f_; ++j) t[i + j] = (t[i + j] + std::uint64_t{a.c[i]} * b.c[j]) % p_;
    for (int k = 2 * f_ - 2; k >= f_; --k) {
        const std::uint64_t c = t[k];
        if (c == 0) continue;
        for (int i = 0; i < f_; ++i) t[k - f_ + i] = (t[k - f_ + i] + (p_ - c) * unram_res_[i]) % p_;
        t[k] = 0;
    }
    ResidueValue r{};
    for (int i = 0; i < f_; ++i) r.c[i] = static_cast<std::uint32_t>(t[i]);
    return r;
}

ResidueValue Ring::r_pow(ResidueValue a, std::uint64_t n) const noexcept {
    ResidueValue acc = r_one();
    while (n > 0) {
        if (n & 1) acc = r_mul(acc, a);
        n >>= 1;
        if (n) a = r_mul(a, a);
    }
    return acc;
}

ResidueValue Ring::r_inv(const ResidueValue& a) const {
    if (r_is_zero(a)) throw MathError("residue: zero is not invertible");
    return r_pow(a, q_ - 2);
}

ResidueValue Ring::r_element(std::uint64_t index) const noexcept {
    ResidueValue r{};
    for (int i = 0; i < f_; ++i) {
        r.c[i] = static_cast<std::uint32_t>(index % p_);
        index /= p_;
    }
    return r;
}

std::uint64_t Ring::r_index(const ResidueValue& a) const noexcept {
    std::uint64_t idx = 0;
    for (int i = f_ - 1; i >= 0; --i) idx = idx * p_ + a.c[i];
    return idx;
}

RingPtr make_ring(const RingDescriptor& desc) { return std::make_shared<const Ring>(desc); }

RingPtr make_ring(std::uint64_t p, std::vector<std::int64_t> unram_poly, std::vector<std::int64_t> eis_poly, int N) {
    RingDescriptor d;
    d.p = p;
    d.unram_poly = std::move(unram_poly);
    d.eis_poly = std::move(eis_poly);
    d.N = N;
    return make_ring(d);
}

RingPtr make_zp(std::uint64_t p, int N) { return make_ring(p, {0, 1}, {}, N); }

RingPtr with_precision(const Ring& ring, int N) {
    RingDescriptor d = ring.descriptor();
    d.N = N;
    return make_ring(d);
}

std::string format_descriptor(const RingDescriptor& desc) {
    nlohmann::ordered_json j;
    j["p"] = desc.p;
    j["unram_poly"] = desc.unram_poly;
    j["eis_poly"] = desc.eis_poly;
    j["N"] = desc.N;
    return j.dump();
}

RingDescriptor parse_descriptor(const std::string& text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& ex) {
        throw UsageError(std::string("ring descriptor: ") + ex.what());
    }
    if (!j.is_object() || !j.contains("p")) throw UsageError("ring descriptor: expected an object with key \"p\"");
    RingDescriptor d;
    try {
        d.p = j.at("p").get<std::uint64_t>();
        if (j.contains("unram_poly")) d.unram_poly = j.at("unram_poly").get<std::vector<std::int64_t>>();
        if (j.contains("eis_poly")) d.eis_poly = j.at("eis_poly").get<std::vector<std::int64_t>>();
        if (j.contains("N")) d.N = j.at("N").get<int>();
    } catch (const nlohmann::json::exception& ex) {
        throw UsageError(std::string("ring descriptor: ") + ex.what());
    }
    return d;
}

void require_same_ring(const Ring& a, const Ring& b) {
    if (&a != &b && !(a == b)) throw UsageError("ring mismatch: " + a.tag() + " vs " + b.tag());
}

}  // namespace padyn
