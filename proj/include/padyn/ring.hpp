#pragma once

// Finite extensions K of Q_p presented as a two-stage tower: an unramified
// layer Z_p[x]/(u(x)) of degree f, then an Eisenstein layer of degree e over it.
// Elements of O_K are coordinate vectors on the basis x^i * pi^j (index j*f+i)
// with entries modulo p^M.

#include <array>
#include <bit>
#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "padyn/error.hpp"

namespace padyn {

inline constexpr int kMaxDim = 8;

using Coords = std::array<std::uint64_t, kMaxDim>;

struct RingDescriptor {
    std::uint64_t p = 2;
    std::vector<std::int64_t> unram_poly{0, 1};  // little-endian; x means f = 1
    std::vector<std::int64_t> eis_poly;          // little-endian; empty means x - p
    int N = 24;

    bool operator==(const RingDescriptor&) const = default;
};

/// Element of the residue field F_q as f residues mod p.
struct ResidueValue {
    std::array<std::uint32_t, kMaxDim> c{};
    bool operator==(const ResidueValue&) const = default;
};

/// An element of K: pi^val * unit with absolute precision prec.
/// When val >= prec the value is indistinguishable from zero and unit is 0.
struct Elem {
    int val = 0;
    int prec = 0;
    Coords unit{};

    [[nodiscard]] bool is_zero() const noexcept { return val >= prec; }
};

class Ring;
using RingPtr = std::shared_ptr<const Ring>;

/// Validated ring handle. Immutable after construction; safe to share between threads.
class Ring {
public:
    explicit Ring(const RingDescriptor& desc);

    [[nodiscard]] const RingDescriptor& descriptor() const noexcept { return desc_; }
    [[nodiscard]] std::uint64_t p() const noexcept { return p_; }
    [[nodiscard]] int f() const noexcept { return f_; }
    [[nodiscard]] int e() const noexcept { return e_; }
    [[nodiscard]] int N() const noexcept { return N_; }
    [[nodiscard]] int dim() const noexcept { return dim_; }
    [[nodiscard]] std::uint64_t q() const noexcept { return q_; }
    [[nodiscard]] int storage_digits() const noexcept { return M_; }
    [[nodiscard]] std::uint64_t modulus() const noexcept { return m_; }
    /// Short identifier used as ring-ref in series literals, e.g. "p3.f2.e1.N12".
    [[nodiscard]] std::string tag() const;

    bool operator==(const Ring& other) const noexcept { return desc_ == other.desc_; }

    // ---- word arithmetic modulo p^M ----
    [[nodiscard]] std::uint64_t add_w(std::uint64_t a, std::uint64_t b) const noexcept {
        std::uint64_t s = a + b;
        return s >= m_ ? s - m_ : s;
    }
    [[nodiscard]] std::uint64_t sub_w(std::uint64_t a, std::uint64_t b) const noexcept {
        return a >= b ? a - b : a + (m_ - b);
    }
    [[nodiscard]] std::uint64_t mul_w(std::uint64_t a, std::uint64_t b) const noexcept {
        unsigned __int128 x = static_cast<unsigned __int128>(a) * b;
        if (pow2_) return static_cast<std::uint64_t>(x) & (m_ - 1);
        auto q1 = static_cast<std::uint64_t>(x >> (k_ - 1));
        auto q3 = static_cast<std::uint64_t>((static_cast<unsigned __int128>(q1) * mu_) >> (k_ + 1));
        std::uint64_t r = static_cast<std::uint64_t>(x) - q3 * m_;
        while (r >= m_) r -= m_;
        return r;
    }
    [[nodiscard]] std::uint64_t from_int_w(std::int64_t n) const noexcept;
    /// p-adic valuation of a word (storage_digits() for 0).
    [[nodiscard]] int vp_w(std::uint64_t c) const noexcept {
        if (c == 0) return M_;
        if (pow2_) return std::countr_zero(c);
        int v = 0;
        while (c % p_ == 0) {
            c /= p_;
            ++v;
        }
        return v;
    }

    // ---- raw integral arithmetic (exact in O_K / p^M) ----
    [[nodiscard]] Coords raw_zero() const noexcept { return Coords{}; }
    [[nodiscard]] Coords raw_from_int(std::int64_t n) const noexcept {
        Coords r{};
        r[0] = from_int_w(n);
        return r;
    }
    [[nodiscard]] Coords raw_add(const Coords& a, const Coords& b) const noexcept {
        Coords r{};
        for (int i = 0; i < dim_; ++i) r[i] = add_w(a[i], b[i]);
        return r;
    }
    [[nodiscard]] Coords raw_sub(const Coords& a, const Coords& b) const noexcept {
        Coords r{};
        for (int i = 0; i < dim_; ++i) r[i] = sub_w(a[i], b[i]);
        return r;
    }
    [[nodiscard]] Coords raw_neg(const Coords& a) const noexcept {
        Coords r{};
        for (int i = 0; i < dim_; ++i) r[i] = a[i] == 0 ? 0 : m_ - a[i];
        return r;
    }
    [[nodiscard]] Coords raw_scale(const Coords& a, std::uint64_t s) const noexcept {
        Coords r{};
        for (int i = 0; i < dim_; ++i) r[i] = mul_w(a[i], s);
        return r;
    }
    [[nodiscard]] Coords raw_mul(const Coords& a, const Coords& b) const noexcept {
        if (dim_ == 1) {
            Coords r{};
            r[0] = mul_w(a[0], b[0]);
            return r;
        }
        if (dim_ == 2) {
            Coords r{};
            raw_fma2(r, a, b);
            return r;
        }
        return raw_mul_general(a, b);
    }
    /// a += b * c
    void raw_fma(Coords& a, const Coords& b, const Coords& c) const noexcept {
        if (dim_ == 1) {
            a[0] = add_w(a[0], mul_w(b[0], c[0]));
            return;
        }
        if (dim_ == 2) {
            raw_fma2(a, b, c);
            return;
        }
        a = raw_add(a, raw_mul_general(b, c));
    }
    [[nodiscard]] bool raw_is_zero(const Coords& a) const noexcept {
        for (int i = 0; i < dim_; ++i)
            if (a[i] != 0) return false;
        return true;
    }
    [[nodiscard]] Coords raw_pow(Coords base, std::uint64_t n) const noexcept;
    /// min(val(a), cap) for a raw element.
    [[nodiscard]] int raw_val(const Coords& a, int cap) const noexcept;
    /// a / pi^v; requires val(a) >= v.
    [[nodiscard]] Coords raw_div_pi_pow(const Coords& a, int v) const noexcept;
    /// Reduce to the canonical representative modulo pi^r.
    [[nodiscard]] Coords raw_canonical(Coords a, int r) const noexcept;
    /// pi^k for 0 <= k <= e*M.
    [[nodiscard]] const Coords& raw_pi_pow(int k) const noexcept { return pi_pow_[static_cast<std::size_t>(k)]; }
    /// Inverse of a raw unit (caller guarantees val(a) == 0).
    [[nodiscard]] Coords raw_inv_unit(const Coords& a) const;
    [[nodiscard]] Coords raw_teichmuller(const ResidueValue& c) const;
    [[nodiscard]] ResidueValue raw_residue(const Coords& a) const noexcept;
    [[nodiscard]] Coords raw_lift(const ResidueValue& c) const noexcept;

    // ---- precision-tracked arithmetic on elements of K ----
    [[nodiscard]] Elem zero(int prec) const noexcept;
    [[nodiscard]] Elem zero() const noexcept { return zero(N_); }
    [[nodiscard]] Elem one() const noexcept { return from_int(1); }
    [[nodiscard]] Elem from_int(std::int64_t n) const noexcept;
    [[nodiscard]] Elem uniformizer() const noexcept;
    /// Element pi^shift * raw where raw is known modulo pi^rel.
    [[nodiscard]] Elem normalize(const Coords& raw, int shift, int rel) const noexcept;
    /// Integral element from raw coordinates known modulo pi^prec.
    [[nodiscard]] Elem from_raw(const Coords& raw, int prec) const noexcept { return normalize(raw, 0, prec); }
    /// Raw coordinates of an integral element (pi^val * unit).
    [[nodiscard]] Coords to_raw(const Elem& x) const;

    [[nodiscard]] Elem add(const Elem& a, const Elem& b) const noexcept;
    [[nodiscard]] Elem sub(const Elem& a, const Elem& b) const noexcept;
    [[nodiscard]] Elem neg(const Elem& a) const noexcept;
    [[nodiscard]] Elem mul(const Elem& a, const Elem& b) const noexcept;
    [[nodiscard]] Elem mul_int(const Elem& a, std::int64_t n) const noexcept { return mul(a, from_int(n)); }
    /// Multiplication by pi^k (k may be negative; exact in K).
    [[nodiscard]] Elem shift(const Elem& a, int k) const noexcept;
    /// Inverse in K; throws PrecisionError when a is indistinguishable from 0.
    [[nodiscard]] Elem inv(const Elem& a) const;
    [[nodiscard]] Elem div(const Elem& a, const Elem& b) const { return mul(a, inv(b)); }
    [[nodiscard]] Elem pow(const Elem& a, std::uint64_t n) const noexcept;
    /// Replace the precision; lowering truncates, raising treats the stored digits as exact.
    [[nodiscard]] Elem with_prec(const Elem& a, int prec) const noexcept;
    /// Precision-aware equality: agreement modulo pi^min(prec).
    [[nodiscard]] bool equal(const Elem& a, const Elem& b) const noexcept { return sub(a, b).is_zero(); }
    [[nodiscard]] bool is_integral(const Elem& a) const noexcept { return a.is_zero() ? a.prec >= 0 : a.val >= 0; }

    // ---- residue field F_q ----
    [[nodiscard]] ResidueValue r_zero() const noexcept { return {}; }
    [[nodiscard]] ResidueValue r_one() const noexcept {
        ResidueValue r{};
        r.c[0] = 1;
        return r;
    }
    [[nodiscard]] ResidueValue r_add(const ResidueValue& a, const ResidueValue& b) const noexcept;
    [[nodiscard]] ResidueValue r_sub(const ResidueValue& a, const ResidueValue& b) const noexcept;
    [[nodiscard]] ResidueValue r_mul(const ResidueValue& a, const ResidueValue& b) const noexcept;
    [[nodiscard]] ResidueValue r_pow(ResidueValue a, std::uint64_t n) const noexcept;
    [[nodiscard]] ResidueValue r_inv(const ResidueValue& a) const;
    [[nodiscard]] bool r_is_zero(const ResidueValue& a) const noexcept { return a == ResidueValue{}; }
    /// The i-th element of F_q in base-p coordinate order (0 <= i < q).
    [[nodiscard]] ResidueValue r_element(std::uint64_t index) const noexcept;
    [[nodiscard]] std::uint64_t r_index(const ResidueValue& a) const noexcept;

private:
    [[nodiscard]] Coords raw_mul_general(const Coords& a, const Coords& b) const noexcept;
    // degree-two extension, x^2 = -c0 - c1 x with c the unramified or Eisenstein polynomial
    void raw_fma2(Coords& r, const Coords& a, const Coords& b) const noexcept {
        const std::uint64_t* c = f_ == 2 ? unram_.data() : eis_.data();
        const std::uint64_t hi = mul_w(a[1], b[1]);
        r[0] = sub_w(add_w(r[0], mul_w(a[0], b[0])), mul_w(hi, c[0]));
        r[1] = sub_w(add_w(r[1], add_w(mul_w(a[0], b[1]), mul_w(a[1], b[0]))), mul_w(hi, c[1]));
    }

    RingDescriptor desc_;
    std::uint64_t p_ = 2;
    int f_ = 1;
    int e_ = 1;
    int N_ = 1;
    int M_ = 1;
    int dim_ = 1;
    std::uint64_t q_ = 2;
    std::uint64_t m_ = 2;
    bool pow2_ = false;
    int k_ = 0;
    std::uint64_t mu_ = 0;
    std::vector<std::uint64_t> pow_p_;       // p^0 .. p^M
    std::vector<std::uint64_t> unram_;       // monic u(x) low coefficients mod p^M (size f)
    std::vector<std::uint32_t> unram_res_;   // same mod p
    std::vector<std::uint64_t> eis_;         // monic Eisenstein low coefficients mod p^M (size e)
    std::vector<Coords> pi_pow_;             // pi^0 .. pi^(e*M)
    std::vector<Coords> w_inv_pow_;          // (pi^e / p)^(-k), k = 0 .. M
};

/// Validating factory; errors name the failed check.
RingPtr make_ring(const RingDescriptor& desc);
RingPtr make_ring(std::uint64_t p, std::vector<std::int64_t> unram_poly, std::vector<std::int64_t> eis_poly, int N);

/// Z_p at precision N.
RingPtr make_zp(std::uint64_t p, int N);

/// Same presentation at a different precision.
RingPtr with_precision(const Ring& ring, int N);

/// Ring descriptor record, e.g. {"p":3,"unram_poly":[1,0,1],"eis_poly":[-3,1],"N":12}.
std::string format_descriptor(const RingDescriptor& desc);
RingDescriptor parse_descriptor(const std::string& text);

void require_same_ring(const Ring& a, const Ring& b);

}  // namespace padyn
