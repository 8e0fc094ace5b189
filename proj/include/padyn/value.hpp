#pragma once

#include <cstdint>
#include <string>

#include "padyn/ring.hpp"

namespace padyn {

/// Result of a valuation query: either a finite value below the precision,
/// or the sentinel "at least `value`" when the element is indistinguishable from 0.
struct Valuation {
    bool finite = false;
    int value = 0;

    bool operator==(const Valuation&) const = default;
    [[nodiscard]] std::string to_string() const {
        return finite ? std::to_string(value) : ">=" + std::to_string(value);
    }
};

/// Element of K with a tracked absolute precision.
class KValue {
public:
    KValue() = default;
    KValue(RingPtr ring, Elem e) : ring_(std::move(ring)), e_(e) {}

    static KValue from_int(const RingPtr& ring, std::int64_t n) { return {ring, ring->from_int(n)}; }
    static KValue uniformizer(const RingPtr& ring) { return {ring, ring->uniformizer()}; }

    [[nodiscard]] const RingPtr& ring() const noexcept { return ring_; }
    [[nodiscard]] const Elem& elem() const noexcept { return e_; }
    [[nodiscard]] int prec() const noexcept { return e_.prec; }
    [[nodiscard]] bool is_zero() const noexcept { return e_.is_zero(); }
    [[nodiscard]] bool is_integral() const noexcept { return ring_->is_integral(e_); }
    [[nodiscard]] Valuation valuation() const noexcept {
        return e_.is_zero() ? Valuation{false, e_.prec} : Valuation{true, e_.val};
    }

    friend KValue operator+(const KValue& a, const KValue& b) { return {a.ring_, a.checked(b).add(a.e_, b.e_)}; }
    friend KValue operator-(const KValue& a, const KValue& b) { return {a.ring_, a.checked(b).sub(a.e_, b.e_)}; }
    friend KValue operator*(const KValue& a, const KValue& b) { return {a.ring_, a.checked(b).mul(a.e_, b.e_)}; }
    friend KValue operator/(const KValue& a, const KValue& b) { return {a.ring_, a.checked(b).div(a.e_, b.e_)}; }
    KValue operator-() const { return {ring_, ring_->neg(e_)}; }
    /// Precision-aware equality (agreement modulo pi^min(prec)).
    friend bool operator==(const KValue& a, const KValue& b) { return a.checked(b).equal(a.e_, b.e_); }

private:
    const Ring& checked(const KValue& other) const {
        require_same_ring(*ring_, *other.ring_);
        return *ring_;
    }

    RingPtr ring_;
    Elem e_;
};

/// Element of O_K; construction from a non-integral value throws.
class OKValue {
public:
    OKValue() = default;
    OKValue(RingPtr ring, Elem e);
    explicit OKValue(const KValue& k) : OKValue(k.ring(), k.elem()) {}

    static OKValue from_int(const RingPtr& ring, std::int64_t n) { return {ring, ring->from_int(n)}; }
    static OKValue uniformizer(const RingPtr& ring) { return {ring, ring->uniformizer()}; }
    static OKValue from_raw(const RingPtr& ring, const Coords& raw) { return {ring, ring->from_raw(raw, ring->N())}; }

    [[nodiscard]] const RingPtr& ring() const noexcept { return k_.ring(); }
    [[nodiscard]] const Elem& elem() const noexcept { return k_.elem(); }
    [[nodiscard]] int prec() const noexcept { return k_.prec(); }
    [[nodiscard]] bool is_zero() const noexcept { return k_.is_zero(); }
    [[nodiscard]] Valuation valuation() const noexcept { return k_.valuation(); }
    [[nodiscard]] const KValue& as_k() const noexcept { return k_; }
    operator const KValue&() const noexcept { return k_; }  // NOLINT: O_K embeds in K

    friend OKValue operator+(const OKValue& a, const OKValue& b) { return OKValue(a.k_ + b.k_); }
    friend OKValue operator-(const OKValue& a, const OKValue& b) { return OKValue(a.k_ - b.k_); }
    friend OKValue operator*(const OKValue& a, const OKValue& b) { return OKValue(a.k_ * b.k_); }
    OKValue operator-() const { return OKValue(-k_); }
    friend bool operator==(const OKValue& a, const OKValue& b) { return a.k_ == b.k_; }

private:
    KValue k_;
};

Valuation val(const KValue& x);

/// Inverse of a unit of O_K; throws MathError("not a unit") otherwise.
OKValue inv_unit(const OKValue& x);

/// Teichmuller lift: the unique root of X^q = X reducing to c.
OKValue teich(const RingPtr& ring, const ResidueValue& c);

/// Reduction modulo pi.
ResidueValue residue(const OKValue& x);

/// Decides a == b modulo pi^digits; throws PrecisionError when the stored precision cannot decide.
bool congruent(const KValue& a, const KValue& b, int digits);

/// The largest n with x in 1 + pi^n O_K. Throws when x is not a unit or x == 1 at precision.
int unit_level(const OKValue& x);

}  // namespace padyn
