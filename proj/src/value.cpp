#include "padyn/value.hpp"

#include <algorithm>

namespace padyn {

OKValue::OKValue(RingPtr ring, Elem e) : k_(std::move(ring), e) {
    if (!k_.is_integral()) {
        if (e.is_zero()) throw PrecisionError("value not known to be integral at its precision");
        throw MathError("value is not integral (valuation " + std::to_string(e.val) + ")");
    }
}

Valuation val(const KValue& x) { return x.valuation(); }

OKValue inv_unit(const OKValue& x) {
    const Ring& R = *x.ring();
    const Elem& e = x.elem();
    if (e.is_zero() && e.prec <= 0) throw PrecisionError("inv_unit: precision too low to decide unit status");
    if (e.is_zero() || e.val != 0) throw MathError("not a unit");
    return {x.ring(), R.inv(e)};
}

OKValue teich(const RingPtr& ring, const ResidueValue& c) {
    return OKValue::from_raw(ring, ring->raw_teichmuller(c));
}

ResidueValue residue(const OKValue& x) {
    const Elem& e = x.elem();
    if (e.prec < 1) throw PrecisionError("residue: precision below one digit");
    if (e.is_zero() || e.val > 0) return {};
    return x.ring()->raw_residue(e.unit);
}

bool congruent(const KValue& a, const KValue& b, int digits) {
    const KValue d = a - b;
    if (!d.is_zero()) return d.elem().val >= digits;
    if (d.prec() >= digits) return true;
    throw PrecisionError("cannot decide congruence modulo pi^" + std::to_string(digits) + " at precision " +
                         std::to_string(d.prec()));
}

int unit_level(const OKValue& x) {
    const Elem& e = x.elem();
    if (e.is_zero() || e.val != 0) throw MathError("unit_level: not a unit");
    const KValue d = x.as_k() - KValue::from_int(x.ring(), 1);
    if (d.is_zero()) throw PrecisionError("unit_level: indistinguishable from 1 at precision " + std::to_string(d.prec()));
    return d.elem().val;
}

}  // namespace padyn
