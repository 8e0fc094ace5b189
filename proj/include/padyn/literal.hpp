#pragma once

// Text forms.
//
// Element:  [-]body[*pi^k][+O(pi^P)]
//   body is a base-p digit string (most significant first, digits 0-9a-z),
//   a decimal integer prefixed by '#', a coordinate tuple (c0,c1,...) on the
//   basis x^i pi^j (index j*f+i), or "pi" / "pi^k".
// Series:   deg D; ring-tag; i:elem, i:elem, ...      (omitted indices are 0)
// Series2:  deg D; ring-tag; i.j:elem, ...
// ring-tag is Ring::tag() (e.g. p3:u[0,1]:e[-3,1]:N12) or '*' for "the given ring".

#include <string>
#include <string_view>

#include "padyn/series.hpp"

namespace padyn {

Elem parse_elem(const Ring& R, std::string_view text);
std::string format_elem(const Ring& R, const Elem& x);

KValue parse_value(const RingPtr& ring, std::string_view text);
std::string format_value(const KValue& x);

std::string format_residue(const Ring& R, const ResidueValue& c);
std::string format_residue_series(const ResidueSeries& s);

RingDescriptor parse_ring_tag(std::string_view tag);

Series1 parse_series(const RingPtr& ring, std::string_view text);
std::string format_series(const Series1& s);

Series2 parse_series2(const RingPtr& ring, std::string_view text);
std::string format_series(const Series2& s);

/// Ring named by the tag of a series literal.
RingPtr ring_of_literal(std::string_view text);

}  // namespace padyn
