#pragma once

// Lubin-Tate formal groups: group laws and endomorphisms by successive
// approximation, formal logarithm and exponential, and group recovery from a
// logarithm.

#include <memory>
#include <string>

#include "padyn/series.hpp"

namespace padyn {

struct LTCheck {
    bool ok = false;
    int index = -1;       // first offending coefficient, -1 if none
    std::string reason;   // empty when ok
};

/// f = u*T + ... with val(u) = 1 and f = T^q mod pi, up to degree D.
LTCheck is_lt_series(const Series1& f);

struct EndoCheck;
struct GroupAxioms;
class GroupLaw;
EndoCheck endo_check(const Series1& F, const GroupLaw& G);
GroupAxioms check_group_axioms(const GroupLaw& G);

struct GroupFromLog;

struct LogSeries {
    Series1 L;
    int divisions = 0;  // pi-adic valuation divided out while building L (bounds its denominators)
};

GroupFromLog group_from_log(const LogSeries& log);

/// Formal group law with a lazily computed logarithm.
class GroupLaw {
public:
    GroupLaw() = default;
    explicit GroupLaw(Series2 G);
    /// Group law whose logarithm is already known.
    GroupLaw(Series2 G, LogSeries L);

    [[nodiscard]] const Series2& series() const noexcept { return G_; }
    [[nodiscard]] const RingPtr& ring() const noexcept { return G_.ring(); }
    [[nodiscard]] int D() const noexcept { return G_.D(); }
    /// Formal logarithm, computed on first request.
    [[nodiscard]] const LogSeries& log() const;

    struct Cache;  // opaque, defined with the algorithms

private:
    GroupLaw(Series2 G, std::shared_ptr<Cache> cache);
    GroupLaw(Series2 G, LogSeries L, std::shared_ptr<Cache> cache);
    friend EndoCheck endo_check(const Series1& F, const GroupLaw& G);
    friend GroupAxioms check_group_axioms(const GroupLaw& G);
    friend GroupFromLog group_from_log(const LogSeries& log);
    friend GroupLaw lt_group_law(const Series1& f);
    Series2 G_;
    std::shared_ptr<Cache> cache_;
};

/// The unique G = X + Y + ... with f(G(X,Y)) = G(f(X), f(Y)).
GroupLaw lt_group_law(const Series1& f);

/// The unique [a] = aT + ... with f o [a] = [a] o g; requires f'(0) = g'(0).
Series1 lt_endo(const OKValue& a, const Series1& f, const Series1& g);

/// L with L' = 1 / (dG/dX)(0, T), L(0) = 0.
LogSeries formal_log(const GroupLaw& G);

/// Compositional inverse of a logarithm over K.
Series1 formal_exp(const LogSeries& L);

struct GroupFromLog {
    GroupLaw group;
    Tri integral = Tri::unknown;
    int bad_i = -1;  // first non-integral coefficient X^i Y^j
    int bad_j = -1;
    std::string witness;
};

/// G = L^{-1}(L(X) + L(Y)) with an integrality verdict.
GroupFromLog group_from_log(const LogSeries& L);

struct EndoCheck {
    bool ok = true;
    int i = -1;  // first failing monomial X^i Y^j
    int j = -1;
    int min_prec = 0;
    std::string witness;
};

/// F(G(X,Y)) = G(F(X), F(Y)) up to total degree D.
EndoCheck endo_check(const Series1& F, const GroupLaw& G);

struct GroupAxioms {
    bool identity = false;
    bool commutative = false;
    bool associative = false;
    int min_prec = 0;
    std::string witness;
    [[nodiscard]] bool ok() const noexcept { return identity && commutative && associative; }
};

/// G(X,0) = X, G(X,Y) = G(Y,X) and G(G(X,Y),Z) = G(X,G(Y,Z)) to truncation.
GroupAxioms check_group_axioms(const GroupLaw& G);

}  // namespace padyn
