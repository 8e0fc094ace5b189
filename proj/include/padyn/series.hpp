#pragma once

// Truncated power series in one and two variables over K.

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "padyn/rational.hpp"
#include "padyn/value.hpp"

namespace padyn {

enum class Tri { no, yes, unknown };
std::string to_string(Tri t);

class Series1 {
public:
    Series1() = default;
    /// Zero series of truncation degree D (coefficients 0 at full precision).
    Series1(RingPtr ring, int D);
    /// Coefficients c_0.. ; padded with zeros or truncated to length D+1.
    Series1(RingPtr ring, int D, std::vector<Elem> coeffs);

    static Series1 variable(const RingPtr& ring, int D);
    static Series1 from_ints(const RingPtr& ring, int D, const std::vector<std::int64_t>& c);
    static Series1 constant(const KValue& c, int D);

    [[nodiscard]] const RingPtr& ring() const noexcept { return ring_; }
    [[nodiscard]] int D() const noexcept { return D_; }
    [[nodiscard]] const Elem& operator[](int i) const { return c_.at(static_cast<std::size_t>(i)); }
    [[nodiscard]] KValue coeff(int i) const { return {ring_, (*this)[i]}; }
    [[nodiscard]] const std::vector<Elem>& coeffs() const noexcept { return c_; }
    void set(int i, const Elem& e) { c_.at(static_cast<std::size_t>(i)) = e; }
    void set(int i, const KValue& v);

    [[nodiscard]] Tri integral() const noexcept;
    /// Lowest index whose coefficient is distinguishable from 0, or -1.
    [[nodiscard]] int order() const noexcept;
    /// Minimum guaranteed precision over all coefficients.
    [[nodiscard]] int precision_floor() const noexcept;
    [[nodiscard]] Series1 truncate(int D) const;
    /// Copy with every coefficient capped at precision P.
    [[nodiscard]] Series1 with_precision_cap(int P) const;

private:
    RingPtr ring_;
    int D_ = 0;
    std::vector<Elem> c_;
};

/// Outcome of a coefficientwise comparison.
struct SeriesDiff {
    bool equal = true;
    int index = -1;       // first differing index (Series1) or total degree (Series2)
    int j = -1;           // Y-exponent of the first difference (Series2 only)
    int min_prec = 0;     // minimum precision of the differences examined
};

Series1 operator+(const Series1& a, const Series1& b);
Series1 operator-(const Series1& a, const Series1& b);
Series1 operator*(const Series1& a, const Series1& b);
Series1 operator-(const Series1& a);
Series1 scale(const Series1& a, const KValue& c);
/// Precision-aware equality up to the smaller truncation.
bool operator==(const Series1& a, const Series1& b);
SeriesDiff compare(const Series1& a, const Series1& b);

Series1 compose(const Series1& F, const Series1& G);
Series1 comp_inverse(const Series1& F);
/// n-fold composite F o ... o F (n >= 0).
Series1 iterate(const Series1& F, int n);
/// Multiplicative inverse; requires an invertible constant term.
Series1 mul_inverse(const Series1& F);
Series1 derivative(const Series1& F);
/// Termwise antiderivative with zero constant term (degree D+1).
Series1 integrate(const Series1& F);
/// F(T) / T^k; requires the first k coefficients to vanish at their precision.
Series1 shift_down(const Series1& F, int k);

struct Wideg {
    enum class Kind { finite, beyond, undecidable };
    Kind kind = Kind::beyond;
    int value = 0;  // the index, or D+1 for beyond
    [[nodiscard]] bool finite() const noexcept { return kind == Kind::finite; }
    [[nodiscard]] std::string to_string() const;
    bool operator==(const Wideg&) const = default;
};

/// Weierstrass degree: index of the first unit coefficient. Input must be integral.
Wideg wideg(const Series1& F);

struct PolygonVertex {
    int index = 0;
    Rational valuation;
    bool operator==(const PolygonVertex&) const = default;
};

struct PolygonSegment {
    Rational slope;
    int length = 0;
    [[nodiscard]] Rational height() const { return -(slope * Rational(length)); }
    bool operator==(const PolygonSegment&) const = default;
};

struct NewtonPolygon {
    std::vector<PolygonVertex> vertices;
    std::vector<PolygonSegment> segments;

    [[nodiscard]] int root_count() const noexcept;
    /// (root valuation, count) per segment, left to right.
    [[nodiscard]] std::vector<std::pair<Rational, int>> roots() const;
    bool operator==(const NewtonPolygon&) const = default;
};

/// Lower convex hull of (i, val(c_i)) for i up to the first coefficient of minimal valuation.
NewtonPolygon newton_polygon(const Series1& F);

/// Series over the residue field F_q.
struct ResidueSeries {
    RingPtr ring;
    int D = 0;
    std::vector<ResidueValue> c;

    [[nodiscard]] bool is_zero() const noexcept;
    [[nodiscard]] int order() const noexcept;
    bool operator==(const ResidueSeries& o) const { return D == o.D && c == o.c; }
};

ResidueSeries residue_reduce(const Series1& F);

struct ResidueDecomposition {
    ResidueSeries inner;  // Gbar with Gbar'(0) != 0
    int d = 0;            // Fbar = Gbar(T^(p^d))
};

ResidueDecomposition residue_decompose(const ResidueSeries& Fbar);
/// Gbar(T^(p^d)) truncated at degree D.
ResidueSeries residue_expand(const ResidueSeries& Gbar, int d, int D);

class Series2 {
public:
    Series2() = default;
    Series2(RingPtr ring, int D);
    Series2(RingPtr ring, int D, std::vector<Elem> coeffs);  // triangular order, see index()

    static Series2 x(const RingPtr& ring, int D);
    static Series2 y(const RingPtr& ring, int D);
    static Series2 in_x(const Series1& F);
    static Series2 in_y(const Series1& F);

    /// Position of X^i Y^j in the triangular coefficient vector.
    [[nodiscard]] static std::size_t index(int i, int j) noexcept {
        const int t = i + j;
        return static_cast<std::size_t>(t * (t + 1) / 2 + j);
    }

    [[nodiscard]] const RingPtr& ring() const noexcept { return ring_; }
    [[nodiscard]] int D() const noexcept { return D_; }
    [[nodiscard]] const Elem& at(int i, int j) const { return c_.at(index(i, j)); }
    [[nodiscard]] KValue coeff(int i, int j) const { return {ring_, at(i, j)}; }
    [[nodiscard]] const std::vector<Elem>& coeffs() const noexcept { return c_; }
    void set(int i, int j, const Elem& e) { c_.at(index(i, j)) = e; }

    [[nodiscard]] Tri integral() const noexcept;
    [[nodiscard]] int precision_floor() const noexcept;
    [[nodiscard]] Series2 truncate(int D) const;

private:
    RingPtr ring_;
    int D_ = 0;
    std::vector<Elem> c_;
};

Series2 operator+(const Series2& a, const Series2& b);
Series2 operator-(const Series2& a, const Series2& b);
Series2 operator*(const Series2& a, const Series2& b);
Series2 scale(const Series2& a, const KValue& c);
bool operator==(const Series2& a, const Series2& b);
SeriesDiff compare(const Series2& a, const Series2& b);

/// G(A(X), B(Y)).
Series2 subst2(const Series2& G, const Series1& A, const Series1& B);
/// G(A(T), B(T)): the one-variable collapse.
Series1 subst2_diag(const Series2& G, const Series1& A, const Series1& B);
/// G(A(X,Y), B(X,Y)).
Series2 subst2(const Series2& G, const Series2& A, const Series2& B);
/// F(G(X,Y)).
Series2 compose(const Series1& F, const Series2& G);

}  // namespace padyn
