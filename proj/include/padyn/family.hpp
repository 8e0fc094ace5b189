#pragma once

// Families alpha -> F_alpha of power series over a fixed ring and truncation.

#include <memory>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "padyn/series.hpp"

namespace padyn {

enum class Backend { lubin_tate, conjugated, tabulated };
std::string to_string(Backend b);

struct TableEntry {
    OKValue alpha;
    Series1 series;
};

/// Evaluation is memoized per family (shared between copies) and safe under
/// concurrent queries. Every evaluated member is checked for F(0) = 0 and
/// F'(0) = alpha.
class Family {
public:
    Family() = default;

    [[nodiscard]] const RingPtr& ring() const;
    [[nodiscard]] int D() const;
    [[nodiscard]] Backend backend() const;
    /// The uniformizer whose member plays the role of F_pi.
    [[nodiscard]] const OKValue& pi() const;

    [[nodiscard]] Series1 operator()(const OKValue& alpha) const;
    [[nodiscard]] Series1 f_pi() const { return (*this)(pi()); }

    // backend data
    [[nodiscard]] const Series1& lt_series() const;    // lubin_tate
    [[nodiscard]] const Series1& conjugator() const;   // conjugated
    [[nodiscard]] const Family& inner() const;         // conjugated
    [[nodiscard]] const std::vector<TableEntry>& table() const;  // tabulated

    struct Impl;

private:
    explicit Family(std::shared_ptr<const Impl> impl) : impl_(std::move(impl)) {}
    friend Family family_from_lt(const Series1& f);
    friend Family family_conjugate(const Series1& U, const Family& fam);
    friend Family family_tabulated(const RingPtr& ring, int D, const OKValue& pi, std::vector<TableEntry> table);
    std::shared_ptr<const Impl> impl_;
};

/// alpha -> [alpha]_{f,f}; requires f to be a Lubin-Tate series.
Family family_from_lt(const Series1& f);
/// alpha -> U^{-1} o F_alpha o U; U integral with U(0) = 0 and U'(0) a unit.
Family family_conjugate(const Series1& U, const Family& fam);
/// Explicit table; pi must be one of its keys. Queries outside the table are errors.
Family family_tabulated(const RingPtr& ring, int D, const OKValue& pi, std::vector<TableEntry> table);
/// Tabulates fam on the given values (pi is always included).
Family tabulate(const Family& fam, const std::vector<OKValue>& alphas);

/// JSON descriptor: {"backend": "lubin-tate", "f": <series>} |
/// {"backend": "conjugated", "U": <series>, "inner": {...}} |
/// {"backend": "tabulated", "pi": <elem>, "table": [{"alpha": <elem>, "series": <series>}, ...]}.
/// Optional "degree" pads or truncates every series. Series literals with tag "*" use fallback.
Family family_from_json(std::string_view text, const RingPtr& fallback = nullptr, int degree = -1);
std::string family_to_json(const Family& fam);

}  // namespace padyn
