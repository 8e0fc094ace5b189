#pragma once

// Full commuting families: verification, the family logarithm, root statistics
// and fixed-point profiles from Newton polygons, recovery of the formal group,
// and the search for the uniformizer mu with F_mu = T^q mod pi.

#include <optional>
#include <string>
#include <vector>

#include "padyn/family.hpp"
#include "padyn/lubin_tate.hpp"

namespace padyn {

/// {pi} + Teichmuller units + {1 + pi^k : k <= 3} + {-1, 2, 3}, duplicates removed.
std::vector<OKValue> default_samples(const Family& fam);
/// The units among default_samples.
std::vector<OKValue> default_unit_samples(const Family& fam);

struct CommutingReport {
    bool ok = true;
    int pairs = 0;
    // first failing pair and the first differing coefficient of F_a o F_b - F_b o F_a
    std::string alpha, beta;
    int index = -1;
};

/// F_a o F_b = F_b o F_a to degree D for every pair of samples.
CommutingReport check_commuting(const Family& fam, const std::vector<OKValue>& samples);

struct FullReport {
    bool derivative_ok = true;   // F_a'(0) = a on the unit samples
    std::string derivative_witness;
    Wideg wideg_pi;
    bool wideg_ok = false;       // wideg(F_pi) = q
    bool unit_ok = false;        // F_pi'/pi is a unit series
    std::string unit_witness;
    bool serg_ran = false;
    int serg_d = -1;             // F_pi = G(T^(p^d)) mod pi
    bool serg_ok = false;        // p^d = q
    ResidueSeries serg_inner;
    std::string serg_witness;
    [[nodiscard]] bool ok() const noexcept { return derivative_ok && wideg_ok && unit_ok && serg_ok; }
};

FullReport check_full(const Family& fam, const std::vector<OKValue>& unit_samples);

/// The family logarithm L = T + ..., L o F_pi = pi L, from L' = omega with
/// omega(F_pi) * F_pi'/pi = omega. Verifies L o F_a = a L on the samples.
LogSeries lubin_log(const Family& fam, const std::vector<OKValue>& samples);
LogSeries lubin_log(const Family& fam);

struct LimitLog {
    Series1 L;                    // per coefficient, the best stabilized iterate
    std::vector<int> iterations;  // iterate count chosen per coefficient
};

/// pi^-n F_pi^(n), coefficient m taken from the iterate where successive
/// iterates agree best; precision = min(own precision, agreement with the previous iterate).
LimitLog lubin_log_limit(const Family& fam, int max_iterations = -1);

struct LambdaStats {
    int n = 0;
    int count = 0;                  // roots of F^(n) / F^(n-1) in the open disc
    std::vector<Rational> valuations;  // root valuation per polygon segment
    NewtonPolygon polygon;
    int expected_count = 0;         // q^(n-1) (q-1)
    Rational expected_valuation;    // 1 / (q^(n-1) (q-1))
    int total_roots = 0;            // roots of F^(n) / T, from its polygon
    bool ok = false;
};

LambdaStats lambda_stats(const Family& fam, int n);

struct FixedPointProfile {
    OKValue alpha;
    int n_alpha = 0;
    Wideg wideg;
    NewtonPolygon polygon;
    bool wideg_ok = false;    // wideg(F_a - T) = q^n
    bool polygon_ok = false;  // (1, n) -> (q^n, 0), slopes -1/(q^k (q-1)), heights one
    [[nodiscard]] bool ok() const noexcept { return wideg_ok && polygon_ok; }
};

FixedPointProfile fixedpoint_profile(const Family& fam, const OKValue& alpha);

struct EndoEvidence {
    std::string alpha;
    EndoCheck endo;
    bool exp_ok = false;  // F_a = exp(a L) wherever decidable
    int exp_degree = 0;   // highest degree through which that comparison was decidable
};

struct Recovery {
    LogSeries log;
    GroupFromLog group;
    std::vector<EndoEvidence> evidence;
    [[nodiscard]] bool ok() const;
};

/// L = lubin_log, G = L^-1(L(X) + L(Y)); checks integrality and every sampled F_a against G.
Recovery recover_group(const Family& fam, const std::vector<OKValue>& samples);

struct MuCertificate {
    bool found = false;
    OKValue mu;
    std::vector<std::uint64_t> digits;  // Teichmuller digits of mu / pi (residue indices)
    int digits_determined = 0;           // leading digits for which every alternative was refuted
    int congruence_degree = 0;           // F_mu = T^q mod pi verified through this degree
    bool wideg_ok = false;               // wideg(F_mu) = q
    bool lubin_tate = false;             // is_lt_series(F_mu)
    int evaluations = 0;
    // diagnostics when not found
    int best_degree = 0;                 // longest congruence reached by any candidate
    int first_bad = -1;                  // first offending coefficient of that candidate
    std::string diagnostic;
};

MuCertificate mu_search(const Family& fam, int max_digits);

/// Index of the first coefficient of F with F != T^q mod pi, or D+1.
int first_violation(const Series1& F);

}  // namespace padyn
