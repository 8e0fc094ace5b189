#include "padyn/dynamics.hpp"

#include <algorithm>
#include <climits>
#include <functional>

#include "kernels.hpp"
#include "padyn/error.hpp"
#include "padyn/literal.hpp"

namespace padyn {

using detail::RawOps;
using detail::RawVal;

namespace {

std::string lit(const OKValue& a) { return format_elem(*a.ring(), a.elem()); }

void add_unique(const Ring& R, std::vector<OKValue>& out, const OKValue& a) {
    for (const auto& b : out)
        if (R.equal(a.elem(), b.elem())) return;
    out.push_back(a);
}

// q^k capped at cap (no overflow)
long long qpow_capped(std::uint64_t q, int k, long long cap) {
    long long r = 1;
    for (int i = 0; i < k; ++i) {
        if (r > cap / static_cast<long long>(q)) return cap + 1;
        r *= static_cast<long long>(q);
    }
    return r;
}

int vp_int(std::int64_t n, std::uint64_t p) {
    int v = 0;
    while (n != 0 && n % static_cast<std::int64_t>(p) == 0) {
        n /= static_cast<std::int64_t>(p);
        ++v;
    }
    return v;
}

}  // namespace

std::vector<OKValue> default_samples(const Family& fam) {
    const RingPtr& ring = fam.ring();
    const Ring& R = *ring;
    std::vector<OKValue> out;
    if (fam.backend() == Backend::tabulated) {
        for (const auto& e : fam.table()) add_unique(R, out, e.alpha);
        return out;
    }
    add_unique(R, out, fam.pi());
    for (std::uint64_t i = 1; i < R.q(); ++i) add_unique(R, out, teich(ring, R.r_element(i)));
    OKValue pk = OKValue::from_int(ring, 1);
    for (int k = 1; k <= 3; ++k) {
        pk = pk * fam.pi();
        add_unique(R, out, OKValue::from_int(ring, 1) + pk);
    }
    for (std::int64_t n : {-1, 2, 3}) add_unique(R, out, OKValue::from_int(ring, n));
    return out;
}

std::vector<OKValue> default_unit_samples(const Family& fam) {
    std::vector<OKValue> out;
    for (const auto& a : default_samples(fam))
        if (!a.is_zero() && a.elem().val == 0) out.push_back(a);
    return out;
}

CommutingReport check_commuting(const Family& fam, const std::vector<OKValue>& samples) {
    CommutingReport rep;
    std::vector<Series1> F;
    F.reserve(samples.size());
    for (const auto& a : samples) F.push_back(fam(a));
    for (std::size_t i = 0; i < samples.size(); ++i)
        for (std::size_t j = i + 1; j < samples.size(); ++j) {
            ++rep.pairs;
            const SeriesDiff d = compare(compose(F[i], F[j]), compose(F[j], F[i]));
            if (!d.equal) {
                rep.ok = false;
                rep.alpha = lit(samples[i]);
                rep.beta = lit(samples[j]);
                rep.index = d.index;
                return rep;
            }
            if (d.min_prec < 1) throw PrecisionError("check_commuting: precision too low to decide for " + lit(samples[i]) + ", " + lit(samples[j]));
        }
    return rep;
}

FullReport check_full(const Family& fam, const std::vector<OKValue>& unit_samples) {
    const Ring& R = *fam.ring();
    FullReport rep;
    for (const auto& a : unit_samples) {
        try {
            (void)fam(a);
        } catch (const MathError& ex) {
            rep.derivative_ok = false;
            rep.derivative_witness = ex.what();
            break;
        }
    }
    const Series1 F = fam.f_pi();
    if (F.integral() != Tri::yes) {
        rep.unit_witness = "F_pi is not integral";
        return rep;
    }
    rep.wideg_pi = wideg(F);
    rep.wideg_ok = rep.wideg_pi.finite() && static_cast<std::uint64_t>(rep.wideg_pi.value) == R.q();

    // F_pi'/pi: constant term F_pi'(0)/pi is a unit; the rest must be divisible by pi
    rep.unit_ok = true;
    const Series1 dF = derivative(F);
    for (int k = 1; k <= dF.D(); ++k) {
        const Elem& c = dF[k];
        if (c.is_zero()) {
            if (c.prec < 1) throw PrecisionError("check_full: coefficient " + std::to_string(k) + " of F_pi' undecidable mod pi");
            continue;
        }
        if (c.val < 1) {
            rep.unit_ok = false;
            rep.unit_witness = "coefficient of T^" + std::to_string(k) + " in F_pi'/pi is not integral";
            break;
        }
    }

    rep.serg_ran = true;
    try {
        const ResidueDecomposition dec = residue_decompose(residue_reduce(F));
        rep.serg_d = dec.d;
        rep.serg_inner = dec.inner;
        rep.serg_ok = qpow_capped(R.p(), dec.d, LLONG_MAX / 4) == static_cast<long long>(R.q());
        if (!rep.serg_ok) rep.serg_witness = "p^d = " + std::to_string(qpow_capped(R.p(), dec.d, LLONG_MAX / 4)) + " differs from q";
    } catch (const MathError& ex) {
        rep.serg_witness = ex.what();
    }
    return rep;
}

LogSeries lubin_log(const Family& fam, const std::vector<OKValue>& samples) {
    const RingPtr& ring = fam.ring();
    const Ring& R = *ring;
    const RawOps ops{R};
    const Series1 F = fam.f_pi();
    const int D = F.D();
    if (D < 2) throw UsageError("lubin_log: truncation degree below 2");
    if (F.integral() != Tri::yes) throw MathError("lubin_log: F_pi is not integral");
    const Elem pi = F[1];
    // u = F_pi'/pi, degree D-1
    const Series1 dF = derivative(F);
    std::vector<Elem> u(static_cast<std::size_t>(D));
    for (int k = 0; k < D; ++k) {
        u[static_cast<std::size_t>(k)] = R.div(dF[k], pi);
        if (!R.is_integral(u[static_cast<std::size_t>(k)]))
            throw MathError("lubin_log: F_pi'/pi is not integral at T^" + std::to_string(k));
    }
    const auto fr = detail::to_raw(R, F.truncate(D - 1).coeffs());
    // Q_k = u * F^k; omega_m (1 - pi^m) = sum_{k<m} omega_k [Q_k]_m
    std::vector<std::vector<RawVal>> Q(static_cast<std::size_t>(D));
    Q[0] = detail::to_raw(R, u);
    for (int k = 1; k < D; ++k) Q[static_cast<std::size_t>(k)] = detail::mul1(ops, Q[static_cast<std::size_t>(k - 1)], fr, D - 1);
    std::vector<RawVal> omega(static_cast<std::size_t>(D));
    omega[0].c = R.raw_from_int(1);
    const Coords pir = R.to_raw(pi);
    for (int m = 1; m < D; ++m) {
        RawVal s{};
        for (int k = 0; k < m; ++k) ops.fma(s, omega[static_cast<std::size_t>(k)], Q[static_cast<std::size_t>(k)][static_cast<std::size_t>(m)]);
        const Coords denom = R.raw_sub(R.raw_from_int(1), R.raw_pow(pir, static_cast<std::uint64_t>(m)));
        const RawVal inv{R.raw_inv_unit(denom), pi.prec};
        omega[static_cast<std::size_t>(m)] = ops.mul(s, inv);
    }
    LogSeries out;
    out.L = integrate(Series1(ring, D - 1, detail::from_raw(R, omega)));
    for (int m = 2; m <= D; ++m) out.divisions = std::max(out.divisions, R.e() * vp_int(m, R.p()));

    for (const auto& a : samples) {
        const Series1 Fa = fam(a);
        const SeriesDiff d = compare(compose(out.L, Fa), scale(out.L, a));
        if (!d.equal)
            throw MathError("lubin_log: L o F_a differs from a L for a = " + lit(a) + " at T^" + std::to_string(d.index));
        if (d.min_prec < 1) throw PrecisionError("lubin_log: functional equation undecidable for a = " + lit(a));
    }
    return out;
}

LogSeries lubin_log(const Family& fam) { return lubin_log(fam, default_samples(fam)); }

LimitLog lubin_log_limit(const Family& fam, int max_iterations) {
    const RingPtr& ring = fam.ring();
    const Ring& R = *ring;
    const Series1 F = fam.f_pi();
    const int D = F.D();
    if (max_iterations < 0) max_iterations = R.N();
    LimitLog out;
    out.L = Series1(ring, D);
    out.iterations.assign(static_cast<std::size_t>(D) + 1, 0);
    std::vector<int> best(static_cast<std::size_t>(D) + 1, INT_MIN);
    for (int m = 1; m <= D; ++m) out.L.set(m, R.zero(INT_MIN / 4));
    out.L.set(0, R.zero());
    Series1 H = F;
    std::vector<Elem> prev;
    for (int n = 1; n <= max_iterations; ++n) {
        std::vector<Elem> cur(static_cast<std::size_t>(D) + 1);
        for (int m = 0; m <= D; ++m) cur[static_cast<std::size_t>(m)] = R.shift(H[m], -n);
        if (!prev.empty()) {
            // both iterates must already reach degree m: F^(n-1) = T^(q^(n-1)) mod pi
            const long long reach = qpow_capped(R.q(), n - 1, D);
            for (int m = 1; m <= std::min<long long>(reach, D); ++m) {
                const Elem& c = cur[static_cast<std::size_t>(m)];
                const Elem diff = R.sub(c, prev[static_cast<std::size_t>(m)]);
                const int agree = diff.is_zero() ? diff.prec : diff.val;
                const int p = std::min(c.prec, agree);
                if (p > best[static_cast<std::size_t>(m)]) {
                    best[static_cast<std::size_t>(m)] = p;
                    out.L.set(m, c.prec > p ? R.with_prec(c, p) : c);
                    out.iterations[static_cast<std::size_t>(m)] = n;
                }
            }
        }
        prev = std::move(cur);
        if (n < max_iterations) H = compose(F, H);
    }
    return out;
}

LambdaStats lambda_stats(const Family& fam, int n) {
    const Ring& R = *fam.ring();
    const int D = fam.D();
    if (n < 1) throw UsageError("lambda_stats: n must be positive");
    const long long qn = qpow_capped(R.q(), n, D);
    if (qn > D) throw UsageError("lambda_stats: truncation too small, q^n exceeds D = " + std::to_string(D));
    const Series1 F = fam.f_pi();
    const Series1 prev = iterate(F, n - 1);
    const Series1 full = compose(F, prev);
    // F^(n) / F^(n-1) = (F/T) o F^(n-1), checked by multiplying back
    const Series1 Q = compose(shift_down(F, 1), prev);
    const SeriesDiff d = compare(Q * prev, full);
    if (!d.equal) throw MathError("lambda_stats: quotient does not divide back at T^" + std::to_string(d.index));

    LambdaStats out;
    out.n = n;
    out.polygon = newton_polygon(Q);
    out.count = out.polygon.root_count();
    for (const auto& [v, c] : out.polygon.roots()) out.valuations.push_back(v);
    out.expected_count = static_cast<int>(qn / static_cast<long long>(R.q()) * static_cast<long long>(R.q() - 1));
    out.expected_valuation = Rational(1, out.expected_count);
    out.total_roots = newton_polygon(shift_down(full, 1)).root_count();
    out.ok = out.count == out.expected_count && out.valuations.size() == 1 && out.valuations[0] == out.expected_valuation &&
             out.total_roots == static_cast<int>(qn) - 1;
    return out;
}

FixedPointProfile fixedpoint_profile(const Family& fam, const OKValue& alpha) {
    const RingPtr& ring = fam.ring();
    const Ring& R = *ring;
    const int D = fam.D();
    if (alpha.is_zero() || alpha.elem().val != 0) throw UsageError("fixedpoint_profile: alpha is not a unit");
    const Elem dm = R.sub(alpha.elem(), R.one());
    if (dm.is_zero()) {
        if (dm.prec >= R.N()) throw UsageError("fixedpoint_profile: alpha = 1 has no finite profile");
        throw PrecisionError("fixedpoint_profile: alpha indistinguishable from 1 at precision " + std::to_string(dm.prec));
    }
    FixedPointProfile out;
    out.alpha = alpha;
    out.n_alpha = dm.val;
    const int n = out.n_alpha;
    const long long qn = qpow_capped(R.q(), n, D);
    if (qn > D) throw PrecisionError("fixedpoint_profile: q^n(alpha) exceeds the truncation degree " + std::to_string(D));
    const Series1 G = fam(alpha) - Series1::variable(ring, D);
    out.wideg = wideg(G);
    out.polygon = newton_polygon(G);
    out.wideg_ok = out.wideg.finite() && out.wideg.value == qn;

    const auto q = static_cast<long long>(R.q());
    bool ok = static_cast<int>(out.polygon.vertices.size()) == n + 1 && static_cast<int>(out.polygon.segments.size()) == n;
    if (ok) {
        long long x = 1;
        for (int k = 0; k <= n && ok; ++k) {
            const PolygonVertex& v = out.polygon.vertices[static_cast<std::size_t>(k)];
            ok = v.index == x && v.valuation == Rational(n - k);
            if (k < n) {
                const long long len = x * (q - 1);
                const PolygonSegment& s = out.polygon.segments[static_cast<std::size_t>(k)];
                ok = ok && s.length == len && s.slope == Rational(-1, len) && s.height() == Rational(1);
                x *= q;
            }
        }
    }
    out.polygon_ok = ok;
    return out;
}

bool Recovery::ok() const {
    if (group.integral != Tri::yes) return false;
    return std::all_of(evidence.begin(), evidence.end(), [](const EndoEvidence& e) { return e.endo.ok && e.exp_ok; });
}

Recovery recover_group(const Family& fam, const std::vector<OKValue>& samples) {
    const Ring& R = *fam.ring();
    Recovery out;
    out.log = lubin_log(fam, samples);
    out.group = group_from_log(out.log);
    if (out.group.integral != Tri::yes) return out;
    const Series1 E = formal_exp(out.log);
    for (const auto& a : samples) {
        EndoEvidence ev;
        ev.alpha = lit(a);
        const Series1 Fa = fam(a);
        ev.endo = endo_check(Fa, out.group.group);
        // F_a against exp(a L): a nonzero difference at any precision is a failure
        const Series1 via_exp = compose(E, scale(out.log.L, a));
        ev.exp_ok = true;
        ev.exp_degree = 0;
        bool decided = true;
        for (int m = 1; m <= std::min(Fa.D(), via_exp.D()); ++m) {
            const Elem diff = R.sub(Fa[m], via_exp[m]);
            if (!diff.is_zero()) ev.exp_ok = false;
            if (decided && diff.prec >= 1) ev.exp_degree = m;
            else decided = false;
        }
        out.evidence.push_back(std::move(ev));
    }
    return out;
}

int first_violation(const Series1& F) {
    const Ring& R = *F.ring();
    const std::uint64_t q = R.q();
    for (int i = 1; i <= F.D(); ++i) {
        const Elem c = static_cast<std::uint64_t>(i) == q ? R.sub(F[i], R.one()) : F[i];
        if (c.is_zero()) {
            if (c.prec < 1) throw PrecisionError("coefficient " + std::to_string(i) + " undecidable mod pi");
            continue;
        }
        if (c.val < 1) return i;
    }
    return F.D() + 1;
}

MuCertificate mu_search(const Family& fam, int max_digits) {
    const RingPtr& ring = fam.ring();
    const Ring& R = *ring;
    const int D = fam.D();
    const std::uint64_t q = R.q();
    if (max_digits < 1) throw UsageError("mu_search: max_digits must be positive");
    constexpr int kBudget = 4096;
    MuCertificate cert;

    std::vector<OKValue> teichs;
    for (std::uint64_t i = 0; i < q; ++i) teichs.push_back(teich(ring, R.r_element(i)));
    auto make_mu = [&](const std::vector<std::uint64_t>& digits) {
        OKValue u = OKValue::from_int(ring, 0);
        OKValue pk = OKValue::from_int(ring, 1);
        for (auto d : digits) {
            u = u + teichs[static_cast<std::size_t>(d)] * pk;
            pk = pk * fam.pi();
        }
        return fam.pi() * u;
    };
    struct Cand {
        std::uint64_t d;
        int v;
    };
    auto accept = [&](const std::vector<std::uint64_t>& digits, int determined) {
        const OKValue mu = make_mu(digits);
        const Series1 F = fam(mu);
        cert.found = true;
        cert.mu = mu;
        cert.digits = digits;
        cert.digits_determined = determined;
        cert.congruence_degree = D;
        const Wideg w = wideg(F);
        cert.wideg_ok = w.finite() && static_cast<std::uint64_t>(w.value) == q;
        cert.lubin_tate = is_lt_series(F).ok;
        return cert.wideg_ok;
    };

    // run = number of leading depths that had a single surviving digit
    std::function<bool(std::vector<std::uint64_t>&, int)> dfs = [&](std::vector<std::uint64_t>& prefix, int run) -> bool {
        const int depth = static_cast<int>(prefix.size()) + 1;
        const long long frozen = std::min<long long>(qpow_capped(q, depth, D), D);
        std::vector<Cand> surv;
        for (std::uint64_t d = depth == 1 ? 1 : 0; d < q; ++d) {
            if (++cert.evaluations > kBudget) throw MathError("mu_search: evaluation budget exhausted");
            prefix.push_back(d);
            const int v = first_violation(fam(make_mu(prefix)));
            prefix.pop_back();
            if (v - 1 > cert.best_degree || cert.first_bad < 0) {
                if (v - 1 >= cert.best_degree) {
                    cert.best_degree = v - 1;
                    cert.first_bad = v <= D ? v : -1;
                }
            }
            if (v <= frozen) continue;  // a coefficient that later digits cannot change is wrong
            surv.push_back({d, v});
        }
        if (surv.empty()) return false;
        const bool unique = surv.size() == 1;
        const int run2 = run == depth - 1 && unique ? depth : run;
        std::stable_sort(surv.begin(), surv.end(), [](const Cand& a, const Cand& b) { return a.v > b.v; });
        const bool all_complete = std::all_of(surv.begin(), surv.end(), [&](const Cand& c) { return c.v == D + 1; });
        if (all_complete && !unique) {
            // further digits are invisible at this truncation; keep the shortest expansion
            if (depth > 1) return accept(prefix, run);
            prefix.push_back(surv.front().d);
            const bool ok = accept(prefix, run);
            prefix.pop_back();
            return ok;
        }
        for (const Cand& c : surv) {
            prefix.push_back(c.d);
            bool ok = false;
            if (depth == max_digits) ok = c.v == D + 1 && accept(prefix, run2);
            else ok = dfs(prefix, run2);
            prefix.pop_back();
            if (ok) return true;
        }
        return false;
    };

    std::vector<std::uint64_t> prefix;
    bool found = false;
    try {
        found = dfs(prefix, 0);
    } catch (const MathError& ex) {
        cert.diagnostic = ex.what();
    }
    if (!found) {
        cert.found = false;
        if (cert.diagnostic.empty())
            cert.diagnostic = "search exhausted after " + std::to_string(cert.evaluations) + " candidates; best congruence F_mu = T^q mod pi through degree " +
                              std::to_string(cert.best_degree) +
                              (cert.first_bad > 0 ? ", first offending coefficient T^" + std::to_string(cert.first_bad) : "");
    }
    return cert;
}

}  // namespace padyn
