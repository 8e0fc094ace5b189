#include <catch_amalgamated.hpp>

#include <random>

#include "oracles.hpp"
#include "padyn/literal.hpp"
#include "padyn/lubin_tate.hpp"

using namespace padyn;

namespace {

Series1 S(const RingPtr& R, int D, std::vector<std::int64_t> c) { return Series1::from_ints(R, D, c); }

// pi*T + T^q over the ring
Series1 basic_lt(const RingPtr& R, int D) {
    Series1 f(R, D);
    f.set(1, R->uniformizer());
    if (static_cast<int>(R->q()) <= D) f.set(static_cast<int>(R->q()), R->one());
    return f;
}

OKValue random_ok(const RingPtr& R, std::mt19937_64& rng) {
    Coords c{};
    for (int k = 0; k < R->dim(); ++k) c[static_cast<std::size_t>(k)] = rng() % R->modulus();
    return OKValue::from_raw(R, c);
}

int floor_log(long long r, long long q) {
    int l = 0;
    for (long long x = q; x <= r; x *= q) ++l;
    return l;
}

}  // namespace

TEST_CASE("Lubin-Tate series recognition", "[lt]") {
    auto Z3 = make_zp(3, 12);
    CHECK(is_lt_series(S(Z3, 8, {0, 3, 0, 1})).ok);
    CHECK(is_lt_series(oracle::binomial_minus_one(Z3, 8, 3)).ok);
    CHECK(is_lt_series(S(Z3, 8, {0, 6, 3, 1, 9})).ok);  // any linear coefficient of valuation 1
    const LTCheck a = is_lt_series(S(Z3, 8, {0, 9, 0, 1}));
    CHECK_FALSE(a.ok);
    CHECK(a.index == 1);
    const LTCheck b = is_lt_series(S(Z3, 8, {0, 3, 1, 1}));
    CHECK_FALSE(b.ok);
    CHECK(b.index == 2);
    const LTCheck c = is_lt_series(S(Z3, 8, {0, 3, 0, 2}));
    CHECK_FALSE(c.ok);
    CHECK(c.index == 3);
    CHECK_FALSE(is_lt_series(S(Z3, 8, {1, 3, 0, 1})).ok);
    Series1 low = S(Z3, 8, {0, 3, 0, 1});
    low.set(5, Z3->zero(0));
    CHECK_THROWS_AS(is_lt_series(low), PrecisionError);

    auto F9 = make_ring(3, {1, 0, 1}, {}, 10);
    CHECK(is_lt_series(basic_lt(F9, 12)).ok);
    CHECK_FALSE(is_lt_series(S(F9, 12, {0, 3, 0, 1})).ok);  // T^3 is not T^9 mod 3
}

TEST_CASE("multiplicative group from (1+T)^p - 1", "[lt]") {
    for (long p : {2L, 3L, 5L}) {
        auto R = make_zp(static_cast<std::uint64_t>(p), 20);
        const int D = 18;
        const Series1 f = oracle::binomial_minus_one(R, D, p);
        const GroupLaw G = lt_group_law(f);
        CHECK(G.series() == oracle::multiplicative_law(R, D));
        // degree r keeps at least N - 1 - floor(log_q(r/2)) digits
        for (int r = 2; r <= D; ++r)
            for (int j = 0; j <= r; ++j) CHECK(G.series().at(r - j, j).prec >= 20 - 1 - floor_log(r / 2, p));

        for (long a : {2L, -1L, 1 + p, p, 7L}) {
            const Series1 e = lt_endo(OKValue::from_int(R, a), f, f);
            CHECK(e == oracle::binomial_minus_one(R, D, a));
        }
        CHECK(lt_endo(OKValue::from_int(R, p), f, f) == f);
    }
}

TEST_CASE("formal logarithm and exponential", "[lt]") {
    auto R = make_zp(3, 20);
    const int D = 16;
    const GroupLaw G(oracle::multiplicative_law(R, D));
    const LogSeries L = formal_log(G);
    CHECK(L.L == oracle::log1p(R, D));
    CHECK(&G.log() == &G.log());
    CHECK(G.log().L == L.L);
    CHECK(formal_exp(L) == oracle::expm1(R, D));
    CHECK(L.divisions == 2);
}

TEST_CASE("logarithm agrees with the iteration limit", "[lt]") {
    for (long p : {2L, 3L, 5L}) {
        const int N = 16;
        const int D = 14;
        auto R = make_zp(static_cast<std::uint64_t>(p), N);
        std::vector<mpz_class> fz(static_cast<std::size_t>(p) + 1);
        fz[1] = p;
        fz[static_cast<std::size_t>(p)] += 1;
        const Series1 f = oracle::series_from_z(R, D, fz);
        const GroupLaw G = lt_group_law(f);
        const auto ref = oracle::log_by_iteration(p, fz, D, N, N + 12);
        CHECK(formal_log(G).L == oracle::series_from(R, D, ref));
        // and the group comes back from its logarithm
        const GroupFromLog back = group_from_log(G.log());
        CHECK(back.integral == Tri::yes);
        CHECK(back.group.series() == G.series());
    }
}

TEST_CASE("group from a logarithm", "[lt]") {
    auto R = make_zp(2, 20);
    const int D = 12;
    const GroupFromLog m = group_from_log(LogSeries{oracle::log1p(R, D), 0});
    CHECK(m.integral == Tri::yes);
    CHECK(m.group.series() == oracle::multiplicative_law(R, D));
    CHECK(m.group.log().L == oracle::log1p(R, D));

    for (long p : {2L, 3L, 5L}) {
        auto Z = make_zp(static_cast<std::uint64_t>(p), 16);
        Series1 L = Series1::variable(Z, 8);
        L.set(2, oracle::from_rational(Z, mpq_class(1, p * p)));
        const GroupFromLog bad = group_from_log(LogSeries{L, 0});
        CHECK(bad.integral == Tri::no);
        CHECK(bad.bad_i == 1);
        CHECK(bad.bad_j == 1);
        CHECK_FALSE(bad.witness.empty());
        // G(X, Y) = L^-1(L(X) + L(Y)) regardless of integrality
        const Series1 T = Series1::variable(Z, 8);
        CHECK(compose(L, bad.group.series()) == subst2(Series2::in_x(L) + Series2::in_y(L), T, T));
    }
}

TEST_CASE("endomorphism check", "[lt]") {
    auto R = make_zp(3, 16);
    const int D = 10;
    const GroupLaw G(oracle::multiplicative_law(R, D));
    const EndoCheck bad = endo_check(S(R, D, {0, 1, 1}), G);
    CHECK_FALSE(bad.ok);
    CHECK(bad.i + bad.j == 2);
    CHECK_FALSE(bad.witness.empty());
    CHECK(endo_check(oracle::binomial_minus_one(R, D, 5), G).ok);
    CHECK(endo_check(oracle::binomial_minus_one(R, D, -1), G).ok);
}

TEST_CASE("group axioms and homomorphism laws", "[lt][property]") {
    std::mt19937_64 rng(17);
    const std::vector<RingPtr> rings = {make_zp(2, 18), make_zp(5, 14), make_ring(3, {1, 0, 1}, {}, 10),
                                        make_ring(2, {1, 1, 1}, {}, 10), make_ring(3, {0, 1}, {-3, 0, 1}, 14),
                                        make_ring(2, {1, 1}, {2, 2, 1}, 14)};
    for (const auto& R : rings) {
        const int D = std::min<int>(20, static_cast<int>(R->q()) * 2 + 3);
        const Series1 f = basic_lt(R, D);
        const GroupLaw G = lt_group_law(f);
        const GroupAxioms ax = check_group_axioms(G);
        CHECK(ax.ok());
        CHECK(endo_check(f, G).ok);
        for (int it = 0; it < 3; ++it) {
            const OKValue a = random_ok(R, rng);
            const OKValue b = random_ok(R, rng);
            const Series1 ea = lt_endo(a, f, f);
            const Series1 eb = lt_endo(b, f, f);
            CHECK(compose(ea, eb) == lt_endo(a * b, f, f));
            CHECK(subst2_diag(G.series(), ea, eb) == lt_endo(a + b, f, f));
            CHECK(endo_check(ea, G).ok);
        }
    }
}

TEST_CASE("endomorphisms between different Lubin-Tate series", "[lt]") {
    auto R = make_zp(3, 16);
    const int D = 14;
    const Series1 f = S(R, D, {0, 3, 0, 1});
    const Series1 g = S(R, D, {0, 3, 3, 1, 6});
    const Series1 h = lt_endo(OKValue::from_int(R, 1), f, g);
    CHECK(compose(f, h) == compose(h, g));
    const GroupLaw Gf = lt_group_law(f);
    const GroupLaw Gg = lt_group_law(g);
    // the isomorphism [1]_{f,g} carries one group to the other
    CHECK(compose(h, Gg.series()) == subst2(Gf.series(), h, h));
    CHECK_THROWS_AS(lt_endo(OKValue::from_int(R, 1), f, S(R, D, {0, 6, 0, 1})), UsageError);
    CHECK_THROWS_AS(lt_group_law(S(R, D, {0, 9, 0, 1})), MathError);
}

TEST_CASE("group law precision at larger degree", "[lt]") {
    auto R = make_zp(2, 24);
    const int D = 40;
    const GroupLaw G = lt_group_law(oracle::binomial_minus_one(R, D, 2));
    CHECK(G.series() == oracle::multiplicative_law(R, D));
    CHECK(G.series().precision_floor() >= 24 - 1 - floor_log(D / 2, 2));
}

namespace {

// Image of an integral element of a finer-precision copy of the ring.
Elem down(const RingPtr& R, const Ring& fine, const Elem& x) {
    Coords c = fine.to_raw(x);
    for (int k = 0; k < R->dim(); ++k) c[static_cast<std::size_t>(k)] %= R->modulus();
    return R->from_raw(c, std::min(x.prec, R->N()));
}

}  // namespace

TEST_CASE("claimed precision survives recomputation at higher precision", "[lt][property]") {
    std::mt19937_64 rng(5);
    const std::vector<std::pair<std::vector<std::int64_t>, std::vector<std::int64_t>>> shapes = {
        {{0, 1}, {}}, {{1, 0, 1}, {}}, {{0, 1}, {-3, 0, 1}}, {{1, 1, 1}, {}}};
    const std::vector<std::uint64_t> primes = {3, 3, 3, 2};
    for (std::size_t s = 0; s < shapes.size(); ++s) {
        auto R = make_ring(primes[s], shapes[s].first, shapes[s].second, 14);
        auto F = make_ring(primes[s], shapes[s].first, shapes[s].second, 22);
        const int D = 24;
        Series1 f(R, D);
        Series1 ff(F, D);
        f.set(1, R->uniformizer());
        ff.set(1, F->uniformizer());
        f.set(static_cast<int>(R->q()), R->one());
        ff.set(static_cast<int>(F->q()), F->one());
        const GroupLaw G = lt_group_law(f);
        const GroupLaw GF = lt_group_law(ff);
        const GroupFromLog back = group_from_log(G.log());
        CHECK(back.integral == Tri::yes);
        for (int t = 1; t <= D; ++t)
            for (int j = 0; j <= t; ++j) {
                const Elem ref = down(R, *F, GF.series().at(t - j, j));
                CHECK(R->equal(G.series().at(t - j, j), ref));
                CHECK(R->equal(back.group.series().at(t - j, j), ref));
            }
        const std::int64_t a = static_cast<std::int64_t>(rng() % 1000);
        const Series1 e = lt_endo(OKValue::from_int(R, a), f, f);
        const Series1 eF = lt_endo(OKValue::from_int(F, a), ff, ff);
        for (int i = 1; i <= D; ++i) CHECK(R->equal(e[i], down(R, *F, eF[i])));
    }
}
