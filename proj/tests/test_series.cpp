#include <catch_amalgamated.hpp>

#include <random>

#include "oracles.hpp"
#include "padyn/literal.hpp"

using namespace padyn;

namespace {

Series1 S(const RingPtr& R, int D, std::vector<std::int64_t> c) { return Series1::from_ints(R, D, c); }

Series1 random_series(const RingPtr& R, int D, std::mt19937_64& rng, bool unit_linear) {
    Series1 s(R, D);
    for (int i = 1; i <= D; ++i) {
        Coords c{};
        for (int k = 0; k < R->dim(); ++k) c[static_cast<std::size_t>(k)] = rng() % R->modulus();
        s.set(i, R->from_raw(c, R->N()));
    }
    if (unit_linear && s[1].val != 0) s.set(1, R->add(s[1], R->one()));
    return s;
}

}  // namespace

TEST_CASE("series arithmetic", "[series]") {
    auto R = make_zp(3, 12);
    CHECK(S(R, 6, {0, 1}) + S(R, 6, {0, 0, 1}) == S(R, 6, {0, 1, 1}));
    CHECK(S(R, 6, {1, 1}) * S(R, 6, {1, -1}) == S(R, 6, {1, 0, -1}));
    // (2T+T^2)^2 against integer convolution
    const std::vector<mpz_class> a = {0, 2, 1};
    const auto sq = oracle::poly_mul(a, a, 8);
    CHECK(S(R, 8, {0, 2, 1}) * S(R, 8, {0, 2, 1}) == oracle::series_from_z(R, 8, sq));
    CHECK(S(R, 8, {0, 2, 1}) * S(R, 8, {0, 2, 1}) == S(R, 8, {0, 0, 4, 4, 1}));
    CHECK_THROWS_AS(S(R, 4, {1}) + S(make_zp(3, 11), 4, {1}), UsageError);
    // mixed truncation degrees truncate to the minimum
    CHECK((S(R, 4, {0, 1}) + S(R, 9, {0, 1})).D() == 4);
}

TEST_CASE("composition", "[series]") {
    auto R = make_zp(5, 16);
    std::mt19937_64 rng(1);
    const Series1 F = random_series(R, 20, rng, false);
    CHECK(compose(F, Series1::variable(R, 20)) == F);
    CHECK(compose(Series1::variable(R, 20), F) == F);

    const std::vector<mpz_class> g = {0, 1, 1};
    CHECK(compose(S(R, 10, {0, 1, 1}), S(R, 10, {0, 1, 1})) == oracle::series_from_z(R, 10, oracle::poly_compose(g, g, 10)));
    CHECK(compose(S(R, 10, {0, 1, 1}), S(R, 10, {0, 1, 1})) == S(R, 10, {0, 1, 2, 2, 1}));

    const int D = 30;
    const Series1 b2 = oracle::binomial_minus_one(R, D, 2);
    const Series1 b3 = oracle::binomial_minus_one(R, D, 3);
    const Series1 b6 = oracle::binomial_minus_one(R, D, 6);
    CHECK(compose(b2, b3) == b6);
    CHECK(compose(b3, b2) == b6);

    CHECK_THROWS_AS(compose(F, S(R, 20, {1, 1})), UsageError);
}

TEST_CASE("composition is associative", "[series][property]") {
    std::mt19937_64 rng(3);
    for (auto R : {make_zp(2, 20), make_ring(3, {1, 0, 1}, {}, 10), make_ring(3, {0, 1}, {-3, 0, 1}, 12)}) {
        for (int it = 0; it < 4; ++it) {
            const Series1 A = random_series(R, 16, rng, false);
            const Series1 B = random_series(R, 16, rng, false);
            const Series1 C = random_series(R, 16, rng, false);
            CHECK(compose(A, compose(B, C)) == compose(compose(A, B), C));
        }
    }
}

TEST_CASE("compositional inverse", "[series]") {
    auto R = make_zp(3, 20);
    const int D = 14;
    CHECK(comp_inverse(Series1::variable(R, D)) == Series1::variable(R, D));
    // inverse of T + T^2 has coefficients (-1)^(k-1) C_(k-1)
    const auto cat = oracle::catalan(D);
    std::vector<mpz_class> inv(static_cast<std::size_t>(D) + 1);
    for (int k = 1; k <= D; ++k) inv[static_cast<std::size_t>(k)] = (k % 2 ? 1 : -1) * cat[static_cast<std::size_t>(k - 1)];
    CHECK(comp_inverse(S(R, D, {0, 1, 1})) == oracle::series_from_z(R, D, inv));
    const Series1 head = comp_inverse(S(R, 5, {0, 1, 1}));
    CHECK(head == S(R, 5, {0, 1, -1, 2, -5, 14}));

    for (int a : {2, 4, 5, -1, 7}) {
        const Series1 F = oracle::binomial_minus_one(R, D, a);
        const Series1 G = comp_inverse(F);
        mpq_class inv_a(1, a);
        inv_a.canonicalize();
        CHECK(G == oracle::binomial_minus_one(R, D, inv_a));
        CHECK(compose(F, G) == Series1::variable(R, D));
    }
    CHECK_THROWS_AS(comp_inverse(S(R, 5, {0, 0, 1})), MathError);
    Series1 low(R, 5);
    low.set(1, R->zero(3));
    CHECK_THROWS_AS(comp_inverse(low), PrecisionError);
    CHECK_THROWS_AS(comp_inverse(S(R, 5, {1, 1})), UsageError);
}

TEST_CASE("compose with inverse is the identity", "[series][property]") {
    std::mt19937_64 rng(9);
    for (auto R : {make_zp(5, 18), make_ring(2, {1, 1, 1}, {}, 16), make_ring(3, {0, 1}, {-3, 0, 1}, 16)}) {
        for (int it = 0; it < 5; ++it) {
            const Series1 F = random_series(R, 24, rng, true);
            const Series1 G = comp_inverse(F);
            CHECK(G.integral() == Tri::yes);
            CHECK(compose(F, G) == Series1::variable(R, 24));
            CHECK(compose(G, F) == Series1::variable(R, 24));
            CHECK(compose(F, G).precision_floor() == R->N());
        }
    }
    // non-unit derivative: result over K, still an inverse
    auto Z = make_zp(3, 20);
    const Series1 F = S(Z, 8, {0, 3, 1});
    const Series1 G = comp_inverse(F);
    CHECK(G.integral() == Tri::no);
    CHECK(compose(F, G) == Series1::variable(Z, 8));
}

TEST_CASE("Weierstrass degree", "[series]") {
    auto Z2 = make_zp(2, 12);
    CHECK(wideg(S(Z2, 6, {0, 2, 1})) == Wideg{Wideg::Kind::finite, 2});
    CHECK(wideg(S(Z2, 6, {0, 1})) == Wideg{Wideg::Kind::finite, 1});
    CHECK(wideg(S(Z2, 6, {0, 2, 4})).to_string() == ">=7");
    auto Z3 = make_zp(3, 12);
    const Series1 f4 = oracle::binomial_minus_one(Z3, 20, 4) - Series1::variable(Z3, 20);
    CHECK(wideg(f4) == Wideg{Wideg::Kind::finite, 3});
    Series1 bad = S(Z3, 4, {0, 1});
    bad.set(2, Z3->inv(Z3->from_int(3)));
    bad.set(1, Z3->from_int(3));
    CHECK_THROWS_AS(wideg(bad), MathError);
}

TEST_CASE("wideg is multiplicative under composition", "[series][property]") {
    std::mt19937_64 rng(21);
    auto R = make_zp(3, 10);
    int checked = 0;
    for (int it = 0; it < 40; ++it) {
        Series1 F = random_series(R, 40, rng, false);
        Series1 G = random_series(R, 40, rng, false);
        // force small Weierstrass degrees by making low coefficients divisible by 3
        const int wf = 1 + static_cast<int>(rng() % 4);
        const int wg = 1 + static_cast<int>(rng() % 4);
        for (int i = 1; i < wf; ++i) F.set(i, R->mul_int(F[i], 3));
        for (int i = 1; i < wg; ++i) G.set(i, R->mul_int(G[i], 3));
        if (F[wf].val != 0) F.set(wf, R->one());
        if (G[wg].val != 0) G.set(wg, R->one());
        const Wideg a = wideg(F);
        const Wideg b = wideg(G);
        REQUIRE(a.finite());
        REQUIRE(b.finite());
        CHECK(wideg(compose(F, G)) == Wideg{Wideg::Kind::finite, a.value * b.value});
        ++checked;
    }
    CHECK(checked == 40);
}

TEST_CASE("Newton polygons", "[series]") {
    auto Z3 = make_zp(3, 12);
    const NewtonPolygon a = newton_polygon(S(Z3, 6, {0, 3, 0, 1}));
    REQUIRE(a.vertices.size() == 2);
    CHECK(a.vertices[0] == PolygonVertex{1, 1});
    CHECK(a.vertices[1] == PolygonVertex{3, 0});
    REQUIRE(a.segments.size() == 1);
    CHECK(a.segments[0].slope == Rational(-1, 2));
    CHECK(a.segments[0].length == 2);

    auto Z2 = make_zp(2, 12);
    // (1+T)^3 - 1 - T = 2T + 3T^2 + T^3; root u = -2 of valuation 1
    const NewtonPolygon b = newton_polygon(S(Z2, 6, {0, 2, 3, 1}));
    REQUIRE(b.segments.size() == 1);
    CHECK(b.vertices[0] == PolygonVertex{1, 1});
    CHECK(b.vertices[1] == PolygonVertex{2, 0});
    CHECK(b.segments[0].slope == Rational(-1));
    CHECK(b.roots()[0] == std::pair<Rational, int>{Rational(1), 1});

    const Series1 f4 = oracle::binomial_minus_one(Z3, 20, 4) - Series1::variable(Z3, 20);
    const NewtonPolygon c = newton_polygon(f4);
    CHECK(c.vertices.front() == PolygonVertex{1, 1});
    CHECK(c.vertices.back() == PolygonVertex{3, 0});
    REQUIRE(c.segments.size() == 1);
    CHECK(c.segments[0].slope == Rational(-1, 2));

    CHECK_THROWS_AS(newton_polygon(Series1(Z3, 5)), PrecisionError);
}

TEST_CASE("polygon root count equals wideg minus order", "[series][property]") {
    std::mt19937_64 rng(33);
    auto R = make_ring(3, {0, 1}, {-3, 0, 1}, 16);
    for (int it = 0; it < 50; ++it) {
        Series1 F = random_series(R, 30, rng, false);
        const int ord = 1 + static_cast<int>(rng() % 3);
        const int w = ord + static_cast<int>(rng() % 10);
        for (int i = 1; i < ord; ++i) F.set(i, R->zero());
        for (int i = ord; i < w; ++i) F.set(i, R->shift(F[i], 1 + static_cast<int>(rng() % 3)));
        F.set(w, R->one());
        const NewtonPolygon np = newton_polygon(F);
        CHECK(np.root_count() == wideg(F).value - F.order());
        for (std::size_t k = 1; k < np.segments.size(); ++k) CHECK(np.segments[k - 1].slope < np.segments[k].slope);
    }
}

TEST_CASE("residue reduction and decomposition", "[series]") {
    auto Z2 = make_zp(2, 10);
    const ResidueSeries r = residue_reduce(S(Z2, 5, {0, 2, 1}));
    CHECK(r.order() == 2);
    CHECK(residue_reduce(S(Z2, 5, {0, 1})).order() == 1);
    auto Z3 = make_zp(3, 10);
    const ResidueSeries r9 = residue_reduce(oracle::binomial_minus_one(Z3, 20, 9));
    ResidueSeries t9{Z3, 20, std::vector<ResidueValue>(21)};
    t9.c[9].c[0] = 1;
    CHECK(r9 == t9);

    // T^p -> (T, 1)
    const ResidueDecomposition d1 = residue_decompose(residue_reduce(S(Z3, 12, {0, 0, 0, 1})));
    CHECK(d1.d == 1);
    CHECK(d1.inner.order() == 1);
    CHECK(residue_decompose(residue_reduce(S(Z3, 12, {0, 1, 0, 1}))).d == 0);
    const ResidueDecomposition d2 = residue_decompose(t9);
    CHECK(d2.d == 2);
    CHECK(d2.inner.order() == 1);
    CHECK(residue_expand(d2.inner, d2.d, 20) == t9);
    CHECK_THROWS_AS(residue_decompose(residue_reduce(S(Z3, 12, {0, 0, 1}))), MathError);
    CHECK_THROWS_AS(residue_decompose(residue_reduce(S(Z3, 12, {0, 0, 0, 1, 1}))), MathError);
    CHECK_THROWS_AS(residue_decompose(residue_reduce(S(Z3, 12, {1, 1}))), UsageError);
}

TEST_CASE("residue decomposition round-trip", "[series][property]") {
    std::mt19937_64 rng(8);
    auto R = make_ring(2, {1, 1, 1}, {}, 8);
    for (int it = 0; it < 30; ++it) {
        const int d = static_cast<int>(rng() % 3);
        const int pd = 1 << d;
        ResidueSeries g{R, 40 / pd, std::vector<ResidueValue>(static_cast<std::size_t>(40 / pd) + 1)};
        for (int i = 1; i <= g.D; ++i) g.c[static_cast<std::size_t>(i)] = R->r_element(rng() % 4);
        g.c[1] = R->r_element(1 + rng() % 3);
        const ResidueSeries F = residue_expand(g, d, 40);
        const ResidueDecomposition dec = residue_decompose(F);
        CHECK(dec.d == d);
        CHECK(residue_expand(dec.inner, dec.d, 40) == F);
    }
}

TEST_CASE("two-variable substitution", "[series]") {
    auto Z2 = make_zp(2, 16);
    const int D = 12;
    Series2 sum(Z2, D);
    sum.set(1, 0, Z2->one());
    sum.set(0, 1, Z2->one());
    const Series1 T = Series1::variable(Z2, D);
    CHECK(subst2_diag(sum, T, T) == S(Z2, D, {0, 2}));

    const Series2 m = oracle::multiplicative_law(Z2, D);
    CHECK(subst2(m, Series2::x(Z2, D), Series2::y(Z2, D)) == m);
    CHECK(subst2(m, T, T) == m);

    const Series1 sq = oracle::binomial_minus_one(Z2, D, 2);
    CHECK(subst2_diag(m, sq, sq) == oracle::binomial_minus_one(Z2, D, 4));
    // F(G(X,Y)) = G(F(X),F(Y)) for the multiplicative law
    CHECK(compose(sq, m) == subst2(m, sq, sq));
    CHECK_THROWS_AS(subst2(m, S(Z2, D, {1, 1}), T), UsageError);
}

TEST_CASE("series literals round-trip", "[series][literal]") {
    std::mt19937_64 rng(4);
    for (auto R : {make_zp(3, 12), make_ring(3, {1, 0, 1}, {}, 8), make_ring(3, {0, 1}, {-3, 0, 1}, 10)}) {
        Series1 F = random_series(R, 10, rng, false);
        F.set(3, R->zero(4));
        F.set(4, R->shift(F[4], -2));
        const std::string s = format_series(F);
        const Series1 G = parse_series(R, s);
        CHECK(format_series(G) == s);
        CHECK(compare(F, G).equal);
        CHECK(G[3].prec == 4);
        CHECK(ring_of_literal(s)->descriptor() == R->descriptor());
    }
    auto Z3 = make_zp(3, 12);
    const Series1 f = parse_series(Z3, "deg 6; *; 1:10, 3:1");
    CHECK(f == S(Z3, 6, {0, 3, 0, 1}));
    CHECK(format_series(f) == "deg 6; " + Z3->tag() + "; 1:10, 3:1");
    CHECK_THROWS_AS(parse_series(Z3, "deg 6; p5:u[0,1]:e[-5,1]:N12; 1:1"), UsageError);
    CHECK_THROWS_AS(parse_series(Z3, "deg 6; *; 9:1"), UsageError);

    const Series2 m = oracle::multiplicative_law(Z3, 5);
    const std::string s2 = format_series(m);
    CHECK(s2 == "deg 5; " + Z3->tag() + "; 1.0:1, 0.1:1, 1.1:1");
    CHECK(parse_series2(Z3, s2) == m);
}

TEST_CASE("precision floors propagate through composition", "[series]") {
    auto R = make_zp(3, 12);
    Series1 F = S(R, 6, {0, 1, 1});
    F.set(2, R->with_prec(F[2], 5));
    const Series1 G = compose(F, S(R, 6, {0, 1, 1}));
    CHECK(G[1].prec == 12);
    CHECK(G[2].prec == 5);
    CHECK(G.precision_floor() == 5);
    // a constant term known only to precision 4 caps the composite
    Series1 H = S(R, 6, {0, 1, 1});
    H.set(0, R->zero(4));
    CHECK(compose(S(R, 6, {0, 1, 1}), H).precision_floor() == 4);
}
