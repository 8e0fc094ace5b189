#include <catch_amalgamated.hpp>

#include <gmpxx.h>

#include <random>

#include "padyn/literal.hpp"
#include "padyn/value.hpp"

using namespace padyn;

namespace {

KValue K(const RingPtr& R, std::int64_t n) { return KValue::from_int(R, n); }

RingPtr F9(int N) { return make_ring(3, {1, 0, 1}, {}, N); }

}  // namespace

TEST_CASE("ring construction", "[core]") {
    auto z2 = make_zp(2, 16);
    CHECK(z2->q() == 2);
    CHECK(z2->e() == 1);
    CHECK(z2->f() == 1);
    CHECK(val(KValue::uniformizer(z2)) == Valuation{true, 1});
    CHECK(KValue::uniformizer(z2) == K(z2, 2));

    auto f9 = F9(12);
    CHECK(f9->q() == 9);
    CHECK(f9->f() == 2);

    auto r3 = make_ring(3, {0, 1}, {-3, 0, 1}, 12);
    CHECK(r3->e() == 2);
    CHECK(r3->q() == 3);
    CHECK(val(K(r3, 3)) == Valuation{true, 2});
    const KValue pi = KValue::uniformizer(r3);
    CHECK(pi * pi == K(r3, 3));
}

TEST_CASE("ring validation names the failed check", "[core]") {
    CHECK_THROWS_WITH(make_ring(3, {0, 1}, {-1, 0, 1}, 12), Catch::Matchers::ContainsSubstring("not Eisenstein"));
    CHECK_THROWS_WITH(make_ring(3, {0, 1}, {-9, 0, 1}, 12), Catch::Matchers::ContainsSubstring("not Eisenstein"));
    CHECK_THROWS_WITH(make_ring(3, {0, 1}, {-3, 1, 1}, 12), Catch::Matchers::ContainsSubstring("not Eisenstein"));
    CHECK_THROWS_WITH(make_zp(9, 10), Catch::Matchers::ContainsSubstring("not prime"));
    CHECK_THROWS_WITH(make_ring(5, {1, 0, 1}, {}, 10), Catch::Matchers::ContainsSubstring("reducible"));
    CHECK_THROWS_AS(make_zp(2, 0), UsageError);
}

TEST_CASE("arithmetic examples", "[core]") {
    auto z = make_zp(3, 4);
    CHECK(K(z, 2) + K(z, 2) == K(z, 4));
    CHECK((K(z, 1) + K(z, 3)) * (K(z, 1) - K(z, 3)) == K(z, 73));
    CHECK(K(z, -8) == K(z, 73));

    auto f9 = F9(10);
    const KValue x = parse_value(f9, "(0,1)");
    CHECK(x * x == K(f9, -1));
    CHECK(!(x == K(f9, 1)));
}

TEST_CASE("valuations", "[core]") {
    auto z3 = make_zp(3, 10);
    CHECK(val(K(z3, 6)) == Valuation{true, 1});
    CHECK(val(K(z3, 0)) == Valuation{false, 10});
    CHECK(val(K(z3, 0)).to_string() == ">=10");
    auto r3 = make_ring(3, {0, 1}, {-3, 0, 1}, 12);
    CHECK(val(K(r3, 3)) == Valuation{true, 2});
    CHECK(val(K(r3, 18)) == Valuation{true, 4});
    CHECK(val(K(r3, 1) / KValue::uniformizer(r3)) == Valuation{true, -1});
}

TEST_CASE("precision propagation", "[core]") {
    auto z = make_zp(3, 10);
    const KValue a = parse_value(z, "10+O(pi^2)");  // 3 + O(9)
    CHECK(a.prec() == 2);
    const KValue b = a * K(z, 3);
    CHECK(b.prec() == 3);
    CHECK(val(b) == Valuation{true, 2});
    const KValue c = a - K(z, 3);
    CHECK(c.is_zero());
    CHECK(c.prec() == 2);
    // zero times something known to precision 2 is zero to precision 2 + val
    CHECK((c * K(z, 9)).prec() == 4);
    CHECK_THROWS_AS(congruent(a, K(z, 12), 3), PrecisionError);
    CHECK(congruent(a, K(z, 12), 2));
}

TEST_CASE("inverse of units", "[core]") {
    auto z2 = make_zp(2, 8);
    CHECK(OKValue(z2, z2->from_int(1)) == inv_unit(OKValue::from_int(z2, 1)));
    CHECK(inv_unit(OKValue::from_int(z2, 3)) == OKValue::from_int(z2, 171));
    CHECK_THROWS_WITH(inv_unit(OKValue::from_int(z2, 2)), Catch::Matchers::ContainsSubstring("not a unit"));

    std::mt19937_64 rng(7);
    for (auto R : {make_zp(5, 20), F9(16), make_ring(3, {0, 1}, {-3, 0, 1}, 18), make_ring(2, {1, 1, 1}, {2, 2, 1}, 20)}) {
        for (int it = 0; it < 200; ++it) {
            Coords c{};
            for (int i = 0; i < R->dim(); ++i) c[static_cast<std::size_t>(i)] = rng() % R->modulus();
            if (R->r_is_zero(R->raw_residue(c))) c[0] = R->add_w(c[0], 1);
            if (R->r_is_zero(R->raw_residue(c))) continue;
            const OKValue x = OKValue::from_raw(R, c);
            const OKValue y = inv_unit(x);
            CHECK(inv_unit(y) == x);
            CHECK(x * y == OKValue::from_int(R, 1));
            CHECK((x * y).prec() == R->N());
        }
    }
}

TEST_CASE("valuation is additive", "[core]") {
    std::mt19937_64 rng(11);
    auto R = make_ring(3, {0, 1}, {-3, 0, 1}, 20);
    const KValue pi = KValue::uniformizer(R);
    for (int it = 0; it < 500; ++it) {
        Coords c{};
        Coords d{};
        for (int i = 0; i < R->dim(); ++i) {
            c[static_cast<std::size_t>(i)] = rng() % R->modulus();
            d[static_cast<std::size_t>(i)] = rng() % R->modulus();
        }
        KValue x = OKValue::from_raw(R, c).as_k();
        KValue y = OKValue::from_raw(R, d).as_k();
        for (int k = 0; k < static_cast<int>(rng() % 4); ++k) x = x * pi;
        const Valuation vx = val(x);
        const Valuation vy = val(y);
        const Valuation vxy = val(x * y);
        if (vx.finite && vy.finite && vx.value + vy.value < (x * y).prec()) {
            CHECK(vxy.finite);
            CHECK(vxy.value == vx.value + vy.value);
        }
    }
}

TEST_CASE("Teichmuller lifts", "[core]") {
    auto z5 = make_zp(5, 10);
    ResidueValue two{};
    two.c[0] = 2;
    CHECK(congruent(teich(z5, two), K(z5, 7), 2));
    CHECK(teich(z5, ResidueValue{}).is_zero());
    CHECK(teich(z5, z5->r_one()) == OKValue::from_int(z5, 1));

    // exhaustive for q <= 49
    const std::vector<RingDescriptor> rings = {
        {2, {0, 1}, {}, 16},        {2, {1, 1, 1}, {}, 16},     {2, {1, 1, 0, 1}, {}, 16}, {2, {1, 1, 0, 0, 1}, {}, 12},
        {2, {1, 0, 1, 0, 0, 1}, {}, 10}, {3, {0, 1}, {}, 14},  {3, {1, 0, 1}, {}, 14},    {3, {1, 2, 0, 1}, {}, 12},
        {5, {0, 1}, {}, 12},        {5, {2, 0, 1}, {}, 12},     {7, {0, 1}, {}, 12},       {7, {1, 0, 1}, {}, 12},
        {3, {0, 1}, {-3, 0, 1}, 14}, {2, {1, 1, 1}, {2, 0, 1}, 12},
    };
    for (const auto& d : rings) {
        auto R = make_ring(d);
        INFO(R->tag());
        REQUIRE(R->q() <= 49);
        for (std::uint64_t i = 0; i < R->q(); ++i) {
            const ResidueValue c = R->r_element(i);
            const OKValue t = teich(R, c);
            CHECK(residue(t) == c);
            const KValue tq{R, R->pow(t.elem(), R->q())};
            CHECK(tq == t.as_k());
            CHECK(R->r_index(c) == i);
        }
    }
}

TEST_CASE("residues", "[core]") {
    auto z3 = make_zp(3, 8);
    CHECK(residue(OKValue::from_int(z3, 7)).c[0] == 1);
    CHECK(residue(OKValue::uniformizer(z3)) == ResidueValue{});
    auto f9 = F9(8);
    const ResidueValue rx = residue(OKValue(parse_value(f9, "(0,1)")));
    CHECK(rx.c[0] == 0);
    CHECK(rx.c[1] == 1);
    CHECK(f9->r_mul(rx, rx) == f9->r_element(2));  // x^2 = -1 = 2
}

TEST_CASE("residue field axioms", "[core]") {
    auto R = make_ring(2, {1, 1, 0, 1}, {}, 8);  // F_8
    for (std::uint64_t a = 0; a < 8; ++a)
        for (std::uint64_t b = 0; b < 8; ++b) {
            const auto x = R->r_element(a);
            const auto y = R->r_element(b);
            CHECK(R->r_mul(x, y) == R->r_mul(y, x));
            CHECK(R->r_sub(R->r_add(x, y), y) == x);
            if (a != 0) CHECK(R->r_mul(x, R->r_inv(x)) == R->r_one());
        }
}

TEST_CASE("big-integer oracle, unramified case", "[core][oracle]") {
    // (Z/p^N)[x]/(u) computed with GMP against the library.
    struct Case {
        std::uint64_t p;
        std::vector<std::int64_t> u;
        int N;
    };
    const std::vector<Case> cases = {{3, {1, 0, 1}, 20}, {2, {1, 1, 0, 1}, 40}, {5, {0, 1}, 24}, {7, {1, 0, 1}, 15}};
    std::mt19937_64 rng(2024);
    int samples = 0;
    for (const auto& cs : cases) {
        auto R = make_ring(cs.p, cs.u, {}, cs.N);
        const int f = R->f();
        mpz_class mod;
        mpz_ui_pow_ui(mod.get_mpz_t(), cs.p, static_cast<unsigned long>(cs.N));
        auto reduce = [&](std::vector<mpz_class> v) {
            // monic u of degree f: x^f = -sum u_i x^i
            for (int k = static_cast<int>(v.size()) - 1; k >= f; --k) {
                for (int i = 0; i < f; ++i) v[static_cast<std::size_t>(k - f + i)] -= v[static_cast<std::size_t>(k)] * cs.u[static_cast<std::size_t>(i)];
                v[static_cast<std::size_t>(k)] = 0;
            }
            v.resize(static_cast<std::size_t>(f));
            for (auto& c : v) {
                c %= mod;
                if (c < 0) c += mod;
            }
            return v;
        };
        auto coords_of = [&](const KValue& x) {
            const Coords c = R->to_raw(x.elem());
            std::vector<mpz_class> v(static_cast<std::size_t>(f));
            for (int i = 0; i < f; ++i) {
                v[static_cast<std::size_t>(i)] = mpz_class(std::to_string(c[static_cast<std::size_t>(i)]));
                v[static_cast<std::size_t>(i)] %= mod;
            }
            return v;
        };
        for (int it = 0; it < 3000; ++it) {
            std::vector<mpz_class> a(static_cast<std::size_t>(f));
            std::vector<mpz_class> b(static_cast<std::size_t>(f));
            Coords ca{};
            Coords cb{};
            for (int i = 0; i < f; ++i) {
                const std::uint64_t x = rng() % R->modulus();
                const std::uint64_t y = rng() % R->modulus();
                ca[static_cast<std::size_t>(i)] = x;
                cb[static_cast<std::size_t>(i)] = y;
                a[static_cast<std::size_t>(i)] = mpz_class(std::to_string(x)) % mod;
                b[static_cast<std::size_t>(i)] = mpz_class(std::to_string(y)) % mod;
            }
            const KValue A = OKValue::from_raw(R, ca).as_k();
            const KValue B = OKValue::from_raw(R, cb).as_k();
            std::vector<mpz_class> sum(static_cast<std::size_t>(f));
            std::vector<mpz_class> dif(static_cast<std::size_t>(f));
            std::vector<mpz_class> prod(static_cast<std::size_t>(2 * f));
            for (int i = 0; i < f; ++i) {
                sum[static_cast<std::size_t>(i)] = a[static_cast<std::size_t>(i)] + b[static_cast<std::size_t>(i)];
                dif[static_cast<std::size_t>(i)] = a[static_cast<std::size_t>(i)] - b[static_cast<std::size_t>(i)];
                for (int j = 0; j < f; ++j) prod[static_cast<std::size_t>(i + j)] += a[static_cast<std::size_t>(i)] * b[static_cast<std::size_t>(j)];
            }
            const bool ok = coords_of(A + B) == reduce(sum) && coords_of(A - B) == reduce(dif) &&
                            coords_of(A * B) == reduce(prod);
            CHECK(ok);
            ++samples;
        }
    }
    CHECK(samples >= 10000);
}

TEST_CASE("element literals round-trip", "[core][literal]") {
    auto z3 = make_zp(3, 12);
    CHECK(parse_value(z3, "21") == K(z3, 7));
    CHECK(parse_value(z3, "#7") == K(z3, 7));
    CHECK(parse_value(z3, "-1") == K(z3, -1));
    CHECK(format_value(K(z3, -1)) == "-1");
    CHECK(format_value(K(z3, 9)) == "100");
    CHECK(parse_value(z3, "pi^2") == K(z3, 9));
    CHECK_THROWS_AS(parse_value(z3, "13"), UsageError);
    CHECK_THROWS_AS(parse_value(z3, "1+"), UsageError);

    std::mt19937_64 rng(5);
    for (auto R : {z3, F9(10), make_ring(3, {0, 1}, {-3, 0, 1}, 12), make_zp(2, 30)}) {
        for (int it = 0; it < 300; ++it) {
            Coords c{};
            for (int i = 0; i < R->dim(); ++i) c[static_cast<std::size_t>(i)] = rng() % R->modulus();
            Elem x = R->from_raw(c, 1 + static_cast<int>(rng() % static_cast<unsigned>(R->N())));
            if (rng() % 3 == 0) x = R->shift(x, -static_cast<int>(rng() % 3));
            const std::string s = format_elem(*R, x);
            const Elem y = parse_elem(*R, s);
            INFO(s);
            CHECK(y.prec == x.prec);
            CHECK(y.val == x.val);
            CHECK(R->equal(x, y));
            CHECK(format_elem(*R, y) == s);
        }
    }
}

TEST_CASE("ring descriptors", "[core]") {
    RingDescriptor d{3, {1, 0, 1}, {-3, 1}, 12};
    const std::string s = format_descriptor(d);
    CHECK(s == R"({"p":3,"unram_poly":[1,0,1],"eis_poly":[-3,1],"N":12})");
    CHECK(parse_descriptor(s) == d);
    auto R = make_ring(d);
    CHECK(parse_ring_tag(R->tag()) == R->descriptor());
    CHECK_THROWS_AS(parse_descriptor("{\"q\":3}"), UsageError);
    CHECK_THROWS_AS(require_same_ring(*make_zp(3, 10), *make_zp(3, 11)), UsageError);
}
