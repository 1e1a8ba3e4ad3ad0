#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "hasse/forms.hpp"

#include <random>

using namespace hasse;

namespace {

FieldParams params(long P, int iota) {
    FieldParams fp;
    fp.P = P;
    fp.p = P;
    fp.iota = iota;
    return fp;
}

TernaryForm random_form(std::mt19937_64& rng, int degree) {
    std::uniform_int_distribution<long> coef(-50, 50);
    std::vector<Term> terms;
    for (int i = 0; i <= degree; ++i) {
        for (int j = 0; i + j <= degree; ++j) {
            if (rng() % 3 == 0) continue;
            terms.push_back({i, j, degree - i - j, Int(coef(rng))});
        }
    }
    return make_form(degree, terms);
}

// lc * prod (t - r), lowest degree first.
Poly from_roots(long lc, const std::vector<long>& roots) {
    Poly p{Int(lc)};
    for (long r : roots) p = poly_mul(p, Poly{Int(-r), Int(1)});
    return p;
}

}  // namespace

TEST_CASE("make_form merges, drops zeros and validates degrees") {
    auto f = make_form(3, {{3, 0, 0, Int(2)}, {0, 3, 0, Int(1)}, {3, 0, 0, Int(1)}, {0, 0, 3, Int(4)}, {0, 0, 3, Int(-4)}});
    REQUIRE(f.terms.size() == 2);
    CHECK(f.terms[0] == Term{3, 0, 0, Int(3)});
    CHECK(f.terms[1] == Term{0, 3, 0, Int(1)});
    CHECK_THROWS_AS(make_form(3, {{2, 0, 0, Int(1)}}), std::invalid_argument);
    CHECK_THROWS_AS(make_form(3, {{4, -1, 0, Int(1)}}), std::invalid_argument);
}

TEST_CASE("Euler identity on random forms") {
    std::mt19937_64 rng(5150);
    std::uniform_int_distribution<long> coord(-30, 30);
    for (int trial = 0; trial < 200; ++trial) {
        const int n = 3 + static_cast<int>(rng() % 8);
        TernaryForm f = random_form(rng, n);
        Point pt{Int(coord(rng)), Int(coord(rng)), Int(coord(rng))};
        auto e = eval_with_gradient(f, pt);
        CHECK(e.value == evaluate(f, pt));
        CHECK(pt[0] * e.gradient[0] + pt[1] * e.gradient[1] + pt[2] * e.gradient[2] == n * e.value);
        // homogeneity: F(2x) = 2^n F(x)
        Point twice{2 * pt[0], 2 * pt[1], 2 * pt[2]};
        CHECK(evaluate(f, twice) == pow(Int(2), static_cast<unsigned long>(n)) * e.value);
        auto r = eval_with_gradient(f, pt, Int(97));
        CHECK(r.value == mod(e.value, Int(97)));
        for (int v = 0; v < 3; ++v) CHECK(r.gradient[v] == mod(e.gradient[v], Int(97)));
    }
}

TEST_CASE("expanded curves agree with their factorization") {
    std::mt19937_64 rng(4242);
    std::uniform_int_distribution<long> small(-40, 40);
    std::uniform_int_distribution<long> coord(-10000, 10000);
    for (int trial = 0; trial < 40; ++trial) {
        const int n = 5 + 2 * static_cast<int>(rng() % 5);
        std::vector<Pair> pairs;
        for (int j = 0; j < (n - 3) / 2; ++j) pairs.emplace_back(Int(small(rng)), Int(small(rng)));
        FieldParams fp = params(rng() % 2 ? 7 : 5, 1);
        TernaryForm f = build_curve(fp, pairs, Int(1 + rng() % 1000), 2, n);
        CHECK(f.degree == n);
        REQUIRE(f.provenance);
        for (int i = 0; i < 20; ++i) {
            Point pt{Int(coord(rng)), Int(coord(rng)), Int(coord(rng))};
            CHECK(evaluate(f, pt) == evaluate_factored(*f.provenance, pt));
        }
    }
}

TEST_CASE("curve shape checks") {
    auto fp = params(7, 1);
    std::vector<Pair> one{{Int(1), Int(4)}};
    CHECK_THROWS_AS(build_curve(fp, one, Int(262193), 4, 6), std::invalid_argument);
    CHECK_THROWS_AS(build_curve(fp, one, Int(262193), 4, 3), std::invalid_argument);
    try {
        build_curve(fp, one, Int(262193), 4, 7);
        FAIL("expected arity_mismatch");
    } catch (const Error& e) {
        CHECK(e.code() == Errc::arity_mismatch);
    }
    auto unclassified = fp;
    unclassified.iota = 0;
    CHECK_THROWS_AS(build_curve(unclassified, one, Int(17), 1, 5), std::invalid_argument);
}

TEST_CASE("resultant agrees with the product of root differences") {
    std::mt19937_64 rng(99);
    std::uniform_int_distribution<long> root(-9, 9);
    std::uniform_int_distribution<long> lead(1, 4);
    for (int trial = 0; trial < 200; ++trial) {
        std::vector<long> rf(1 + rng() % 5), rg(1 + rng() % 5);
        for (auto& r : rf) r = root(rng);
        for (auto& r : rg) r = root(rng);
        const long a = lead(rng) * (rng() % 2 ? 1 : -1), b = lead(rng);
        // Res(f, g) = a^deg g * b^deg f * prod (r_i - s_j)
        Int expected = pow(Int(a), rg.size()) * pow(Int(b), rf.size());
        for (long x : rf) {
            for (long y : rg) expected *= x - y;
        }
        CHECK(resultant(from_roots(a, rf), from_roots(b, rg)) == expected);
    }
}

TEST_CASE("non-singularity") {
    const Int L(1000);
    CHECK(check_nonsingular(Int(7), {{Int(1), Int(4)}, {Int(4), Int(1)}}, L).ok);
    CHECK_FALSE(check_nonsingular(Int(7), {{Int(1), Int(4)}, {Int(4), Int(1)}}, Int(0)).ok);

    auto dup = check_nonsingular(Int(7), {{Int(1), Int(4)}, {Int(1), Int(4)}}, L);
    CHECK_FALSE(dup.ok);
    CHECK(dup.witness.find("projectively equal") != std::string::npos);
    CHECK_FALSE(check_nonsingular(Int(7), {{Int(1), Int(4)}, {Int(-2), Int(-8)}}, L).ok);
    CHECK_FALSE(check_nonsingular(Int(7), {{Int(0), Int(4)}}, L).ok);
    CHECK_FALSE(check_nonsingular(Int(7), {{Int(3), Int(0)}}, L).ok);
    // c^3 = -D b^3 puts a root of the quadratic factor on the cubic factor
    auto shared = check_nonsingular(Int(8), {{Int(1), Int(-2)}}, L);
    CHECK_FALSE(shared.ok);
    CHECK(shared.witness.find("cubic") != std::string::npos);

    // The factor-by-factor test agrees with the discriminant resultant of G.
    std::mt19937_64 rng(31337);
    std::uniform_int_distribution<long> small(-4, 4);
    int singular = 0;
    for (int trial = 0; trial < 400; ++trial) {
        const Int D = rng() % 2 ? Int(7) : Int(8);
        std::vector<Pair> pairs;
        const int k = 1 + static_cast<int>(rng() % 3);
        for (int j = 0; j < k; ++j) pairs.emplace_back(Int(small(rng)), Int(small(rng)));
        bool all_nonzero = true;
        for (const auto& [b, c] : pairs) all_nonzero = all_nonzero && b != 0;
        if (!all_nonzero) continue;  // G then loses its X-leading term
        const bool ok = check_nonsingular(D, pairs, L).ok;
        singular += !ok;
        CHECK(ok == (binary_discriminant_resultant(D, pairs) != 0));
    }
    CHECK(singular > 20);
}

TEST_CASE("LaTeX rendering") {
    auto fp = params(7, 1);
    auto f = build_curve(fp, {{Int(1), Int(4)}, {Int(4), Int(1)}}, Int(262193), 4, 7);
    CHECK(render_latex(f) == "(X^3+7Y^3)(X^2+4XY+16Y^2)(16X^2+4XY+Y^2) = 262193^{4}Z^{7}");
    auto g = build_curve(params(11, 1), {{Int(-1), Int(34)}, {Int(34), Int(-63)}, {Int(-67), Int(166)}, {Int(-32), Int(135)}},
                         Int(1000121), 6, 11);
    CHECK(render_latex(g).find("(X^2-34XY+1156Y^2)") != std::string::npos);
    CHECK(render_latex(g).find(" = 1000121^{6}Z^{11}") != std::string::npos);
    CHECK(render_latex(selmer_form()) == "3X^3+4Y^3-5Z^3 = 0");
    CHECK(render_latex(fujiwara_form()) == "(X^3+5Y^3)(X^2+XY+Y^2) = 17Z^{5}");
}

TEST_CASE("named forms") {
    auto s = selmer_form();
    CHECK(evaluate(s, {Int(1), Int(1), Int(1)}) == 2);
    CHECK(separable_z_coefficient(s) == Int(-5));

    auto f = fujiwara_form();
    CHECK(f.degree == 5);
    CHECK(separable_z_coefficient(f) == Int(-17));
    // (X^3 + 5Y^3)(X^2 + XY + Y^2) - 17Z^5 at (1, 1, 1) is 6 * 3 - 17
    CHECK(evaluate(f, {Int(1), Int(1), Int(1)}) == 1);

    auto v = fujiwara_variant_form();
    CHECK_FALSE(separable_z_coefficient(v));
    CHECK(evaluate(v, {Int(0), Int(1), Int(0)}) == 0);
    auto e = eval_with_gradient(v, {Int(0), Int(1), Int(0)});
    // the printed equation has this rational point, and it is singular
    CHECK((e.gradient[0] == 0 && e.gradient[1] == 0 && e.gradient[2] == 0));
    for (long x = -5; x <= 5; ++x) {
        for (long y = -5; y <= 5; ++y) {
            for (long z = -5; z <= 5; ++z) {
                Int X(x), Y(y), Z(z);
                Int direct = (X * X * X + 5 * Z * Z * Z) * (X * X + X * Y + Y * Y) - 17 * pow(Z, 5UL);
                CHECK(evaluate(v, {X, Y, Z}) == direct);
            }
        }
    }
}
