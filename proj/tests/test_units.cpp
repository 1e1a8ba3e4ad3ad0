#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "hasse/units.hpp"
#include "unit_oracle.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>

using namespace hasse;

namespace {

FundamentalUnit unit_for(long P, UnitBackend backend = UnitBackend::reduction, UnitBudget budget = {}) {
    FieldParams fp;
    fp.P = P;
    fp.p = P;
    return fundamental_unit(fp, backend, budget);
}

// Exact rational product of p/(p+1) over primes p <= bound.
Rational euler_product(long bound) {
    Rational r = 1;
    for (long p = 2; p <= bound; ++p) {
        if (is_small_prime(p)) r *= Rational(p, p + 1);
    }
    r.canonicalize();
    return r;
}

}  // namespace

TEST_CASE("units with known coefficients") {
    CHECK(unit_for(3).element == RingElement(4, 3, 2));
    CHECK(unit_for(5).element == RingElement(41, 24, 14));
    CHECK(unit_for(6).element == RingElement(109, 60, 33));
    CHECK(unit_for(7).element == RingElement(4, 2, 1));
    // printed representatives below 1 normalize to the computed unit
    for (auto [P, printed] : std::vector<std::pair<long, RingElement>>{{11, {1, 4, -2}}, {14, {1, 2, -1}}}) {
        CHECK(norm(printed, Int(P)) == 1);
        CHECK(real_compare(printed, RingElement::one(), Int(P)) < 0);
        CHECK(normalize_unit(printed, P) == unit_for(P).element);
    }
}

TEST_CASE("normalization picks the representative above 1") {
    const long P = 7;
    const Int d(P);
    RingElement e(4, 2, 1);
    RingElement inv = adjugate(e, d);
    CHECK(mul(e, inv, d) == RingElement::one());
    for (const auto& v : {e, RingElement(-e), inv, RingElement(-inv)}) CHECK(normalize_unit(v, P) == e);
    CHECK_THROWS_AS(normalize_unit(RingElement(2, 1, 0), P), std::invalid_argument);
}

TEST_CASE("reduction units pass the independent minimality oracle") {
    for (long P = 2; P <= 120; ++P) {
        if (is_perfect_cube(Int(P))) continue;
        FundamentalUnit u = unit_for(P);
        INFO("P = " << P);
        CHECK(oracle::is_fundamental(u.element, P));
        CHECK_FALSE(oracle::is_fundamental(mul(u.element, u.element, Int(P)), P));
    }
}

TEST_CASE("enumeration and reduction agree for P <= 50") {
    for (long P = 2; P <= 50; ++P) {
        if (is_perfect_cube(Int(P))) continue;
        INFO("P = " << P);
        CHECK(unit_for(P, UnitBackend::enumeration).element == unit_for(P).element);
    }
}

TEST_CASE("enumeration agrees with a plain coefficient box scan") {
    for (long P = 2; P <= 22; ++P) {
        if (is_perfect_cube(Int(P))) continue;
        INFO("P = " << P);
        CHECK(unit_for(P, UnitBackend::enumeration).element == oracle::box_scan_unit(P));
    }
}

TEST_CASE("budgets are enforced") {
    UnitBudget tiny;
    tiny.max_enumeration = 20;
    tiny.max_chain_steps = 1;
    try {
        unit_for(23, UnitBackend::enumeration, tiny);
        FAIL("expected budget_exhausted");
    } catch (const Error& e) {
        CHECK(e.code() == Errc::budget_exhausted);
    }
    try {
        unit_for(23, UnitBackend::reduction, tiny);
        FAIL("expected budget_exhausted");
    } catch (const Error& e) {
        CHECK(e.code() == Errc::budget_exhausted);
    }
    CHECK_THROWS_AS(unit_for(8), std::invalid_argument);
}

TEST_CASE("iota truth table") {
    const long p = 7;
    for (long b = 0; b < p; ++b) {
        for (long c = 0; c < p; ++c) {
            int expect = (b == 0 && c != 0) ? 2 : 1;
            CHECK(classify_iota(b, c) == expect);
        }
    }
    FundamentalUnit u3 = unit_for(3), u6 = unit_for(6), u7 = unit_for(7);
    CHECK(classify_iota(u3, 3) == 2);
    CHECK(u3.params.iota == 2);
    CHECK(classify_iota(u6, 3) == 1);
    CHECK(classify_iota(u7, 7) == 1);
}

TEST_CASE("beta = 0 mod p does not depend on the representative") {
    for (long p : {3L, 5L, 7L, 11L, 13L}) {
        for (long P : {p, 2 * p}) {
            if (excluded_mod9(P)) continue;
            const Int d(P);
            RingElement e = unit_for(P).element;
            bool zero = mod(e.b, p) == 0;
            for (const auto& v : {RingElement(-e), adjugate(e, d), mul(e, e, d)}) CHECK((mod(v.b, p) == 0) == zero);
        }
    }
}

TEST_CASE("AACM checks") {
    auto [a7, b7] = check_aacm(7);
    CHECK(a7.holds);
    CHECK(b7.holds);
    CHECK(a7.P == 7);
    CHECK(b7.P == 14);
    auto [a11, b11] = check_aacm(11);
    CHECK(a11.holds);
    CHECK(b11.holds);
    CHECK_THROWS_AS(check_aacm(3), std::invalid_argument);
    CHECK_THROWS_AS(check_aacm(9), std::invalid_argument);
    auto [a3, b3] = check_aacm(3, true);
    CHECK_FALSE(a3.holds);
    // the scan's reported unit for p = 3 reduces to 2 y^2 + 2, i.e. -eps^-1 = 2 - 3^(2/3)
    CHECK(reduce(-adjugate(a3.unit.element, Int(3)), Int(3)) == RingElement(2, 0, 2));
}

TEST_CASE("AACM scan") {
    CHECK(aacm_scan(2).primes_checked == 0);
    ScanOptions opt;
    opt.jobs = 4;
    AacmScanReport r = aacm_scan(100, opt);
    CHECK(r.exceptions.empty());
    CHECK(r.skipped.empty());
    CHECK(r.primes_checked == 23);  // odd primes 5 .. 97
    ScanOptions with3;
    with3.include_three = true;
    AacmScanReport r3 = aacm_scan(5, with3);
    std::vector<long> p_exceptions;
    for (const auto& e : r3.exceptions) {
        if (e.P == e.p) p_exceptions.push_back(e.p);
    }
    CHECK(p_exceptions == std::vector<long>{3});
    // sharded and serial scans agree
    ScanOptions serial;
    AacmScanReport rs = aacm_scan(100, serial);
    CHECK(rs.primes_checked == r.primes_checked);
    CHECK(rs.index_three == r.index_three);
}

TEST_CASE("unit cache round trip and validation") {
    auto path = std::filesystem::temp_directory_path() / "hasse_unit_cache_test.txt";
    std::filesystem::remove(path);
    {
        UnitCache cache(path.string());
        FieldParams fp;
        fp.p = 7;
        fp.P = 7;
        cached_unit(fp, &cache);
        fp.P = 14;
        cached_unit(fp, &cache);
        CHECK(cache.size() == 2);
    }
    {
        std::ofstream out(path, std::ios::app);
        out << "11 1 4 -2 1 1\n";       // a unit below 1
        out << "13 5 5 5 9 1\n";        // wrong norm
        out << "garbage\n";
    }
    UnitCache reloaded(path.string());
    CHECK(reloaded.size() == 2);
    CHECK(reloaded.rejected() == 3);
    REQUIRE(reloaded.get(7).has_value());
    CHECK(reloaded.get(7)->element == RingElement(4, 2, 1));
    std::filesystem::remove(path);
}

TEST_CASE("density enclosure") {
    DensityReport two = density_report(2);
    CHECK(two.prime_count == 1);
    // (2/3) * 6 / pi^2 with 9.8696044010893 < pi^2 < 9.8696044010894
    Rational pi2_lo(Int("98696044010893"), Int("10000000000000")), pi2_hi(Int("98696044010894"), Int("10000000000000"));
    pi2_lo.canonicalize();
    pi2_hi.canonicalize();
    CHECK(two.d_M.overlaps({Rational(4) / pi2_hi, Rational(4) / pi2_lo}));
    CHECK(std::fabs(two.d_M.approx() - (2.0 / 3.0) * 6.0 / (M_PI * M_PI)) < 1e-15);
    DensityReport ten = density_report(10);
    Rational prod = euler_product(10);
    CHECK(std::fabs(ten.d_M.approx() - prod.get_d() * 6.0 / (M_PI * M_PI)) < 1e-12);
    CHECK(ten.d_M.width() < Rational(1, 1000000000));
    CHECK_THROWS_AS(density_report(1), std::invalid_argument);
}
