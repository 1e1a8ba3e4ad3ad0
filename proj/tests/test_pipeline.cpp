#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "hasse/serialize.hpp"

#include <set>

using namespace hasse;

namespace {

GenerateOptions quick(bool reproduce = false) {
    GenerateOptions opt;
    opt.reproduce_section5 = reproduce;
    opt.verify.local_bound = 200;
    opt.verify.height = 60;
    return opt;
}

std::vector<std::pair<long, long>> pair_values(const Counterexample& r) {
    std::vector<std::pair<long, long>> out;
    for (const auto& f : r.pairs) out.emplace_back(f.b.get_si(), f.c.get_si());
    return out;
}

bool mentions(const std::vector<std::string>& lines, const std::string& text) {
    for (const auto& s : lines) {
        if (s.find(text) != std::string::npos) return true;
    }
    return false;
}

// Replaces m and rebuilds L and the form so that only the descent data is wrong.
Counterexample with_m(Counterexample r, long m) {
    r.m = m;
    r.L = pow(r.descent.l, static_cast<unsigned long>(m));
    r.form = build_curve(r.params, r.pair_list(), r.descent.l, m, r.n);
    return r;
}

}  // namespace

TEST_CASE("degree 7 worked example") {
    auto r = generate(7, 7, quick(true));
    CHECK(pair_values(r) == std::vector<std::pair<long, long>>{{1, 4}, {4, 1}});
    CHECK(r.descent.l == 262193);
    CHECK(r.m == 4);
    CHECK(r.params.P == 7);
    CHECK(r.params.iota == 1);
    CHECK(r.unit == RingElement(4, 2, 1));
    CHECK(r.L == pow(Int(262193), 4UL));
    CHECK(r.divergences.empty());
    CHECK(r.verification.overall);
    CHECK(emit(r, Format::latex) == "(X^3+7Y^3)(X^2+4XY+16Y^2)(16X^2+4XY+Y^2) = 262193^{4}Z^{7}");
    const auto s = emit(r, Format::summary);
    CHECK(s.find("p=7 n=7") != std::string::npos);
    CHECK(s.find("l=262193 m=4") != std::string::npos);
    CHECK(s.find('\n') == std::string::npos);
}

TEST_CASE("degree 9 worked example with the recomputed descent prime") {
    auto r = generate(3, 9, quick(true));
    CHECK(pair_values(r) == std::vector<std::pair<long, long>>{{1, 2}, {-2, 5}, {2, -1}});
    CHECK(r.params.iota == 2);
    CHECK(r.descent.l == 593);
    CHECK(r.m == 2);
    CHECK(r.verification.overall);
    CHECK(mentions(r.divergences, "printed l = 431, recomputed l = 593"));
    CHECK(mentions(r.divergences, "(8, -1), rejected: c is not -a mod 3"));
}

TEST_CASE("degree 11 worked example with the inconsistent pairs replaced") {
    auto r = generate(11, 11, quick(true));
    CHECK(r.verification.overall);
    CHECK(r.descent.l == 1000121);
    CHECK(r.m == 6);
    CHECK(r.pairs.size() == 4);
    CHECK(mentions(r.divergences, "pair (-1, 1)"));
    CHECK(mentions(r.divergences, "pair (67, -63)"));
    auto pv = pair_values(r);
    std::set<std::pair<long, long>> got(pv.begin(), pv.end());
    CHECK(got.count({-67, 166}));
    CHECK(got.count({-32, 135}));
    CHECK_FALSE(got.count({-1, 1}));
    CHECK_FALSE(got.count({67, -63}));
    for (const auto& f : r.pairs) CHECK(valid_form_prime(r.params, f.b, f.c, f.q));
}

TEST_CASE("argument errors") {
    try {
        generate(7, 9, quick());
        FAIL("expected degree_incompatible");
    } catch (const Error& e) {
        CHECK(e.code() == Errc::degree_incompatible);
    }
    CHECK_THROWS_AS(generate(7, 8, quick()), std::invalid_argument);
    CHECK_THROWS_AS(generate(7, 3, quick()), std::invalid_argument);
    CHECK_THROWS_AS(generate(9, 9, quick()), std::invalid_argument);
}

TEST_CASE("verify recomputes and rejects") {
    auto r = generate(7, 7, quick(true));
    VerifyOptions vo{100, 20, {}};
    CHECK(verify(r, vo).overall);

    auto bad_m = verify(with_m(r, 2), vo);
    CHECK_FALSE(bad_m.overall);
    CHECK(bad_m.form_ok);
    CHECK_FALSE(bad_m.descent.ok);
    CHECK(bad_m.descent.cert.delta_value == 0);
    CHECK(bad_m.descent.cert.delta_symbol == 0);
    CHECK_FALSE(bad_m.global.find(7)->pass);

    auto stale = r;
    stale.m = 2;
    auto stale_report = verify(stale, vo);
    CHECK_FALSE(stale_report.form_ok);
    CHECK(stale_report.failure().rfind("form:", 0) == 0);

    auto dup = r;
    dup.pairs[1] = dup.pairs[0];
    dup.form = build_curve(dup.params, dup.pair_list(), dup.descent.l, dup.m, dup.n);
    auto dup_report = verify(dup, vo);
    CHECK_FALSE(dup_report.nonsingular.ok);
    CHECK_FALSE(dup_report.overall);

    auto wrong_unit = r;
    wrong_unit.unit = RingElement(1, 0, 0);
    CHECK_FALSE(verify(wrong_unit, vo).unit_ok);
    CHECK(verify(r, vo).global.find(8)->pass);
}

TEST_CASE("generation is deterministic") {
    for (auto [p, n] : std::vector<std::pair<long, int>>{{7, 7}, {5, 5}, {13, 13}}) {
        auto a = generate(p, n, quick());
        auto b = generate(p, n, quick());
        CHECK(emit(a, Format::json) == emit(b, Format::json));
        CHECK(a.verification.overall);
    }
}

TEST_CASE("JSON round trip") {
    for (auto [p, n] : std::vector<std::pair<long, int>>{{7, 7}, {3, 9}, {11, 11}}) {
        auto r = generate(p, n, quick(true));
        const auto text = emit(r, Format::json);
        auto back = parse_record(text);
        CHECK(emit(back, Format::json) == text);
        CHECK(back.params == r.params);
        CHECK(back.unit == r.unit);
        CHECK(back.descent.l == r.descent.l);
        CHECK(back.form.terms == r.form.terms);
        CHECK(back.form.provenance == r.form.provenance);
        CHECK(back.divergences == r.divergences);
        CHECK(verify(back, {100, 20, {}}).overall);
    }
    CHECK_THROWS(parse_record("{\"params\": {}}"));
    CHECK_THROWS(parse_record("not json"));
}

TEST_CASE("several counterexamples use disjoint pairs") {
    auto opt = quick();
    opt.count = 3;
    auto rs = generate_all(7, 7, opt);
    REQUIRE(rs.size() == 3);
    std::set<std::pair<long, long>> seen;
    for (const auto& r : rs) {
        CHECK(r.verification.overall);
        for (auto bc : pair_values(r)) CHECK(seen.insert(bc).second);
    }
}

TEST_CASE("l^m = 1 mod 3 and mod p, and l exceeds every coefficient") {
    for (auto [p, n] : std::vector<std::pair<long, int>>{{5, 5}, {7, 7}, {13, 13}, {5, 15}, {3, 9}, {11, 11}, {17, 17}}) {
        auto r = generate(p, n, quick());
        INFO("p=" << p << " n=" << n);
        CHECK(r.verification.overall);
        CHECK(powmod(r.descent.l, Int(r.m), Int(3)) == 1);
        CHECK(powmod(r.descent.l, Int(r.m), Int(p)) == 1);
        CHECK(r.m % 2 == 0);
        CHECK(static_cast<long>(r.pairs.size()) == (n - 3) / 2);
        for (const auto& f : r.pairs) {
            CHECK(r.descent.l > abs(f.b));
            CHECK(r.descent.l > abs(f.c));
        }
    }
}

TEST_CASE("preferring 2p") {
    GenerateOptions opt = quick();
    opt.preference = Preference::prefer_2p;
    auto r = generate(7, 7, opt);
    CHECK(r.params.P == 14);
    CHECK(r.verification.overall);
    for (const auto& f : r.pairs) CHECK(mod(f.b, 2L) == 1);
}
