#pragma once

// End-to-end construction and verification of counterexamples of odd degree n:
// (X^3 + P^iota Y^3) prod_j (b_j^2 X^2 + b_j c_j XY + c_j^2 Y^2) = l^m Z^n.

#include "hasse/descent.hpp"
#include "hasse/error.hpp"
#include "hasse/forms.hpp"
#include "hasse/integer.hpp"
#include "hasse/primes.hpp"
#include "hasse/ring.hpp"
#include "hasse/solubility.hpp"
#include "hasse/units.hpp"

#include <algorithm>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace hasse {

struct VerifyOptions {
    long local_bound = 1000;
    long height = 1000;  // 0 skips the point search
    LocalOptions local;
};

struct VerificationReport {
    bool unit_ok = false;
    std::string unit_detail;
    bool form_ok = false;
    std::string form_detail;
    ConditionReport local;   // the three local congruence hypotheses
    ConditionReport global;  // conditions 1-7
    NonsingularReport nonsingular;
    DescentCheck descent;
    long local_bound = 0;
    LocalSweep certificates;
    Coverage coverage;
    bool real_ok = false;
    std::optional<LocalCertificate> real;
    bool points_ok = false;
    PointSearchResult points;
    bool overall = false;

    /// First failing component, empty when everything passes.
    std::string failure() const {
        if (!unit_ok) return "unit: " + unit_detail;
        if (!form_ok) return "form: " + form_detail;
        for (const auto& it : global.items) {
            if (!it.pass) return "condition " + std::to_string(it.index) + ": " + it.detail;
        }
        if (!local.pass) return "local congruence hypotheses";
        if (!nonsingular.ok) return "singular: " + nonsingular.witness;
        if (!descent.ok) return "descent: " + descent.reason;
        if (!certificates.ok()) return "no local certificate at l = " + std::to_string(certificates.failures.front());
        if (!coverage.ok) return "coverage: " + coverage.failure;
        if (!real_ok) return "no real point";
        if (!points_ok) return "rational point found";
        return {};
    }
};

struct Counterexample {
    FieldParams params;
    int n = 0;
    RingElement unit;
    std::vector<FormPrime> pairs;
    DescentCandidate descent;
    long m = 0;
    Int L;
    TernaryForm form;
    VerificationReport verification;
    std::vector<std::string> divergences;  // differences from a pinned fixture

    std::vector<Pair> pair_list() const {
        std::vector<Pair> out;
        for (const auto& fp : pairs) out.emplace_back(fp.b, fp.c);
        return out;
    }
};

struct GenerateOptions {
    Preference preference = Preference::prefer_p;
    int count = 1;
    Int min_l = 0;
    bool reproduce_section5 = false;
    VerifyOptions verify;
    long max_points = 4'000'000;
    int descent_shells = 10;
    UnitCache* cache = nullptr;
};

/// Worked-example data as printed; pinned entries are re-verified before use.
struct Section5Fixture {
    long p;
    int n;
    std::vector<Pair> pairs;
    Int a, c;
    Int printed_l;
    long printed_m;
};

inline const std::vector<Section5Fixture>& section5_fixtures() {
    static const std::vector<Section5Fixture> fixtures{
        {7, 7, {{Int(1), Int(4)}, {Int(4), Int(1)}}, Int(64), Int(1), Int(262193), 4},
        {3, 9, {{Int(1), Int(2)}, {Int(-2), Int(5)}, {Int(2), Int(-1)}}, Int(8), Int(1), Int(431), 2},
        {11,
         11,
         {{Int(-1), Int(1)}, {Int(67), Int(-63)}, {Int(-67), Int(166)}, {Int(-32), Int(135)}},
         Int(100),
         Int(1),
         Int(1000121),
         6},
    };
    return fixtures;
}

inline const Section5Fixture* find_section5_fixture(long p, int n) {
    for (const auto& f : section5_fixtures()) {
        if (f.p == p && f.n == n) return &f;
    }
    return nullptr;
}

namespace detail {

inline std::string pair_str(const Int& b, const Int& c) { return "(" + b.get_str() + ", " + c.get_str() + ")"; }

// Per-pair requirements that do not depend on the rest of the tuple.
inline bool pair_admissible(const FieldParams& fp, const FormPrime& f) {
    if (f.b == 0 || f.c == 0) return false;
    if (divisible(f.b, Int(3))) return false;
    if (fp.P % 2 == 0 && divisible(f.b, Int(2))) return false;
    return fp.p % 3 != 2 || !divisible(f.b, Int(fp.p));
}

// Tuple requirements: distinct primes, non-singularity and the two inverse-sum filters.
inline bool tuple_admissible(const FieldParams& fp, const std::vector<FormPrime>& t) {
    std::vector<Pair> pairs;
    std::set<Int> qs;
    for (const auto& f : t) {
        pairs.emplace_back(f.b, f.c);
        if (!qs.insert(f.q).second) return false;
    }
    auto s3 = inverse_sum(pairs, 3);
    if (!s3 || *s3 == 0) return false;
    if (fp.p % 3 == 2) {
        auto sp = inverse_sum(pairs, fp.p);
        if (!sp || *sp == 0) return false;
        if (product_b_squared(pairs, fp.p) != 1) return false;
    }
    return check_nonsingular(fp, pairs, Int(1)).ok;
}

// Lexicographically smallest index set of size `need` among pool[0..last] that contains
// `last`, such that fixed + chosen is admissible.
inline std::optional<std::vector<std::size_t>> combination_with(const FieldParams& fp,
                                                                const std::vector<FormPrime>& fixed,
                                                                const std::vector<FormPrime>& pool, std::size_t need) {
    if (need == 0) return std::nullopt;
    const std::size_t last = pool.size() - 1;
    std::vector<std::size_t> idx;
    std::optional<std::vector<std::size_t>> found;
    auto rec = [&](auto&& self, std::size_t start) -> void {
        if (found) return;
        if (idx.size() == need - 1) {
            std::vector<FormPrime> t = fixed;
            for (auto i : idx) t.push_back(pool[i]);
            t.push_back(pool[last]);
            if (tuple_admissible(fp, t)) {
                found = idx;
                found->push_back(last);
            }
            return;
        }
        for (std::size_t i = start; i < last && !found; ++i) {
            idx.push_back(i);
            self(self, i + 1);
            idx.pop_back();
        }
    };
    rec(rec, 0);
    return found;
}

}  // namespace detail

/// Completes `fixed` to `count` coefficient pairs from the spiral-ordered stream, taking the
/// first prefix that admits a valid tuple. Pairs in `excluded` are skipped.
inline std::vector<FormPrime> select_pairs(const FieldParams& fp, std::size_t count, PairTemplate tmpl,
                                           const std::vector<FormPrime>& fixed,
                                           const std::vector<std::pair<Int, Int>>& excluded, long max_points) {
    if (fixed.size() > count) throw std::invalid_argument("select_pairs: too many fixed pairs");
    if (fixed.size() == count) {
        if (!detail::tuple_admissible(fp, fixed)) throw Error(Errc::search_exhausted, "fixed pairs are not admissible");
        return fixed;
    }
    PairStream stream(fp, tmpl, max_points);
    std::vector<FormPrime> pool;
    const std::size_t need = count - fixed.size();
    for (;;) {
        FormPrime f = stream.next();
        if (!detail::pair_admissible(fp, f)) continue;
        bool skip = false;
        for (const auto& e : excluded) skip = skip || (e.first == f.b && e.second == f.c);
        for (const auto& g : fixed) skip = skip || g.same_pair(f);
        if (skip) continue;
        pool.push_back(f);
        if (pool.size() < need) continue;
        if (auto idx = detail::combination_with(fp, fixed, pool, need)) {
            std::vector<FormPrime> out = fixed;
            for (auto i : *idx) out.push_back(pool[i]);
            std::sort(out.begin(), out.end(), [](const FormPrime& x, const FormPrime& y) { return x.q < y.q; });
            return out;
        }
    }
}

/// First descent candidate above `min_l` whose certificate goes through.
inline std::pair<DescentCandidate, DescentCertificate> select_descent(const FieldParams& fp, const FundamentalUnit& u,
                                                                      const Int& min_l, int max_shells) {
    DescentStream stream(fp, min_l, max_shells);
    for (;;) {
        DescentCandidate cand = stream.next();
        try {
            return {cand, certify_descent(fp, u, cand)};
        } catch (const Error& e) {
            if (e.code() == Errc::oracle_mismatch) throw;
        }
    }
}

/// Recomputes every checkable condition from the record's raw integers.
inline VerificationReport verify(const Counterexample& r, const VerifyOptions& opt = {}) {
    VerificationReport v;
    v.local_bound = opt.local_bound;
    const FieldParams& fp = r.params;
    const std::vector<Pair> pairs = r.pair_list();

    std::optional<FundamentalUnit> unit;
    try {
        if (!is_small_prime(fp.p) || fp.p < 3 || (fp.P != fp.p && fp.P != 2 * fp.p)) {
            throw std::invalid_argument("P must be p or 2p for an odd prime p");
        }
        if (excluded_mod9(fp.P)) throw std::invalid_argument("P = +-1 mod 9");
        FieldParams base = fp;
        base.iota = 0;
        unit = fundamental_unit(base, UnitBackend::reduction);
        int iota = classify_iota(*unit, fp.p);
        unit->params.iota = iota;
        v.unit_ok = unit->element == r.unit && iota == fp.iota;
        v.unit_detail = v.unit_ok ? "unit " + unit->element.to_string() + ", iota " + std::to_string(iota)
                                  : "recomputed unit " + unit->element.to_string() + " with iota " +
                                        std::to_string(iota) + " differs from the record";
    } catch (const std::exception& e) {
        v.unit_detail = e.what();
    }

    try {
        TernaryForm rebuilt = build_curve(fp, pairs, r.descent.l, r.m, r.n);
        v.form_ok = rebuilt.terms == r.form.terms && r.form.degree == r.n && r.L == rebuilt.provenance->L;
        v.form_detail = v.form_ok ? "form matches its factorization" : "stored form or L differs from the factorization";
        if (r.n % (fp.iota == 1 ? fp.p : fp.p * fp.p) != 0) {
            v.form_ok = false;
            v.form_detail = "p^iota does not divide n";
        }
    } catch (const std::exception& e) {
        v.form_detail = e.what();
    }

    if (unit) {
        v.descent = check_descent(fp, *unit, r.descent, r.m);
    } else {
        v.descent.reason = "no unit";
    }
    v.local = check_local_conditions(fp, pairs, r.L);
    v.global = check_global_conditions(fp, pairs, r.L, r.n, v.descent, {r.descent.l});
    // l must exceed p and every |b_j|, |c_j|
    {
        bool ok = r.descent.l > fp.p;
        for (const auto& [b, c] : pairs) ok = ok && r.descent.l > abs(b) && r.descent.l > abs(c);
        v.global.add(8, true, ok, ok ? "l exceeds p and every |b_j|, |c_j|" : "l is too small");
    }
    v.nonsingular = check_nonsingular(fp, pairs, r.L);

    if (v.form_ok) {
        v.certificates = certify_primes_up_to(r.form, opt.local_bound, opt.local);
        v.coverage = structural_coverage(r.form, opt.local_bound, opt.local);
        try {
            v.real = real_witness(r.form);
            v.real_ok = validate_certificate(r.form, *v.real);
        } catch (const Error&) {
            v.real_ok = false;
        }
        if (opt.height > 0) {
            v.points = point_search(r.form, opt.height);
            v.points_ok = !v.points.point.has_value();
        } else {
            v.points_ok = true;
        }
    }
    v.overall = v.unit_ok && v.form_ok && v.local.pass && v.global.pass && v.nonsingular.ok && v.descent.ok &&
                v.certificates.ok() && v.coverage.ok && v.real_ok && v.points_ok;
    return v;
}

namespace detail {

inline Counterexample assemble(const FieldParams& fp, int n, const FundamentalUnit& u, std::vector<FormPrime> pairs,
                               const DescentCandidate& cand, long m) {
    Counterexample r;
    r.params = fp;
    r.n = n;
    r.unit = u.element;
    r.pairs = std::move(pairs);
    r.descent = cand;
    r.m = m;
    r.L = pow(cand.l, static_cast<unsigned long>(m));
    r.form = build_curve(fp, r.pair_list(), cand.l, m, n);
    return r;
}

inline Int pair_bound(const FieldParams& fp, const std::vector<FormPrime>& pairs) {
    Int mx = fp.p;
    for (const auto& f : pairs) mx = std::max({mx, Int(abs(f.b)), Int(abs(f.c))});
    return mx + 1;
}

}  // namespace detail

/// Field parameters with classified iota, and the unit; throws degree_incompatible when
/// p^iota does not divide n.
inline std::pair<FieldParams, FundamentalUnit> prepare(long p, int n, const GenerateOptions& opt) {
    if (n < 5 || n % 2 == 0) throw std::invalid_argument("n must be odd and at least 5");
    FieldParams fp = make_field_params(p, opt.preference);
    FundamentalUnit u = opt.cache ? cached_unit(fp, opt.cache) : fundamental_unit(fp, UnitBackend::reduction);
    fp.iota = classify_iota(u, p);
    u.params = fp;
    const long pi = fp.iota == 1 ? p : p * p;
    if (n % pi != 0) {
        throw Error(Errc::degree_incompatible, "p^iota = " + std::to_string(pi) + " does not divide n = " +
                                                   std::to_string(n) + " (iota = " + std::to_string(fp.iota) + ")");
    }
    return {fp, u};
}

/// Up to `count` verified counterexamples with pairwise disjoint pair tuples.
inline std::vector<Counterexample> generate_all(long p, int n, const GenerateOptions& opt = {}) {
    auto [fp, u] = prepare(p, n, opt);
    const std::size_t k = static_cast<std::size_t>((n - 3) / 2);
    const PairTemplate tmpl = opt.reproduce_section5 ? PairTemplate::section5 : PairTemplate::paper;
    std::vector<Counterexample> out;
    std::vector<std::pair<Int, Int>> used;
    for (int i = 0; i < std::max(1, opt.count); ++i) {
        std::vector<std::string> divergences;
        std::vector<FormPrime> fixed;
        std::optional<DescentCandidate> pinned;
        const Section5Fixture* fx = opt.reproduce_section5 && i == 0 ? find_section5_fixture(p, n) : nullptr;
        if (fx) {
            for (const auto& [b, c] : fx->pairs) {
                Int q = pair_value(fp, b, c);
                FormPrime f{b, c, q, 0, 0, 0};
                if (!valid_form_prime(fp, b, c, q)) {
                    divergences.push_back("pair " + detail::pair_str(b, c) + ": P^iota b^3 + c^3 = " + q.get_str() +
                                          " is not a prime = 2 mod 3; replaced by search");
                } else if (!detail::pair_admissible(fp, f)) {
                    divergences.push_back("pair " + detail::pair_str(b, c) + " fails the congruence filters; replaced by search");
                } else {
                    fixed.push_back(f);
                }
            }
            if (!detail::tuple_admissible(fp, fixed) && !fixed.empty() && fixed.size() == k) {
                divergences.push_back("pinned pair tuple fails the inverse-sum filters; searching instead");
                fixed.clear();
            }
        }
        std::vector<FormPrime> pairs = select_pairs(fp, k, tmpl, fixed, used, opt.max_points);
        Int min_l = std::max(detail::pair_bound(fp, pairs), opt.min_l);

        std::optional<std::pair<DescentCandidate, DescentCertificate>> chosen;
        if (fx) {
            DescentCandidate cand{fx->a, fx->c, descent_value(fp, fx->a, fx->c), 0, 0};
            if (cand.l != fx->printed_l) {
                std::string d = "descent (a, c) = " + detail::pair_str(fx->a, fx->c) + ": printed l = " +
                                fx->printed_l.get_str() + ", recomputed l = " + cand.l.get_str();
                // which c would give the printed value, and is that admissible
                Int D2 = fp.Piota() * fp.Piota();
                Int rest = fx->printed_l - fx->a * fx->a * fx->a;
                if (divisible(rest, D2)) {
                    if (auto c2 = exact_root(exact_div(rest, D2), 3)) {
                        std::string why = descent_candidate_defect(fp, fx->a, *c2, fx->printed_l);
                        d += "; the printed value is (a, c) = " + detail::pair_str(fx->a, *c2) +
                             (why.empty() ? std::string(", which is admissible") : ", rejected: " + why);
                    }
                }
                divergences.push_back(d);
            }
            std::string defect = descent_candidate_defect(fp, cand.a, cand.c, cand.l);
            if (!defect.empty() || cand.l < min_l) {
                divergences.push_back("pinned descent prime rejected (" +
                                      (defect.empty() ? std::string("l too small") : defect) + "); searching instead");
            } else {
                try {
                    chosen.emplace(cand, certify_descent(fp, u, cand));
                } catch (const Error& e) {
                    if (e.code() == Errc::oracle_mismatch) throw;
                    divergences.push_back(std::string("pinned descent prime fails certification: ") + e.what());
                }
            }
            if (chosen && chosen->second.m != fx->printed_m) {
                divergences.push_back("printed m = " + std::to_string(fx->printed_m) +
                                      ", computed m = " + std::to_string(chosen->second.m));
            }
        }
        if (!chosen) chosen = select_descent(fp, u, min_l, opt.descent_shells);

        Counterexample r = detail::assemble(fp, n, u, pairs, chosen->first, chosen->second.m);
        r.divergences = std::move(divergences);
        r.verification = verify(r, opt.verify);
        if (!r.verification.overall) {
            throw Error(Errc::verification_failed, "generated record failed verification: " + r.verification.failure());
        }
        for (const auto& f : r.pairs) used.emplace_back(f.b, f.c);
        out.push_back(std::move(r));
    }
    return out;
}

inline Counterexample generate(long p, int n, const GenerateOptions& opt = {}) {
    GenerateOptions one = opt;
    one.count = 1;
    return generate_all(p, n, one).front();
}

}  // namespace hasse
