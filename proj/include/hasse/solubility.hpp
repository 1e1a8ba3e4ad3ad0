#pragma once

// Local solubility certificates, the global-unsolubility preconditions and bounded-height
// point search.

#include "hasse/descent.hpp"
#include "hasse/error.hpp"
#include "hasse/forms.hpp"
#include "hasse/integer.hpp"
#include "hasse/primes.hpp"
#include "hasse/ring.hpp"

#include <algorithm>
#include <array>
#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace hasse {

struct ConditionItem {
    int index = 0;
    bool applicable = true;
    bool pass = false;
    std::string detail;
};

struct ConditionReport {
    std::vector<ConditionItem> items;
    bool pass = true;

    void add(int index, bool applicable, bool ok, std::string detail) {
        items.push_back({index, applicable, !applicable || ok, std::move(detail)});
        if (applicable && !ok) pass = false;
    }

    const ConditionItem* find(int index) const {
        for (const auto& it : items) {
            if (it.index == index) return &it;
        }
        return nullptr;
    }
};

namespace detail {

inline long odd_prime_of(long P) { return P % 2 == 0 ? P / 2 : P; }

// Sum of b^-1 c mod r, or nullopt if some b is not invertible.
inline std::optional<long> inverse_sum(const std::vector<Pair>& pairs, long r) {
    long s = 0;
    for (const auto& [b, c] : pairs) {
        auto inv = inverse_mod(b, Int(r));
        if (!inv) return std::nullopt;
        s = (s + mod(Int(*inv * c), r)) % r;
    }
    return s;
}

inline long product_b_squared(const std::vector<Pair>& pairs, long r) {
    Int prod = 1;
    for (const auto& [b, c] : pairs) prod = mod(Int(prod * b * b), Int(r));
    return prod.get_si();
}

// L = prod b_j^2 != 0 mod r and sum b_j^-1 c_j != 0 mod r.
inline std::pair<bool, std::string> congruence_pair(const std::vector<Pair>& pairs, const Int& L, long r) {
    long Lr = mod(L, r);
    long pb = product_b_squared(pairs, r);
    auto s = inverse_sum(pairs, r);
    std::string d = "L = " + std::to_string(Lr) + ", prod b^2 = " + std::to_string(pb) + ", sum b^-1 c = " +
                    (s ? std::to_string(*s) : std::string("undefined")) + " (mod " + std::to_string(r) + ")";
    return {Lr == pb && pb != 0 && s && *s != 0, d};
}

}  // namespace detail

/// The three congruence hypotheses of local solubility (numbered 1-3).
inline ConditionReport check_local_conditions(const FieldParams& fp, const std::vector<Pair>& pairs, const Int& L) {
    ConditionReport r;
    {
        bool applicable = fp.P % 2 == 0;
        long pb = detail::product_b_squared(pairs, 2);
        long Lr = mod(L, 2L);
        r.add(1, applicable, Lr == 1 && pb == 1,
              "L = " + std::to_string(Lr) + ", prod b^2 = " + std::to_string(pb) + " (mod 2)");
    }
    {
        auto [ok, d] = detail::congruence_pair(pairs, L, 3);
        r.add(2, !excluded_mod9(fp.P), ok, d);
    }
    {
        auto [ok, d] = detail::congruence_pair(pairs, L, fp.p);
        r.add(3, fp.p % 3 == 2, ok, d);
    }
    return r;
}

/// Factors L using the supplied primes first, then trial division; nullopt if a composite
/// cofactor remains.
inline std::optional<std::vector<std::pair<Int, int>>> factor_with_hints(Int L, const std::vector<Int>& hints) {
    std::vector<std::pair<Int, int>> out;
    L = abs(L);
    if (L == 0) return std::nullopt;
    auto strip = [&](const Int& q) {
        int e = 0;
        while (divisible(L, q)) {
            L = exact_div(L, q);
            ++e;
        }
        if (e > 0) out.emplace_back(q, e);
    };
    for (const auto& h : hints) {
        if (h > 1 && is_prime(h)) strip(h);
    }
    for (long q = 2; q < 1'000'000 && Int(q) * q <= L; ++q) strip(Int(q));
    if (L > 1) {
        if (!is_prime(L)) return std::nullopt;
        out.emplace_back(L, 1);
    }
    std::sort(out.begin(), out.end());
    return out;
}

/// Global conditions 1-3 and 7 together with the congruences 4-6 (the local hypotheses).
inline ConditionReport check_global_conditions(const FieldParams& fp, const std::vector<Pair>& pairs, const Int& L,
                                               int n, const DescentCheck& descent,
                                               const std::vector<Int>& factor_hints = {}) {
    ConditionReport r;
    {
        bool ok = true;
        std::string d;
        for (std::size_t j = 0; j < pairs.size(); ++j) {
            const auto& [b, c] = pairs[j];
            Int q = pair_value(fp, b, c);
            if (!valid_form_prime(fp, b, c, q)) {
                ok = false;
                d = "pair " + std::to_string(j + 1) + ": P^iota b^3 + c^3 = " + q.get_str() +
                    " is not a prime = 2 mod 3 prime to P";
                break;
            }
        }
        r.add(1, true, ok, ok ? "every q_j is a prime = 2 mod 3 prime to P" : d);
    }
    {
        auto fac = factor_with_hints(L, factor_hints);
        bool ok = fac.has_value() && L > 0;
        std::string d = ok ? "L =" : "could not factor L";
        if (fac) {
            for (const auto& [q, e] : *fac) {
                d += " " + q.get_str() + "^" + std::to_string(e);
                if (mod(q, 3L) != 2 || e >= n) ok = false;
            }
        }
        r.add(2, true, ok, d);
    }
    {
        bool ok = true;
        for (const auto& [b, c] : pairs) ok = ok && gcd(L, b * c) == 1;
        r.add(3, true, ok, ok ? "gcd(L, b_j c_j) = 1 for all j" : "L shares a factor with some b_j c_j");
    }
    ConditionReport local = check_local_conditions(fp, pairs, L);
    for (const auto& it : local.items) r.add(it.index + 3, it.applicable, it.pass, it.detail);
    r.add(7, true, descent.ok, descent.ok ? "descent certificate with m = " + std::to_string(descent.cert.m)
                                          : descent.reason);
    return r;
}

// ---------------------------------------------------------------------------------------
// Local certificates

enum class CertKind { hensel_witness, cubic_root_split, quadratic_split, exhaustive_smooth_point, real_witness };

inline const char* cert_kind_name(CertKind k) {
    switch (k) {
        case CertKind::hensel_witness: return "hensel_witness";
        case CertKind::cubic_root_split: return "cubic_root_split";
        case CertKind::quadratic_split: return "quadratic_split";
        case CertKind::exhaustive_smooth_point: return "exhaustive_smooth_point";
        case CertKind::real_witness: return "real_witness";
    }
    return "unknown";
}

struct LocalCertificate {
    CertKind kind = CertKind::hensel_witness;
    Int l;  // 0 for the real place

    // hensel_witness / exhaustive_smooth_point: F(point) = 0 mod l^(2t+1) and the partial
    // derivative `partial` has valuation <= t.
    Point point{Int(0), Int(0), Int(0)};
    int t = 0;
    int partial = -1;

    // cubic_root_split: root of the cubic factor; quadratic_split: root of pair `pair_index`.
    Int root;
    int pair_index = -1;

    // real_witness: F(s v + q w) changes sign between s = s_lo and s = s_hi (q > 0).
    Point direction{Int(0), Int(0), Int(0)};
    Point base{Int(0), Int(0), Int(0)};
    Int s_lo, s_hi, q;
};

namespace detail {

using u64 = std::uint64_t;

inline u64 mulmod(u64 a, u64 b, u64 m) { return static_cast<u64>(static_cast<unsigned __int128>(a) * b % m); }

inline u64 reduce_u64(const Int& x, u64 m) {
    Int r = mod(x, Int(static_cast<unsigned long>(m)));
    return r.get_ui();
}

// F and its gradient modulo q < 2^62.
class ModForm {
public:
    ModForm(const TernaryForm& f, u64 q) : q_(q), n_(f.degree) {
        for (const auto& t : f.terms) terms_.push_back({t.i, t.j, t.k, reduce_u64(t.coef, q)});
    }

    std::array<u64, 4> eval(u64 x, u64 y, u64 z) const {
        std::vector<std::array<u64, 3>> pw(static_cast<std::size_t>(n_) + 1);
        pw[0] = {1 % q_, 1 % q_, 1 % q_};
        for (int e = 1; e <= n_; ++e) {
            pw[e] = {mulmod(pw[e - 1][0], x, q_), mulmod(pw[e - 1][1], y, q_), mulmod(pw[e - 1][2], z, q_)};
        }
        std::array<u64, 4> out{0, 0, 0, 0};
        for (const auto& t : terms_) {
            u64 base = t.c;
            out[0] = (out[0] + mulmod(mulmod(base, pw[t.i][0], q_), mulmod(pw[t.j][1], pw[t.k][2], q_), q_)) % q_;
            if (t.i > 0) {
                u64 c = mulmod(base, static_cast<u64>(t.i) % q_, q_);
                out[1] = (out[1] + mulmod(mulmod(c, pw[t.i - 1][0], q_), mulmod(pw[t.j][1], pw[t.k][2], q_), q_)) % q_;
            }
            if (t.j > 0) {
                u64 c = mulmod(base, static_cast<u64>(t.j) % q_, q_);
                out[2] = (out[2] + mulmod(mulmod(c, pw[t.i][0], q_), mulmod(pw[t.j - 1][1], pw[t.k][2], q_), q_)) % q_;
            }
            if (t.k > 0) {
                u64 c = mulmod(base, static_cast<u64>(t.k) % q_, q_);
                out[3] = (out[3] + mulmod(mulmod(c, pw[t.i][0], q_), mulmod(pw[t.j][1], pw[t.k - 1][2], q_), q_)) % q_;
            }
        }
        return out;
    }

private:
    struct T {
        int i, j, k;
        u64 c;
    };
    u64 q_;
    int n_;
    std::vector<T> terms_;
};

// v_l(x) capped at `cap` for x taken mod l^cap.
inline int valuation_capped(u64 x, u64 l, int cap) {
    int v = 0;
    while (v < cap && x % l == 0) {
        x /= l;
        ++v;
    }
    return v;
}

}  // namespace detail

/// Exact Hensel criterion: F(point) = 0 mod l^(2t+1), v_l(partial) <= t, point primitive at l.
inline bool hensel_valid(const TernaryForm& f, const Int& l, const Point& pt, int t, int partial) {
    if (l < 2 || t < 0 || partial < 0 || partial > 2) return false;
    if (divisible(pt[0], l) && divisible(pt[1], l) && divisible(pt[2], l)) return false;
    Evaluation e = eval_with_gradient(f, pt);
    Int lt = pow(l, static_cast<unsigned long>(t));
    if (!divisible(e.value, lt * lt * l)) return false;
    return !divisible(e.gradient[partial], lt * l);
}

/// Exhaustive search for a point mod l^(2t+1) meeting the Hensel criterion, trying t = 0 on
/// every projective point mod l before lifting singular residues.
inline std::optional<LocalCertificate> exhaustive_smooth_point(const TernaryForm& f, long l, int max_t = 2,
                                                               long node_cap = 2'000'000) {
    using detail::u64;
    const u64 L = static_cast<u64>(l);
    detail::ModForm F1(f, L);
    struct Node {
        u64 x, y, z;
    };
    std::vector<Node> singular;
    auto make_cert = [&](const Node& nd, int t, int partial) {
        LocalCertificate c;
        c.kind = CertKind::exhaustive_smooth_point;
        c.l = l;
        c.point = {Int(static_cast<unsigned long>(nd.x)), Int(static_cast<unsigned long>(nd.y)),
                   Int(static_cast<unsigned long>(nd.z))};
        c.t = t;
        c.partial = partial;
        return c;
    };
    auto visit = [&](const Node& nd) -> std::optional<LocalCertificate> {
        auto v = F1.eval(nd.x, nd.y, nd.z);
        if (v[0] != 0) return std::nullopt;
        for (int g = 0; g < 3; ++g) {
            if (v[1 + g] != 0) return make_cert(nd, 0, g);
        }
        if (static_cast<long>(singular.size()) < node_cap) singular.push_back(nd);
        return std::nullopt;
    };
    for (u64 y = 0; y < L; ++y) {
        for (u64 z = 0; z < L; ++z) {
            if (auto c = visit({1, y, z})) return c;
        }
    }
    for (u64 z = 0; z < L; ++z) {
        if (auto c = visit({0, 1, z})) return c;
    }
    if (auto c = visit({0, 0, 1})) return c;

    // Lift the singular residues digit by digit; the normalized coordinate stays 1.
    std::vector<Node> level = singular;
    u64 qe = L;  // current modulus l^e
    for (int e = 1; e < 2 * max_t + 1 && !level.empty(); ++e) {
        if (qe > (u64(1) << 62) / L) break;
        u64 next_q = qe * L;
        detail::ModForm Fn(f, next_q);
        std::vector<Node> lifted;
        for (const auto& nd : level) {
            int fixed = nd.x % L != 0 ? 0 : (nd.y % L != 0 ? 1 : 2);
            for (u64 d1 = 0; d1 < L; ++d1) {
                for (u64 d2 = 0; d2 < L; ++d2) {
                    Node c = nd;
                    u64* coords[3] = {&c.x, &c.y, &c.z};
                    int k = 0;
                    for (int i = 0; i < 3; ++i) {
                        if (i == fixed) continue;
                        *coords[i] += qe * (k++ == 0 ? d1 : d2);
                    }
                    auto v = Fn.eval(c.x, c.y, c.z);
                    if (v[0] != 0) continue;
                    const int exp = e + 1;
                    if (exp % 2 == 1) {
                        int t = (exp - 1) / 2;
                        for (int g = 0; g < 3; ++g) {
                            if (detail::valuation_capped(v[1 + g], L, exp) <= t) return make_cert(c, t, g);
                        }
                    }
                    if (static_cast<long>(lifted.size()) >= node_cap) break;
                    lifted.push_back(c);
                }
            }
        }
        level = std::move(lifted);
        qe = next_q;
    }
    return std::nullopt;
}

/// Square root of a mod the odd prime l (Tonelli-Shanks); nullopt for non-residues.
inline std::optional<Int> sqrt_mod(const Int& a, long l) {
    const Int P(l);
    Int x = mod(a, P);
    if (x == 0) return Int(0);
    if (l == 2) return x;
    if (powmod(x, Int((l - 1) / 2), P) != 1) return std::nullopt;
    long q = l - 1;
    int s = 0;
    while (q % 2 == 0) {
        q /= 2;
        ++s;
    }
    long z = 2;
    while (powmod(Int(z), Int((l - 1) / 2), P) != l - 1) ++z;
    Int c = powmod(Int(z), Int(q), P);
    Int r = powmod(x, Int((q + 1) / 2), P);
    Int t = powmod(x, Int(q), P);
    int m = s;
    while (t != 1) {
        int i = 0;
        Int tt = t;
        while (tt != 1) {
            tt = mod(Int(tt * tt), P);
            ++i;
        }
        Int b = c;
        for (int j = 0; j < m - i - 1; ++j) b = mod(Int(b * b), P);
        r = mod(Int(r * b), P);
        c = mod(Int(b * b), P);
        t = mod(Int(t * c), P);
        m = i;
    }
    return r;
}

namespace detail {

// (a, b) with a X^3 + b Y^3 dividing F(X, Y, 0), from the provenance or a diagonal cubic.
inline std::optional<std::pair<Int, Int>> binary_cubic_factor(const TernaryForm& f) {
    if (f.provenance) return std::pair<Int, Int>{Int(1), f.provenance->D};
    if (f.degree != 3 || f.terms.size() != 3) return std::nullopt;
    Int a, b;
    for (const auto& t : f.terms) {
        if (t.i == 3) a = t.coef;
        else if (t.j == 3) b = t.coef;
        else if (t.k != 3) return std::nullopt;
    }
    if (a == 0 || b == 0) return std::nullopt;
    return std::pair<Int, Int>{a, b};
}

inline bool provenance_consistent(const TernaryForm& f) {
    return f.provenance && form_from_provenance(*f.provenance).terms == f.terms;
}

}  // namespace detail

inline int sign_of(const Int& x) { return sgn(x); }

inline Point line_point(const LocalCertificate& c, const Int& s) {
    return {s * c.direction[0] + c.q * c.base[0], s * c.direction[1] + c.q * c.base[1],
            s * c.direction[2] + c.q * c.base[2]};
}

/// Re-checks a certificate from the raw integers.
inline bool validate_certificate(const TernaryForm& f, const LocalCertificate& c) {
    switch (c.kind) {
        case CertKind::hensel_witness:
        case CertKind::exhaustive_smooth_point:
            return hensel_valid(f, c.l, c.point, c.t, c.partial);
        case CertKind::cubic_root_split: {
            auto ab = detail::binary_cubic_factor(f);
            if (!ab || c.l < 2 || !is_prime(c.l)) return false;
            if (f.provenance && !detail::provenance_consistent(f)) return false;
            const auto& [a, b] = *ab;
            Int val = a * c.root * c.root * c.root + b;
            return divisible(val, c.l) && !divisible(Int(3 * a * c.root * c.root), c.l);
        }
        case CertKind::quadratic_split: {
            if (!detail::provenance_consistent(f) || c.l < 2 || !is_prime(c.l)) return false;
            const auto& pairs = f.provenance->pairs;
            if (c.pair_index < 0 || c.pair_index >= static_cast<int>(pairs.size())) return false;
            const auto& [b, cc] = pairs[static_cast<std::size_t>(c.pair_index)];
            Int val = b * b * c.root * c.root + b * cc * c.root + cc * cc;
            Int der = 2 * b * b * c.root + b * cc;
            return divisible(val, c.l) && !divisible(der, c.l);
        }
        case CertKind::real_witness: {
            if (c.q <= 0 || c.s_lo > c.s_hi) return false;
            int lo = sign_of(evaluate(f, line_point(c, c.s_lo)));
            int hi = sign_of(evaluate(f, line_point(c, c.s_hi)));
            return lo == 0 || hi == 0 || lo != hi;
        }
    }
    return false;
}

struct LocalOptions {
    int max_t = 2;
    long node_cap = 2'000'000;
};

/// A certificate of l-adic solubility. Forms with provenance first try the structural
/// certificates, then the (1, 0, 1) Hensel witness at 2, 3 and p, then exhaustive search.
inline LocalCertificate local_certificate(const TernaryForm& f, long l, const LocalOptions& opt = {}) {
    if (!is_small_prime(l)) throw std::invalid_argument("local_certificate: l must be prime");
    const Int L(l);
    if (f.provenance) {
        const auto& pv = *f.provenance;
        const long p = detail::odd_prime_of(pv.P);
        if (l % 3 == 2 && (3 * pv.P) % l != 0) {
            LocalCertificate c;
            c.kind = CertKind::cubic_root_split;
            c.l = L;
            c.root = powmod(Int(-pv.D), Int((2 * l - 1) / 3), L);
            if (validate_certificate(f, c)) return c;
        }
        if (l % 3 == 1) {
            auto s = sqrt_mod(Int(-3), l);
            for (std::size_t j = 0; s && j < pv.pairs.size(); ++j) {
                const auto& [b, cc] = pv.pairs[j];
                if (divisible(b * cc, L)) continue;
                LocalCertificate c;
                c.kind = CertKind::quadratic_split;
                c.l = L;
                c.pair_index = static_cast<int>(j);
                Int inv2b = *inverse_mod(Int(2 * b), L);
                c.root = mod(Int(cc * (*s - 1) * inv2b), L);
                if (validate_certificate(f, c)) return c;
            }
        }
        if ((l == 2 && pv.P % 2 == 0) || l == 3 || l == p) {
            LocalCertificate c;
            c.kind = CertKind::hensel_witness;
            c.l = L;
            c.point = {Int(1), Int(0), Int(1)};
            c.t = 0;
            c.partial = l == 2 ? 2 : 1;
            if (validate_certificate(f, c)) return c;
        }
    }
    if (auto c = exhaustive_smooth_point(f, l, opt.max_t, opt.node_cap)) {
        if (validate_certificate(f, *c)) return *c;
    }
    throw Error(Errc::no_certificate, "no l-adic certificate found for l = " + std::to_string(l));
}

struct LocalSweep {
    std::vector<LocalCertificate> certificates;
    std::vector<long> failures;
    bool ok() const { return failures.empty(); }
};

/// Certificates for every prime l <= bound, each re-validated.
inline LocalSweep certify_primes_up_to(const TernaryForm& f, long bound, const LocalOptions& opt = {}) {
    LocalSweep s;
    for (long l : primes_below(bound + 1)) {
        try {
            LocalCertificate c = local_certificate(f, l, opt);
            if (!validate_certificate(f, c)) throw Error(Errc::verification_failed, "certificate failed re-validation");
            s.certificates.push_back(std::move(c));
        } catch (const Error&) {
            s.failures.push_back(l);
        }
    }
    return s;
}

struct Coverage {
    bool ok = false;
    std::vector<std::string> rules;
    std::vector<long> individually_certified;  // primes above the bound outside the rules
    std::string failure;
};

namespace detail {

inline std::vector<long> small_prime_factors(Int n) {
    std::vector<long> out;
    n = abs(n);
    for (long q = 2; Int(q) * q <= n; ++q) {
        if (divisible(n, Int(q))) {
            out.push_back(q);
            while (divisible(n, Int(q))) n = exact_div(n, Int(q));
        }
        if (q > 10'000'000) throw std::runtime_error("small_prime_factors: cofactor too large");
    }
    if (n > 1) out.push_back(to_long(n));
    return out;
}

}  // namespace detail

/// Case analysis showing every prime l > bound has a structural certificate; the finitely
/// many primes above the bound that escape the rules are certified individually.
inline Coverage structural_coverage(const TernaryForm& f, long bound, const LocalOptions& opt = {}) {
    Coverage cov;
    std::set<long> special;
    auto certify_special = [&]() {
        for (long l : special) {
            if (l <= bound) continue;
            try {
                LocalCertificate c = local_certificate(f, l, opt);
                if (!validate_certificate(f, c)) throw Error(Errc::verification_failed, "re-validation");
                cov.individually_certified.push_back(l);
            } catch (const Error&) {
                cov.failure = "prime " + std::to_string(l) + " above the bound has no certificate";
                return false;
            }
        }
        return true;
    };
    if (f.provenance && detail::provenance_consistent(f)) {
        const auto& pv = *f.provenance;
        cov.rules.push_back("l = 2 mod 3, l not dividing 3P: the cube root of -P^iota mod l is simple");
        cov.rules.push_back("l = 1 mod 3, l not dividing b_j c_j: a quadratic factor has a simple root mod l");
        for (long q : detail::small_prime_factors(Int(3 * pv.P))) special.insert(q);
        // l = 1 mod 3 dividing every b_j c_j
        if (!pv.pairs.empty()) {
            for (long q : detail::small_prime_factors(pv.pairs[0].first * pv.pairs[0].second)) {
                if (q % 3 != 1) continue;
                bool all = true;
                for (const auto& [b, c] : pv.pairs) all = all && divisible(b * c, Int(q));
                if (all) special.insert(q);
            }
        }
        cov.ok = certify_special();
        return cov;
    }
    if (auto ab = detail::binary_cubic_factor(f)) {
        Int abc = 3;
        for (const auto& t : f.terms) abc *= t.coef;
        cov.rules.push_back("l = 2 mod 3, l not dividing 3abc: cubing is bijective mod l, giving a simple root");
        cov.rules.push_back(
            "l = 1 mod 3, l not dividing 3abc: good reduction of a genus-1 curve, at least l + 1 - 2 sqrt(l) > 0 "
            "smooth points mod l, each lifting by Hensel");
        for (long q : detail::small_prime_factors(abc)) special.insert(q);
        cov.ok = certify_special();
        return cov;
    }
    cov.failure = "no structural rule applies to this form";
    return cov;
}

/// Sign change of F along s v + q w; curves with a cubic factor use v = X, w = Y (root near -D^(1/3)).
inline LocalCertificate real_witness(const TernaryForm& f, int refine_bits = 48) {
    std::vector<std::pair<int, int>> lines;
    if (f.provenance) lines.push_back({0, 1});
    for (auto vw : std::vector<std::pair<int, int>>{{0, 2}, {0, 1}, {1, 2}, {1, 0}, {2, 0}, {2, 1}}) {
        lines.push_back(vw);
    }
    for (auto [vi, wi] : lines) {
        LocalCertificate c;
        c.kind = CertKind::real_witness;
        c.l = 0;
        c.direction[vi] = 1;
        c.base[wi] = 1;
        c.q = 1;
        auto sign_at = [&](const Int& s) { return sign_of(evaluate(f, line_point(c, s))); };
        int s0 = sign_at(0);
        if (s0 == 0) {
            c.s_lo = c.s_hi = 0;
            return c;
        }
        std::optional<Int> other;
        for (int j = 0; j < 128 && !other; ++j) {
            Int step = pow(Int(2), static_cast<unsigned long>(j));
            for (const Int& s : {step, Int(-step)}) {
                if (sign_at(s) != s0) {
                    other = s;
                    break;
                }
            }
        }
        if (!other) continue;
        Int lo = std::min(Int(0), *other), hi = std::max(Int(0), *other);
        int slo = sign_at(lo);
        for (int it = 0; it < refine_bits + 2 * static_cast<int>(bit_length(hi - lo)); ++it) {
            if (hi - lo <= 1 && c.q > pow(Int(2), static_cast<unsigned long>(refine_bits))) break;
            if (hi - lo <= 1) {
                lo *= 2;
                hi *= 2;
                c.q *= 2;
            }
            Int mid = (lo + hi) / 2;
            if (mid == lo || mid == hi) continue;
            int sm = sign_at(mid);
            if (sm == 0) {
                lo = hi = mid;
                break;
            }
            if (sm == slo) {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        c.s_lo = lo;
        c.s_hi = hi;
        if (validate_certificate(f, c)) return c;
    }
    throw Error(Errc::no_certificate, "no real sign change found");
}

// ---------------------------------------------------------------------------------------
// Point search

struct PointSearchResult {
    std::optional<Point> point;
    long height = 0;
    bool separable = false;
    long candidates = 0;     // (X, Y) pairs scanned
    long exact_checks = 0;   // pairs that survived every modular filter
};

namespace detail {

struct ResidueFilter {
    u64 q;
    std::vector<u64> coef;      // binary coefficients mod q, index = X exponent
    u64 neg_cinv = 0;           // -c^-1 mod q (power filters only)
    std::vector<char> is_power; // z^n residues; empty for divisibility filters
};

inline u64 binary_eval_mod(const ResidueFilter& rf, const std::vector<u64>& xp, u64 y, int n) {
    // sum coef[i] X^i Y^(n-i), Y powers built from the top down
    u64 acc = 0, yp = 1;
    for (int i = n; i >= 0; --i) {
        acc = (acc + mulmod(mulmod(rf.coef[i], xp[i], rf.q), yp, rf.q)) % rf.q;
        yp = mulmod(yp, y, rf.q);
    }
    return acc;
}

}  // namespace detail

/// Primitive zeros with max(|X|, |Y|, |Z|) <= height. Forms A(X, Y) + c Z^n are scanned over
/// (X, Y) with modular filters and an exact n-th root test; other forms by a triple loop.
inline PointSearchResult point_search(const TernaryForm& f, long height) {
    if (height < 1) throw std::invalid_argument("point_search: height must be >= 1");
    using detail::u64;
    PointSearchResult res;
    res.height = height;
    const int n = f.degree;
    auto primitive = [](const Point& pt) { return gcd(gcd(pt[0], pt[1]), pt[2]) == 1; };
    auto zc = separable_z_coefficient(f);
    if (!zc) {
        for (long X = -height; X <= height && !res.point; ++X) {
            for (long Y = -height; Y <= height && !res.point; ++Y) {
                for (long Z = -height; Z <= height; ++Z) {
                    Point pt{Int(X), Int(Y), Int(Z)};
                    ++res.candidates;
                    if (primitive(pt) && evaluate(f, pt) == 0) {
                        res.point = pt;
                        break;
                    }
                }
            }
        }
        return res;
    }
    res.separable = true;
    const Int c = *zc;
    std::vector<Int> coef(static_cast<std::size_t>(n) + 1, Int(0));
    for (const auto& t : f.terms) {
        if (t.k == 0) coef[static_cast<std::size_t>(t.i)] = t.coef;
    }
    // Filters: primes dividing c must divide A(X, Y); n-th power residues mod auxiliary q.
    std::vector<detail::ResidueFilter> filters;
    std::vector<Int> cprimes;
    if (f.provenance && f.provenance->l > 1 && is_prime(f.provenance->l) && divisible(c, f.provenance->l)) {
        cprimes.push_back(f.provenance->l);
    }
    {
        Int rest = abs(c);
        for (const auto& h : cprimes) {
            while (divisible(rest, h)) rest = exact_div(rest, h);
        }
        for (long q = 2; q < 100000 && Int(q) * q <= rest; ++q) {
            if (divisible(rest, Int(q))) {
                cprimes.push_back(Int(q));
                while (divisible(rest, Int(q))) rest = exact_div(rest, Int(q));
            }
        }
        if (rest > 1 && bit_length(rest) < 62) cprimes.push_back(rest);
    }
    for (const auto& r : cprimes) {
        if (bit_length(r) >= 62) continue;
        detail::ResidueFilter rf;
        rf.q = r.get_ui();
        for (const auto& a : coef) rf.coef.push_back(detail::reduce_u64(a, rf.q));
        filters.push_back(std::move(rf));
    }
    int aux = 0;
    for (long q = 5; q < 20000 && aux < 8; ++q) {
        if (!is_small_prime(q) || std::gcd(static_cast<long>(n), q - 1) == 1 || divisible(c, Int(q))) continue;
        detail::ResidueFilter rf;
        rf.q = static_cast<u64>(q);
        for (const auto& a : coef) rf.coef.push_back(detail::reduce_u64(a, rf.q));
        rf.neg_cinv = (rf.q - inverse_mod(c, Int(q))->get_ui()) % rf.q;
        rf.is_power.assign(static_cast<std::size_t>(q), 0);
        for (u64 z = 0; z < rf.q; ++z) {
            u64 zp = 1;
            for (int e = 0; e < n; ++e) zp = detail::mulmod(zp, z, rf.q);
            rf.is_power[zp] = 1;
        }
        filters.push_back(std::move(rf));
        ++aux;
    }
    const bool odd = n % 2 == 1;
    const Int H(height);
    std::vector<std::vector<u64>> xpow(filters.size(), std::vector<u64>(static_cast<std::size_t>(n) + 1));
    for (long X = odd ? 0 : -height; X <= height && !res.point; ++X) {
        for (std::size_t fi = 0; fi < filters.size(); ++fi) {
            const u64 q = filters[fi].q;
            u64 x = static_cast<u64>(((X % static_cast<long>(q)) + static_cast<long>(q)) % static_cast<long>(q));
            xpow[fi][0] = 1 % q;
            for (int e = 1; e <= n; ++e) xpow[fi][e] = detail::mulmod(xpow[fi][e - 1], x, q);
        }
        for (long Y = height; Y >= -height; --Y) {
            if (odd && X == 0 && Y <= 0) break;
            ++res.candidates;
            bool pass = true;
            for (std::size_t fi = 0; fi < filters.size() && pass; ++fi) {
                const auto& rf = filters[fi];
                u64 y = static_cast<u64>(((Y % static_cast<long>(rf.q)) + static_cast<long>(rf.q)) %
                                         static_cast<long>(rf.q));
                u64 a = detail::binary_eval_mod(rf, xpow[fi], y, n);
                if (rf.is_power.empty()) {
                    pass = a == 0;
                } else {
                    pass = rf.is_power[detail::mulmod(a, rf.neg_cinv, rf.q)] != 0;
                }
            }
            if (!pass) continue;
            ++res.exact_checks;
            const Int x(X), y(Y);
            Int A = 0;
            for (int i = 0; i <= n; ++i) {
                A += coef[static_cast<std::size_t>(i)] * pow(x, static_cast<unsigned long>(i)) *
                     pow(y, static_cast<unsigned long>(n - i));
            }
            Int negA = -A;
            if (!divisible(negA, c)) continue;
            auto z = exact_root(exact_div(negA, c), static_cast<unsigned long>(n));
            if (!z) continue;
            for (const Int& zz : {*z, Int(-*z)}) {
                if (abs(zz) > H) continue;
                Point pt{x, y, zz};
                if (primitive(pt) && evaluate(f, pt) == 0) {
                    res.point = pt;
                    break;
                }
                if (odd) break;  // for odd n the root is unique
            }
            if (res.point) break;
        }
    }
    return res;
}

}  // namespace hasse
