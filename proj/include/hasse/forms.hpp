#pragma once

// Ternary forms, the curve (X^3 + D Y^3) prod(b^2 X^2 + b c XY + c^2 Y^2) - L Z^n with
// D = P^iota, and the non-singularity test.

#include "hasse/error.hpp"
#include "hasse/integer.hpp"
#include "hasse/ring.hpp"

#include <algorithm>
#include <array>
#include <map>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

namespace hasse {

struct Term {
    int i = 0, j = 0, k = 0;
    Int coef;

    bool operator==(const Term& o) const { return i == o.i && j == o.j && k == o.k && coef == o.coef; }
};

using Pair = std::pair<Int, Int>;  // (b_j, c_j)

struct Provenance {
    long P = 0;
    int iota = 0;
    Int D;  // P^iota
    std::vector<Pair> pairs;
    Int l;
    long m = 0;
    Int L;
    int n = 0;

    bool operator==(const Provenance&) const = default;
};

struct TernaryForm {
    int degree = 0;
    std::vector<Term> terms;  // graded lexicographic: larger X exponent first, then Y
    std::optional<Provenance> provenance;

    bool operator==(const TernaryForm& o) const {
        return degree == o.degree && terms == o.terms && provenance == o.provenance;
    }
};

using Point = std::array<Int, 3>;

/// Merges duplicate monomials, drops zero coefficients and sorts canonically.
inline TernaryForm make_form(int degree, std::vector<Term> terms) {
    std::map<std::tuple<int, int, int>, Int, std::greater<>> acc;
    for (auto& t : terms) {
        if (t.i < 0 || t.j < 0 || t.k < 0 || t.i + t.j + t.k != degree) {
            throw std::invalid_argument("make_form: exponents must be non-negative and sum to the degree");
        }
        acc[{t.i, t.j, t.k}] += t.coef;
    }
    TernaryForm f;
    f.degree = degree;
    for (auto& [e, c] : acc) {
        if (c != 0) f.terms.push_back({std::get<0>(e), std::get<1>(e), std::get<2>(e), c});
    }
    return f;
}

inline Int evaluate(const TernaryForm& f, const Point& pt) {
    const int n = f.degree;
    std::vector<std::array<Int, 3>> pw(static_cast<std::size_t>(n) + 1);
    for (int v = 0; v < 3; ++v) {
        pw[0][v] = 1;
        for (int e = 1; e <= n; ++e) pw[e][v] = pw[e - 1][v] * pt[v];
    }
    Int s = 0;
    for (const auto& t : f.terms) s += t.coef * pw[t.i][0] * pw[t.j][1] * pw[t.k][2];
    return s;
}

struct Evaluation {
    Int value;
    std::array<Int, 3> gradient;
};

/// F and its three partial derivatives at `pt`, reduced into [0, modulus) when given.
inline Evaluation eval_with_gradient(const TernaryForm& f, const Point& pt,
                                     const std::optional<Int>& modulus = std::nullopt) {
    const int n = f.degree;
    std::vector<std::array<Int, 3>> pw(static_cast<std::size_t>(n) + 1);
    for (int v = 0; v < 3; ++v) {
        pw[0][v] = 1;
        for (int e = 1; e <= n; ++e) pw[e][v] = pw[e - 1][v] * pt[v];
    }
    Evaluation out{Int(0), {Int(0), Int(0), Int(0)}};
    for (const auto& t : f.terms) {
        out.value += t.coef * pw[t.i][0] * pw[t.j][1] * pw[t.k][2];
        if (t.i > 0) out.gradient[0] += t.coef * t.i * pw[t.i - 1][0] * pw[t.j][1] * pw[t.k][2];
        if (t.j > 0) out.gradient[1] += t.coef * t.j * pw[t.i][0] * pw[t.j - 1][1] * pw[t.k][2];
        if (t.k > 0) out.gradient[2] += t.coef * t.k * pw[t.i][0] * pw[t.j][1] * pw[t.k - 1][2];
    }
    if (modulus) {
        out.value = mod(out.value, *modulus);
        for (auto& g : out.gradient) g = mod(g, *modulus);
    }
    return out;
}

// Univariate polynomials are coefficient vectors, lowest degree first.
using Poly = std::vector<Int>;

inline Poly poly_mul(const Poly& a, const Poly& b) {
    Poly r(a.size() + b.size() - 1, Int(0));
    for (std::size_t i = 0; i < a.size(); ++i) {
        for (std::size_t j = 0; j < b.size(); ++j) r[i + j] += a[i] * b[j];
    }
    return r;
}

inline Poly quadratic_factor(const Pair& bc) {
    const auto& [b, c] = bc;
    return {c * c, b * c, b * b};  // in t = X / Y
}

/// Coefficients of G(X, Y) = (X^3 + D Y^3) prod(...): entry i multiplies X^i Y^(deg - i).
inline Poly binary_part(const Int& D, const std::vector<Pair>& pairs) {
    Poly g{D, Int(0), Int(0), Int(1)};
    for (const auto& bc : pairs) g = poly_mul(g, quadratic_factor(bc));
    return g;
}

inline Int evaluate_factored(const Provenance& pv, const Point& pt) {
    const auto& [X, Y, Z] = pt;
    Int v = X * X * X + pv.D * Y * Y * Y;
    for (const auto& [b, c] : pv.pairs) v *= b * b * X * X + b * c * X * Y + c * c * Y * Y;
    return v - pv.L * pow(Z, static_cast<unsigned long>(pv.n));
}

inline TernaryForm form_from_provenance(const Provenance& pv) {
    Poly g = binary_part(pv.D, pv.pairs);
    const int n = static_cast<int>(g.size()) - 1;
    if (n != pv.n) throw std::logic_error("form_from_provenance: degree mismatch");
    std::vector<Term> terms;
    for (int i = 0; i <= n; ++i) terms.push_back({i, n - i, 0, g[i]});
    terms.push_back({0, 0, n, -pv.L});
    TernaryForm f = make_form(n, terms);
    f.provenance = pv;
    return f;
}

namespace detail {

// Checks factored against expanded evaluation at `count` pseudo-random points.
inline bool expansion_agrees(const TernaryForm& f, int count, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<long> dist(-1000, 1000);
    for (int i = 0; i < count; ++i) {
        Point pt{Int(dist(rng)), Int(dist(rng)), Int(dist(rng))};
        if (evaluate(f, pt) != evaluate_factored(*f.provenance, pt)) return false;
    }
    return true;
}

}  // namespace detail

inline TernaryForm build_curve(const FieldParams& fp, const std::vector<Pair>& pairs, const Int& l, long m, int n) {
    if (n < 5 || n % 2 == 0) throw std::invalid_argument("build_curve: n must be odd and at least 5");
    if (pairs.size() != static_cast<std::size_t>((n - 3) / 2)) {
        throw Error(Errc::arity_mismatch, "need (n - 3) / 2 = " + std::to_string((n - 3) / 2) + " pairs, got " +
                                              std::to_string(pairs.size()));
    }
    if (fp.iota != 1 && fp.iota != 2) throw std::invalid_argument("build_curve: iota must be classified");
    Provenance pv;
    pv.P = fp.P;
    pv.iota = fp.iota;
    pv.D = fp.Piota();
    pv.pairs = pairs;
    pv.l = l;
    pv.m = m;
    pv.L = pow(l, static_cast<unsigned long>(m));
    pv.n = n;
    TernaryForm f = form_from_provenance(pv);
    if (!detail::expansion_agrees(f, 20, 0x5eedULL + static_cast<std::uint64_t>(n))) {
        throw std::logic_error("build_curve: expanded form disagrees with its factorization");
    }
    return f;
}

inline TernaryForm selmer_form() {
    return make_form(3, {{3, 0, 0, Int(3)}, {0, 3, 0, Int(4)}, {0, 0, 3, Int(-5)}});
}

/// (X^3 + 5Y^3)(X^2 + XY + Y^2) - 17 Z^5, carried with its factorization (P = 5, iota = 1).
inline TernaryForm fujiwara_form() {
    Provenance pv;
    pv.P = 5;
    pv.iota = 1;
    pv.D = 5;
    pv.pairs = {{Int(1), Int(1)}};
    pv.l = 17;
    pv.m = 1;
    pv.L = 17;
    pv.n = 5;
    return form_from_provenance(pv);
}

/// (X^3 + 5Z^3)(X^2 + XY + Y^2) - 17 Z^5, the variant with Z in the cubic factor.
inline TernaryForm fujiwara_variant_form() {
    std::vector<Term> terms;
    // (X^3 + 5Z^3)(X^2 + XY + Y^2)
    for (auto [i, j, k, c] : std::vector<std::tuple<int, int, int, long>>{
             {5, 0, 0, 1}, {4, 1, 0, 1}, {3, 2, 0, 1}, {2, 0, 3, 5}, {1, 1, 3, 5}, {0, 2, 3, 5}}) {
        terms.push_back({i, j, k, Int(c)});
    }
    terms.push_back({0, 0, 5, Int(-17)});
    return make_form(5, terms);
}

/// Whether F = A(X, Y) + c Z^n, i.e. the only monomial involving Z is Z^n.
inline std::optional<Int> separable_z_coefficient(const TernaryForm& f) {
    std::optional<Int> c;
    for (const auto& t : f.terms) {
        if (t.k == 0) continue;
        if (t.k != f.degree) return std::nullopt;
        c = t.coef;
    }
    return c;
}

/// Determinant by fraction-free Gaussian elimination.
inline Int bareiss_determinant(std::vector<std::vector<Int>> a) {
    const std::size_t n = a.size();
    if (n == 0) return 1;
    Int prev = 1;
    int sign = 1;
    for (std::size_t k = 0; k + 1 < n; ++k) {
        if (a[k][k] == 0) {
            std::size_t r = k + 1;
            while (r < n && a[r][k] == 0) ++r;
            if (r == n) return 0;
            std::swap(a[k], a[r]);
            sign = -sign;
        }
        for (std::size_t i = k + 1; i < n; ++i) {
            for (std::size_t j = k + 1; j < n; ++j) {
                a[i][j] = exact_div(a[i][j] * a[k][k] - a[i][k] * a[k][j], prev);
            }
        }
        prev = a[k][k];
    }
    return sign * a[n - 1][n - 1];
}

/// Sylvester resultant of two polynomials with nonzero leading coefficients.
inline Int resultant(const Poly& f, const Poly& g) {
    const std::size_t m = f.size() - 1, n = g.size() - 1;
    const std::size_t N = m + n;
    if (N == 0) return 1;
    std::vector<std::vector<Int>> s(N, std::vector<Int>(N, Int(0)));
    for (std::size_t r = 0; r < n; ++r) {
        for (std::size_t i = 0; i <= m; ++i) s[r][r + i] = f[m - i];
    }
    for (std::size_t r = 0; r < m; ++r) {
        for (std::size_t i = 0; i <= n; ++i) s[n + r][r + i] = g[n - i];
    }
    return bareiss_determinant(std::move(s));
}

inline Poly derivative(const Poly& f) {
    Poly d;
    for (std::size_t i = 1; i < f.size(); ++i) d.push_back(f[i] * static_cast<long>(i));
    if (d.empty()) d.push_back(0);
    return d;
}

struct NonsingularReport {
    bool ok = true;
    std::string witness;  // first failure found, empty when ok
};

/// F = G(X, Y) - L Z^n is non-singular iff L != 0 and G is squarefree, because F_Z = n L Z^(n-1)
/// forces Z = 0 at a singular point. Squarefreeness is checked factor by factor.
inline NonsingularReport check_nonsingular(const Int& D, const std::vector<Pair>& pairs, const Int& L) {
    NonsingularReport r;
    auto fail = [&](std::string why) {
        r.ok = false;
        r.witness = std::move(why);
        return r;
    };
    if (L == 0) return fail("L = 0");
    if (D == 0) return fail("cubic factor X^3 is a cube");
    const Poly cubic{D, Int(0), Int(0), Int(1)};
    for (std::size_t j = 0; j < pairs.size(); ++j) {
        const auto& [b, c] = pairs[j];
        if (b == 0 || c == 0) {
            return fail("pair " + std::to_string(j + 1) + " has b c = 0, so its quadratic factor is a square");
        }
        for (std::size_t k = 0; k < j; ++k) {
            if (b * pairs[k].second == pairs[k].first * c) {
                return fail("pairs " + std::to_string(k + 1) + " and " + std::to_string(j + 1) +
                            " are projectively equal");
            }
        }
        const Poly q = quadratic_factor(pairs[j]);
        if (resultant(cubic, q) == 0) {
            return fail("pair " + std::to_string(j + 1) + " shares a root with the cubic factor");
        }
        for (std::size_t k = 0; k < j; ++k) {
            if (resultant(quadratic_factor(pairs[k]), q) == 0) {
                return fail("pairs " + std::to_string(k + 1) + " and " + std::to_string(j + 1) + " share a root");
            }
        }
    }
    return r;
}

inline NonsingularReport check_nonsingular(const FieldParams& fp, const std::vector<Pair>& pairs, const Int& L) {
    return check_nonsingular(fp.Piota(), pairs, L);
}

/// Res(g, g') for g(t) = G(t, 1); nonzero iff G is squarefree (G has nonzero X-leading term).
inline Int binary_discriminant_resultant(const Int& D, const std::vector<Pair>& pairs) {
    Poly g = binary_part(D, pairs);
    return resultant(g, derivative(g));
}

namespace detail {

inline std::string monomial(const Int& coef, const std::string& body, bool first) {
    std::string s;
    if (coef < 0) {
        s += "-";
    } else if (!first) {
        s += "+";
    }
    Int a = abs(coef);
    if (a != 1 || body.empty()) s += a.get_str();
    return s + body;
}

inline std::string power(const char* var, int e) {
    if (e == 0) return {};
    if (e == 1) return var;
    return std::string(var) + "^" + (e < 10 ? std::to_string(e) : "{" + std::to_string(e) + "}");
}

}  // namespace detail

/// Factored display, e.g. (X^3+7Y^3)(X^2+4XY+16Y^2)(16X^2+4XY+Y^2) = 262193^{4}Z^{7}.
inline std::string render_latex(const TernaryForm& f) {
    std::ostringstream os;
    if (f.provenance) {
        const auto& pv = *f.provenance;
        os << "(X^3" << detail::monomial(pv.D, "Y^3", false) << ")";
        for (const auto& [b, c] : pv.pairs) {
            os << "(" << detail::monomial(b * b, "X^2", true) << detail::monomial(b * c, "XY", false)
               << detail::monomial(c * c, "Y^2", false) << ")";
        }
        os << " = " << pv.l.get_str();
        if (pv.m != 1) os << "^{" << pv.m << "}";
        os << "Z^{" << pv.n << "}";
        return os.str();
    }
    bool first = true;
    for (const auto& t : f.terms) {
        std::string body = detail::power("X", t.i) + detail::power("Y", t.j) + detail::power("Z", t.k);
        os << detail::monomial(t.coef, body, first);
        first = false;
    }
    os << " = 0";
    return os.str();
}

}  // namespace hasse
