#pragma once

// Fundamental units of Z[P^(1/3)], the iota classification, the AACM-cubic scan and the
// density estimate.

#include "hasse/error.hpp"
#include "hasse/integer.hpp"
#include "hasse/primes.hpp"
#include "hasse/ring.hpp"

#include <mpfr.h>

#include <array>
#include <atomic>
#include <cmath>
#include <fstream>
#include <map>
#include <mutex>
#include <optional>
#include <shared_mutex>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

namespace hasse {

enum class UnitBackend { enumeration, reduction };

inline const char* backend_name(UnitBackend b) {
    return b == UnitBackend::enumeration ? "enumeration" : "reduction";
}

struct FundamentalUnit {
    RingElement element;
    FieldParams params;
    UnitBackend backend = UnitBackend::reduction;

    const Int& alpha() const { return element.a; }
    const Int& beta() const { return element.b; }
    const Int& gamma() const { return element.c; }
};

struct UnitBudget {
    long max_chain_steps = 200'000;        // reduction backend
    long max_enumeration = 10'000'000;      // enumeration backend, search nodes
};

/// Among {u, -u, u^-1, -u^-1} returns the one whose real value exceeds 1.
inline RingElement normalize_unit(const RingElement& u, long P) {
    const Int d(P);
    Int n = norm(u, d);
    if (n != 1 && n != -1) throw std::invalid_argument("normalize_unit: not a unit");
    RingElement x = real_sign(u, d) < 0 ? -u : u;
    if (real_compare(x, RingElement::one(), d) < 0) {
        // x in (0, 1): its inverse is adj(x) / norm(x), and norm(x) = 1 for x > 0.
        x = adjugate(x, d);
    }
    if (real_compare(x, RingElement::one(), d) <= 0) throw std::logic_error("normalize_unit: trivial unit");
    return x;
}

inline void assert_unit(const FundamentalUnit& u) {
    const Int d(u.params.P);
    Int n = norm(u.element, d);
    if (n != 1 && n != -1) throw std::logic_error("fundamental unit has norm " + n.get_str());
    if (real_compare(u.element, RingElement::one(), d) <= 0) {
        throw std::logic_error("fundamental unit does not exceed 1");
    }
}

namespace detail {

using Vec3 = std::array<long double, 3>;
using IntRow = std::array<Int, 3>;

inline long double to_ld(const Int& x) { return static_cast<long double>(x.get_d()); }

// Upper-triangular basis of the lattice spanned by `rows`, which must contain D * Z^3.
inline std::array<IntRow, 3> hermite_basis(std::vector<IntRow> rows, const Int& D) {
    for (auto& r : rows) {
        for (auto& v : r) v = mod(v, D);
    }
    for (int i = 0; i < 3; ++i) {
        IntRow e{Int(0), Int(0), Int(0)};
        e[i] = D;
        rows.push_back(e);
    }
    std::array<IntRow, 3> basis;
    for (int col = 0; col < 3; ++col) {
        // Euclid on the column until a single row holds the gcd.
        for (;;) {
            int piv = -1;
            for (std::size_t r = 0; r < rows.size(); ++r) {
                if (rows[r][col] == 0) continue;
                if (piv < 0 || abs(rows[r][col]) < abs(rows[piv][col])) piv = static_cast<int>(r);
            }
            if (piv < 0) throw std::logic_error("hermite_basis: rank deficient");
            bool done = true;
            for (std::size_t r = 0; r < rows.size(); ++r) {
                if (static_cast<int>(r) == piv || rows[r][col] == 0) continue;
                Int q;
                mpz_fdiv_q(q.get_mpz_t(), rows[r][col].get_mpz_t(), rows[piv][col].get_mpz_t());
                for (int k = col; k < 3; ++k) rows[r][k] -= q * rows[piv][k];
                for (int k = col + 1; k < 3; ++k) rows[r][k] = mod(rows[r][k], D);
                if (rows[r][col] != 0) done = false;
            }
            if (done) {
                basis[col] = rows[piv];
                rows.erase(rows.begin() + piv);
                break;
            }
        }
    }
    return basis;
}

// Minkowski coordinates (real, Re, Im) of x + y t + z t^2 under the complex embedding.
inline Vec3 minkowski(const IntRow& v, long double t) {
    long double x = to_ld(v[0]), y = to_ld(v[1]), z = to_ld(v[2]);
    long double yt = y * t, zt = z * t * t;
    return {x + yt + zt, x - (yt + zt) / 2, std::sqrt(3.0L) / 2 * (yt - zt)};
}

inline long double dot(const Vec3& a, const Vec3& b) { return a[0] * b[0] + a[1] * b[1] + a[2] * b[2]; }

// LLL with delta = 0.99 on three real vectors, mirroring every step on the integer rows.
inline void lll(std::array<Vec3, 3>& b, std::array<IntRow, 3>& rows) {
    auto gram_schmidt = [&](std::array<Vec3, 3>& bs, long double mu[3][3], long double B[3]) {
        for (int i = 0; i < 3; ++i) {
            bs[i] = b[i];
            for (int j = 0; j < i; ++j) {
                mu[i][j] = dot(b[i], bs[j]) / B[j];
                for (int k = 0; k < 3; ++k) bs[i][k] -= mu[i][j] * bs[j][k];
            }
            B[i] = dot(bs[i], bs[i]);
        }
    };
    std::array<Vec3, 3> bs;
    long double mu[3][3] = {};
    long double B[3] = {};
    gram_schmidt(bs, mu, B);
    int k = 1;
    int guard = 0;
    while (k < 3) {
        if (++guard > 100000) throw std::logic_error("lll: no convergence");
        for (int j = k - 1; j >= 0; --j) {
            long double q = std::round(mu[k][j]);
            if (q != 0) {
                for (int c = 0; c < 3; ++c) b[k][c] -= q * b[j][c];
                Int qi(static_cast<double>(q));
                for (int c = 0; c < 3; ++c) rows[k][c] -= qi * rows[j][c];
                gram_schmidt(bs, mu, B);
            }
        }
        if (B[k] >= (0.99L - mu[k][k - 1] * mu[k][k - 1]) * B[k - 1]) {
            ++k;
        } else {
            std::swap(b[k], b[k - 1]);
            std::swap(rows[k], rows[k - 1]);
            gram_schmidt(bs, mu, B);
            k = std::max(k - 1, 1);
        }
    }
}

inline bool invert3(const std::array<Vec3, 3>& m, long double inv[3][3]) {
    long double det = m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) -
                      m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0]) +
                      m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0]);
    if (det == 0) return false;
    inv[0][0] = (m[1][1] * m[2][2] - m[1][2] * m[2][1]) / det;
    inv[0][1] = (m[0][2] * m[2][1] - m[0][1] * m[2][2]) / det;
    inv[0][2] = (m[0][1] * m[1][2] - m[0][2] * m[1][1]) / det;
    inv[1][0] = (m[1][2] * m[2][0] - m[1][0] * m[2][2]) / det;
    inv[1][1] = (m[0][0] * m[2][2] - m[0][2] * m[2][0]) / det;
    inv[1][2] = (m[0][2] * m[1][0] - m[0][0] * m[1][2]) / det;
    inv[2][0] = (m[1][0] * m[2][1] - m[1][1] * m[2][0]) / det;
    inv[2][1] = (m[0][1] * m[2][0] - m[0][0] * m[2][1]) / det;
    inv[2][2] = (m[0][0] * m[1][1] - m[0][1] * m[1][0]) / det;
    return true;
}

// The minimum of theta^-1 O adjacent to 1, returned as omega = N phi with N = norm(theta).
// `ideal` is an integral basis of adj(theta) O.
inline RingElement adjacent_minimum(const std::array<IntRow, 3>& ideal, const Int& N, long P) {
    const Int d(P);
    const long double t = std::cbrt(static_cast<long double>(P));
    const long double n = to_ld(N);
    const RingElement Nelem(N, Int(0), Int(0));
    const Int N2 = N * N;
    for (long double X = 2;; X *= 2) {
        if (X > 1e30L) throw Error(Errc::budget_exhausted, "adjacent minimum search diverged");
        std::array<IntRow, 3> rows = ideal;
        std::array<Vec3, 3> m;
        for (int i = 0; i < 3; ++i) {
            Vec3 v = minkowski(rows[i], t);
            m[i] = {v[0] / (n * X), v[1] / n, v[2] / n};
        }
        lll(m, rows);
        long double inv[3][3];
        if (!invert3(m, inv)) throw std::logic_error("adjacent_minimum: singular basis");
        long bound[3];
        for (int j = 0; j < 3; ++j) {
            long double s = std::fabs(inv[0][j]) + std::fabs(inv[1][j]) + std::fabs(inv[2][j]);
            bound[j] = static_cast<long>(std::floor(s * (1 + 1e-9L) + 1e-9L));
        }
        std::optional<RingElement> best;
        const long double tol = 1e-9L;
        for (long k0 = -bound[0]; k0 <= bound[0]; ++k0) {
            for (long k1 = -bound[1]; k1 <= bound[1]; ++k1) {
                for (long k2 = -bound[2]; k2 <= bound[2]; ++k2) {
                    long double yr = k0 * m[0][0] + k1 * m[1][0] + k2 * m[2][0];
                    if (yr * X < 1 - tol || yr > 1 + tol) continue;
                    long double yre = k0 * m[0][1] + k1 * m[1][1] + k2 * m[2][1];
                    long double yim = k0 * m[0][2] + k1 * m[1][2] + k2 * m[2][2];
                    if (yre * yre + yim * yim > 1 + tol) continue;
                    RingElement w;
                    w.a = k0 * rows[0][0] + k1 * rows[1][0] + k2 * rows[2][0];
                    w.b = k0 * rows[0][1] + k1 * rows[1][1] + k2 * rows[2][1];
                    w.c = k0 * rows[0][2] + k1 * rows[1][2] + k2 * rows[2][2];
                    if (real_compare(w, Nelem, d) <= 0) continue;
                    RingElement lhs(N2 * w.a - norm(w, d), N2 * w.b, N2 * w.c);
                    if (real_sign(lhs, d) <= 0) continue;
                    if (!best || real_compare(w, *best, d) < 0) best = w;
                }
            }
        }
        // A hit is only conclusive if it lies inside the box that was fully enumerated.
        if (best) {
            RingElement limit(N * Int(static_cast<double>(X)), Int(0), Int(0));
            if (real_compare(*best, limit, d) <= 0) return *best;
        }
    }
}

inline std::array<IntRow, 3> inverse_ideal_basis(const RingElement& theta, const Int& N, long P) {
    const Int d(P);
    RingElement adj = adjugate(theta, d);
    RingElement adj_pi = mul(adj, RingElement(0, 1, 0), d);
    RingElement adj_pi2 = mul(adj_pi, RingElement(0, 1, 0), d);
    std::vector<IntRow> gens;
    for (const auto& g : {adj, adj_pi, adj_pi2}) gens.push_back({g.a, g.b, g.c});
    return hermite_basis(gens, N);
}

// Walks the chain of relative minima of Z[pi] starting at 1; the first unit reached is the
// fundamental unit.
inline RingElement unit_by_reduction(long P, const UnitBudget& budget) {
    const Int d(P);
    RingElement theta = RingElement::one();
    Int N = 1;
    for (long step = 0; step < budget.max_chain_steps; ++step) {
        auto ideal = inverse_ideal_basis(theta, N, P);
        RingElement w = adjacent_minimum(ideal, N, P);
        theta = exact_div(mul(theta, w, d), N);
        N = exact_div(norm(w, d), N * N);
        if (N == 1) return theta;
        if (N <= 0) throw std::logic_error("unit_by_reduction: non-positive norm on the chain");
    }
    throw Error(Errc::budget_exhausted, "relative-minimum chain exceeded step budget");
}

// Exact LLL (delta = 99/100) on three integer vectors, mirroring every step on `coeffs`.
inline void lll_exact(std::array<IntRow, 3>& b, std::array<IntRow, 3>& coeffs) {
    using Rat = mpq_class;
    Rat mu[3][3];
    Rat B[3];
    auto gram_schmidt = [&] {
        std::array<std::array<Rat, 3>, 3> bs;
        for (int i = 0; i < 3; ++i) {
            for (int k = 0; k < 3; ++k) bs[i][k] = b[i][k];
            for (int j = 0; j < i; ++j) {
                Rat d = 0;
                for (int k = 0; k < 3; ++k) d += Rat(b[i][k]) * bs[j][k];
                mu[i][j] = d / B[j];
                for (int k = 0; k < 3; ++k) bs[i][k] -= mu[i][j] * bs[j][k];
            }
            B[i] = 0;
            for (int k = 0; k < 3; ++k) B[i] += bs[i][k] * bs[i][k];
            if (B[i] == 0) throw std::logic_error("lll_exact: dependent vectors");
        }
    };
    gram_schmidt();
    const Rat delta(99, 100);
    int k = 1;
    while (k < 3) {
        for (int j = k - 1; j >= 0; --j) {
            Rat twice = 2 * mu[k][j];
            if (abs(twice) <= 1) continue;
            // nearest integer to mu[k][j]
            Int q;
            Int num = twice.get_num() + twice.get_den();
            Int den = 2 * twice.get_den();
            mpz_fdiv_q(q.get_mpz_t(), num.get_mpz_t(), den.get_mpz_t());
            for (int c = 0; c < 3; ++c) {
                b[k][c] -= q * b[j][c];
                coeffs[k][c] -= q * coeffs[j][c];
            }
            gram_schmidt();
        }
        if (B[k] >= (delta - mu[k][k - 1] * mu[k][k - 1]) * B[k - 1]) {
            ++k;
        } else {
            std::swap(b[k], b[k - 1]);
            std::swap(coeffs[k], coeffs[k - 1]);
            gram_schmidt();
            k = std::max(k - 1, 1);
        }
    }
}

// Integer vectors y with |sum y_i b_i|^2 <= R (Fincke-Pohst on an LLL-reduced basis),
// returned as coefficient triples sum y_i coeffs_i.
inline std::vector<IntRow> short_vectors(const std::array<IntRow, 3>& b, const std::array<IntRow, 3>& coeffs,
                                         const Int& R, long& nodes, long max_nodes) {
    using Rat = mpq_class;
    Rat mu[3][3];
    Rat Bq[3];
    std::array<std::array<Rat, 3>, 3> bs;
    for (int i = 0; i < 3; ++i) {
        for (int k = 0; k < 3; ++k) bs[i][k] = b[i][k];
        for (int j = 0; j < i; ++j) {
            Rat d = 0;
            for (int k = 0; k < 3; ++k) d += Rat(b[i][k]) * bs[j][k];
            mu[i][j] = d / Bq[j];
            for (int k = 0; k < 3; ++k) bs[i][k] -= mu[i][j] * bs[j][k];
        }
        Bq[i] = 0;
        for (int k = 0; k < 3; ++k) Bq[i] += bs[i][k] * bs[i][k];
    }
    // Normalized to R = 1; the search region is widened slightly to absorb rounding.
    double m[3][3] = {}, B[3];
    for (int i = 0; i < 3; ++i) {
        B[i] = Rat(Bq[i] / R).get_d();
        for (int j = 0; j < i; ++j) m[i][j] = mu[i][j].get_d();
    }
    const double bound = 1 + 1e-6;
    std::vector<IntRow> out;
    long y[3];
    auto center = [&](int i) {
        double c = 0;
        for (int j = i + 1; j < 3; ++j) c -= m[j][i] * static_cast<double>(y[j]);
        return c;
    };
    auto visit = [&](auto&& self, int i, double used) -> void {
        const double c = center(i);
        const double r = std::sqrt(std::max(0.0, (bound - used) / B[i])) + 1e-9;
        for (long v = static_cast<long>(std::ceil(c - r)); v <= static_cast<long>(std::floor(c + r)); ++v) {
            if (++nodes > max_nodes) throw Error(Errc::budget_exhausted, "unit enumeration exceeded budget");
            const double d = static_cast<double>(v) - c;
            const double u = used + B[i] * d * d;
            if (u > bound) continue;
            y[i] = v;
            if (i == 0) {
                IntRow e{Int(0), Int(0), Int(0)};
                for (int j = 0; j < 3; ++j) {
                    for (int k = 0; k < 3; ++k) e[k] += y[j] * coeffs[j][k];
                }
                out.push_back(e);
            } else {
                self(self, i - 1, u);
            }
        }
    };
    visit(visit, 2, 0.0);
    return out;
}

// Exhaustive search, one window [X, 2X] at a time for X = 1, 2, 4, ... A unit u of value x has
// conjugates of modulus x^(-1/2), which gives |a - b t|, |a - c t^2| <= 2 / sqrt(3x) and
// |a| <= (2X + 2) / 3 =: A. So every unit in the window lies in the region
//   (3X/4)((a - b t)^2 + (a - c t^2)^2) + (a / A)^2 <= 3
// whose lattice points are listed exactly by short_vectors on a scaled, rounded basis.
inline RingElement unit_by_enumeration(long P, const UnitBudget& budget) {
    const Int d(P);
    long nodes = 0;
    for (unsigned long j = 0;; ++j) {
        if (j > 4000) throw Error(Errc::budget_exhausted, "unit enumeration exceeded window budget");
        const Int X = pow(Int(2), j);
        // Coefficients are at most 2X + 2, so rounding the basis moves a candidate by at most
        // 2X + 2 per coordinate; with S = 2^(j + 48) that is below 2^-45 of the radius.
        const unsigned long sbits = j + 48;
        const mpfr_prec_t prec = static_cast<mpfr_prec_t>(2 * sbits + 128);
        mpfr_t t, s1, v, w;
        mpfr_inits2(prec, t, s1, v, w, static_cast<mpfr_ptr>(nullptr));
        mpfr_set_si(t, P, MPFR_RNDN);
        mpfr_cbrt(t, t, MPFR_RNDN);
        mpfr_set_z(s1, X.get_mpz_t(), MPFR_RNDN);
        mpfr_mul_ui(s1, s1, 3, MPFR_RNDN);
        mpfr_div_ui(s1, s1, 4, MPFR_RNDN);
        mpfr_sqrt(s1, s1, MPFR_RNDN);
        mpfr_mul_2ui(s1, s1, sbits, MPFR_RNDN);  // S * sqrt(3X/4)
        auto rounded = [&](mpfr_t x) {
            Int r;
            mpfr_get_z(r.get_mpz_t(), x, MPFR_RNDN);
            return r;
        };
        const Int ea = rounded(s1);
        mpfr_mul(v, s1, t, MPFR_RNDN);
        const Int eb = rounded(v);
        mpfr_mul(w, v, t, MPFR_RNDN);
        const Int ec = rounded(w);
        mpfr_set_ui(v, 3, MPFR_RNDN);
        mpfr_mul_2ui(v, v, sbits, MPFR_RNDN);
        mpfr_div_z(v, v, Int(2 * X + 2).get_mpz_t(), MPFR_RNDN);  // S / A
        const Int ez = rounded(v);
        mpfr_clears(t, s1, v, w, static_cast<mpfr_ptr>(nullptr));

        std::array<IntRow, 3> basis{IntRow{ea, ea, ez}, IntRow{-eb, Int(0), Int(0)}, IntRow{Int(0), -ec, Int(0)}};
        std::array<IntRow, 3> coeffs{IntRow{Int(1), Int(0), Int(0)}, IntRow{Int(0), Int(1), Int(0)},
                                     IntRow{Int(0), Int(0), Int(1)}};
        lll_exact(basis, coeffs);
        const Int R = 3 * pow(Int(2), 2 * sbits);
        std::optional<RingElement> best;
        for (const auto& e : short_vectors(basis, coeffs, R, nodes, budget.max_enumeration)) {
            RingElement u(e[0], e[1], e[2]);
            if (norm(u, d) != 1) continue;
            if (real_compare(u, RingElement::one(), d) <= 0) continue;
            if (!best || real_compare(u, *best, d) < 0) best = u;
        }
        // Windows below X were empty, so the least unit found is fundamental once it is <= 2X.
        if (best && real_compare(*best, RingElement(2 * X, Int(0), Int(0)), d) <= 0) return *best;
    }
}

}  // namespace detail

inline FundamentalUnit fundamental_unit(const FieldParams& fp, UnitBackend backend = UnitBackend::reduction,
                                        const UnitBudget& budget = {}) {
    if (fp.P < 2 || is_perfect_cube(Int(fp.P))) throw std::invalid_argument("P must be a positive non-cube");
    RingElement e = backend == UnitBackend::reduction ? detail::unit_by_reduction(fp.P, budget)
                                                      : detail::unit_by_enumeration(fp.P, budget);
    FundamentalUnit u{normalize_unit(e, fp.P), fp, backend};
    assert_unit(u);
    return u;
}

/// iota from (beta mod p, gamma mod p).
inline int classify_iota(long beta_mod_p, long gamma_mod_p) {
    return (beta_mod_p == 0 && gamma_mod_p != 0) ? 2 : 1;
}

inline int classify_iota(FundamentalUnit& unit, long p) {
    int iota = classify_iota(mod(unit.beta(), p), mod(unit.gamma(), p));
    unit.params.iota = iota;
    return iota;
}

/// Disk cache of fundamental units keyed by P. One record per line:
/// `P alpha beta gamma norm backend`, backend 0 = enumeration, 1 = reduction.
class UnitCache {
public:
    UnitCache() = default;
    explicit UnitCache(std::string path) : path_(std::move(path)) { load(); }

    std::optional<FundamentalUnit> get(long P) const {
        std::shared_lock lock(mutex_);
        auto it = units_.find(P);
        if (it == units_.end()) return std::nullopt;
        return it->second;
    }

    void put(const FundamentalUnit& u) {
        std::unique_lock lock(mutex_);
        if (units_.count(u.params.P)) return;
        units_[u.params.P] = u;
        if (path_.empty()) return;
        std::ofstream out(path_, std::ios::app);
        out << u.params.P << ' ' << u.element.a << ' ' << u.element.b << ' ' << u.element.c << ' '
            << norm(u.element, Int(u.params.P)) << ' ' << (u.backend == UnitBackend::reduction ? 1 : 0)
            << '\n';
    }

    std::size_t size() const {
        std::shared_lock lock(mutex_);
        return units_.size();
    }

    std::size_t rejected() const { return rejected_; }

private:
    // Records that fail re-validation are ignored and recomputed on demand.
    void load() {
        std::ifstream in(path_);
        std::string line;
        while (std::getline(in, line)) {
            std::istringstream ls(line);
            std::string P, a, b, c, n, backend;
            if (!(ls >> P >> a >> b >> c >> n >> backend)) {
                if (!line.empty()) ++rejected_;
                continue;
            }
            try {
                FundamentalUnit u;
                u.params.P = to_long(parse_int(P));
                u.element = {parse_int(a), parse_int(b), parse_int(c)};
                u.backend = backend == "0" ? UnitBackend::enumeration : UnitBackend::reduction;
                if (u.params.P < 2 || norm(u.element, Int(u.params.P)) != parse_int(n)) {
                    ++rejected_;
                    continue;
                }
                assert_unit(u);
                units_[u.params.P] = u;
            } catch (const std::exception&) {
                ++rejected_;
            }
        }
    }

    std::string path_;
    mutable std::shared_mutex mutex_;
    std::map<long, FundamentalUnit> units_;
    std::size_t rejected_ = 0;
};

inline FundamentalUnit cached_unit(const FieldParams& fp, UnitCache* cache, const UnitBudget& budget = {}) {
    if (cache) {
        if (auto u = cache->get(fp.P)) {
            u->params = fp;
            return *u;
        }
    }
    FundamentalUnit u = fundamental_unit(fp, UnitBackend::reduction, budget);
    if (cache) cache->put(u);
    return u;
}

struct AacmResult {
    long p = 0;
    long P = 0;
    FundamentalUnit unit;
    long beta_mod_p = 0;
    bool holds = false;
    bool index_three = false;  // Z[P^(1/3)] is non-maximal (P = +-1 mod 9)
};

inline AacmResult aacm_for(long p, long P, UnitCache* cache, const UnitBudget& budget) {
    FieldParams fp;
    fp.p = p;
    fp.P = P;
    AacmResult r;
    r.p = p;
    r.P = P;
    r.unit = cached_unit(fp, cache, budget);
    r.beta_mod_p = mod(r.unit.beta(), p);
    r.holds = r.beta_mod_p != 0;
    r.index_three = excluded_mod9(P);
    return r;
}

/// Both orders Z[p^(1/3)] and Z[(2p)^(1/3)]. p = 3 is refused unless `allow_three`.
inline std::pair<AacmResult, AacmResult> check_aacm(long p, bool allow_three = false, UnitCache* cache = nullptr,
                                                    const UnitBudget& budget = {}) {
    if (p < 3 || !is_small_prime(p)) throw std::invalid_argument("check_aacm: p must be an odd prime");
    if (p == 3 && !allow_three) throw std::invalid_argument("check_aacm: p = 3 is excluded (diagnostic mode only)");
    return {aacm_for(p, p, cache, budget), aacm_for(p, 2 * p, cache, budget)};
}

struct AacmScanReport {
    std::vector<AacmResult> exceptions;
    std::vector<long> skipped;
    std::vector<long> index_three;  // P values checked in a non-maximal equation order
    long primes_checked = 0;
};

struct ScanOptions {
    int jobs = 1;
    bool include_three = false;
    UnitCache* cache = nullptr;
    UnitBudget budget{};
};

inline std::vector<long> primes_below(long n) {
    std::vector<long> out;
    if (n <= 2) return out;
    std::vector<bool> composite(static_cast<std::size_t>(n), false);
    for (long i = 2; i < n; ++i) {
        if (composite[i]) continue;
        out.push_back(i);
        for (long j = i * i; j < n; j += i) composite[j] = true;
    }
    return out;
}

inline AacmScanReport aacm_scan(long p_max, const ScanOptions& opt = {}) {
    std::vector<long> ps;
    for (long p : primes_below(p_max)) {
        if (p == 2) continue;
        if (p == 3 && !opt.include_three) continue;
        ps.push_back(p);
    }
    struct Slot {
        std::optional<std::pair<AacmResult, AacmResult>> res;
        bool skipped = false;
    };
    std::vector<Slot> slots(ps.size());
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i = next++; i < ps.size(); i = next++) {
            try {
                slots[i].res = check_aacm(ps[i], true, opt.cache, opt.budget);
            } catch (const Error& e) {
                if (e.code() != Errc::budget_exhausted) throw;
                slots[i].skipped = true;
            }
        }
    };
    int jobs = std::max(1, opt.jobs);
    if (jobs == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (int j = 0; j < jobs; ++j) pool.emplace_back(worker);
        for (auto& th : pool) th.join();
    }
    AacmScanReport report;
    for (std::size_t i = 0; i < ps.size(); ++i) {
        if (slots[i].skipped) {
            report.skipped.push_back(ps[i]);
            continue;
        }
        ++report.primes_checked;
        for (const AacmResult* r : {&slots[i].res->first, &slots[i].res->second}) {
            if (!r->holds) report.exceptions.push_back(*r);
            if (r->index_three) report.index_three.push_back(r->P);
        }
    }
    return report;
}

struct DensityReport {
    long prime_bound = 0;
    long prime_count = 0;
    Interval d_M;
    Interval odd_ratio;
};

/// prod_{p <= prime_bound} (1 + 1/p)^-1 * zeta(2)^-1 and 1 - 2 d(M), enclosed with outward
/// rounding at 256 bits.
inline DensityReport density_report(long prime_bound) {
    if (prime_bound < 2) throw std::invalid_argument("density_report: prime_bound must be >= 2");
    DensityReport r;
    r.prime_bound = prime_bound;
    mpfr_t lo, hi, pi2;
    mpfr_inits2(256, lo, hi, pi2, static_cast<mpfr_ptr>(nullptr));
    mpfr_set_ui(lo, 1, MPFR_RNDD);
    mpfr_set_ui(hi, 1, MPFR_RNDU);
    for (long p : primes_below(prime_bound + 1)) {
        ++r.prime_count;
        mpfr_mul_ui(lo, lo, static_cast<unsigned long>(p), MPFR_RNDD);
        mpfr_div_ui(lo, lo, static_cast<unsigned long>(p + 1), MPFR_RNDD);
        mpfr_mul_ui(hi, hi, static_cast<unsigned long>(p), MPFR_RNDU);
        mpfr_div_ui(hi, hi, static_cast<unsigned long>(p + 1), MPFR_RNDU);
    }
    // lower bound uses an upper bound for pi^2 and vice versa
    mpfr_const_pi(pi2, MPFR_RNDU);
    mpfr_sqr(pi2, pi2, MPFR_RNDU);
    mpfr_mul_ui(lo, lo, 6, MPFR_RNDD);
    mpfr_div(lo, lo, pi2, MPFR_RNDD);
    mpfr_const_pi(pi2, MPFR_RNDD);
    mpfr_sqr(pi2, pi2, MPFR_RNDD);
    mpfr_mul_ui(hi, hi, 6, MPFR_RNDU);
    mpfr_div(hi, hi, pi2, MPFR_RNDU);
    mpfr_get_q(r.d_M.lo.get_mpq_t(), lo);
    mpfr_get_q(r.d_M.hi.get_mpq_t(), hi);
    mpfr_clears(lo, hi, pi2, static_cast<mpfr_ptr>(nullptr));
    r.odd_ratio = {1 - 2 * r.d_M.hi, 1 - 2 * r.d_M.lo};
    return r;
}

}  // namespace hasse
