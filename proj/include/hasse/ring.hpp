#pragma once

// Arithmetic in the order Z[pi], pi^3 = P, of the pure cubic field Q(P^(1/3)).

#include "hasse/error.hpp"
#include "hasse/integer.hpp"

#include <gmpxx.h>

#include <algorithm>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <string>

namespace hasse {

struct FieldParams {
    long p = 0;
    long P = 0;
    int iota = 0;  // 0 until classified

    Int Piota() const { return pow(Int(P), static_cast<unsigned long>(iota)); }
    bool operator==(const FieldParams&) const = default;
};

enum class Preference { prefer_p, prefer_2p };

inline bool is_small_prime(long n) {
    if (n < 2) return false;
    for (long d = 2; d * d <= n; ++d) {
        if (n % d == 0) return false;
    }
    return true;
}

inline bool excluded_mod9(long P) { return P % 9 == 1 || P % 9 == 8; }

inline FieldParams make_field_params(long p, Preference pref = Preference::prefer_p) {
    if (p < 3 || !is_small_prime(p)) throw std::invalid_argument("p must be an odd prime");
    const bool p_ok = !excluded_mod9(p);
    const bool q_ok = !excluded_mod9(2 * p);
    FieldParams fp;
    fp.p = p;
    if (p_ok && q_ok) {
        fp.P = pref == Preference::prefer_p ? p : 2 * p;
    } else {
        fp.P = p_ok ? p : 2 * p;
    }
    return fp;
}

/// a + b*pi + c*pi^2.
struct RingElement {
    Int a, b, c;

    RingElement() = default;
    RingElement(Int a_, Int b_, Int c_) : a(std::move(a_)), b(std::move(b_)), c(std::move(c_)) {}
    RingElement(long a_, long b_, long c_) : a(a_), b(b_), c(c_) {}

    static RingElement one() { return {1, 0, 0}; }
    bool is_zero() const { return a == 0 && b == 0 && c == 0; }

    friend bool operator==(const RingElement& x, const RingElement& y) {
        return x.a == y.a && x.b == y.b && x.c == y.c;
    }
    friend RingElement operator-(const RingElement& x) { return {-x.a, -x.b, -x.c}; }
    friend RingElement operator+(const RingElement& x, const RingElement& y) {
        return {x.a + y.a, x.b + y.b, x.c + y.c};
    }
    friend RingElement operator-(const RingElement& x, const RingElement& y) {
        return {x.a - y.a, x.b - y.b, x.c - y.c};
    }
    std::string to_string() const { return "(" + a.get_str() + "," + b.get_str() + "," + c.get_str() + ")"; }

    friend std::ostream& operator<<(std::ostream& os, const RingElement& x) {
        return os << '(' << x.a << ',' << x.b << ',' << x.c << ')';
    }
};

// The `d` overloads take the cube pi^3 = d directly; the params overloads use d = P.

inline RingElement mul(const RingElement& x, const RingElement& y, const Int& d) {
    RingElement r;
    r.a = x.a * y.a + d * (x.b * y.c + x.c * y.b);
    r.b = x.a * y.b + x.b * y.a + d * x.c * y.c;
    r.c = x.a * y.c + x.b * y.b + x.c * y.a;
    return r;
}

inline RingElement mul(const RingElement& x, const RingElement& y, const FieldParams& fp) {
    return mul(x, y, Int(fp.P));
}

inline RingElement reduce(const RingElement& x, const Int& m) {
    return {mod(x.a, m), mod(x.b, m), mod(x.c, m)};
}

inline Int norm(const RingElement& x, const Int& d) {
    return x.a * x.a * x.a + d * x.b * x.b * x.b + d * d * x.c * x.c * x.c - 3 * d * x.a * x.b * x.c;
}

inline Int norm(const RingElement& x, const FieldParams& fp) { return norm(x, Int(fp.P)); }

/// Product of the two complex conjugates; x * adjugate(x) = norm(x).
inline RingElement adjugate(const RingElement& x, const Int& d) {
    return {x.a * x.a - d * x.b * x.c, d * x.c * x.c - x.a * x.b, x.b * x.b - x.a * x.c};
}

inline RingElement pow(const RingElement& x, unsigned long k, const Int& d,
                       const std::optional<Int>& modulus = std::nullopt) {
    RingElement result = RingElement::one();
    RingElement base = modulus ? reduce(x, *modulus) : x;
    if (modulus) result = reduce(result, *modulus);
    while (k > 0) {
        if (k & 1UL) {
            result = mul(result, base, d);
            if (modulus) result = reduce(result, *modulus);
        }
        k >>= 1;
        if (k > 0) {
            base = mul(base, base, d);
            if (modulus) base = reduce(base, *modulus);
        }
    }
    return result;
}

inline RingElement pow(const RingElement& x, unsigned long k, const FieldParams& fp,
                       const std::optional<Int>& modulus = std::nullopt) {
    return pow(x, k, Int(fp.P), modulus);
}

/// Divides every coefficient by `n`; throws if the division is inexact.
inline RingElement exact_div(const RingElement& x, const Int& n) {
    return {exact_div(x.a, n), exact_div(x.b, n), exact_div(x.c, n)};
}

using Rational = mpq_class;

struct Interval {
    Rational lo, hi;

    bool contains(const Rational& v) const { return lo <= v && v <= hi; }
    bool overlaps(const Interval& o) const { return lo <= o.hi && o.lo <= hi; }
    Rational width() const { return hi - lo; }
    Rational mid() const { return (lo + hi) / 2; }
    double approx() const { return mid().get_d(); }
};

namespace detail {

// d^(1/3) in [r / 2^k, (r + 1) / 2^k].
inline Interval cube_root_bounds(const Int& d, unsigned long k) {
    Int scaled = d;
    mpz_mul_2exp(scaled.get_mpz_t(), scaled.get_mpz_t(), 3 * k);
    Int r;
    mpz_root(r.get_mpz_t(), scaled.get_mpz_t(), 3);
    Int den = 1;
    mpz_mul_2exp(den.get_mpz_t(), den.get_mpz_t(), k);
    Interval out{Rational(r, den), Rational(r + 1, den)};
    out.lo.canonicalize();
    out.hi.canonicalize();
    return out;
}

inline Interval scale(const Int& k, const Interval& x) {
    if (k >= 0) return {x.lo * k, x.hi * k};
    return {x.hi * k, x.lo * k};
}

inline Interval evaluate(const RingElement& x, const Interval& theta) {
    Interval theta2{theta.lo * theta.lo, theta.hi * theta.hi};
    Interval bt = scale(x.b, theta);
    Interval ct = scale(x.c, theta2);
    return {x.a + bt.lo + ct.lo, x.a + bt.hi + ct.hi};
}

inline unsigned long initial_bits(const RingElement& x) {
    return 64 + std::max({bit_length(x.a), bit_length(x.b), bit_length(x.c)});
}

}  // namespace detail

/// Enclosure of a + b d^(1/3) + c d^(2/3) (d > 0) of width at most 2^-bits * max(1, |value|).
inline Interval real_value(const RingElement& x, const Int& d, unsigned long precision_bits) {
    if (precision_bits < 32) throw std::invalid_argument("precision_bits must be at least 32");
    if (x.b == 0 && x.c == 0) return {Rational(x.a), Rational(x.a)};
    unsigned long k = precision_bits + detail::initial_bits(x);
    for (;;) {
        Interval v = detail::evaluate(x, detail::cube_root_bounds(d, k));
        Rational mag = abs(v.lo) > abs(v.hi) ? Rational(abs(v.lo)) : Rational(abs(v.hi));
        if (mag < 1) mag = 1;
        Rational tol = mag;
        mpq_div_2exp(tol.get_mpq_t(), tol.get_mpq_t(), precision_bits);
        if (v.width() <= tol) return v;
        k *= 2;
    }
}

inline Interval real_value(const RingElement& x, const FieldParams& fp, unsigned long precision_bits) {
    return real_value(x, Int(fp.P), precision_bits);
}

/// Exact sign of the real embedding. Zero only for the zero element, since d is assumed
/// not to be a perfect cube.
inline int real_sign(const RingElement& x, const Int& d) {
    if (x.b == 0 && x.c == 0) return sgn(x.a);
    if (is_perfect_cube(d)) {
        Int t = *exact_root(d, 3);
        return sgn(x.a + x.b * t + x.c * t * t);
    }
    unsigned long k = detail::initial_bits(x);
    for (;;) {
        Interval v = detail::evaluate(x, detail::cube_root_bounds(d, k));
        if (v.lo > 0) return 1;
        if (v.hi < 0) return -1;
        k *= 2;
    }
}

inline int real_sign(const RingElement& x, const FieldParams& fp) { return real_sign(x, Int(fp.P)); }

/// Sign of (x - y) in the real embedding.
inline int real_compare(const RingElement& x, const RingElement& y, const Int& d) {
    return real_sign(x - y, d);
}

}  // namespace hasse
