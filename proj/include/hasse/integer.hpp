#pragma once

// Thin helpers over GMP's mpz_class. Every coefficient in this library is an
// arbitrary-precision integer; fixed-width types only appear in hot loops that
// reduce modulo a small prime.

#include <gmpxx.h>

#include <cstdint>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace hasse {

using Int = mpz_class;

/// Least non-negative residue of `a` modulo `m` (m > 0).
inline Int mod(const Int& a, const Int& m) {
    Int r;
    mpz_fdiv_r(r.get_mpz_t(), a.get_mpz_t(), m.get_mpz_t());
    return r;
}

inline long mod(const Int& a, long m) {
    return static_cast<long>(mpz_fdiv_ui(a.get_mpz_t(), static_cast<unsigned long>(m)));
}

inline Int pow(const Int& base, unsigned long e) {
    Int r;
    mpz_pow_ui(r.get_mpz_t(), base.get_mpz_t(), e);
    return r;
}

inline Int powmod(const Int& base, const Int& e, const Int& m) {
    Int r;
    mpz_powm(r.get_mpz_t(), base.get_mpz_t(), e.get_mpz_t(), m.get_mpz_t());
    return r;
}

inline Int gcd(const Int& a, const Int& b) {
    Int r;
    mpz_gcd(r.get_mpz_t(), a.get_mpz_t(), b.get_mpz_t());
    return r;
}

inline std::optional<Int> inverse_mod(const Int& a, const Int& m) {
    Int r;
    if (mpz_invert(r.get_mpz_t(), a.get_mpz_t(), m.get_mpz_t()) == 0) return std::nullopt;
    return mod(r, m);
}

inline bool divisible(const Int& n, const Int& d) {
    return mpz_divisible_p(n.get_mpz_t(), d.get_mpz_t()) != 0;
}

/// Exact quotient; throws if `d` does not divide `n`.
inline Int exact_div(const Int& n, const Int& d) {
    if (!divisible(n, d)) throw std::logic_error("exact_div: inexact division");
    Int q;
    mpz_divexact(q.get_mpz_t(), n.get_mpz_t(), d.get_mpz_t());
    return q;
}

/// l-adic valuation of a nonzero integer.
inline int valuation(const Int& n, const Int& l) {
    if (n == 0) return std::numeric_limits<int>::max();
    Int rest;
    return static_cast<int>(mpz_remove(rest.get_mpz_t(), n.get_mpz_t(), l.get_mpz_t()));
}

/// k-th root of `n` when `n` is a perfect k-th power (negative n allowed for odd k).
inline std::optional<Int> exact_root(const Int& n, unsigned long k) {
    if (n < 0 && k % 2 == 0) return std::nullopt;
    Int r;
    Int absn = abs(n);
    if (mpz_root(r.get_mpz_t(), absn.get_mpz_t(), k) == 0) return std::nullopt;
    return n < 0 ? Int(-r) : r;
}

inline bool is_perfect_cube(const Int& n) { return exact_root(n, 3).has_value(); }

inline std::string to_string(const Int& x) { return x.get_str(); }

inline Int parse_int(std::string_view s) {
    Int r;
    std::string owned(s);
    if (owned.empty() || r.set_str(owned, 10) != 0) {
        throw std::invalid_argument("not a decimal integer: '" + owned + "'");
    }
    return r;
}

inline bool fits_long(const Int& x) { return mpz_fits_slong_p(x.get_mpz_t()) != 0; }

inline long to_long(const Int& x) {
    if (!fits_long(x)) throw std::overflow_error("integer does not fit in long: " + x.get_str());
    return x.get_si();
}

inline std::size_t bit_length(const Int& x) {
    return x == 0 ? 0 : mpz_sizeinbase(x.get_mpz_t(), 2);
}

}  // namespace hasse
