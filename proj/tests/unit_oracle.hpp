#pragma once

// Test-only oracle: certifies that a unit u > 1 of Z[P^(1/3)] is not a proper power.
//
// For a unit eta > 1 with real embedding x and complex embedding r + is (|.|^2 = 1/x):
//   3a = x + 2r,  3b t = x - r + sqrt3 s,  3c t^2 = x - r - sqrt3 s   (t = P^(1/3), up to s -> -s)
// so |3bt - x| <= 2/sqrt(x). b = 0 forces x <= 2^(2/3) and then c = 0, a contradiction,
// hence x + 2/sqrt(x) >= 3t, which bounds every unit above 1 from below.

#include "hasse/ring.hpp"

#include <mpfr.h>

#include <cmath>
#include <optional>
#include <stdexcept>
#include <vector>

namespace oracle {

using hasse::Int;
using hasse::RingElement;

/// A number below every unit > 1 of Z[P^(1/3)].
inline double unit_lower_bound(long P) {
    const double target = 3 * std::cbrt(static_cast<double>(P));
    double lo = 1, hi = target;
    for (int i = 0; i < 200; ++i) {
        double mid = (lo + hi) / 2;
        (mid + 2 / std::sqrt(mid) < target ? lo : hi) = mid;
    }
    return lo * (1 - 1e-9);
}

class Mpfr {
public:
    explicit Mpfr(mpfr_prec_t prec) { mpfr_init2(v_, prec); }
    ~Mpfr() { mpfr_clear(v_); }
    Mpfr(const Mpfr&) = delete;
    Mpfr& operator=(const Mpfr&) = delete;
    mpfr_ptr get() { return v_; }

private:
    mpfr_t v_;
};

inline Int round_to_int(mpfr_ptr x) {
    Int out;
    mpfr_get_z(out.get_mpz_t(), x, MPFR_RNDN);
    return out;
}

/// True if u = eta^k for some eta in Z[P^(1/3)].
inline bool is_kth_power(const RingElement& u, long P, unsigned long k) {
    const Int d(P);
    std::size_t bits = std::max({mpz_sizeinbase(u.a.get_mpz_t(), 2), mpz_sizeinbase(u.b.get_mpz_t(), 2),
                                 mpz_sizeinbase(u.c.get_mpz_t(), 2)});
    const mpfr_prec_t prec = static_cast<mpfr_prec_t>(bits + 160);
    Mpfr t(prec), t2(prec), x(prec), tmp(prec), r(prec), s(prec), sqrt3(prec), bnum(prec), cnum(prec);
    mpfr_set_si(t.get(), P, MPFR_RNDN);
    mpfr_cbrt(t.get(), t.get(), MPFR_RNDN);
    mpfr_sqr(t2.get(), t.get(), MPFR_RNDN);
    // x = u^(1/k)
    mpfr_mul_z(x.get(), t2.get(), u.c.get_mpz_t(), MPFR_RNDN);
    mpfr_mul_z(tmp.get(), t.get(), u.b.get_mpz_t(), MPFR_RNDN);
    mpfr_add(x.get(), x.get(), tmp.get(), MPFR_RNDN);
    mpfr_add_z(x.get(), x.get(), u.a.get_mpz_t(), MPFR_RNDN);
    mpfr_rootn_ui(x.get(), x.get(), k, MPFR_RNDN);
    mpfr_sqrt_ui(sqrt3.get(), 3, MPFR_RNDN);

    const double xd = mpfr_get_d(x.get(), MPFR_RNDN);
    const double spread = 2 / std::sqrt(xd) + 1e-6;
    Int T_lo, T_hi;
    mpfr_sub_d(tmp.get(), x.get(), spread, MPFR_RNDD);
    mpfr_get_z(T_lo.get_mpz_t(), tmp.get(), MPFR_RNDD);
    mpfr_add_d(tmp.get(), x.get(), spread, MPFR_RNDU);
    mpfr_get_z(T_hi.get_mpz_t(), tmp.get(), MPFR_RNDU);
    for (Int T = T_lo; T <= T_hi; ++T) {
        if (T % 3 != 0) continue;
        // r = (T - x) / 2, s^2 = 1/x - r^2
        mpfr_z_sub(r.get(), T.get_mpz_t(), x.get(), MPFR_RNDN);
        mpfr_div_2ui(r.get(), r.get(), 1, MPFR_RNDN);
        mpfr_ui_div(s.get(), 1, x.get(), MPFR_RNDN);
        mpfr_sqr(tmp.get(), r.get(), MPFR_RNDN);
        mpfr_sub(s.get(), s.get(), tmp.get(), MPFR_RNDN);
        if (mpfr_sgn(s.get()) < 0) {
            if (mpfr_get_d(s.get(), MPFR_RNDN) < -1e-6) continue;
            mpfr_set_zero(s.get(), 1);
        }
        mpfr_sqrt(s.get(), s.get(), MPFR_RNDN);
        mpfr_mul(s.get(), s.get(), sqrt3.get(), MPFR_RNDN);
        for (int sign : {1, -1}) {
            mpfr_sub(bnum.get(), x.get(), r.get(), MPFR_RNDN);
            mpfr_sub(cnum.get(), x.get(), r.get(), MPFR_RNDN);
            if (sign > 0) {
                mpfr_add(bnum.get(), bnum.get(), s.get(), MPFR_RNDN);
                mpfr_sub(cnum.get(), cnum.get(), s.get(), MPFR_RNDN);
            } else {
                mpfr_sub(bnum.get(), bnum.get(), s.get(), MPFR_RNDN);
                mpfr_add(cnum.get(), cnum.get(), s.get(), MPFR_RNDN);
            }
            mpfr_div(bnum.get(), bnum.get(), t.get(), MPFR_RNDN);
            mpfr_div_ui(bnum.get(), bnum.get(), 3, MPFR_RNDN);
            mpfr_div(cnum.get(), cnum.get(), t2.get(), MPFR_RNDN);
            mpfr_div_ui(cnum.get(), cnum.get(), 3, MPFR_RNDN);
            RingElement eta(Int(T / 3), round_to_int(bnum.get()), round_to_int(cnum.get()));
            if (hasse::pow(eta, k, d) == u) return true;
        }
    }
    return false;
}

inline std::vector<unsigned long> primes_up_to(unsigned long n) {
    std::vector<unsigned long> out;
    for (unsigned long q = 2; q <= n; ++q) {
        bool prime = true;
        for (unsigned long e = 2; e * e <= q; ++e) prime = prime && q % e != 0;
        if (prime) out.push_back(q);
    }
    return out;
}

/// u is a unit > 1 that is not eta^k for any prime k; with the lower bound on units this
/// makes u the fundamental unit.
inline bool is_fundamental(const RingElement& u, long P) {
    const Int d(P);
    if (hasse::norm(u, d) != 1) return false;
    if (hasse::real_compare(u, RingElement::one(), d) <= 0) return false;
    double logu = std::log(hasse::real_value(u, d, 64).approx());
    auto kmax = static_cast<unsigned long>(std::floor(logu / std::log(unit_lower_bound(P)))) + 1;
    for (unsigned long k : primes_up_to(kmax)) {
        if (is_kth_power(u, P, k)) return false;
    }
    return true;
}

/// Least unit > 1 by scanning the coefficient box holding every unit u with 1 < u <= U,
/// doubling U until one appears. Linear in the unit, so only for small P.
inline RingElement box_scan_unit(long P) {
    const Int d(P);
    const long double t = std::cbrt(static_cast<long double>(P));
    const long double cw = 2 / (std::sqrt(3.0L) * t * t);
    for (long double U = 16;; U *= 2) {
        if (U > 1e12L) throw std::runtime_error("box_scan_unit: unit too large");
        long bmax = static_cast<long>(std::floor((U + 2) / (3 * t))) + 1;
        std::optional<RingElement> best;
        for (long b = -bmax; b <= bmax; ++b) {
            long double cmid = b / t;
            long c_lo = static_cast<long>(std::floor(cmid - cw - 1e-9L));
            long c_hi = static_cast<long>(std::ceil(cmid + cw + 1e-9L));
            for (long c = c_lo; c <= c_hi; ++c) {
                long double amid = (b * t + c * t * t) / 2;
                long a_lo = static_cast<long>(std::floor(amid - 1 - 1e-9L));
                long a_hi = static_cast<long>(std::ceil(amid + 1 + 1e-9L));
                for (long a = a_lo; a <= a_hi; ++a) {
                    __int128 A = a, B = b, C = c, D = P;
                    if (A * A * A + D * B * B * B + D * D * C * C * C - 3 * D * A * B * C != 1) continue;
                    RingElement u(a, b, c);
                    if (hasse::real_compare(u, RingElement::one(), d) <= 0) continue;
                    if (!best || hasse::real_compare(u, *best, d) < 0) best = u;
                }
            }
        }
        if (best && hasse::real_compare(*best, RingElement(Int(static_cast<double>(U)), Int(0), Int(0)), d) <= 0) {
            return *best;
        }
    }
}

}  // namespace oracle
