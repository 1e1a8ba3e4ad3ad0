#pragma once

// Primality and the bounded prime searches over the binary cubic forms
// P^iota b^3 + c^3 (coefficient pairs) and a^3 + P^(2 iota) c^3 (descent primes).

#include "hasse/error.hpp"
#include "hasse/integer.hpp"
#include "hasse/ring.hpp"

#include <algorithm>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

namespace hasse {

namespace detail {

inline std::uint64_t mulmod64(std::uint64_t a, std::uint64_t b, std::uint64_t m) {
    return static_cast<std::uint64_t>(static_cast<unsigned __int128>(a) * b % m);
}

inline std::uint64_t powmod64(std::uint64_t b, std::uint64_t e, std::uint64_t m) {
    std::uint64_t r = 1 % m;
    b %= m;
    while (e) {
        if (e & 1) r = mulmod64(r, b, m);
        b = mulmod64(b, b, m);
        e >>= 1;
    }
    return r;
}

// Strong probable-prime test to base a; n odd, n > a.
inline bool strong_probable_prime(std::uint64_t n, std::uint64_t a) {
    std::uint64_t d = n - 1;
    int s = 0;
    while ((d & 1) == 0) {
        d >>= 1;
        ++s;
    }
    std::uint64_t x = powmod64(a, d, n);
    if (x == 1 || x == n - 1) return true;
    for (int i = 1; i < s; ++i) {
        x = mulmod64(x, x, n);
        if (x == n - 1) return true;
    }
    return false;
}

}  // namespace detail

inline bool is_prime_u64(std::uint64_t n) {
    static constexpr std::uint64_t small[] = {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37};
    if (n < 2) return false;
    for (std::uint64_t q : small) {
        if (n % q == 0) return n == q;
    }
    if (n < 37 * 37) return true;
    // These twelve bases are deterministic below 3.3e24.
    for (std::uint64_t a : small) {
        if (!detail::strong_probable_prime(n, a)) return false;
    }
    return true;
}

/// Deterministic below 2^64; beyond that a BPSW-based probable-prime test.
inline bool is_prime(const Int& n) {
    if (n < 2) return false;
    if (mpz_fits_ulong_p(n.get_mpz_t())) return is_prime_u64(n.get_ui());
    return mpz_probab_prime_p(n.get_mpz_t(), 30) != 0;
}

inline bool is_probable_only(const Int& n) { return bit_length(n) > 64; }

/// Lattice points of Z^2 ordered by (X^2 + Y^2, polar angle in [0, 2pi)).
class Spiral {
public:
    std::pair<long, long> next() {
        while (pos_ == batch_.size()) fill();
        return batch_[pos_++];
    }

private:
    static int half(const std::pair<long, long>& v) {
        return (v.second > 0 || (v.second == 0 && v.first > 0)) ? 0 : 1;
    }

    static bool before(const std::pair<long, long>& u, const std::pair<long, long>& v) {
        long ru = u.first * u.first + u.second * u.second;
        long rv = v.first * v.first + v.second * v.second;
        if (ru != rv) return ru < rv;
        int hu = half(u), hv = half(v);
        if (hu != hv) return hu < hv;
        return u.first * v.second - u.second * v.first > 0;
    }

    void fill() {
        long lo = next_lo_;
        long hi = lo == 0 ? 1 : lo + std::max(16L, lo / 4);
        long r = 0;
        while ((r + 1) * (r + 1) < hi) ++r;
        batch_.clear();
        pos_ = 0;
        for (long x = -r; x <= r; ++x) {
            for (long y = -r; y <= r; ++y) {
                long n = x * x + y * y;
                if (n >= lo && n < hi) batch_.emplace_back(x, y);
            }
        }
        std::sort(batch_.begin(), batch_.end(), before);
        next_lo_ = hi;
    }

    std::vector<std::pair<long, long>> batch_;
    std::size_t pos_ = 0;
    long next_lo_ = 0;
};

enum class PairTemplate { paper, section5 };

struct FormPrime {
    Int b, c, q;
    long X = 0, Y = 0;
    int branch = 0;  // 0 = f (or f+), 1 = g (or f-)

    bool same_pair(const FormPrime& o) const { return b == o.b && c == o.c; }
};

struct PairShape {
    Int b, c;
    int branch;
};

/// Whether the simplified section-5 style template applies (P = p = 1 mod 3, iota = 1).
inline bool simplified_template_applies(const FieldParams& fp) {
    return fp.P == fp.p && fp.p % 3 == 1 && fp.iota == 1;
}

inline std::vector<PairShape> pair_shapes(const FieldParams& fp, PairTemplate tmpl, long X, long Y) {
    const Int P(fp.P);
    const Int x(X), y(Y);
    if (tmpl == PairTemplate::section5 && simplified_template_applies(fp)) {
        return {{3 * x + 1, 3 * y + 1, 0}};
    }
    if (fp.p == 3) {
        return {{P * x + 1, P * y - 1, 0}, {P * x - 1, P * y - 1, 1}};
    }
    const Int s = 3 * P;
    if (fp.iota == 1 && fp.P % 3 == 2) {
        return {{s * x - 1, s * y + 1, 0}, {s * x + 1, s * y + 3, 1}};
    }
    return {{s * x + 1, s * y + 1, 0}, {s * x - 1, s * y + 3, 1}};
}

inline Int pair_value(const FieldParams& fp, const Int& b, const Int& c) {
    return fp.Piota() * b * b * b + c * c * c;
}

/// The conditions every coefficient-pair prime must satisfy, checked from the raw integers.
inline bool valid_form_prime(const FieldParams& fp, const Int& b, const Int& c, const Int& q) {
    if (q != pair_value(fp, b, c)) return false;
    if (q <= 0 || mod(q, 3L) != 2) return false;
    if (gcd(q, Int(fp.P)) != 1) return false;
    return is_prime(q);
}

/// Coefficient-pair primes in spiral order; every template instance at a spiral point is
/// considered in template order before moving on.
class PairStream {
public:
    PairStream(FieldParams fp, PairTemplate tmpl, long max_points = 4'000'000)
        : fp_(fp), tmpl_(tmpl), max_points_(max_points) {
        if (fp_.iota != 1 && fp_.iota != 2) throw std::invalid_argument("iota must be classified");
    }

    FormPrime next() {
        for (;;) {
            while (pending_pos_ < pending_.size()) {
                FormPrime fp = pending_[pending_pos_++];
                return fp;
            }
            if (++points_ > max_points_) {
                throw Error(Errc::search_exhausted, "coefficient-pair search budget exhausted");
            }
            auto [X, Y] = spiral_.next();
            pending_.clear();
            pending_pos_ = 0;
            for (const auto& shape : pair_shapes(fp_, tmpl_, X, Y)) {
                Int q = pair_value(fp_, shape.b, shape.c);
                if (valid_form_prime(fp_, shape.b, shape.c, q)) {
                    pending_.push_back({shape.b, shape.c, q, X, Y, shape.branch});
                }
            }
        }
    }

private:
    FieldParams fp_;
    PairTemplate tmpl_;
    long max_points_;
    long points_ = 0;
    Spiral spiral_;
    std::vector<FormPrime> pending_;
    std::size_t pending_pos_ = 0;
};

inline std::vector<FormPrime> search_coefficient_pairs(const FieldParams& fp, std::size_t count,
                                                       PairTemplate tmpl = PairTemplate::paper,
                                                       long max_points = 4'000'000) {
    PairStream stream(fp, tmpl, max_points);
    std::vector<FormPrime> out;
    while (out.size() < count) out.push_back(stream.next());
    return out;
}

struct DescentCandidate {
    Int a, c, l;
    long A = 0, C = 0;
};

inline Int descent_value(const FieldParams& fp, const Int& a, const Int& c) {
    Int d2 = pow(Int(fp.P), 2UL * static_cast<unsigned long>(fp.iota));
    return a * a * a + d2 * c * c * c;
}

/// Returns an empty string when (a, c, l) is an admissible descent prime, otherwise the
/// reason it is not. Each congruence is tested on the numbers themselves.
inline std::string descent_candidate_defect(const FieldParams& fp, const Int& a, const Int& c, const Int& l) {
    const long p = fp.p;
    if (l != descent_value(fp, a, c)) return "l differs from a^3 + P^(2 iota) c^3";
    if (l <= 0 || !is_prime(l)) return "l is not a positive prime";
    if (mod(l, 3L) != 2) return "l is not 2 mod 3";
    if (gcd(l, Int(fp.P)) != 1) return "l is not prime to P";
    long ar = mod(a, p);
    if (ar != 1 && ar != p - 1) return "a is not +-1 mod p";
    long cr = mod(c, p);
    if (cr == 0) return "c is 0 mod p";
    if (p == 5 && (cr + ar) % 5 == 0) return "c = -a mod 5";
    if (fp.P == 3 && mod(Int(a + c), 3L) != 0) return "c is not -a mod 3";
    return {};
}

/// Descent primes ordered by square shells max(|A|, |C|) <= 8 * 2^i, ascending l inside a
/// shell. Any prefix is stable as `count` grows.
class DescentStream {
public:
    DescentStream(FieldParams fp, Int min_l, int max_shells = 10)
        : fp_(fp), min_l_(std::move(min_l)), max_shells_(max_shells) {
        if (fp_.iota != 1 && fp_.iota != 2) throw std::invalid_argument("iota must be classified");
    }

    DescentCandidate next() {
        while (pos_ == shell_.size()) {
            if (shell_index_ >= max_shells_) {
                throw Error(Errc::search_exhausted, "descent-prime search budget exhausted");
            }
            fill(shell_index_++);
        }
        return shell_[pos_++];
    }

    std::pair<Int, Int> coefficients(long A, long C) const {
        if (fp_.p == 3) {
            const Int P(fp_.P);
            return {P * A - 1, P * C + 1};
        }
        Int s = 3 * fp_.Piota();
        return {s * A + 1, s * C + 1};
    }

private:
    void fill(int index) {
        const long outer = 8L << index;
        const long inner = index == 0 ? -1 : (8L << (index - 1));
        shell_.clear();
        pos_ = 0;
        for (long A = -outer; A <= outer; ++A) {
            for (long C = -outer; C <= outer; ++C) {
                if (std::max(std::labs(A), std::labs(C)) <= inner) continue;
                auto [a, c] = coefficients(A, C);
                Int l = descent_value(fp_, a, c);
                if (l < min_l_) continue;
                if (!descent_candidate_defect(fp_, a, c, l).empty()) continue;
                shell_.push_back({a, c, l, A, C});
            }
        }
        std::sort(shell_.begin(), shell_.end(), [](const DescentCandidate& x, const DescentCandidate& y) {
            if (x.l != y.l) return x.l < y.l;
            return std::pair(x.A, x.C) < std::pair(y.A, y.C);
        });
    }

    FieldParams fp_;
    Int min_l_;
    int max_shells_;
    int shell_index_ = 0;
    std::vector<DescentCandidate> shell_;
    std::size_t pos_ = 0;
};

inline std::vector<DescentCandidate> search_descent_primes(const FieldParams& fp, std::size_t count,
                                                           const Int& min_l = 0, int max_shells = 10) {
    DescentStream stream(fp, min_l, max_shells);
    std::vector<DescentCandidate> out;
    while (out.size() < count) out.push_back(stream.next());
    return out;
}

}  // namespace hasse
