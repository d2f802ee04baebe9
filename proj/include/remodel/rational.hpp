#pragma once

#include <gmpxx.h>
#include <cstdint>
#include <string>
#include <complex>
#include <stdexcept>

namespace remodel {

using Rat = mpq_class;
using Int = mpz_class;
using cplx = std::complex<double>;

inline Rat rat(long num, long den = 1) { Rat r(num, den); r.canonicalize(); return r; }

// floor of a rational as an Int
inline Int rfloor(const Rat& x) {
    Int q;
    mpz_fdiv_q(q.get_mpz_t(), x.get_num_mpz_t(), x.get_den_mpz_t());
    return q;
}

// fractional part {x} = x - floor(x), in [0,1)
inline Rat rfrac(const Rat& x) { return x - Rat(rfloor(x)); }

inline bool is_integer(const Rat& x) { return x.get_den() == 1; }

inline long to_long(const Int& x) {
    if (!x.fits_slong_p()) throw std::overflow_error("integer too large for long");
    return x.get_si();
}

inline long to_long(const Rat& x) {
    if (!is_integer(x)) throw std::domain_error("rational is not an integer");
    return to_long(Int(x.get_num()));
}

inline double to_double(const Rat& x) { return x.get_d(); }

// "num/den" with den omitted when 1; exact round trip
inline std::string rat_str(const Rat& x) {
    return x.get_den() == 1 ? x.get_num().get_str() : x.get_num().get_str() + "/" + x.get_den().get_str();
}

inline Rat parse_rat(const std::string& s) {
    Rat r;
    if (r.set_str(s, 10) != 0) throw std::invalid_argument("bad rational literal: " + s);
    r.canonicalize();
    return r;
}

inline Rat rpow(const Rat& x, long e) {
    Rat r = 1;
    Rat b = e >= 0 ? x : Rat(1) / x;
    for (long k = 0, n = e >= 0 ? e : -e; k < n; ++k) r *= b;
    return r;
}

inline Int factorial(long n) {
    Int f = 1;
    for (long k = 2; k <= n; ++k) f *= k;
    return f;
}

inline Int binomial(long n, long k) {
    if (k < 0 || k > n) return 0;
    Int b;
    mpz_bin_uiui(b.get_mpz_t(), n, k);
    return b;
}

// (2k-1)!! with (-1)!! = 1
inline Int double_factorial_odd(long k) {
    Int f = 1;
    for (long m = 1; m <= k; ++m) f *= 2 * m - 1;
    return f;
}

// Bernoulli polynomial B_m(x), exact
Rat bernoulli_number(long m);
Rat bernoulli_poly(long m, const Rat& x);

} // namespace remodel
