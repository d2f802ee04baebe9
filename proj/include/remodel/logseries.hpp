#pragma once

#include "remodel/coeffexpr.hpp"
#include <vector>
#include <map>

namespace remodel {

// exponent vector of a q-monomial (rational entries, one per q variable)
struct QExp {
    std::vector<Rat> e;
    Rat total() const {
        Rat s = 0;
        for (auto& x : e) s += x;
        return s;
    }
    bool operator<(const QExp& o) const { return e < o.e; }
    bool operator==(const QExp& o) const { return e == o.e; }
};

// log multi-index, at most one power of each log q_a
using LogMask = std::vector<int>;

// Truncated series  prod_a q_a^{-shift_a(U)} * sum_E sum_mask c_{E,mask}(U1,U2) q^E prod_a (log q_a)^{mask_a}
// with exact rational-function coefficients. Terms of total degree > order are dropped.
struct LogSeries {
    int nvars = 0;
    std::vector<LinForm> shift; // exponent shift per variable: q_a^{-shift_a}, shift_a in U-units
    Rat order{0};               // truncation: kept terms have total degree <= order
    std::map<QExp, std::map<LogMask, RatFun2>> terms;

    LogSeries() {}
    LogSeries(int n, Rat ord) : nvars(n), order(std::move(ord)) { shift.assign(n, LinForm()); }

    static LogSeries one(int nvars, Rat order);

    bool is_zero() const;
    void add(const QExp& e, const LogMask& mask, const RatFun2& c);
    void prune(); // drop zero coefficients and terms beyond order

    LogSeries operator+(const LogSeries& o) const; // requires equal shifts
    LogSeries operator-(const LogSeries& o) const;
    LogSeries scale(const RatFun2& c) const;
    LogSeries scale(const Rat& c) const;
    // multiply by q^delta; order adjusts by the total degree of delta
    LogSeries mul_q(const std::vector<Rat>& delta) const;
    // substitute z -> -z (flips U1, U2 and the shifts)
    LogSeries flip_z() const;

    // q_a d/dq_a including the shift and log terms
    LogSeries theta(int a) const;

    cplx eval(cplx u1, cplx u2, cplx z, const std::vector<cplx>& q) const;
    std::string str() const;
};

struct series_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Laurent expansion of c(U1,U2) in powers of 1/z at fixed (u1,u2):
// returns coefficients of z^{-k} for k = k_min..k_max as rational functions of
// (u1,u2), reusing RatFun2 with variables read as u1,u2.
std::map<long, RatFun2> laurent_in_invz(const RatFun2& c, long k_max);

} // namespace remodel
