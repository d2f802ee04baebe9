#pragma once

#include "remodel/rational.hpp"
#include <vector>

namespace remodel {

// exact arithmetic in the cyclotomic field Q(zeta_n), elements reduced mod Phi_n
class Cyclo {
public:
    Cyclo() : n_(1), c_(1, Rat(0)) {}
    explicit Cyclo(long n, Rat k = Rat(0));
    static Cyclo root(long n, long power); // zeta_n^power
    static long phi(long n);

    long order() const { return n_; }
    bool is_zero() const;
    bool is_rational() const;
    Rat rational_part() const; // throws if not rational

    Cyclo operator+(const Cyclo& o) const;
    Cyclo operator-(const Cyclo& o) const;
    Cyclo operator*(const Cyclo& o) const;
    Cyclo operator*(const Rat& k) const;
    Cyclo inverse() const;
    bool operator==(const Cyclo& o) const { return (*this - o).is_zero(); }

    cplx eval() const;
    std::string str() const;

private:
    long n_;
    std::vector<Rat> c_; // length phi(n), basis 1, zeta, ..., zeta^{phi(n)-1}
    static Cyclo lift(const Cyclo& x, long n);
    static std::vector<Rat> reduce(std::vector<Rat> poly, long n);
    friend struct CycloHelpers;
};

// Laurent series in one variable over Q(zeta_n), for the Lefschetz u->0 limit
struct CycloSeries {
    long lead = 0;          // lowest exponent
    std::vector<Cyclo> c;   // coefficients of t^{lead}, t^{lead+1}, ...

    static CycloSeries from(const Cyclo& x) { return {0, {x}}; }
    long top() const { return lead + (long)c.size() - 1; }
    void trim_lead();
    CycloSeries operator+(const CycloSeries& o) const;
    CycloSeries operator*(const CycloSeries& o) const;
    // multiplicative inverse up to `terms` coefficients; leading coefficient must be nonzero
    CycloSeries inverse(long terms) const;
    void truncate(long max_exp);
};

} // namespace remodel
