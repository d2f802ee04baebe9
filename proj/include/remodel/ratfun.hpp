#pragma once

#include "remodel/cyclo.hpp"
#include <vector>
#include <map>

namespace remodel {

// dense univariate polynomial over Q, ascending coefficients
struct PolyQ {
    std::vector<Rat> c;

    PolyQ() {}
    explicit PolyQ(Rat k) { if (k != 0) c.push_back(std::move(k)); }
    static PolyQ monomial(long deg, Rat k);

    long deg() const { return (long)c.size() - 1; } // -1 for zero
    bool is_zero() const { return c.empty(); }
    void trim();
    Rat at(long i) const { return i >= 0 && i < (long)c.size() ? c[i] : Rat(0); }

    PolyQ operator+(const PolyQ& o) const;
    PolyQ operator-(const PolyQ& o) const;
    PolyQ operator*(const PolyQ& o) const;
    PolyQ operator*(const Rat& k) const;
    PolyQ deriv() const;
    Rat eval(const Rat& x) const;
    cplx eval(cplx x) const;
    // shifted polynomial p(x + a)
    PolyQ shift(const Rat& a) const;
    std::string str() const;
};

PolyQ poly_gcd(PolyQ a, PolyQ b);
// quotient and remainder
std::pair<PolyQ, PolyQ> poly_divmod(const PolyQ& a, const PolyQ& b);

// rational roots with multiplicity, and the non-rational remainder factor
std::map<Rat, long> rational_roots(PolyQ p, PolyQ* residual = nullptr);

// rational function over Q, reduced
struct RatFun1 {
    PolyQ num, den{Rat(1)};

    RatFun1() {}
    explicit RatFun1(Rat k) : num(std::move(k)) {}
    RatFun1(PolyQ n, PolyQ d);
    bool is_zero() const { return num.is_zero(); }
    RatFun1 operator+(const RatFun1& o) const;
    RatFun1 operator-(const RatFun1& o) const;
    RatFun1 operator*(const RatFun1& o) const;
    RatFun1 operator/(const RatFun1& o) const;
    RatFun1 deriv() const;
    Rat eval(const Rat& x) const;
    cplx eval(cplx x) const;
    bool operator==(const RatFun1& o) const { return (num * o.den - o.num * den).is_zero(); }
    std::string str() const;
};

// truncated Laurent series over an arbitrary coefficient ring
template <class T>
struct LSeries {
    long lead = 0;
    std::vector<T> c; // coefficients of x^{lead}, x^{lead+1}, ...

    long top() const { return lead + (long)c.size() - 1; }
    T at(long k) const {
        if (k < lead || k > top()) return T{};
        return c[k - lead];
    }
};

} // namespace remodel
