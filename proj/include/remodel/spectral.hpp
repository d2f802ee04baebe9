#pragma once

#include "remodel/ratfun.hpp"
#include <optional>

namespace remodel {

struct spectral_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// genus-zero spectral curve: rational x(t), y(t) on the t-line
struct SpectralCurve0 {
    RatFun1 x, y;
};

SpectralCurve0 load_spectral(const std::string& path);
SpectralCurve0 parse_spectral(const std::string& json_text);

// square root of a rational inside a cyclotomic field (principal branch)
Cyclo sqrt_rational(const Rat& r);

// all exact local data at the (rational, simple) ramification points
struct CurveData {
    SpectralCurve0 curve;
    int nb = 0;
    std::vector<Rat> tb;    // branch points
    std::vector<Rat> xb;    // critical values x(t_a)
    std::vector<Rat> yb;    // y(t_a)
    std::vector<Rat> g0;    // leading quadratic coefficient: x - x_a = g0 s^2 (1 + ...)
    std::vector<Cyclo> ca;  // sqrt(g0): zeta = ca * s * unit(s)
    std::vector<Cyclo> h1;  // leading y-coefficient in zeta
    long order = 0;         // truncation order of the series below (in s)

    std::vector<std::vector<Rat>> xser;   // coefficients j >= 0 of x(t_a + s) - x_a
    std::vector<std::vector<Rat>> yser;   // coefficients of y(t_a + s) - y_a
    std::vector<std::vector<Rat>> invol;  // tbar = t_a + sum_j invol[j] s^j, invol[1] = -1
    std::vector<std::vector<Rat>> squnit; // unit series: zeta = ca * s * squnit(s)

    // memo of computed correlators
    std::map<std::pair<long, long>, struct OmegaTensor> memo;
};

CurveData analyze_curve(const SpectralCurve0& c, long order);

// same local data from rational derivatives x'(t), y'(t); used for mirror-chart
// curves whose coordinates are logarithms with rational differentials. Critical
// values are not available (xb, yb left at zero).
CurveData analyze_curve_from_derivatives(const RatFun1& xprime, const RatFun1& yprime, long order);

// pole profile: branch point index and pole order (k >= 2), basis dt/(t-t_a)^k
struct PP {
    int a = 0;
    long k = 2;
    bool operator<(const PP& o) const { return a != o.a ? a < o.a : k < o.k; }
    bool operator==(const PP& o) const { return a == o.a && k == o.k; }
};

// stable omega_{g,n} as a symmetric tensor over pole profiles
struct OmegaTensor {
    long g = 0, n = 1;
    std::map<std::vector<PP>, Rat> T;

    bool is_symmetric() const;
    long max_order(int a) const; // largest pole order at branch a
    cplx eval(const CurveData& cd, const std::vector<cplx>& t) const; // without dt's
    bool operator==(const OmegaTensor& o) const;
};

const OmegaTensor& omega(CurveData& cd, long g, long n);

// PP coordinates of theta_a^d (single pole at t_a of order 2d+2), Cyclo coefficients
std::map<long, Cyclo> theta_pp(const CurveData& cd, int a, long d);

// f^a_b(u) = delta + O(1/u): coefficients of u^{-j}, j = 0..order
std::vector<Cyclo> f_series(const CurveData& cd, int a, int b, long order);

// hcheck^a_k for k = 1..kmax
std::vector<Cyclo> hcheck_series(const CurveData& cd, int a, long kmax);

// expansion coefficient Bcheck^{ab}_{kl}
Cyclo bcheck(const CurveData& cd, int a, int b, long k, long l);

// rhs of the f-product identity: [z^k w^l] (delta_ab - sum_c f^a_c(1/z) f^b_c(1/w))/(z+w)
Cyclo bcheck_from_f(const CurveData& cd, int a, int b, long k, long l);

} // namespace remodel
