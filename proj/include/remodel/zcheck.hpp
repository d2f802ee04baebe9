#pragma once

#include "remodel/graphsum.hpp"
#include "remodel/quadrature.hpp"

namespace remodel {

// Lefschetz thimble of x through a branch point, for Re(z) > 0: the preimage of
// x_a + R_{>=0}, discretized on both sheets with a small arc around t_a
struct Thimble {
    int a = 0;
    double rho = 0;              // arc radius in t
    std::vector<cplx> minus_leg; // from the cut end toward t_a (exclusive)
    std::vector<cplx> plus_leg;  // from t_a (exclusive) to the cut end
};

Thimble make_thimble(const CurveData& cd, int a, cplx z, double tail_T = 40.0);

// int_gamma e^{-x/z} f(t) dt for f with poles only at branch points (the arc
// keeps the integral well defined; the forms have no residues there)
cplx laplace_form(const CurveData& cd, const Thimble& th, const std::function<cplx(cplx)>& f, cplx z);

// Laplace transform of the profile dt/(t - t_b)^k
cplx laplace_pp(const CurveData& cd, const Thimble& th, const PP& p, cplx z);

// (0,1): 2 pi i int e^{-x/z} y dx
cplx zcheck_01(const CurveData& cd, const Thimble& th, cplx z);

// (0,2) branch-sum evaluation: -(z1 z2/(2(z1+z2))) (2 pi i)^2 sum_b T1_b T2_b
// with T_i the transform of theta_b^0 along the respective cycle
cplx zcheck_02(const CurveData& cd, const Thimble& t1, const Thimble& t2, cplx z1, cplx z2);

// direct nested quadrature of (2 pi i)^2 int int e^{-x1/z1 - x2/z2} B
cplx zcheck_02_quadrature(const CurveData& cd, const Thimble& t1, const Thimble& t2, cplx z1, cplx z2);

// stable case: (2 pi i)^n sum over the tensor of products of profile transforms
cplx zcheck_stable(CurveData& cd, const std::vector<int>& cycles, long g, long n,
                   const std::vector<cplx>& z);

} // namespace remodel
