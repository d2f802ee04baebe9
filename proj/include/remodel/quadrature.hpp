#pragma once

#include "remodel/rational.hpp"
#include <functional>

namespace remodel {

struct QuadResult {
    cplx value{0, 0};
    double abs_error = 0;
    long evaluations = 0;
};

// adaptive Gauss-Kronrod 15/7 on [a,b] for a complex integrand
QuadResult integrate_gk(const std::function<cplx(double)>& f, double a, double b,
                        double abs_tol = 1e-10, double rel_tol = 1e-10, int max_depth = 30);

} // namespace remodel
