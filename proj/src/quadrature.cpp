#include "remodel/quadrature.hpp"
#include <cmath>

namespace remodel {

namespace {

// 15-point Kronrod nodes/weights with embedded 7-point Gauss
const double xgk[8] = {0.991455371120813, 0.949107912342759, 0.864864423359769,
                       0.741531185599394, 0.586087235467691, 0.405845151377397,
                       0.207784955007898, 0.0};
const double wgk[8] = {0.022935322010529, 0.063092092629979, 0.104790010322250,
                       0.140653259715525, 0.169004726639267, 0.190350578064785,
                       0.204432940075298, 0.209482141084728};
const double wg[4] = {0.129484966168870, 0.279705391489277, 0.381830050505119,
                      0.417959183673469};

struct Panel {
    cplx kronrod;
    double err;
};

Panel gk15(const std::function<cplx(double)>& f, double a, double b, long& evals) {
    double c = 0.5 * (a + b), h = 0.5 * (b - a);
    cplx fc = f(c);
    evals += 15;
    cplx resg = fc * wg[3];
    cplx resk = fc * wgk[7];
    for (int j = 0; j < 7; ++j) {
        cplx f1 = f(c - h * xgk[j]);
        cplx f2 = f(c + h * xgk[j]);
        resk += wgk[j] * (f1 + f2);
        if (j % 2 == 1) resg += wg[j / 2] * (f1 + f2);
    }
    resk *= h;
    resg *= h;
    return {resk, std::abs(resk - resg)};
}

void adapt(const std::function<cplx(double)>& f, double a, double b, double tol, int depth,
           QuadResult& out) {
    Panel p = gk15(f, a, b, out.evaluations);
    if (p.err <= tol || depth <= 0) {
        out.value += p.kronrod;
        out.abs_error += p.err;
        return;
    }
    double c = 0.5 * (a + b);
    adapt(f, a, c, tol / 2, depth - 1, out);
    adapt(f, c, b, tol / 2, depth - 1, out);
}

} // namespace

QuadResult integrate_gk(const std::function<cplx(double)>& f, double a, double b, double abs_tol,
                        double rel_tol, int max_depth) {
    QuadResult out;
    Panel first = gk15(f, a, b, out.evaluations);
    double tol = std::max(abs_tol, rel_tol * std::abs(first.kronrod));
    out.evaluations = 0;
    adapt(f, a, b, tol, max_depth, out);
    return out;
}

} // namespace remodel
