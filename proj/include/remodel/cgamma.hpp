#pragma once

#include <complex>
#include <cmath>

namespace remodel {

// Lanczos approximation (g = 7, n = 9), relative error ~ 1e-13 on the half-plane,
// extended by reflection
inline std::complex<double> cgamma(std::complex<double> z) {
    static const double g = 7.0;
    static const double coef[9] = {
        0.99999999999980993,  676.5203681218851,    -1259.1392167224028,
        771.32342877765313,   -176.61502916214059,  12.507343278686905,
        -0.13857109526572012, 9.9843695780195716e-6, 1.5056327351493116e-7};
    const double pi = 3.14159265358979323846;
    if (z.real() < 0.5)
        return pi / (std::sin(pi * z) * cgamma(1.0 - z));
    z -= 1.0;
    std::complex<double> x = coef[0];
    for (int i = 1; i < 9; ++i) x += coef[i] / (z + double(i));
    std::complex<double> t = z + g + 0.5;
    return std::sqrt(2.0 * pi) * std::pow(t, z + 0.5) * std::exp(-t) * x;
}

} // namespace remodel
