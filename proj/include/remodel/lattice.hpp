#pragma once

#include "remodel/rational.hpp"
#include <Eigen/Dense>
#include <array>
#include <vector>

namespace remodel {

using Vec2l = Eigen::Matrix<long, 2, 1>;
using Vec3l = Eigen::Matrix<long, 3, 1>;
using Mat2l = Eigen::Matrix<long, 2, 2>;
using Mat3l = Eigen::Matrix<long, 3, 3>;
using MatQ  = Eigen::Matrix<Rat, Eigen::Dynamic, Eigen::Dynamic>;
using VecQ  = Eigen::Matrix<Rat, Eigen::Dynamic, 1>;

inline long det2(const Vec2l& a, const Vec2l& b) { return a[0] * b[1] - a[1] * b[0]; }

long det3(const Mat3l& m);

inline long gcdl(long a, long b) {
    a = a < 0 ? -a : a;
    b = b < 0 ? -b : b;
    while (b) { long t = a % b; a = b; b = t; }
    return a;
}

// gcd of the entries, 0 for the zero vector
inline long content(const Vec2l& v) { return gcdl(v[0], v[1]); }

// Smith normal form diagonal of an integer matrix (any shape); returns the
// nonzero diagonal entries d1 | d2 | ...
std::vector<long> smith_diagonal(std::vector<std::vector<long>> m);

// exact solve B c = v for 3x3 integer B with det != 0
std::array<Rat, 3> solve3(const Mat3l& B, const Vec3l& v);

// exact nullspace basis of an integer matrix (rows x cols), as columns over Q
std::vector<std::vector<Rat>> rational_kernel(const std::vector<std::vector<long>>& m);

} // namespace remodel
namespace remodel {

// basis of the integer kernel {v : M v = 0} via column reduction
std::vector<std::vector<long>> integer_kernel(const std::vector<std::vector<long>>& m);

// unique solution of a square rational system, throws if singular
std::vector<Rat> gauss_solve(std::vector<std::vector<Rat>> a, std::vector<Rat> b);

// rank over Q
long rational_rank(const std::vector<std::vector<Rat>>& rows);

} // namespace remodel
