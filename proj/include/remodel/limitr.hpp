#pragma once

#include "remodel/hypergeo.hpp"

namespace remodel {

// q -> 0 limit of the R-matrix: block diagonal over 3-cones, each block a
// |G_sigma| x |G_sigma| matrix of truncated z-series with exact coefficients
struct RMatrixBlock {
    int cone = 0;
    long order = 0;
    std::vector<std::vector<long>> char_reps; // twist vectors realizing the characters
    // entry[row][col][m] = z^m coefficient of R_{(sigma,row),(sigma,col)}
    std::vector<std::vector<std::vector<CoeffExpr>>> entry;
};

std::vector<RMatrixBlock> limit_r(const StackyFan3& fan, const EquivWeights& w, long order);

// exact check of R^T(-z) R(z) = 1 up to the truncation order
bool limit_r_unitary(const RMatrixBlock& block);

} // namespace remodel
