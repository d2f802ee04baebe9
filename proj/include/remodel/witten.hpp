#pragma once

#include "remodel/rational.hpp"
#include <vector>

namespace remodel {

// psi-class intersection number <tau_{k_1} ... tau_{k_n}>_g, exact; zero unless
// sum k_i = 3g - 3 + n
Rat witten(long g, std::vector<long> k);

} // namespace remodel
