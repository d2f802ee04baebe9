#pragma once

#include "remodel/ktheory.hpp"
#include <string>

namespace remodel {

// CLI sheaf grammar:  O(V: d3) | O(V: l{2,3}) | O(V: p{1,2,3})  with an optional
// `* tw(r1,...,rN)` twist; whitespace-insensitive
struct SheafSpec {
    enum Kind { divisor, curve, point } kind;
    std::vector<int> indices;
    std::vector<long> twist; // empty = untwisted

    KClass realize(const StackyFan3& fan) const;
};

struct sheaf_parse_error : std::runtime_error {
    size_t position;
    sheaf_parse_error(const std::string& msg, size_t pos)
        : std::runtime_error(msg + " (at position " + std::to_string(pos) + ")"), position(pos) {}
};

SheafSpec parse_sheaf(const std::string& text);

} // namespace remodel
