#pragma once

#include "remodel/fan.hpp"
#include <string>

namespace remodel {

struct parse_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Fan file: {"rays": [[m,n],...], "extra": [[m,n],...],
//            "cones3": [[i,j,k],...],
//            "preferred_flag": {"sigma":[i,j,k],"tau":[j,k]}}
// All indices 1-based. "extra" and "preferred_flag" optional.
StackyFan3 load_fan(const std::string& path);
StackyFan3 parse_fan(const std::string& json_text);
std::string fan_to_json(const StackyFan3& fan);

// FNV-1a over the canonical serialization, for report metadata
std::string fan_hash(const StackyFan3& fan);

} // namespace remodel
