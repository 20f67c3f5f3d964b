#pragma once

#include "beliefscope/network.hpp"

#include <string>
#include <vector>

namespace fixtures {

// O -> F with P(F=t|O=t) = 0.9 and P(F=t|O=f) = 0.2.
inline const char* const kTwoNode = R"({
  "nodes": [
    {"id": "O", "states": ["t", "f"], "prior": [0.5, 0.5]},
    {"id": "F", "states": ["t", "f"], "parent": "O", "cpt": [[0.9, 0.1], [0.2, 0.8]]}
  ]
})";

inline beliefscope::NetworkSpec two_node() { return beliefscope::parse_network_spec(kTwoNode); }

inline bool any_contains(const std::vector<std::string>& lines, const std::string& needle) {
    for (const auto& l : lines)
        if (l.find(needle) != std::string::npos) return true;
    return false;
}

} // namespace fixtures
