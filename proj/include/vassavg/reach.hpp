// Bounded explicit-state configuration reachability for natural-valued
// VASS: breadth-first search with a visited set, honest about whether a
// negative answer comes from frontier closure or from a cap.

#pragma once

#include "vassavg/model.hpp"

#include <optional>

namespace vass {

struct ReachQuery {
    Vass vass;  // NATURAL domain
    Config source;
    Config target;
    size_t budget = 100000;            // max explored configurations
    std::optional<Int> counter_cap;    // per-counter exploration bound
};

struct ReachResult {
    enum class Kind { Reachable, NotReachable, Unknown };
    Kind kind = Kind::Unknown;
    Path path;               // valid iff Reachable; re-validated by simulate
    size_t explored = 0;
    bool cap_hit = false;    // some successor was cut off by a cap
};

// BFS over configurations in transition-index order. NotReachable is
// emitted only when the frontier closes without any cap having pruned a
// successor; a capped search that exhausts its frontier stays Unknown.
ReachResult reachable(const ReachQuery& query);

}  // namespace vass
