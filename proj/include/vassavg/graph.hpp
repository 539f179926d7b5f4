// Graph utilities on the finite control structure: reachability, SCCs,
// simple-cycle enumeration, shortest connecting paths, and Eulerian
// reconstruction of paths from transition multiplicities.

#pragma once

#include "vassavg/model.hpp"

#include <optional>
#include <vector>

namespace vass {

// States reachable from the initial states (counters ignored).
std::vector<bool> reachable_states(const Vass& a);

// True if some cycle exists within the given state mask.
bool has_cycle(const Vass& a, const std::vector<bool>& mask);

// Tarjan SCC ids (by state index); -1 for masked-out states.
std::vector<int> scc_ids(const Vass& a, const std::vector<bool>& mask);

// Shortest (then lexicographically smallest) path from any state in
// `sources` to `target`, restricted to `mask`. Empty optional if none.
std::optional<Path> shortest_path(const Vass& a, const std::vector<int>& sources,
                                  int target, const std::vector<bool>& mask);

// All simple cycles (pairwise distinct states) within `mask`, each rotated
// so the smallest state index comes first, enumerated deterministically
// by (length, lexicographic transition indices). Stops after `cap` cycles.
struct SimpleCycles {
    std::vector<Path> cycles;
    bool complete = true;  // false if the cap was hit
};
SimpleCycles enumerate_simple_cycles(const Vass& a, const std::vector<bool>& mask,
                                     size_t cap);

// Rotates a cycle so it starts at `state`; state must lie on the cycle.
Path rotate_cycle(const Vass& a, const Path& cycle, int state);

std::vector<bool> states_on_path(const Vass& a, const Path& p);

// Eulerian reconstruction: given per-transition multiplicities, builds a
// chained path from `source` to `sink` using transition t exactly x[t]
// times, or nothing if degrees/connectivity do not work out.
// source == sink yields an Eulerian circuit (empty when x == 0).
std::optional<Path> euler_path(const Vass& a, const std::vector<Int>& multiplicity,
                               int source, int sink);

// All chained paths from `from` to `to` of length <= max_len within mask,
// in (length, lex) order. Includes the empty path when from == to.
std::vector<Path> short_paths(const Vass& a, int from, int to, int max_len,
                              const std::vector<bool>& mask, size_t cap,
                              bool* truncated = nullptr);

}  // namespace vass
