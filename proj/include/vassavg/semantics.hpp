// Exact lasso evaluation (the Gain.Vals trichotomy and the exact finite
// value), exact prefix averages, and the bounded brute-force oracle used
// to cross-check the decision procedures.

#pragma once

#include "vassavg/model.hpp"

#include <functional>
#include <optional>
#include <vector>

namespace vass {

struct LassoVerdict {
    ExtendedValue value;
    Int per_iteration_sum = 0;  // defined when value is finite
    long cycle_length = 0;
};

// Value of the regular computation prefix . cycle^omega, evaluated at the
// cycle alignment: NEG_INFINITY iff Gain(cycle).Vals(cycle) < 0,
// POS_INFINITY iff > 0, otherwise Sum_{Gain(prefix)}(cycle) / |cycle|.
// Under the NATURAL domain the lasso must be N-valid (ValidityError if not).
LassoVerdict lasso_value(const Vass& a, const CostFunction& f, const Lasso& lasso);

// The first `horizon` partial averages of f along the unrolled lasso.
std::vector<Rat> numeric_prefix_averages(const Vass& a, const CostFunction& f,
                                         const Lasso& lasso, long horizon);

// Bounded search over (state, prefix-gain) pairs from the initial states.
// Prefixes are BFS-discovered in (length, lex) order; only the first path
// per (state, gain) pair is kept, which is enough because lasso values
// depend on the prefix only through its gain.
struct PrefixGain {
    int state = 0;
    IntVec gain;
    Path path;  // first BFS witness
};

struct PrefixGainSearch {
    std::vector<PrefixGain> entries;           // in discovery order
    std::vector<std::vector<int>> by_state;    // state -> indices into entries
    bool truncated = false;                    // node cap or gain box hit
};

PrefixGainSearch search_prefix_gains(const Vass& a, int max_len,
                                     const Int& gain_box, size_t node_cap);

struct OracleReport {
    enum class Answer { Yes, Unknown };
    Answer answer = Answer::Unknown;
    std::optional<Lasso> witness;  // present and re-verified on YES
    int max_prefix = 0;
    int max_cycle = 0;
};

// Exhaustive bounded witness search: all cycles of length <= max_cycle,
// combined with all bounded prefixes reaching their start. YES iff some
// lasso value, evaluated exactly, is <= threshold; never answers NO.
OracleReport oracle_regular_average(const Vass& a, const CostFunction& f,
                                    const Rat& threshold, int max_prefix,
                                    int max_cycle);

// Enumerates all cycles (not only simple ones) of length <= max_len in
// (length, lex) order, visiting each through `visit`; stops early when
// visit returns false or the cap is reached. Returns false on cap stop.
bool for_each_cycle(const Vass& a, int max_len, size_t cap,
                    const std::function<bool(const Path&)>& visit);

}  // namespace vass
