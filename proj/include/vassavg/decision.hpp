// Decision procedures: the three-step pipeline for integer-valued VASS
// (negative cycles, negative templates, the linear case), the uniform
// reductions, and the bounded natural-domain procedures. Every YES ships
// a lasso whose value is recomputed exactly before the answer is returned.

#pragma once

#include "vassavg/model.hpp"
#include "vassavg/semantics.hpp"

#include <map>
#include <optional>
#include <string>

namespace vass {

enum class ProblemKind { RegularAverage, RegularFinite, RegularNegInf };

// Resource knobs. Defaults are what the test-suite pins; every cap that
// fires is reported in the answer's budget map.
struct DecisionBudget {
    long iqp_box = 64;
    long iqp_box_cap = 256;
    size_t iqp_nodes = 200000;
    size_t simple_cycle_cap = 8192;
    size_t config_probe_cap = 1500;
    size_t template_budget = 2500;
    int max_template_cycles = 4;
    size_t connector_cap = 64;           // short-path candidates per hop
    size_t kkt_support_cap = 12;
    int sweep_prefix = 8;
    int sweep_cycle = 8;
    size_t sweep_transition_limit = 10;  // full cycle sweep only for small graphs
    long max_witness_length = 1000000;
    size_t reach_budget = 150000;
    std::optional<Int> reach_counter_cap;
};

struct Query {
    Vass vass;
    CostFunction cost;
    ProblemKind kind = ProblemKind::RegularAverage;
    Rat threshold;  // used by RegularAverage only
    DecisionBudget budget;
};

struct Answer {
    enum class Verdict { Yes, No, Unknown };
    Verdict verdict = Verdict::Unknown;
    std::optional<Lasso> witness;                // present on YES
    std::optional<ExtendedValue> certified_value;  // recomputed exactly on YES
    std::string reason;   // completeness argument on NO, missing budget on UNKNOWN
    std::string step;     // "step1" | "step2" | "step3" | "enumeration"
    std::map<std::string, std::string> budget;

    bool yes() const { return verdict == Verdict::Yes; }
    bool no() const { return verdict == Verdict::No; }
    bool unknown() const { return verdict == Verdict::Unknown; }
};

// Does some regular computation have value -infinity? (Z domain)
Answer regular_neg_inf_Z(const Query& query);

// Does some regular computation have finite value? (Z domain)
Answer regular_finite_value_Z(const Query& query);

// Is there a regular computation of value <= threshold? (Z domain)
Answer regular_average_Z(const Query& query);

// Uniform cost over Z: one-counter reduction, then the general pipeline.
// The answer applies to both the regular and the general problem.
Answer uniform_average_Z(const Vass& a, const IntVec& coefficients, const Rat& threshold,
                         const DecisionBudget& budget = {});

// Uniform cost over N with strictly positive coefficients: bounded cyclic
// computations checked for reachability.
Answer uniform_average_N(const Vass& a, const IntVec& coefficients, const Rat& threshold,
                         const DecisionBudget& budget = {});

// Reduction from configuration reachability to the uniform average-value
// problem over N: two fresh states, one fresh counter, cost = sum of all
// counters, threshold 0.
struct ReachToAverage {
    Vass vass;
    CostFunction cost;
    Rat threshold;  // always 0
    int start_state = 0;  // q_S
    int sink_state = 0;   // q_F
};

ReachToAverage reachability_to_average_N(const Vass& a, const Config& source,
                                         const Config& target);

// Regular finite-value over N via the doubled-counter construction and
// bounded configuration reachability.
Answer regular_finite_value_N(const Query& query);

}  // namespace vass
