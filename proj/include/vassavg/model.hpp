// Core domain types: VASS, cost functions, paths, lassos, extended values,
// and the path-summary algebra (Gain, Vals, Sum_g) everything else builds on.

#pragma once

#include "vassavg/errors.hpp"
#include "vassavg/numeric.hpp"

#include <optional>
#include <string>
#include <vector>

namespace vass {

enum class Domain { Integer, Natural };

struct Transition {
    int source = 0;
    int target = 0;
    IntVec update;  // length k
};

// A k-dimensional VASS. States and transitions carry stable integer
// indices; names are cosmetic. All iteration orders follow index order.
struct Vass {
    Index dimension = 0;
    Domain domain = Domain::Integer;
    std::vector<std::string> state_names;   // index -> name
    std::vector<int> initial_states;        // sorted, nonempty
    std::vector<Transition> transitions;    // index -> transition
    std::vector<std::string> transition_names;

    int state_count() const { return static_cast<int>(state_names.size()); }
    int transition_count() const { return static_cast<int>(transitions.size()); }
};

// Throws StructuralError if the invariants of Vass are violated.
void validate_vass(const Vass& a);

// The labeling l : Q -> N^k; one natural coefficient vector per state.
struct CostFunction {
    std::vector<IntVec> labeling;  // state index -> l(q)
};

void validate_cost(const Vass& a, const CostFunction& f);

// True when every state carries the same coefficient vector.
bool is_uniform(const CostFunction& f);

CostFunction uniform_cost(const Vass& a, const IntVec& coefficients);

// A path is a sequence of transition indices. Chaining and the cycle
// property are checked by the free functions below, not by the type.
using Path = std::vector<int>;

bool is_chained(const Vass& a, const Path& path);
bool is_cycle(const Vass& a, const Path& path);  // chained, nonempty, closed

// Start/end state of a nonempty chained path.
int path_start(const Vass& a, const Path& path);
int path_end(const Vass& a, const Path& path);

Path concat(const Path& a, const Path& b);
Path repeat(const Path& p, long times);

struct Lasso {
    Path prefix;  // possibly empty, starts in an initial state
    Path cycle;   // nonempty cycle; starts where the prefix ends
};

// Structural check: chaining, prefix anchored at an initial state,
// nonempty closed cycle that continues the prefix.
void validate_lasso(const Vass& a, const Lasso& lasso);

// NATURAL-domain validity: prefix simulation from 0 stays nonnegative,
// two full cycle iterations stay nonnegative, and every counter whose
// running minimum within the cycle dips below the iteration start has
// nonnegative per-iteration gain.
bool is_natural_valid(const Vass& a, const Lasso& lasso);

struct Config {
    int state = 0;
    IntVec counters;
};

bool operator==(const Config& a, const Config& b);
bool config_less(const Config& a, const Config& b);  // (state, lex counters)

// -inf / finite rational / +inf.
struct ExtendedValue {
    enum class Kind { NegInfinity, Finite, PosInfinity };
    Kind kind = Kind::Finite;
    Rat finite;  // meaningful iff kind == Finite

    static ExtendedValue neg_infinity() { return {Kind::NegInfinity, Rat(0)}; }
    static ExtendedValue pos_infinity() { return {Kind::PosInfinity, Rat(0)}; }
    static ExtendedValue of(Rat value) { return {Kind::Finite, std::move(value)}; }

    bool is_finite() const { return kind == Kind::Finite; }
    // Total order with -inf < finite < +inf.
    bool leq(const ExtendedValue& other) const;
    bool leq(const Rat& threshold) const;
    std::string str() const;
};

bool operator==(const ExtendedValue& a, const ExtendedValue& b);

struct PathSummary {
    IntVec gain;  // sum of updates
    IntVec vals;  // sum of l(source state), last state excluded
};

// Gain and Vals of a chained path. Both are additive under concatenation.
PathSummary path_summary(const Vass& a, const CostFunction& f, const Path& path);

IntVec gain_of(const Vass& a, const Path& path);
IntVec vals_of(const Vass& a, const CostFunction& f, const Path& path);

// Sum of the cost function along `path` when the counters start at g:
//   Sum_g(rho) = sum_i (g + sum_{j<i} y_j) . l(q_i).
// Satisfies Sum_g(t1 t2) = Sum_g(t1) + Sum_{g+Gain(t1)}(t2)
// and Sum_{g+h}(t) = g . Vals(t) + Sum_h(t).
Int sum_from(const Vass& a, const CostFunction& f, const IntVec& g, const Path& path);

struct SimulationResult {
    std::vector<Config> configs;             // |path| + 1 entries
    std::optional<size_t> first_negative;    // position index, if any counter < 0
};

// Applies `path` from `start`. Negativity is reported, never raised, so
// callers can tell Z-valid from N-valid runs.
SimulationResult simulate(const Vass& a, const Config& start, const Path& path);

}  // namespace vass
