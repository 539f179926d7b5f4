// Bounded exact solver for integer quadratic programming instances:
// quadratic constraints x^T A x + a.x + d {<=,=} 0 plus linear rows
// B x <= c over integer vectors, searched depth-first inside a box.

#pragma once

#include "vassavg/numeric.hpp"
#include "vassavg/errors.hpp"

#include <functional>
#include <vector>

namespace vass {

enum class Relation { LeqZero, EqZero };

struct QuadConstraint {
    IntMat A;      // symmetric n x n
    IntVec a;      // length n
    Int d = 0;
    Relation rel = Relation::LeqZero;
};

enum class VarDomain { Nonnegative, AllIntegers };

struct IqpInstance {
    int variable_count = 0;
    std::vector<QuadConstraint> quadratic;
    IntMat lin_lhs;  // rows x n, rows may be 0
    IntVec lin_rhs;
    std::vector<VarDomain> domains;  // per variable

    // Appends a.x <= b.
    void add_linear_leq(const IntVec& a, Int b);
    // Appends a.x = b as two inequalities.
    void add_linear_eq(const IntVec& a, const Int& b);
};

void validate_instance(const IqpInstance& instance);

// Exact evaluation of every constraint at x.
bool satisfies(const IqpInstance& instance, const IntVec& x);

struct SolveVerdict {
    enum class Kind { Sat, BoundedUnsat, Unknown };
    Kind kind = Kind::Unknown;
    IntVec witness;          // valid iff Sat
    long box = 0;            // box actually used
    size_t nodes = 0;        // DFS nodes visited

    bool is_sat() const { return kind == Kind::Sat; }
};

// Depth-first search over variables in index order, values ascending, with
// interval pruning from both linear and quadratic constraints. The witness
// is the lexicographically least accepted solution within the box.
// `accept` (optional) filters full assignments; rejected ones are skipped
// and the search continues.
SolveVerdict solve(const IqpInstance& instance, long box_bound, size_t node_budget,
                   const std::function<bool(const IntVec&)>& accept = nullptr);

struct EscalationPolicy {
    long initial_box = 64;
    long box_cap = 256;
    size_t node_budget = 400000;
};

// Doubles the box until Sat, the cap, or the budget is reached.
SolveVerdict solve_escalating(const IqpInstance& instance, const EscalationPolicy& policy,
                              const std::function<bool(const IntVec&)>& accept = nullptr);

}  // namespace vass
