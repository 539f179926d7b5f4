// Instance generators: the worked 3-state example, the 3-SAT reduction,
// and seeded random models for property tests.

#pragma once

#include "vassavg/model.hpp"

#include <array>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

namespace vass {

struct CnfFormula {
    int variable_count = 0;
    std::vector<std::array<int, 3>> clauses;  // signed 1-based variable indices
};

void validate_cnf(const CnfFormula& formula);

// Truth-table satisfiability; fine for the small formulas used here.
bool brute_force_satisfiable(const CnfFormula& formula);

// DIMACS-style text: "p cnf <vars> <clauses>" header, clauses terminated
// by 0, width <= 3 (shorter clauses are padded by repeating a literal).
CnfFormula parse_dimacs(const std::string& text);

std::string to_dimacs(const CnfFormula& formula);

// The 3-state, 4-transition model with labeling A -> (4,0), B -> (1,1),
// C -> (0,1) and initial state B.
std::pair<Vass, CostFunction> running_example();

struct ThreeSatInstance {
    Vass vass;
    CostFunction cost;
    Rat threshold;  // always 0
};

// Reduction from 3-SAT: Part I picks a substitution by incrementing the
// i-th or (i+n)-th counter; Part II charges, per clause layer, the counter
// of the complementary literal. Satisfiable formulas yield a balanced
// cycle of value 0; unsatisfiable ones only cycles of positive Gain.Vals.
ThreeSatInstance threesat_to_vass(const CnfFormula& formula);

struct RandomModelParams {
    int states = 3;
    int transitions = 4;
    int dimension = 2;
    long update_range = 2;      // updates drawn from [-update_range, update_range]
    long coefficient_range = 2; // labels drawn from [0, coefficient_range]
    std::uint64_t seed = 0;
};

// Deterministic for a fixed seed; regenerates until every state is
// reachable from the initial state.
std::pair<Vass, CostFunction> random_vass(const RandomModelParams& params);

}  // namespace vass
