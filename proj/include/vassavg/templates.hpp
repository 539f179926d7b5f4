// Factorized-cycle machinery: templates, multiplicities, the exact
// quadratic coefficients of Sum_0(Tpl(n)), balance matrices, reversal,
// linear substitutes, support reduction, and the balanced linear systems.

#pragma once

#include "vassavg/model.hpp"

#include <utility>
#include <vector>

namespace vass {

// Tpl = (alpha_0, beta_1, alpha_1, ..., beta_p, alpha_p); instantiation
// with multiplicities n yields alpha_0 beta_1^n1 alpha_1 ... beta_p^np alpha_p.
// Cycles may be empty only where a construction introduces them (the
// reversal appends Tpl(0), which is empty for empty-connector templates).
struct Template {
    std::vector<Path> connectors;  // size p + 1
    std::vector<Path> cycles;      // size p

    int cycle_count() const { return static_cast<int>(cycles.size()); }
    size_t size() const;  // total transition count over all pieces
};

using Multiplicities = IntVec;  // length p, nonnegative

// Chaining of all nonempty pieces plus overall closure; every nonempty
// beta_i must itself be a cycle. Throws StructuralError on violation.
void validate_template(const Vass& a, const Template& tpl);

// Connectors shorter than |Q| and cycles nonempty, simple and pairwise
// distinct (as anchored paths).
bool is_minimal_template(const Vass& a, const Template& tpl);

// Start state of every instantiation; -1 for the all-empty template.
int template_start(const Vass& a, const Template& tpl);

Path instantiate(const Template& tpl, const Multiplicities& n);

// The connector cycle alpha_0 alpha_1 ... alpha_p = Tpl(0).
Path connector_cycle(const Template& tpl);

// Exact coefficients with 2 Sum_0(Tpl(n)) = n^T B n + c.n + e and
// B[i][j] = Gain(beta_min(i,j)) . Vals(beta_max(i,j)).
struct TemplateCoefficients {
    IntMat B;
    IntVec c;
    Int e = 0;
};

TemplateCoefficients template_coefficients(const Vass& a, const CostFunction& f,
                                           const Template& tpl);

// Symmetric (p+1)x(p+1) matrix A over beta_1..beta_p, beta_{p+1} = Tpl(0)
// with (n,1)^T A (n,1) = 2 Gain(Tpl(n)) . Vals(Tpl(n)).
IntMat balance_matrix(const Vass& a, const CostFunction& f, const Template& tpl);

// Template whose cycles are beta_{p+1}, beta_p, ..., beta_1, connected by
// rotated copies of the connector cycle; size <= |tpl|^2.
Template reversed_template(const Template& tpl);

// Appends beta_{p+1} = Tpl(0) as an extra cycle with empty connectors
// around it: (alpha_0, beta_1, ..., beta_p, alpha_p, beta_{p+1}, eps).
Template extended_template(const Template& tpl);

// d, h with n^T B n = d.n + h on balanced multiplicities, for linear
// templates; computed unconditionally (callers verify soundness).
struct LinearData {
    IntVec d;
    Int h = 0;
};

LinearData linear_data(const Vass& a, const CostFunction& f, const Template& tpl);

// Affine map n -> transition multiplicities of Tpl(n).
struct TransMap {
    IntVec constant;  // connector contribution, length m
    IntMat linear;    // column i = transition counts of beta_i, m x p

    IntVec apply(const Multiplicities& n) const { return constant + linear * n; }
};

TransMap trans_map(const Vass& a, const Template& tpl);

// Writes n as sum r_i z_i with r_i in Q+, each |supp(z_i)| <= |delta|,
// supp(z_i) contained in supp(n), and the cycle part of Trans satisfying
// Trans(z_i) = t_i Trans(n) for a positive natural t_i.
// Requires nonempty cycles and n != 0.
std::vector<std::pair<Rat, Multiplicities>> decompose_short_vectors(
    const Vass& a, const Template& tpl, const Multiplicities& n);

// lhs . n = rhs, one row per equation.
struct LinSystem {
    IntMat lhs;
    IntVec rhs;
    std::vector<int> forced_zero;  // the subset P
};

bool satisfies(const LinSystem& system, const Multiplicities& n);

// The systems S_P for P over {1..p}, ordered by (|P|, bitmask). Sound and
// complete for the balanced set only when no regular computation of value
// -infinity exists (the matrix A is then copositive). Each system carries
// the complementarity rows for i outside P plus the closing row p+1.
std::vector<LinSystem> balanced_linear_systems(const Vass& a, const CostFunction& f,
                                               const Template& tpl);

// Sum-nonincreasing minimal factorization of a cycle: Tpl(n) has the same
// transition multiset as the input and Sum_g(Tpl(n)) <= Sum_g(input).
std::pair<Template, Multiplicities> minimal_factorization(const Vass& a,
                                                          const CostFunction& f,
                                                          const Path& cycle,
                                                          const IntVec& g);

}  // namespace vass
