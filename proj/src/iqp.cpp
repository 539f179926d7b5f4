#include "vassavg/iqp.hpp"

#include <algorithm>

namespace vass {

void IqpInstance::add_linear_leq(const IntVec& a, Int b) {
    const Index rows = lin_lhs.rows();
    IntMat lhs(rows + 1, variable_count);
    IntVec rhs(rows + 1);
    if (rows > 0) {
        lhs.topRows(rows) = lin_lhs;
        rhs.head(rows) = lin_rhs;
    }
    for (int j = 0; j < variable_count; ++j) lhs(rows, j) = a(j);
    rhs(rows) = std::move(b);
    lin_lhs = std::move(lhs);
    lin_rhs = std::move(rhs);
}

void IqpInstance::add_linear_eq(const IntVec& a, const Int& b) {
    add_linear_leq(a, b);
    add_linear_leq(-a, -b);
}

void validate_instance(const IqpInstance& instance) {
    const int n = instance.variable_count;
    if (n < 1) throw StructuralError("iqp: needs at least one variable");
    if (static_cast<int>(instance.domains.size()) != n)
        throw StructuralError("iqp: domain list size mismatch");
    for (const QuadConstraint& q : instance.quadratic) {
        if (q.A.rows() != n || q.A.cols() != n || q.a.size() != n)
            throw StructuralError("iqp: quadratic constraint dimension mismatch");
        for (int i = 0; i < n; ++i)
            for (int j = i + 1; j < n; ++j)
                if (q.A(i, j) != q.A(j, i)) throw StructuralError("iqp: A not symmetric");
    }
    if (instance.lin_lhs.rows() != instance.lin_rhs.size())
        throw StructuralError("iqp: linear rows mismatch");
    if (instance.lin_lhs.rows() > 0 && instance.lin_lhs.cols() != n)
        throw StructuralError("iqp: linear columns mismatch");
}

bool satisfies(const IqpInstance& instance, const IntVec& x) {
    if (x.size() != instance.variable_count) return false;
    for (int i = 0; i < instance.variable_count; ++i)
        if (instance.domains[i] == VarDomain::Nonnegative && x(i) < 0) return false;
    for (const QuadConstraint& q : instance.quadratic) {
        const Int value = x.dot(q.A * x) + q.a.dot(x) + q.d;
        if (q.rel == Relation::LeqZero ? value > 0 : value != 0) return false;
    }
    if (instance.lin_lhs.rows() > 0) {
        IntVec lhs = instance.lin_lhs * x;
        for (Index r = 0; r < lhs.size(); ++r)
            if (lhs(r) > instance.lin_rhs(r)) return false;
    }
    return true;
}

namespace {

struct Interval {
    Int lo, hi;
};

Interval product_range(const Int& coeff, const Interval& x) {
    if (coeff >= 0) return {coeff * x.lo, coeff * x.hi};
    return {coeff * x.hi, coeff * x.lo};
}

Interval product_range(const Interval& x, const Interval& y) {
    Int candidates[4] = {x.lo * y.lo, x.lo * y.hi, x.hi * y.lo, x.hi * y.hi};
    return {*std::min_element(candidates, candidates + 4),
            *std::max_element(candidates, candidates + 4)};
}

struct Search {
    const IqpInstance& instance;
    const long box;
    const size_t budget;
    const std::function<bool(const IntVec&)>& accept;

    IntVec x;
    std::vector<Interval> range;
    size_t nodes = 0;
    bool out_of_budget = false;
    std::optional<IntVec> found;

    Search(const IqpInstance& inst, long box_bound, size_t node_budget,
           const std::function<bool(const IntVec&)>& accept_fn)
        : instance(inst), box(box_bound), budget(node_budget), accept(accept_fn) {
        const int n = inst.variable_count;
        x = IntVec::Zero(n);
        range.resize(n);
        for (int i = 0; i < n; ++i) {
            range[i].hi = box;
            range[i].lo = inst.domains[i] == VarDomain::Nonnegative ? Int(0) : Int(-box);
        }
    }

    // Lower/upper bound of a quadratic constraint value given that
    // variables < depth are fixed and the rest range over their boxes.
    bool quad_feasible(const QuadConstraint& q, int depth) {
        const int n = instance.variable_count;
        Int lo = q.d, hi = q.d;
        for (int i = 0; i < n; ++i) {
            const Interval xi = i < depth ? Interval{x(i), x(i)} : range[i];
            Interval term = product_range(q.a(i), xi);
            lo += term.lo;
            hi += term.hi;
            for (int j = 0; j < n; ++j) {
                if (q.A(i, j) == 0) continue;
                const Interval xj = j < depth ? Interval{x(j), x(j)} : range[j];
                Interval prod = product_range(xi, xj);
                Interval scaled = q.A(i, j) >= 0 ? Interval{q.A(i, j) * prod.lo, q.A(i, j) * prod.hi}
                                                 : Interval{q.A(i, j) * prod.hi, q.A(i, j) * prod.lo};
                lo += scaled.lo;
                hi += scaled.hi;
            }
        }
        if (lo > 0) return false;
        if (q.rel == Relation::EqZero && hi < 0) return false;
        return true;
    }

    bool linear_feasible(int depth) {
        for (Index r = 0; r < instance.lin_lhs.rows(); ++r) {
            Int lo = 0;
            for (int i = 0; i < instance.variable_count; ++i) {
                const Int& coeff = instance.lin_lhs(r, i);
                if (coeff == 0) continue;
                if (i < depth) {
                    lo += coeff * x(i);
                } else {
                    lo += product_range(coeff, range[i]).lo;
                }
            }
            if (lo > instance.lin_rhs(r)) return false;
        }
        return true;
    }

    bool feasible(int depth) {
        if (!linear_feasible(depth)) return false;
        for (const QuadConstraint& q : instance.quadratic)
            if (!quad_feasible(q, depth)) return false;
        return true;
    }

    void dfs(int depth) {
        if (found || out_of_budget) return;
        if (++nodes > budget) {
            out_of_budget = true;
            return;
        }
        if (depth == instance.variable_count) {
            if (satisfies(instance, x) && (!accept || accept(x))) found = x;
            return;
        }
        for (Int v = range[depth].lo; v <= range[depth].hi; ++v) {
            x(depth) = v;
            if (feasible(depth + 1)) dfs(depth + 1);
            if (found || out_of_budget) return;
        }
        x(depth) = 0;
    }
};

}  // namespace

SolveVerdict solve(const IqpInstance& instance, long box_bound, size_t node_budget,
                   const std::function<bool(const IntVec&)>& accept) {
    validate_instance(instance);
    if (box_bound < 1) throw MisuseError("iqp: box bound must be positive");
    if (node_budget < 1) throw MisuseError("iqp: node budget must be positive");

    Search search(instance, box_bound, node_budget, accept);
    if (search.feasible(0)) search.dfs(0);

    SolveVerdict verdict;
    verdict.box = box_bound;
    verdict.nodes = search.nodes;
    if (search.found) {
        if (!satisfies(instance, *search.found))
            throw std::logic_error("iqp: witness failed exact re-verification");
        verdict.kind = SolveVerdict::Kind::Sat;
        verdict.witness = *search.found;
    } else if (search.out_of_budget) {
        verdict.kind = SolveVerdict::Kind::Unknown;
    } else {
        verdict.kind = SolveVerdict::Kind::BoundedUnsat;
    }
    return verdict;
}

SolveVerdict solve_escalating(const IqpInstance& instance, const EscalationPolicy& policy,
                              const std::function<bool(const IntVec&)>& accept) {
    SolveVerdict last;
    for (long box = policy.initial_box; box <= policy.box_cap; box *= 2) {
        last = solve(instance, box, policy.node_budget, accept);
        if (last.is_sat()) return last;
        if (last.kind == SolveVerdict::Kind::Unknown) return last;
    }
    return last;
}

}  // namespace vass
