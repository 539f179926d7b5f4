#include "vassavg/model.hpp"

#include <algorithm>
#include <set>
#include <sstream>

namespace vass {

void validate_vass(const Vass& a) {
    if (a.dimension < 1) throw StructuralError("vass: dimension must be >= 1");
    if (a.state_names.empty()) throw StructuralError("vass: no states");
    if (a.initial_states.empty()) throw StructuralError("vass: no initial states");
    for (int q : a.initial_states) {
        if (q < 0 || q >= a.state_count())
            throw StructuralError("vass: initial state out of range");
    }
    if (a.transition_names.size() != a.transitions.size())
        throw StructuralError("vass: transition name table size mismatch");
    std::set<std::string> names(a.transition_names.begin(), a.transition_names.end());
    if (names.size() != a.transition_names.size())
        throw StructuralError("vass: duplicate transition names");
    for (const Transition& t : a.transitions) {
        if (t.source < 0 || t.source >= a.state_count() || t.target < 0 ||
            t.target >= a.state_count())
            throw StructuralError("vass: transition endpoint out of range");
        if (t.update.size() != a.dimension)
            throw StructuralError("vass: transition update has wrong dimension");
    }
}

void validate_cost(const Vass& a, const CostFunction& f) {
    if (static_cast<int>(f.labeling.size()) != a.state_count())
        throw StructuralError("cost: labeling must cover every state exactly once");
    for (const IntVec& l : f.labeling) {
        if (l.size() != a.dimension)
            throw StructuralError("cost: coefficient vector has wrong dimension");
        for (Index i = 0; i < l.size(); ++i)
            if (l(i) < 0) throw StructuralError("cost: negative coefficient");
    }
}

bool is_uniform(const CostFunction& f) {
    for (size_t i = 1; i < f.labeling.size(); ++i)
        if (f.labeling[i] != f.labeling[0]) return false;
    return true;
}

CostFunction uniform_cost(const Vass& a, const IntVec& coefficients) {
    CostFunction f;
    f.labeling.assign(a.state_names.size(), coefficients);
    return f;
}

bool is_chained(const Vass& a, const Path& path) {
    for (int t : path)
        if (t < 0 || t >= a.transition_count()) return false;
    for (size_t i = 0; i + 1 < path.size(); ++i)
        if (a.transitions[path[i]].target != a.transitions[path[i + 1]].source) return false;
    return true;
}

bool is_cycle(const Vass& a, const Path& path) {
    return !path.empty() && is_chained(a, path) &&
           a.transitions[path.front()].source == a.transitions[path.back()].target;
}

int path_start(const Vass& a, const Path& path) {
    if (path.empty()) throw StructuralError("path_start: empty path");
    return a.transitions[path.front()].source;
}

int path_end(const Vass& a, const Path& path) {
    if (path.empty()) throw StructuralError("path_end: empty path");
    return a.transitions[path.back()].target;
}

Path concat(const Path& a, const Path& b) {
    Path r = a;
    r.insert(r.end(), b.begin(), b.end());
    return r;
}

Path repeat(const Path& p, long times) {
    Path r;
    r.reserve(p.size() * static_cast<size_t>(std::max(0L, times)));
    for (long i = 0; i < times; ++i) r.insert(r.end(), p.begin(), p.end());
    return r;
}

void validate_lasso(const Vass& a, const Lasso& lasso) {
    if (!is_chained(a, lasso.prefix)) throw StructuralError("lasso: prefix not chained");
    if (!is_cycle(a, lasso.cycle)) throw StructuralError("lasso: cycle part is not a cycle");
    const int cycle_start = path_start(a, lasso.cycle);
    const int anchor = lasso.prefix.empty() ? cycle_start : path_start(a, lasso.prefix);
    if (!std::count(a.initial_states.begin(), a.initial_states.end(), anchor))
        throw StructuralError("lasso: does not start in an initial state");
    if (!lasso.prefix.empty() && path_end(a, lasso.prefix) != cycle_start)
        throw StructuralError("lasso: prefix does not end at the cycle start");
}

bool is_natural_valid(const Vass& a, const Lasso& lasso) {
    validate_lasso(a, lasso);
    const int start =
        lasso.prefix.empty() ? path_start(a, lasso.cycle) : path_start(a, lasso.prefix);
    Config c0{start, IntVec::Zero(a.dimension)};
    SimulationResult pre = simulate(a, c0, lasso.prefix);
    if (pre.first_negative) return false;

    Config at_cycle = pre.configs.back();
    SimulationResult two = simulate(a, at_cycle, repeat(lasso.cycle, 2));
    if (two.first_negative) return false;

    // Per-counter running minimum of the partial gains over one iteration
    // (end position included); counters that dip need nonnegative gain.
    IntVec partial = IntVec::Zero(a.dimension);
    IntVec running_min = IntVec::Zero(a.dimension);
    for (int t : lasso.cycle) {
        partial += a.transitions[t].update;
        for (Index i = 0; i < partial.size(); ++i)
            running_min(i) = std::min(running_min(i), partial(i));
    }
    const IntVec& cycle_gain = partial;
    for (Index i = 0; i < cycle_gain.size(); ++i)
        if (running_min(i) < 0 && cycle_gain(i) < 0) return false;
    return true;
}

bool operator==(const Config& a, const Config& b) {
    return a.state == b.state && a.counters == b.counters;
}

bool config_less(const Config& a, const Config& b) {
    if (a.state != b.state) return a.state < b.state;
    return lex_less(a.counters, b.counters);
}

bool ExtendedValue::leq(const ExtendedValue& other) const {
    if (kind == Kind::NegInfinity) return true;
    if (other.kind == Kind::PosInfinity) return true;
    if (kind == Kind::PosInfinity) return false;
    if (other.kind == Kind::NegInfinity) return false;
    return finite <= other.finite;
}

bool ExtendedValue::leq(const Rat& threshold) const {
    return leq(ExtendedValue::of(threshold));
}

std::string ExtendedValue::str() const {
    switch (kind) {
        case Kind::NegInfinity: return "-inf";
        case Kind::PosInfinity: return "+inf";
        case Kind::Finite: return rat_string(finite);
    }
    return "?";
}

bool operator==(const ExtendedValue& a, const ExtendedValue& b) {
    if (a.kind != b.kind) return false;
    if (a.kind != ExtendedValue::Kind::Finite) return true;
    return a.finite == b.finite;
}

PathSummary path_summary(const Vass& a, const CostFunction& f, const Path& path) {
    if (!is_chained(a, path)) throw StructuralError("path_summary: path not chained");
    PathSummary s{IntVec::Zero(a.dimension), IntVec::Zero(a.dimension)};
    for (int t : path) {
        s.gain += a.transitions[t].update;
        s.vals += f.labeling[a.transitions[t].source];
    }
    return s;
}

IntVec gain_of(const Vass& a, const Path& path) {
    if (!is_chained(a, path)) throw StructuralError("gain_of: path not chained");
    IntVec g = IntVec::Zero(a.dimension);
    for (int t : path) g += a.transitions[t].update;
    return g;
}

IntVec vals_of(const Vass& a, const CostFunction& f, const Path& path) {
    if (!is_chained(a, path)) throw StructuralError("vals_of: path not chained");
    IntVec v = IntVec::Zero(a.dimension);
    for (int t : path) v += f.labeling[a.transitions[t].source];
    return v;
}

Int sum_from(const Vass& a, const CostFunction& f, const IntVec& g, const Path& path) {
    if (g.size() != a.dimension) throw StructuralError("sum_from: g has wrong dimension");
    if (!is_chained(a, path)) throw StructuralError("sum_from: path not chained");
    Int total = 0;
    IntVec counters = g;
    for (int t : path) {
        total += counters.dot(f.labeling[a.transitions[t].source]);
        counters += a.transitions[t].update;
    }
    return total;
}

SimulationResult simulate(const Vass& a, const Config& start, const Path& path) {
    if (start.counters.size() != a.dimension)
        throw StructuralError("simulate: start has wrong dimension");
    if (!is_chained(a, path)) throw StructuralError("simulate: path not chained");
    if (!path.empty() && a.transitions[path.front()].source != start.state)
        throw StructuralError("simulate: path does not begin at the start state");

    SimulationResult r;
    r.configs.reserve(path.size() + 1);
    r.configs.push_back(start);
    Config current = start;
    for (size_t i = 0; i < path.size(); ++i) {
        const Transition& t = a.transitions[path[i]];
        current.state = t.target;
        current.counters += t.update;
        r.configs.push_back(current);
        if (!r.first_negative) {
            for (Index c = 0; c < current.counters.size(); ++c) {
                if (current.counters(c) < 0) {
                    r.first_negative = i + 1;
                    break;
                }
            }
        }
    }
    return r;
}

}  // namespace vass
