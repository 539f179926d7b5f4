// Natural-domain procedures: bounded cyclic computations for the uniform
// average-value problem, the reachability reduction, and the doubled-counter
// construction for the regular finite-value problem.

#include "vassavg/decision.hpp"

#include "vassavg/graph.hpp"
#include "vassavg/reach.hpp"

#include <algorithm>
#include <map>
#include <sstream>

namespace vass {

namespace {

Answer plain_answer(Answer::Verdict verdict, std::string reason, std::string step,
                    std::map<std::string, std::string> budget = {}) {
    Answer answer;
    answer.verdict = verdict;
    answer.reason = std::move(reason);
    answer.step = std::move(step);
    answer.budget = std::move(budget);
    return answer;
}

// Config-box graph for the candidate search: nodes are configurations with
// counters in [0, cap]^k, edges carry the original transition index.
struct BoxGraph {
    std::vector<Config> nodes;
    Vass graph;  // synthetic: one state per node, zero updates
    std::vector<int> edge_transition;  // synthetic transition -> original index
};

std::optional<BoxGraph> build_box_graph(const Vass& a, const Int& cap, size_t node_limit) {
    BoxGraph box;
    // Enumerate the box deterministically: state-major, counters in
    // lexicographic order.
    std::vector<IntVec> valuations;
    IntVec current = IntVec::Zero(a.dimension);
    while (true) {
        valuations.push_back(current);
        Index pos = a.dimension - 1;
        while (pos >= 0) {
            current(pos) += 1;
            if (current(pos) <= cap) break;
            current(pos) = 0;
            --pos;
        }
        if (pos < 0) break;
        if (valuations.size() * a.state_names.size() > node_limit) return std::nullopt;
    }
    std::map<std::pair<int, std::vector<Int>>, int> index;
    for (int q = 0; q < a.state_count(); ++q) {
        for (const IntVec& v : valuations) {
            const int id = static_cast<int>(box.nodes.size());
            box.nodes.push_back(Config{q, v});
            index.emplace(std::make_pair(q, std::vector<Int>(v.data(), v.data() + v.size())),
                          id);
        }
    }
    box.graph.dimension = 1;
    box.graph.domain = Domain::Integer;
    for (size_t i = 0; i < box.nodes.size(); ++i)
        box.graph.state_names.push_back("c" + std::to_string(i));
    box.graph.initial_states = {0};
    int edge = 0;
    for (size_t u = 0; u < box.nodes.size(); ++u) {
        const Config& c = box.nodes[u];
        for (int t = 0; t < a.transition_count(); ++t) {
            if (a.transitions[t].source != c.state) continue;
            IntVec next = c.counters + a.transitions[t].update;
            bool inside = true;
            for (Index i = 0; i < next.size(); ++i)
                if (next(i) < 0 || next(i) > cap) inside = false;
            if (!inside) continue;
            auto it = index.find(std::make_pair(
                a.transitions[t].target, std::vector<Int>(next.data(), next.data() + next.size())));
            if (it == index.end()) continue;
            box.graph.transitions.push_back({static_cast<int>(u), it->second, IntVec::Zero(1)});
            box.graph.transition_names.push_back("b" + std::to_string(edge++));
            box.edge_transition.push_back(t);
        }
    }
    return box;
}

}  // namespace

Answer uniform_average_N(const Vass& a, const IntVec& coefficients, const Rat& threshold,
                         const DecisionBudget& budget) {
    validate_vass(a);
    if (a.domain != Domain::Natural)
        throw UnsupportedError("uniform_average_N: NATURAL domain only");
    if (coefficients.size() != a.dimension)
        throw MisuseError("uniform_average_N: coefficient dimension mismatch");
    for (Index i = 0; i < coefficients.size(); ++i) {
        if (coefficients(i) < 0) throw MisuseError("uniform_average_N: negative coefficient");
        if (coefficients(i) == 0)
            throw UnsupportedError(
                "uniform_average_N: zero coefficients are outside the decidable fragment");
    }
    const CostFunction cost = uniform_cost(a, coefficients);

    std::map<std::string, std::string> notes;
    // Counter cap ceil(2 max(lambda, 0)); cycle lengths are implicitly
    // bounded by the box size, which subsumes the 3|Q|(2M)^k bound.
    const Rat m_bound = std::max(threshold, Rat(0));
    const Int cap = ceil_rat(Rat(2) * m_bound);
    notes["counter_cap"] = cap.get_str();

    const auto box = build_box_graph(a, cap, 20000);
    if (!box) return plain_answer(Answer::Verdict::Unknown,
                                  "candidate box too large to enumerate", "enumeration",
                                  std::move(notes));

    std::vector<bool> all(box->graph.state_names.size(), true);
    const SimpleCycles cycles = enumerate_simple_cycles(box->graph, all, 50000);
    notes["candidate_cycles"] = std::to_string(cycles.cycles.size());
    notes["candidate_enumeration_complete"] = cycles.complete ? "true" : "false";

    bool any_candidate = false;
    bool any_unknown = false;
    for (const Path& cycle : cycles.cycles) {
        // Average of the cost over the cycle's configurations.
        Int total = 0;
        for (int e : cycle) {
            const Config& c = box->nodes[box->graph.transitions[e].source];
            total += coefficients.dot(c.counters);
        }
        const Rat average = make_rat(total, Int(static_cast<long>(cycle.size())));
        if (average > threshold) continue;
        any_candidate = true;

        const Config& start = box->nodes[box->graph.transitions[cycle.front()].source];
        Path original_cycle;
        for (int e : cycle) original_cycle.push_back(box->edge_transition[e]);

        for (int q0 : a.initial_states) {
            ReachQuery query;
            query.vass = a;
            query.source = Config{q0, IntVec::Zero(a.dimension)};
            query.target = start;
            query.budget = budget.reach_budget;
            query.counter_cap = budget.reach_counter_cap;
            const ReachResult reach = reachable(query);
            if (reach.kind == ReachResult::Kind::Reachable) {
                Lasso lasso{reach.path, original_cycle};
                const LassoVerdict v = lasso_value(a, cost, lasso);
                if (!v.value.leq(threshold))
                    throw std::logic_error("uniform_average_N: candidate failed certification");
                Answer answer = plain_answer(Answer::Verdict::Yes, "", "enumeration",
                                             std::move(notes));
                answer.witness = std::move(lasso);
                answer.certified_value = v.value;
                return answer;
            }
            if (reach.kind == ReachResult::Kind::Unknown) any_unknown = true;
        }
    }

    if (!any_candidate && cycles.complete) {
        return plain_answer(Answer::Verdict::No,
                            "no cyclic computation within the counter bound has average "
                            "below the threshold (finite candidate set exhausted)",
                            "enumeration", std::move(notes));
    }
    if (any_candidate && !any_unknown) {
        return plain_answer(Answer::Verdict::No,
                            "all bounded candidate cycles are unreachable (frontiers closed)",
                            "enumeration", std::move(notes));
    }
    return plain_answer(Answer::Verdict::Unknown,
                        "candidate cycles exist but reachability is undecided within budget",
                        "enumeration", std::move(notes));
}

ReachToAverage reachability_to_average_N(const Vass& a, const Config& source,
                                         const Config& target) {
    validate_vass(a);
    if (a.domain != Domain::Natural)
        throw MisuseError("reachability_to_average_N: NATURAL domain only");
    const auto zero = [](const IntVec& v) {
        for (Index i = 0; i < v.size(); ++i)
            if (v(i) != 0) return false;
        return true;
    };
    if (!zero(source.counters) || !zero(target.counters))
        throw MisuseError("reachability_to_average_N: source and target counters must be 0");

    const Index k = a.dimension;
    ReachToAverage out;
    Vass& b = out.vass;
    b.dimension = k + 1;
    b.domain = Domain::Natural;
    b.state_names = a.state_names;
    b.state_names.push_back("qS");
    b.state_names.push_back("qF");
    out.start_state = a.state_count();
    out.sink_state = a.state_count() + 1;
    b.initial_states = {out.start_state};

    const auto extend = [&](const IntVec& u) {
        IntVec v = IntVec::Zero(k + 1);
        v.head(k) = u;
        return v;
    };
    int edge = 0;
    const auto add = [&](int src, int dst, IntVec update) {
        b.transitions.push_back({src, dst, std::move(update)});
        b.transition_names.push_back("r" + std::to_string(edge++));
    };
    for (const Transition& t : a.transitions) add(t.source, t.target, extend(t.update));
    {
        IntVec boot = IntVec::Zero(k + 1);
        boot(k) = 1;
        add(out.start_state, source.state, std::move(boot));  // set c_{k+1} = 1
    }
    add(target.state, out.sink_state, IntVec::Zero(k + 1));
    add(out.sink_state, out.sink_state, IntVec::Zero(k + 1));  // idle loop
    {
        IntVec dec = IntVec::Zero(k + 1);
        dec(k) = -1;
        add(out.sink_state, out.sink_state, std::move(dec));  // drain c_{k+1}
    }

    out.cost = uniform_cost(b, IntVec::Ones(k + 1));
    out.threshold = Rat(0);
    validate_vass(b);
    validate_cost(b, out.cost);
    return out;
}

Answer regular_finite_value_N(const Query& query) {
    const Vass& a = query.vass;
    const CostFunction& f = query.cost;
    validate_vass(a);
    validate_cost(a, f);
    if (a.domain != Domain::Natural)
        throw MisuseError("regular_finite_value_N: NATURAL domain only (use the Z procedure)");

    std::map<std::string, std::string> notes;
    const std::vector<bool> mask = reachable_states(a);
    if (!has_cycle(a, mask))
        return plain_answer(Answer::Verdict::No,
                            "no reachable cycle; no regular computation exists",
                            "enumeration", std::move(notes));

    const Index k = a.dimension;
    if (k > 16) return plain_answer(Answer::Verdict::Unknown, "too many counters", "enumeration");

    // Subsets of counters forced iteration-invariant, largest first; the
    // cycle may only visit states whose labels vanish outside the subset.
    std::vector<unsigned> subsets;
    for (unsigned w = 0; w < (1u << k); ++w) subsets.push_back(w);
    std::sort(subsets.begin(), subsets.end(), [](unsigned x, unsigned y) {
        if (__builtin_popcount(x) != __builtin_popcount(y))
            return __builtin_popcount(x) > __builtin_popcount(y);
        return x < y;
    });

    bool all_closed = true;
    for (unsigned w : subsets) {
        std::vector<bool> allowed(a.state_count(), false);
        for (int q = 0; q < a.state_count(); ++q) {
            bool ok = mask[q];
            for (Index i = 0; i < k && ok; ++i)
                if (!(w & (1u << i)) && f.labeling[q](i) != 0) ok = false;
            allowed[q] = ok;
        }
        int allowed_count = 0;
        for (int q = 0; q < a.state_count(); ++q)
            if (allowed[q]) ++allowed_count;
        if (allowed_count == 0) continue;

        // Doubled-counter simulation: copy 1 moves in both phases, copy 2
        // only in phase 1; with equal copies the cycle gain vanishes on the
        // invariant counters, and copy1 >= copy2 yields nonnegative gain on
        // the rest.
        Vass sim;
        sim.dimension = 2 * k;
        sim.domain = Domain::Natural;
        std::map<std::tuple<int, int, int>, int> phase2;  // (anchor, state, moved)
        for (int q = 0; q < a.state_count(); ++q) sim.state_names.push_back("p1_" + a.state_names[q]);
        for (int anchor = 0; anchor < a.state_count(); ++anchor) {
            if (!allowed[anchor]) continue;
            for (int q = 0; q < a.state_count(); ++q) {
                if (!allowed[q]) continue;
                for (int moved = 0; moved <= 1; ++moved) {
                    phase2[{anchor, q, moved}] = static_cast<int>(sim.state_names.size());
                    sim.state_names.push_back("p2_" + a.state_names[anchor] + "_" +
                                              a.state_names[q] + "_" + std::to_string(moved));
                }
            }
        }
        const int sink = static_cast<int>(sim.state_names.size());
        sim.state_names.push_back("peq");
        sim.initial_states = a.initial_states;

        enum class Tag { Sim, Switch, Loop, Close, Drain };
        std::vector<std::pair<Tag, int>> tags;  // tag + original transition
        int edge = 0;
        const auto add = [&](int src, int dst, IntVec update, Tag tag, int original) {
            sim.transitions.push_back({src, dst, std::move(update)});
            sim.transition_names.push_back("s" + std::to_string(edge++));
            tags.emplace_back(tag, original);
        };
        const auto both = [&](const IntVec& u) {
            IntVec v(2 * k);
            v.head(k) = u;
            v.tail(k) = u;
            return v;
        };
        const auto first_only = [&](const IntVec& u) {
            IntVec v = IntVec::Zero(2 * k);
            v.head(k) = u;
            return v;
        };
        for (int t = 0; t < a.transition_count(); ++t)
            add(a.transitions[t].source, a.transitions[t].target, both(a.transitions[t].update),
                Tag::Sim, t);
        for (int q = 0; q < a.state_count(); ++q)
            if (allowed[q])
                add(q, phase2.at({q, q, 0}), IntVec::Zero(2 * k), Tag::Switch, -1);
        for (const auto& [key, idx] : phase2) {
            const auto [anchor, q, moved] = key;
            for (int t = 0; t < a.transition_count(); ++t) {
                if (a.transitions[t].source != q || !allowed[a.transitions[t].target]) continue;
                add(idx, phase2.at({anchor, a.transitions[t].target, 1}),
                    first_only(a.transitions[t].update), Tag::Loop, t);
            }
            if (q == anchor && moved == 1)
                add(idx, sink, IntVec::Zero(2 * k), Tag::Close, -1);
        }
        for (Index i = 0; i < k; ++i) {
            IntVec dec_both = IntVec::Zero(2 * k);
            dec_both(i) = -1;
            dec_both(k + i) = -1;
            add(sink, sink, std::move(dec_both), Tag::Drain, -1);
            if (!(w & (1u << i))) {
                IntVec dec_first = IntVec::Zero(2 * k);
                dec_first(i) = -1;
                add(sink, sink, std::move(dec_first), Tag::Drain, -1);
            }
        }
        validate_vass(sim);

        for (int q0 : a.initial_states) {
            ReachQuery rq;
            rq.vass = sim;
            rq.source = Config{q0, IntVec::Zero(2 * k)};
            rq.target = Config{sink, IntVec::Zero(2 * k)};
            rq.budget = query.budget.reach_budget;
            rq.counter_cap = query.budget.reach_counter_cap;
            const ReachResult reach = reachable(rq);
            if (reach.kind == ReachResult::Kind::Unknown) all_closed = false;
            if (reach.kind != ReachResult::Kind::Reachable) continue;

            Path prefix, cycle;
            for (int e : reach.path) {
                const auto& [tag, original] = tags[e];
                if (tag == Tag::Sim) prefix.push_back(original);
                if (tag == Tag::Loop) cycle.push_back(original);
            }
            if (cycle.empty()) continue;
            Lasso lasso{std::move(prefix), std::move(cycle)};
            if (!is_natural_valid(a, lasso)) continue;
            const LassoVerdict v = lasso_value(a, f, lasso);
            if (v.value.kind == ExtendedValue::Kind::PosInfinity) continue;
            Answer answer = plain_answer(Answer::Verdict::Yes, "", "enumeration",
                                         std::move(notes));
            answer.budget["invariant_subset"] = std::to_string(w);
            answer.witness = std::move(lasso);
            answer.certified_value = v.value;
            return answer;
        }
    }

    if (all_closed)
        return plain_answer(Answer::Verdict::No,
                            "every doubled-counter reachability query closed without "
                            "reaching the equal-copies configuration",
                            "enumeration", std::move(notes));
    return plain_answer(Answer::Verdict::Unknown,
                        "doubled-counter reachability exhausted its budget", "enumeration",
                        std::move(notes));
}

}  // namespace vass
