// Integer-domain procedures: the exact configuration-graph route, the
// negative-cycle step, negative-template search, the linear case, and the
// bounded enumeration fallback. Shared helpers live in the anonymous
// namespace; natural-domain procedures are in decision_n.cpp.

#include "vassavg/decision.hpp"

#include "vassavg/graph.hpp"
#include "vassavg/iqp.hpp"
#include "vassavg/templates.hpp"

#include <algorithm>
#include <deque>
#include <functional>
#include <map>
#include <sstream>

namespace vass {

namespace {

std::string bool_str(bool b) { return b ? "true" : "false"; }

struct Ctx {
    const Vass& a;
    const CostFunction& f;
    const DecisionBudget& budget;
    std::vector<bool> mask;  // states reachable from the initial states
    bool any_cycle = false;
    SimpleCycles simple;
    std::vector<IntVec> sc_gain, sc_vals;
    std::vector<Int> sc_dot;
    std::map<std::string, std::string> notes;
};

Ctx make_ctx(const Vass& a, const CostFunction& f, const DecisionBudget& budget) {
    validate_vass(a);
    validate_cost(a, f);
    Ctx ctx{a, f, budget};
    ctx.mask = reachable_states(a);
    ctx.any_cycle = has_cycle(a, ctx.mask);
    ctx.simple = enumerate_simple_cycles(a, ctx.mask, budget.simple_cycle_cap);
    for (const Path& c : ctx.simple.cycles) {
        ctx.sc_gain.push_back(gain_of(a, c));
        ctx.sc_vals.push_back(vals_of(a, f, c));
        ctx.sc_dot.push_back(ctx.sc_gain.back().dot(ctx.sc_vals.back()));
    }
    ctx.notes["simple_cycles"] = std::to_string(ctx.simple.cycles.size());
    ctx.notes["simple_cycles_complete"] = bool_str(ctx.simple.complete);
    return ctx;
}

// Lasso whose cycle is `cycle` and whose prefix is the shortest path from
// an initial state to the cycle start.
std::optional<Lasso> anchored_lasso(const Ctx& ctx, const Path& cycle) {
    const int start = path_start(ctx.a, cycle);
    if (!ctx.mask[start]) return std::nullopt;
    auto prefix = shortest_path(ctx.a, ctx.a.initial_states, start, ctx.mask);
    if (!prefix) return std::nullopt;
    return Lasso{std::move(*prefix), cycle};
}

bool value_matches(const ExtendedValue& value, ProblemKind kind, const Rat& threshold) {
    switch (kind) {
        case ProblemKind::RegularNegInf:
            return value.kind == ExtendedValue::Kind::NegInfinity;
        case ProblemKind::RegularFinite:
            return value.kind != ExtendedValue::Kind::PosInfinity;
        case ProblemKind::RegularAverage:
            return value.leq(threshold);
    }
    return false;
}

Answer certified_yes(const Ctx& ctx, Lasso lasso, ProblemKind kind, const Rat& threshold,
                     const std::string& step) {
    const LassoVerdict v = lasso_value(ctx.a, ctx.f, lasso);
    if (!value_matches(v.value, kind, threshold))
        throw std::logic_error("decision: witness failed final certification");
    Answer answer;
    answer.verdict = Answer::Verdict::Yes;
    answer.witness = std::move(lasso);
    answer.certified_value = v.value;
    answer.step = step;
    answer.budget = ctx.notes;
    return answer;
}

Answer no_answer(const Ctx& ctx, std::string reason, const std::string& step) {
    Answer answer;
    answer.verdict = Answer::Verdict::No;
    answer.reason = std::move(reason);
    answer.step = step;
    answer.budget = ctx.notes;
    return answer;
}

Answer unknown_answer(const Ctx& ctx, std::string reason) {
    Answer answer;
    answer.verdict = Answer::Verdict::Unknown;
    answer.reason = std::move(reason);
    answer.step = "enumeration";
    answer.budget = ctx.notes;
    return answer;
}

// ---------------------------------------------------------------------
// Exact route: when the integer configuration graph from the initial
// configurations is finite, every lasso lives inside it and the minimum
// mean cycle decides all three problems exactly.
// ---------------------------------------------------------------------

struct ConfigGraph {
    std::vector<Config> nodes;
    std::vector<int> sources;  // node indices of initial configurations
    struct Edge {
        int from, to, transition;
        Int weight;  // f at the source configuration
    };
    std::vector<Edge> edges;
    std::vector<std::vector<int>> out;  // node -> edge indices
    bool closed = false;
};

ConfigGraph explore_configs(const Ctx& ctx) {
    ConfigGraph g;
    std::map<std::pair<int, std::vector<Int>>, int> index;
    const auto key_of = [](const Config& c) {
        return std::make_pair(c.state,
                              std::vector<Int>(c.counters.data(), c.counters.data() + c.counters.size()));
    };
    std::deque<int> queue;
    const auto intern = [&](const Config& c) {
        auto [it, inserted] = index.emplace(key_of(c), static_cast<int>(g.nodes.size()));
        if (inserted) {
            g.nodes.push_back(c);
            g.out.emplace_back();
            queue.push_back(it->second);
        }
        return it->second;
    };
    for (int q : ctx.a.initial_states)
        g.sources.push_back(intern(Config{q, IntVec::Zero(ctx.a.dimension)}));

    bool capped = false;
    while (!queue.empty()) {
        const int u = queue.front();
        queue.pop_front();
        const Config current = g.nodes[u];
        for (int t = 0; t < ctx.a.transition_count(); ++t) {
            if (ctx.a.transitions[t].source != current.state) continue;
            if (g.nodes.size() >= ctx.budget.config_probe_cap) {
                capped = true;
                break;
            }
            Config next{ctx.a.transitions[t].target,
                        current.counters + ctx.a.transitions[t].update};
            const int v = intern(next);
            const Int w = current.counters.dot(ctx.f.labeling[current.state]);
            g.out[u].push_back(static_cast<int>(g.edges.size()));
            g.edges.push_back({u, v, t, w});
        }
        if (capped) break;
    }
    g.closed = !capped;
    return g;
}

struct MeanCycle {
    Rat mean;
    Path cycle;        // original transition indices
    int start_node;    // config-graph node where the cycle starts
};

// Karp's minimum mean cycle, then a tight-edge search for a cycle that
// attains it. Exact rational arithmetic throughout.
std::optional<MeanCycle> min_mean_cycle(const ConfigGraph& g) {
    const int n = static_cast<int>(g.nodes.size());
    if (n == 0 || g.edges.empty()) return std::nullopt;

    // d[k][v] = least weight of a k-edge walk from a source to v.
    std::vector<std::vector<std::optional<Int>>> d(
        n + 1, std::vector<std::optional<Int>>(n));
    for (int s : g.sources) d[0][s] = Int(0);
    for (int k = 1; k <= n; ++k) {
        for (const auto& e : g.edges) {
            if (!d[k - 1][e.from]) continue;
            const Int cand = *d[k - 1][e.from] + e.weight;
            if (!d[k][e.to] || cand < *d[k][e.to]) d[k][e.to] = cand;
        }
    }

    std::optional<Rat> best;
    for (int v = 0; v < n; ++v) {
        if (!d[n][v]) continue;
        std::optional<Rat> worst;
        for (int k = 0; k < n; ++k) {
            if (!d[k][v]) continue;
            Rat ratio = make_rat(*d[n][v] - *d[k][v], Int(n - k));
            if (!worst || ratio > *worst) worst = ratio;
        }
        if (worst && (!best || *worst < *best)) best = *worst;
    }
    if (!best) return std::nullopt;  // no cycle reachable

    // Reweight so cycles have nonnegative weight and a zero-weight cycle
    // attains the minimum mean; find it among tight edges.
    const Int num = best->get_num(), den = best->get_den();
    std::vector<std::optional<Int>> pot(n);
    for (int s : g.sources) pot[s] = Int(0);
    for (int round = 0; round < n; ++round) {
        bool changed = false;
        for (const auto& e : g.edges) {
            if (!pot[e.from]) continue;
            const Int w = e.weight * den - num;
            const Int cand = *pot[e.from] + w;
            if (!pot[e.to] || cand < *pot[e.to]) {
                pot[e.to] = cand;
                changed = true;
            }
        }
        if (!changed) break;
    }
    // Tight subgraph: edges with pot[u] + w == pot[v].
    std::vector<std::vector<int>> tight(n);
    for (size_t i = 0; i < g.edges.size(); ++i) {
        const auto& e = g.edges[i];
        if (!pot[e.from] || !pot[e.to]) continue;
        if (*pot[e.from] + e.weight * den - num == *pot[e.to])
            tight[e.from].push_back(static_cast<int>(i));
    }
    // Cycle search in the tight subgraph.
    std::vector<int> color(n, 0);  // 0 new, 1 on stack, 2 done
    std::vector<int> stack_nodes;
    std::vector<int> stack_edges;
    std::function<std::optional<MeanCycle>(int)> dfs = [&](int u) -> std::optional<MeanCycle> {
        color[u] = 1;
        stack_nodes.push_back(u);
        for (int ei : tight[u]) {
            const auto& e = g.edges[ei];
            if (color[e.to] == 1) {
                MeanCycle mc;
                mc.mean = *best;
                auto it = std::find(stack_nodes.begin(), stack_nodes.end(), e.to);
                const size_t pos = static_cast<size_t>(it - stack_nodes.begin());
                for (size_t j = pos; j < stack_edges.size(); ++j)
                    mc.cycle.push_back(g.edges[stack_edges[j]].transition);
                mc.cycle.push_back(e.transition);
                mc.start_node = e.to;
                return mc;
            }
            if (color[e.to] == 0) {
                stack_edges.push_back(ei);
                auto found = dfs(e.to);
                stack_edges.pop_back();
                if (found) return found;
            }
        }
        color[u] = 2;
        stack_nodes.pop_back();
        return std::nullopt;
    };
    for (int u = 0; u < n; ++u) {
        if (color[u] == 0 && pot[u]) {
            auto found = dfs(u);
            if (found) return found;
        }
    }
    return std::nullopt;
}

std::optional<Path> config_prefix(const ConfigGraph& g, int target_node) {
    std::vector<int> parent(g.nodes.size(), -2);
    std::deque<int> queue;
    for (int s : g.sources) {
        if (parent[s] != -2) continue;
        parent[s] = -1;
        queue.push_back(s);
    }
    std::vector<int> parent_edge(g.nodes.size(), -1);
    while (!queue.empty()) {
        int u = queue.front();
        queue.pop_front();
        if (u == target_node) {
            Path rev;
            while (parent[u] >= 0) {
                rev.push_back(g.edges[parent_edge[u]].transition);
                u = parent[u];
            }
            std::reverse(rev.begin(), rev.end());
            return rev;
        }
        for (int ei : g.out[u]) {
            const auto& e = g.edges[ei];
            if (parent[e.to] != -2) continue;
            parent[e.to] = u;
            parent_edge[e.to] = ei;
            queue.push_back(e.to);
        }
    }
    return std::nullopt;
}

// Exact answer when the configuration graph is closed; nullopt otherwise.
std::optional<Answer> config_exact(Ctx& ctx, ProblemKind kind, const Rat& threshold) {
    const ConfigGraph g = explore_configs(ctx);
    ctx.notes["config_probe_closed"] = bool_str(g.closed);
    if (!g.closed) return std::nullopt;
    // Keep the exact analysis to graphs the cubic Karp pass can afford.
    if (g.nodes.size() * g.edges.size() > 4000000) {
        ctx.notes["config_probe_skipped"] = "analysis too large";
        return std::nullopt;
    }
    ctx.notes["config_nodes"] = std::to_string(g.nodes.size());

    const auto mc = min_mean_cycle(g);
    if (!mc) {
        return no_answer(ctx,
                         "finite integer configuration graph contains no cycle; "
                         "no regular computation exists",
                         "enumeration");
    }
    // Every reachable cycle returns to the same configuration, so every
    // lasso is balanced: no -infinity value exists, finite values do.
    switch (kind) {
        case ProblemKind::RegularNegInf:
            return no_answer(ctx,
                             "finite integer configuration graph: every cycle is "
                             "configuration-level, hence balanced",
                             "enumeration");
        case ProblemKind::RegularFinite: {
            auto prefix = config_prefix(g, mc->start_node);
            if (!prefix) throw std::logic_error("config_exact: cycle start unreachable");
            return certified_yes(ctx, Lasso{std::move(*prefix), mc->cycle}, kind, threshold,
                                 "enumeration");
        }
        case ProblemKind::RegularAverage: {
            if (mc->mean <= threshold) {
                auto prefix = config_prefix(g, mc->start_node);
                if (!prefix) throw std::logic_error("config_exact: cycle start unreachable");
                return certified_yes(ctx, Lasso{std::move(*prefix), mc->cycle}, kind, threshold,
                                     "enumeration");
            }
            return no_answer(ctx,
                             "finite integer configuration graph: exact minimum mean "
                             "cycle value " + rat_string(mc->mean) + " exceeds the threshold",
                             "enumeration");
        }
    }
    return std::nullopt;
}

// ---------------------------------------------------------------------
// Copositivity of the simple-cycle mixing form. Exact KKT enumeration
// over supports: the minimum of k^T M k on the standard simplex.
// ---------------------------------------------------------------------

struct MixReport {
    bool conclusive = false;  // min_value is the exact minimum
    bool has_value = false;
    Rat min_value;            // if !conclusive, still an upper bound on the minimum
};

MixReport mixing_minimum(const Ctx& ctx) {
    MixReport report;
    const size_t s = ctx.simple.cycles.size();
    if (!ctx.simple.complete || s == 0 || s > ctx.budget.kkt_support_cap) return report;

    RatMat m(s, s);
    for (size_t i = 0; i < s; ++i)
        for (size_t j = 0; j < s; ++j)
            m(i, j) = Rat(ctx.sc_gain[i].dot(ctx.sc_vals[j]) + ctx.sc_gain[j].dot(ctx.sc_vals[i]));

    bool inconclusive = false;
    std::optional<Rat> best;
    for (unsigned mask = 1; mask < (1u << s); ++mask) {
        std::vector<int> t;
        for (size_t i = 0; i < s; ++i)
            if (mask & (1u << i)) t.push_back(static_cast<int>(i));
        const int n = static_cast<int>(t.size());
        RatMat sys(n + 1, n + 1);
        RatVec rhs = RatVec::Zero(n + 1);
        for (int i = 0; i < n; ++i) {
            for (int j = 0; j < n; ++j) sys(i, j) = Rat(2) * m(t[i], t[j]);
            sys(i, n) = Rat(-1);
        }
        for (int j = 0; j < n; ++j) sys(n, j) = Rat(1);
        sys(n, n) = Rat(0);
        rhs(n) = Rat(1);

        Eigen::FullPivLU<RatMat> lu(sys);
        RatVec sol = lu.solve(rhs);
        if ((sys * sol - rhs).cwiseAbs().sum() != Rat(0)) continue;  // inconsistent face
        const Index rank = lu.rank();
        if (rank < n + 1) {
            // Flat solution sets: if the value varies along the kernel the
            // face minimum sits on a boundary face; otherwise we need some
            // nonnegative representative.
            RatMat kernel = lu.kernel();
            bool mu_varies = false;
            for (Index c = 0; c < kernel.cols(); ++c)
                if (kernel(n, c) != 0) mu_varies = true;
            if (mu_varies) continue;
            bool nonneg = true;
            for (int i = 0; i < n; ++i)
                if (sol(i) < 0) nonneg = false;
            if (!nonneg) {
                inconclusive = true;  // cannot rule this face out
                continue;
            }
        } else {
            bool nonneg = true;
            for (int i = 0; i < n; ++i)
                if (sol(i) < 0) nonneg = false;
            if (!nonneg) continue;
        }
        const Rat value = sol(n) / 2;
        if (!best || value < *best) best = value;
    }
    if (best) {
        report.has_value = true;
        report.min_value = *best;
        report.conclusive = !inconclusive;
    }
    return report;
}

bool all_updates_nonnegative(const Ctx& ctx) {
    for (const Transition& t : ctx.a.transitions) {
        if (!ctx.mask[t.source]) continue;
        for (Index i = 0; i < t.update.size(); ++i)
            if (t.update(i) < 0) return false;
    }
    return true;
}

bool all_simple_gains_nonnegative(const Ctx& ctx) {
    if (!ctx.simple.complete) return false;
    for (const IntVec& g : ctx.sc_gain)
        for (Index i = 0; i < g.size(); ++i)
            if (g(i) < 0) return false;
    return true;
}

// ---------------------------------------------------------------------
// Mixed-cycle IQP search over transition multiplicities, with Euler
// reconstruction as the accept filter. rhs_shift = 1 searches for
// Gain.Vals < 0, rhs_shift = 0 for Gain.Vals <= 0.
// ---------------------------------------------------------------------

IntMat transition_matrix(const Ctx& ctx) {
    const int m = ctx.a.transition_count();
    IntMat mat(m, m);
    for (int e = 0; e < m; ++e) {
        const IntVec& ge = ctx.a.transitions[e].update;
        const IntVec& ve = ctx.f.labeling[ctx.a.transitions[e].source];
        for (int g = 0; g < m; ++g) {
            const IntVec& gg = ctx.a.transitions[g].update;
            const IntVec& vg = ctx.f.labeling[ctx.a.transitions[g].source];
            mat(e, g) = ge.dot(vg) + gg.dot(ve);
        }
    }
    return mat;
}

std::optional<Lasso> iqp_cycle_search(Ctx& ctx, const Int& rhs_shift) {
    const int m = ctx.a.transition_count();
    if (m == 0) return std::nullopt;
    const IntMat mat = transition_matrix(ctx);
    const std::vector<int> scc = scc_ids(ctx.a, ctx.mask);
    int scc_count = 0;
    for (int id : scc) scc_count = std::max(scc_count, id + 1);

    bool any_unknown = false;
    for (int comp = 0; comp < scc_count; ++comp) {
        std::vector<int> states;
        for (int q = 0; q < ctx.a.state_count(); ++q)
            if (ctx.mask[q] && scc[q] == comp) states.push_back(q);
        // Subsets of one SCC, smallest first; fall back to the full
        // component when the powerset is too large.
        std::vector<std::vector<int>> subsets;
        if (states.size() <= 10) {
            std::vector<unsigned> masks;
            for (unsigned s = 1; s < (1u << states.size()); ++s) masks.push_back(s);
            std::sort(masks.begin(), masks.end(), [](unsigned x, unsigned y) {
                if (__builtin_popcount(x) != __builtin_popcount(y))
                    return __builtin_popcount(x) < __builtin_popcount(y);
                return x < y;
            });
            for (unsigned s : masks) {
                std::vector<int> subset;
                for (size_t i = 0; i < states.size(); ++i)
                    if (s & (1u << i)) subset.push_back(states[i]);
                subsets.push_back(std::move(subset));
            }
        } else {
            subsets.push_back(states);
            ctx.notes["cycle_search_relaxed"] = "true";
        }

        for (const auto& subset : subsets) {
            std::vector<bool> in_subset(ctx.a.state_count(), false);
            for (int q : subset) in_subset[q] = true;

            IqpInstance inst;
            inst.variable_count = m;
            inst.domains.assign(m, VarDomain::Nonnegative);
            QuadConstraint quad;
            quad.A = mat;
            quad.a = IntVec::Zero(m);
            quad.d = rhs_shift;  // x^T A x + shift <= 0
            quad.rel = Relation::LeqZero;
            inst.quadratic.push_back(std::move(quad));

            for (int e = 0; e < m; ++e) {
                if (in_subset[ctx.a.transitions[e].source] &&
                    in_subset[ctx.a.transitions[e].target])
                    continue;
                IntVec row = IntVec::Zero(m);
                row(e) = 1;
                inst.add_linear_eq(row, Int(0));
            }
            for (int q : subset) {
                IntVec flow = IntVec::Zero(m);
                IntVec outdeg = IntVec::Zero(m);
                for (int e = 0; e < m; ++e) {
                    if (ctx.a.transitions[e].source == q) {
                        flow(e) += 1;
                        outdeg(e) -= 1;
                    }
                    if (ctx.a.transitions[e].target == q) flow(e) -= 1;
                }
                inst.add_linear_eq(flow, Int(0));
                inst.add_linear_leq(outdeg, Int(-1));  // visit q at least once
            }

            const int anchor = subset.front();
            const auto accept = [&](const IntVec& x) {
                std::vector<Int> mult(x.data(), x.data() + x.size());
                auto cycle = euler_path(ctx.a, mult, anchor, anchor);
                if (!cycle || cycle->empty()) return false;
                const PathSummary s = path_summary(ctx.a, ctx.f, *cycle);
                return s.gain.dot(s.vals) + rhs_shift <= 0;
            };
            const SolveVerdict verdict =
                solve(inst, ctx.budget.iqp_box, ctx.budget.iqp_nodes, accept);
            if (verdict.is_sat()) {
                std::vector<Int> mult(verdict.witness.data(),
                                      verdict.witness.data() + verdict.witness.size());
                auto cycle = euler_path(ctx.a, mult, anchor, anchor);
                if (!cycle) throw std::logic_error("cycle search: euler reconstruction failed");
                auto lasso = anchored_lasso(ctx, *cycle);
                if (lasso) return lasso;
            } else if (verdict.kind == SolveVerdict::Kind::Unknown) {
                any_unknown = true;
            }
        }
    }
    if (any_unknown) ctx.notes["cycle_search_budget_hit"] = "true";
    return std::nullopt;
}

// ---------------------------------------------------------------------
// Step 1 / finite-value analysis.
// ---------------------------------------------------------------------

struct CycleAnalysis {
    enum class State { Witness, NoCertified, Open };
    State state = State::Open;
    std::optional<Lasso> witness;
    std::string reason;
};

// strictly_negative: look for Gain.Vals < 0; otherwise <= 0.
CycleAnalysis analyze_cycles(Ctx& ctx, bool strictly_negative) {
    CycleAnalysis out;
    if (!ctx.any_cycle) {
        out.state = CycleAnalysis::State::NoCertified;
        out.reason = "no reachable cycle; no regular computation exists";
        return out;
    }
    // Fast witnesses among simple cycles.
    for (size_t i = 0; i < ctx.simple.cycles.size(); ++i) {
        const bool hit = strictly_negative ? ctx.sc_dot[i] < 0 : ctx.sc_dot[i] <= 0;
        if (!hit) continue;
        auto lasso = anchored_lasso(ctx, ctx.simple.cycles[i]);
        if (lasso) {
            out.state = CycleAnalysis::State::Witness;
            out.witness = std::move(lasso);
            return out;
        }
    }
    // Certification that no cycle (simple or mixed) qualifies.
    const bool gains_nonneg = all_updates_nonnegative(ctx) || all_simple_gains_nonnegative(ctx);
    if (gains_nonneg && ctx.simple.complete) {
        if (strictly_negative) {
            out.state = CycleAnalysis::State::NoCertified;
            out.reason = "all cycle gains are componentwise nonnegative, so every "
                         "Gain.Vals mixing term is nonnegative";
            return out;
        }
        bool all_diag_positive = true;
        for (const Int& d : ctx.sc_dot)
            if (d <= 0) all_diag_positive = false;
        if (all_diag_positive) {
            out.state = CycleAnalysis::State::NoCertified;
            out.reason = "nonnegative mixing matrix with positive diagonal: every cycle "
                         "has Gain.Vals > 0";
            return out;
        }
    }
    const MixReport mix = mixing_minimum(ctx);
    if (mix.has_value) {
        ctx.notes["mixing_min"] = rat_string(mix.min_value);
        ctx.notes["mixing_conclusive"] = bool_str(mix.conclusive);
    }
    if (mix.conclusive) {
        if (strictly_negative && mix.min_value >= 0) {
            out.state = CycleAnalysis::State::NoCertified;
            out.reason = "simple-cycle mixing form is copositive (exact support "
                         "enumeration); no cycle has Gain.Vals < 0";
            return out;
        }
        if (!strictly_negative && mix.min_value > 0) {
            out.state = CycleAnalysis::State::NoCertified;
            out.reason = "simple-cycle mixing form is strictly copositive (exact support "
                         "enumeration); every cycle has Gain.Vals > 0";
            return out;
        }
    }
    // Bounded mixed-cycle search for a witness.
    auto lasso = iqp_cycle_search(ctx, strictly_negative ? Int(1) : Int(0));
    if (lasso) {
        out.state = CycleAnalysis::State::Witness;
        out.witness = std::move(lasso);
        return out;
    }
    out.state = CycleAnalysis::State::Open;
    return out;
}

// ---------------------------------------------------------------------
// Template enumeration: permutations of distinct simple cycles joined by
// short connector paths, smallest totals first, within a global budget.
// ---------------------------------------------------------------------

void enumerate_templates(Ctx& ctx, const std::function<bool(const Template&)>& visit) {
    const int q_count = ctx.a.state_count();
    const int max_conn = std::max(0, q_count - 1);
    size_t produced = 0;
    bool stop = false;
    bool truncated = !ctx.simple.complete;

    const int p_cap = std::min<int>(ctx.budget.max_template_cycles,
                                    static_cast<int>(ctx.simple.cycles.size()));
    const size_t cycle_count = ctx.simple.cycles.size();

    // Rotations of each canonical simple cycle, keyed by start state.
    std::vector<std::vector<Path>> rotations(cycle_count);
    for (size_t i = 0; i < cycle_count; ++i) {
        std::vector<int> starts;
        for (int t : ctx.simple.cycles[i]) starts.push_back(ctx.a.transitions[t].source);
        std::sort(starts.begin(), starts.end());
        for (int s : starts) rotations[i].push_back(rotate_cycle(ctx.a, ctx.simple.cycles[i], s));
    }

    std::vector<int> chosen;           // canonical cycle indices, in order
    std::vector<Path> chosen_rot;      // rotation actually used
    std::vector<Path> connectors;      // between consecutive cycles

    std::function<void(int)> emit = [&](int p) {
        // template: (eps, beta_1, conn_1, ..., beta_p, conn_p-closing)
        Template tpl;
        tpl.connectors.push_back({});
        for (int i = 0; i < p; ++i) {
            tpl.cycles.push_back(chosen_rot[i]);
            tpl.connectors.push_back(connectors[i]);
        }
        validate_template(ctx.a, tpl);
        ++produced;
        if (!visit(tpl)) stop = true;
        if (produced >= ctx.budget.template_budget) {
            truncated = true;
            stop = true;
        }
    };

    std::function<void(int, int)> build = [&](int p, int position) {
        if (stop) return;
        if (position == p) {
            // closing connector: back to the start of beta_1, may be the
            // merge of two short pieces
            const int from = path_end(ctx.a, chosen_rot[p - 1]);
            const int to = path_start(ctx.a, chosen_rot[0]);
            bool cut = false;
            auto paths = short_paths(ctx.a, from, to, 2 * max_conn, ctx.mask,
                                     ctx.budget.connector_cap, &cut);
            if (cut) truncated = true;
            for (const Path& closing : paths) {
                connectors.push_back(closing);
                emit(p);
                connectors.pop_back();
                if (stop) return;
            }
            return;
        }
        for (size_t ci = 0; ci < cycle_count && !stop; ++ci) {
            if (std::find(chosen.begin(), chosen.end(), static_cast<int>(ci)) != chosen.end())
                continue;
            chosen.push_back(static_cast<int>(ci));
            for (const Path& rot : rotations[ci]) {
                if (stop) break;
                if (position == 0) {
                    chosen_rot.push_back(rot);
                    build(p, 1);
                    chosen_rot.pop_back();
                } else {
                    const int from = path_end(ctx.a, chosen_rot[position - 1]);
                    const int to = path_start(ctx.a, rot);
                    bool cut = false;
                    auto paths = short_paths(ctx.a, from, to, max_conn, ctx.mask,
                                             ctx.budget.connector_cap, &cut);
                    if (cut) truncated = true;
                    for (const Path& conn : paths) {
                        connectors.push_back(conn);
                        chosen_rot.push_back(rot);
                        build(p, position + 1);
                        chosen_rot.pop_back();
                        connectors.pop_back();
                        if (stop) break;
                    }
                }
            }
            chosen.pop_back();
        }
    };

    for (int p = 1; p <= p_cap && !stop; ++p) build(p, 0);
    ctx.notes["templates_enumerated"] = std::to_string(produced);
    ctx.notes["templates_truncated"] = bool_str(truncated || stop);
}

// ---------------------------------------------------------------------
// Step 2: negative-template search.
// ---------------------------------------------------------------------

std::optional<Answer> step2_negative_template(Ctx& ctx, const Rat& threshold) {
    if (all_simple_gains_nonnegative(ctx) || all_updates_nonnegative(ctx)) {
        ctx.notes["step2_skipped"] = "nonnegative gains exclude negative templates";
        return std::nullopt;
    }
    const Int lam_num = threshold.get_num();
    const Int lam_den = threshold.get_den();

    std::optional<Answer> found;
    enumerate_templates(ctx, [&](const Template& tpl) {
        const int p = tpl.cycle_count();
        const TemplateCoefficients coeffs = template_coefficients(ctx.a, ctx.f, tpl);
        bool any_negative_entry = false;
        for (int i = 0; i < p && !any_negative_entry; ++i)
            for (int j = 0; j < p; ++j)
                if (coeffs.B(i, j) < 0) any_negative_entry = true;
        if (!any_negative_entry) return true;

        const auto systems = balanced_linear_systems(ctx.a, ctx.f, tpl);
        for (const LinSystem& sp : systems) {
            IqpInstance inst;
            inst.variable_count = 2 * p;
            inst.domains.assign(2 * p, VarDomain::Nonnegative);
            QuadConstraint quad;
            quad.A = IntMat::Zero(2 * p, 2 * p);
            quad.A.topLeftCorner(p, p) = coeffs.B;
            quad.a = IntVec::Zero(2 * p);
            quad.d = 1;  // n1^T B n1 <= -1
            inst.quadratic.push_back(std::move(quad));
            for (Index r = 0; r < sp.lhs.rows(); ++r) {
                IntVec row_n2 = IntVec::Zero(2 * p);
                IntVec row_sum = IntVec::Zero(2 * p);
                for (int j = 0; j < p; ++j) {
                    row_n2(p + j) = sp.lhs(r, j);
                    row_sum(j) = sp.lhs(r, j);
                    row_sum(p + j) = sp.lhs(r, j);
                }
                inst.add_linear_eq(row_n2, sp.rhs(r));   // S_P(n2)
                inst.add_linear_eq(row_sum, sp.rhs(r));  // S_P(n1 + n2)
            }
            const SolveVerdict verdict = solve(inst, ctx.budget.iqp_box, ctx.budget.iqp_nodes);
            if (!verdict.is_sat()) {
                if (verdict.kind == SolveVerdict::Kind::Unknown)
                    ctx.notes["step2_budget_hit"] = "true";
                continue;
            }
            IntVec n1 = verdict.witness.head(p);
            IntVec n2 = verdict.witness.tail(p);

            // Scale up the negative direction until the exact value clears
            // the threshold, then certify the concrete lasso.
            const int start = template_start(ctx.a, tpl);
            auto prefix = shortest_path(ctx.a, ctx.a.initial_states, start, ctx.mask);
            if (!prefix) continue;
            const IntVec g = gain_of(ctx.a, *prefix);
            const IntVec v0 = vals_of(ctx.a, ctx.f, connector_cycle(tpl));
            IntVec cycle_vals(p), cycle_len(p);
            for (int i = 0; i < p; ++i) {
                cycle_vals(i) = 0;  // placeholder; per-cycle Vals handled below
                cycle_len(i) = static_cast<long>(tpl.cycles[i].size());
            }
            std::vector<IntVec> beta_vals;
            for (int i = 0; i < p; ++i) beta_vals.push_back(vals_of(ctx.a, ctx.f, tpl.cycles[i]));
            const long len0 = static_cast<long>(connector_cycle(tpl).size());

            for (Int t = 1;; t *= 2) {
                IntVec n = t * n1 + n2;
                Int length = len0;
                for (int i = 0; i < p; ++i) length += n(i) * cycle_len(i);
                if (length > ctx.budget.max_witness_length) {
                    ctx.notes["step2_witness_too_long"] = "true";
                    break;
                }
                // 2 Sum_g(Tpl(n)) = n^T B n + c.n + e + 2 g.Vals(Tpl(n))
                IntVec vals_total = v0;
                for (int i = 0; i < p; ++i) vals_total += n(i) * beta_vals[i];
                const Int two_sum =
                    quad_form(coeffs.B, n) + coeffs.c.dot(n) + coeffs.e + 2 * g.dot(vals_total);
                // Sum <= lambda * length  <=>  den*2Sum <= 2*num*length
                if (lam_den * two_sum <= 2 * lam_num * length) {
                    const Path cycle = instantiate(tpl, n);
                    if (cycle.empty()) break;
                    const PathSummary s = path_summary(ctx.a, ctx.f, cycle);
                    if (s.gain.dot(s.vals) != 0) break;  // S_P was not sound here
                    found = certified_yes(ctx, Lasso{*prefix, cycle}, ProblemKind::RegularAverage,
                                          threshold, "step2");
                    return false;
                }
            }
        }
        return true;
    });
    return found;
}

// ---------------------------------------------------------------------
// Step 3: the linear case, with the threshold folded into the constraint.
// ---------------------------------------------------------------------

std::optional<Answer> step3_linear_case(Ctx& ctx, const Rat& threshold) {
    const Int lam_num = threshold.get_num();
    const Int lam_den = threshold.get_den();
    const int m = ctx.a.transition_count();

    std::optional<Answer> found;
    enumerate_templates(ctx, [&](const Template& tpl) {
        const int p = tpl.cycle_count();
        const TemplateCoefficients coeffs = template_coefficients(ctx.a, ctx.f, tpl);
        const LinearData lin = linear_data(ctx.a, ctx.f, tpl);
        const int s = template_start(ctx.a, tpl);
        const Path closing = connector_cycle(tpl);
        const IntVec v0 = vals_of(ctx.a, ctx.f, closing);
        const long len0 = static_cast<long>(closing.size());
        std::vector<IntVec> beta_vals;
        for (int i = 0; i < p; ++i) beta_vals.push_back(vals_of(ctx.a, ctx.f, tpl.cycles[i]));

        for (int q0 : ctx.a.initial_states) {
            IqpInstance inst;
            inst.variable_count = m + p;
            inst.domains.assign(m + p, VarDomain::Nonnegative);

            QuadConstraint quad;
            quad.A = IntMat::Zero(m + p, m + p);
            for (int e = 0; e < m; ++e) {
                for (int i = 0; i < p; ++i) {
                    const Int entry = lam_den * ctx.a.transitions[e].update.dot(beta_vals[i]);
                    quad.A(e, m + i) = entry;
                    quad.A(m + i, e) = entry;
                }
            }
            quad.a = IntVec::Zero(m + p);
            for (int e = 0; e < m; ++e)
                quad.a(e) = 2 * lam_den * ctx.a.transitions[e].update.dot(v0);
            for (int i = 0; i < p; ++i)
                quad.a(m + i) = lam_den * (coeffs.c(i) + lin.d(i)) -
                                2 * lam_num * Int(static_cast<long>(tpl.cycles[i].size()));
            quad.d = lam_den * (coeffs.e + lin.h) - 2 * lam_num * Int(len0);
            inst.quadratic.push_back(std::move(quad));

            // Prefix flow: an Euler path from q0 to the template start.
            for (int e = 0; e < m; ++e) {
                if (ctx.mask[ctx.a.transitions[e].source] && ctx.mask[ctx.a.transitions[e].target])
                    continue;
                IntVec row = IntVec::Zero(m + p);
                row(e) = 1;
                inst.add_linear_eq(row, Int(0));
            }
            for (int q = 0; q < ctx.a.state_count(); ++q) {
                if (!ctx.mask[q]) continue;
                IntVec row = IntVec::Zero(m + p);
                for (int e = 0; e < m; ++e) {
                    if (ctx.a.transitions[e].source == q) row(e) += 1;
                    if (ctx.a.transitions[e].target == q) row(e) -= 1;
                }
                Int rhs = 0;
                if (q == q0) rhs += 1;
                if (q == s) rhs -= 1;
                inst.add_linear_eq(row, rhs);
            }

            const auto accept = [&](const IntVec& z) {
                std::vector<Int> mult(z.data(), z.data() + m);
                auto prefix = euler_path(ctx.a, mult, q0, s);
                if (!prefix) return false;
                IntVec n = z.tail(p);
                const Path cycle = instantiate(tpl, n);
                if (cycle.empty()) return false;
                if (static_cast<long>(cycle.size()) + static_cast<long>(prefix->size()) >
                    ctx.budget.max_witness_length)
                    return false;
                const PathSummary cs = path_summary(ctx.a, ctx.f, cycle);
                const Int d = cs.gain.dot(cs.vals);
                if (d > 0) return false;
                if (d < 0) return true;  // value -infinity
                const Int sum = sum_from(ctx.a, ctx.f, gain_of(ctx.a, *prefix), cycle);
                return lam_den * sum <= lam_num * Int(static_cast<long>(cycle.size()));
            };
            const SolveVerdict verdict =
                solve(inst, ctx.budget.iqp_box, ctx.budget.iqp_nodes, accept);
            if (verdict.is_sat()) {
                std::vector<Int> mult(verdict.witness.data(), verdict.witness.data() + m);
                auto prefix = euler_path(ctx.a, mult, q0, s);
                IntVec n = verdict.witness.tail(p);
                if (!prefix) throw std::logic_error("step3: euler reconstruction failed");
                found = certified_yes(ctx, Lasso{*prefix, instantiate(tpl, n)},
                                      ProblemKind::RegularAverage, threshold, "step3");
                return false;
            }
            if (verdict.kind == SolveVerdict::Kind::Unknown)
                ctx.notes["step3_budget_hit"] = "true";
        }
        return true;
    });
    return found;
}

// ---------------------------------------------------------------------
// Bounded enumeration fallback.
// ---------------------------------------------------------------------

std::optional<Answer> enumeration_fallback(Ctx& ctx, ProblemKind kind, const Rat& threshold) {
    const int m = ctx.a.transition_count();
    if (static_cast<size_t>(m) <= ctx.budget.sweep_transition_limit) {
        ctx.notes["sweep"] = "full cycle enumeration";
        if (kind == ProblemKind::RegularAverage) {
            const OracleReport report = oracle_regular_average(
                ctx.a, ctx.f, threshold, ctx.budget.sweep_prefix, ctx.budget.sweep_cycle);
            if (report.answer == OracleReport::Answer::Yes)
                return certified_yes(ctx, *report.witness, kind, threshold, "enumeration");
            return std::nullopt;
        }
        // Finite / neg-inf sweep: look at cycle characteristics only.
        std::optional<Lasso> witness;
        for_each_cycle(ctx.a, ctx.budget.sweep_cycle, 2000000, [&](const Path& cycle) {
            const PathSummary s = path_summary(ctx.a, ctx.f, cycle);
            const Int d = s.gain.dot(s.vals);
            const bool hit = kind == ProblemKind::RegularNegInf ? d < 0 : d <= 0;
            if (!hit) return true;
            auto lasso = anchored_lasso(ctx, cycle);
            if (!lasso) return true;
            witness = std::move(lasso);
            return false;
        });
        if (witness) return certified_yes(ctx, *witness, kind, threshold, "enumeration");
        return std::nullopt;
    }

    // Larger graphs: lasso scan over simple cycles with bounded prefixes.
    ctx.notes["sweep"] = "simple-cycle scan";
    Int max_update = 1;
    for (const Transition& t : ctx.a.transitions)
        for (Index i = 0; i < t.update.size(); ++i)
            max_update = std::max(max_update, Int(abs(t.update(i))));
    const PrefixGainSearch prefixes = search_prefix_gains(
        ctx.a, ctx.budget.sweep_prefix, Int(ctx.budget.sweep_prefix) * max_update, 50000);
    if (prefixes.truncated) ctx.notes["sweep_prefixes_truncated"] = "true";

    for (size_t i = 0; i < ctx.simple.cycles.size(); ++i) {
        const Int& d = ctx.sc_dot[i];
        if (kind == ProblemKind::RegularNegInf && d >= 0) continue;
        if (kind == ProblemKind::RegularFinite && d > 0) continue;
        if (kind == ProblemKind::RegularAverage && d > 0) continue;
        std::vector<int> starts;
        for (int t : ctx.simple.cycles[i]) starts.push_back(ctx.a.transitions[t].source);
        std::sort(starts.begin(), starts.end());
        starts.erase(std::unique(starts.begin(), starts.end()), starts.end());
        for (int u : starts) {
            const Path rotated = rotate_cycle(ctx.a, ctx.simple.cycles[i], u);
            for (int idx : prefixes.by_state[u]) {
                const PrefixGain& pg = prefixes.entries[idx];
                bool ok;
                if (kind != ProblemKind::RegularAverage) {
                    ok = true;  // characteristics already checked
                } else if (d < 0) {
                    ok = true;
                } else {
                    const Int sum = sum_from(ctx.a, ctx.f, pg.gain, rotated);
                    ok = Rat(sum) <= threshold * Rat(Int(static_cast<long>(rotated.size())));
                }
                if (ok) return certified_yes(ctx, Lasso{pg.path, rotated}, kind, threshold,
                                             "enumeration");
            }
        }
    }
    return std::nullopt;
}

}  // namespace

// -----------------------------------------------------------------------
// Public procedures.
// -----------------------------------------------------------------------

Answer regular_neg_inf_Z(const Query& query) {
    if (query.vass.domain != Domain::Integer)
        throw UnsupportedError("regular_neg_inf_Z: INTEGER domain only");
    Ctx ctx = make_ctx(query.vass, query.cost, query.budget);
    const Rat lambda(0);

    if (!ctx.any_cycle)
        return no_answer(ctx, "no reachable cycle; no regular computation exists", "step1");
    if (auto exact = config_exact(ctx, ProblemKind::RegularNegInf, lambda)) return *exact;

    CycleAnalysis analysis = analyze_cycles(ctx, true);
    switch (analysis.state) {
        case CycleAnalysis::State::Witness:
            return certified_yes(ctx, *analysis.witness, ProblemKind::RegularNegInf, lambda,
                                 "step1");
        case CycleAnalysis::State::NoCertified:
            return no_answer(ctx, analysis.reason, "step1");
        case CycleAnalysis::State::Open:
            break;
    }
    if (auto fallback = enumeration_fallback(ctx, ProblemKind::RegularNegInf, lambda))
        return *fallback;
    return unknown_answer(ctx, "no witness within bounds; mixing form not certified");
}

Answer regular_finite_value_Z(const Query& query) {
    if (query.vass.domain != Domain::Integer)
        throw UnsupportedError("regular_finite_value_Z: INTEGER domain only");
    Ctx ctx = make_ctx(query.vass, query.cost, query.budget);
    const Rat lambda(0);

    if (!ctx.any_cycle)
        return no_answer(ctx, "no reachable cycle; no regular computation exists", "step1");
    if (auto exact = config_exact(ctx, ProblemKind::RegularFinite, lambda)) return *exact;

    CycleAnalysis analysis = analyze_cycles(ctx, false);
    switch (analysis.state) {
        case CycleAnalysis::State::Witness:
            return certified_yes(ctx, *analysis.witness, ProblemKind::RegularFinite, lambda,
                                 "step1");
        case CycleAnalysis::State::NoCertified:
            return no_answer(ctx, analysis.reason, "step1");
        case CycleAnalysis::State::Open:
            break;
    }
    if (auto fallback = enumeration_fallback(ctx, ProblemKind::RegularFinite, lambda))
        return *fallback;
    return unknown_answer(ctx, "no balanced or negative cycle within bounds");
}

Answer regular_average_Z(const Query& query) {
    if (query.vass.domain != Domain::Integer)
        throw UnsupportedError("regular_average_Z: INTEGER domain only (the NATURAL-domain "
                               "average-value problem with general costs is undecidable)");
    Ctx ctx = make_ctx(query.vass, query.cost, query.budget);
    const Rat& lambda = query.threshold;

    if (!ctx.any_cycle)
        return no_answer(ctx, "no reachable cycle; no regular computation exists",
                         "enumeration");
    if (auto exact = config_exact(ctx, ProblemKind::RegularAverage, lambda)) return *exact;

    // Step 1: a cycle of negative characteristic settles every threshold.
    CycleAnalysis neg = analyze_cycles(ctx, true);
    if (neg.state == CycleAnalysis::State::Witness)
        return certified_yes(ctx, *neg.witness, ProblemKind::RegularAverage, lambda, "step1");

    // If even balanced cycles are impossible, the answer is NO for every
    // finite threshold.
    {
        CycleAnalysis finite = analyze_cycles(ctx, false);
        if (finite.state == CycleAnalysis::State::NoCertified && ctx.any_cycle)
            return no_answer(ctx,
                             "every cycle has Gain.Vals > 0 (" + finite.reason +
                                 "); all regular computations have value +infinity",
                             "step1");
        if (finite.state == CycleAnalysis::State::Witness && lambda >= Rat(0)) {
            // A balanced or negative cycle with Sum <= 0 may already settle
            // nonnegative thresholds; certify only if it really does.
            const LassoVerdict v = lasso_value(ctx.a, ctx.f, *finite.witness);
            if (value_matches(v.value, ProblemKind::RegularAverage, lambda))
                return certified_yes(ctx, *finite.witness, ProblemKind::RegularAverage, lambda,
                                     "step1");
        }
    }

    if (auto yes = step2_negative_template(ctx, lambda)) return *yes;
    if (auto yes = step3_linear_case(ctx, lambda)) return *yes;
    if (auto yes = enumeration_fallback(ctx, ProblemKind::RegularAverage, lambda)) return *yes;
    return unknown_answer(ctx,
                          "steps 1-3 and bounded enumeration found no witness; bounded "
                          "solvers cannot certify NO here");
}

Answer uniform_average_Z(const Vass& a, const IntVec& coefficients, const Rat& threshold,
                         const DecisionBudget& budget) {
    if (a.domain != Domain::Integer)
        throw UnsupportedError("uniform_average_Z: INTEGER domain only");
    if (coefficients.size() != a.dimension)
        throw MisuseError("uniform_average_Z: coefficient dimension mismatch");
    for (Index i = 0; i < coefficients.size(); ++i)
        if (coefficients(i) < 0) throw MisuseError("uniform_average_Z: negative coefficient");

    // One-counter reduction: the single counter tracks the running cost.
    Vass reduced = a;
    reduced.dimension = 1;
    for (int t = 0; t < reduced.transition_count(); ++t) {
        IntVec u(1);
        u(0) = coefficients.dot(a.transitions[t].update);
        reduced.transitions[t].update = std::move(u);
    }
    IntVec one(1);
    one(0) = 1;
    const CostFunction reduced_cost = uniform_cost(reduced, one);

    Query query{reduced, reduced_cost, ProblemKind::RegularAverage, threshold, budget};
    Answer answer = regular_average_Z(query);
    answer.budget["uniform_reduction"] = "one-counter";
    answer.budget["applies_to"] = "regular and general average-value";
    if (answer.yes() && answer.witness) {
        // The reduced system shares the transition indices, so the witness
        // re-verifies directly against the original model.
        const CostFunction original_cost = uniform_cost(a, coefficients);
        const LassoVerdict v = lasso_value(a, original_cost, *answer.witness);
        if (!v.value.leq(threshold))
            throw std::logic_error("uniform_average_Z: witness does not transfer");
        answer.certified_value = v.value;
    }
    return answer;
}

}  // namespace vass
