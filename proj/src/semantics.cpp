#include "vassavg/semantics.hpp"

#include <algorithm>
#include <deque>
#include <functional>
#include <map>

namespace vass {

LassoVerdict lasso_value(const Vass& a, const CostFunction& f, const Lasso& lasso) {
    validate_lasso(a, lasso);
    if (a.domain == Domain::Natural && !is_natural_valid(a, lasso))
        throw ValidityError("lasso_value: lasso is not valid under the NATURAL domain");

    const PathSummary cycle = path_summary(a, f, lasso.cycle);
    const Int d = cycle.gain.dot(cycle.vals);
    LassoVerdict verdict;
    verdict.cycle_length = static_cast<long>(lasso.cycle.size());
    if (d < 0) {
        verdict.value = ExtendedValue::neg_infinity();
    } else if (d > 0) {
        verdict.value = ExtendedValue::pos_infinity();
    } else {
        const IntVec g = gain_of(a, lasso.prefix);
        verdict.per_iteration_sum = sum_from(a, f, g, lasso.cycle);
        verdict.value =
            ExtendedValue::of(make_rat(verdict.per_iteration_sum, Int(verdict.cycle_length)));
    }
    return verdict;
}

std::vector<Rat> numeric_prefix_averages(const Vass& a, const CostFunction& f,
                                         const Lasso& lasso, long horizon) {
    if (horizon < 1) throw MisuseError("numeric_prefix_averages: horizon must be >= 1");
    validate_lasso(a, lasso);

    std::vector<Rat> averages;
    averages.reserve(horizon);
    const int start =
        lasso.prefix.empty() ? path_start(a, lasso.cycle) : path_start(a, lasso.prefix);
    IntVec counters = IntVec::Zero(a.dimension);
    int state = start;
    size_t prefix_pos = 0;
    size_t cycle_pos = 0;
    Int total = 0;
    for (long i = 0; i < horizon; ++i) {
        total += counters.dot(f.labeling[state]);
        averages.push_back(make_rat(total, Int(i + 1)));
        int t;
        if (prefix_pos < lasso.prefix.size()) {
            t = lasso.prefix[prefix_pos++];
        } else {
            t = lasso.cycle[cycle_pos];
            cycle_pos = (cycle_pos + 1) % lasso.cycle.size();
        }
        counters += a.transitions[t].update;
        state = a.transitions[t].target;
    }
    return averages;
}

PrefixGainSearch search_prefix_gains(const Vass& a, int max_len, const Int& gain_box,
                                     size_t node_cap) {
    PrefixGainSearch result;
    result.by_state.resize(a.state_count());
    std::map<std::pair<int, std::vector<Int>>, bool> seen;

    struct Node {
        int state;
        IntVec gain;
        Path path;
        int depth;
    };
    std::deque<Node> queue;
    const auto key_of = [](int state, const IntVec& g) {
        std::vector<Int> k(g.data(), g.data() + g.size());
        return std::make_pair(state, std::move(k));
    };
    for (int q : a.initial_states) {
        IntVec zero = IntVec::Zero(a.dimension);
        auto key = key_of(q, zero);
        if (seen.emplace(key, true).second) {
            queue.push_back({q, zero, {}, 0});
        }
    }
    std::vector<std::vector<int>> out(a.state_count());
    for (int t = 0; t < a.transition_count(); ++t) out[a.transitions[t].source].push_back(t);

    while (!queue.empty()) {
        Node node = std::move(queue.front());
        queue.pop_front();
        const int idx = static_cast<int>(result.entries.size());
        result.by_state[node.state].push_back(idx);
        result.entries.push_back({node.state, node.gain, node.path, });
        if (node.depth == max_len) continue;
        if (result.entries.size() + queue.size() > node_cap) {
            result.truncated = true;
            continue;
        }
        for (int t : out[node.state]) {
            IntVec g = node.gain + a.transitions[t].update;
            bool in_box = true;
            for (Index i = 0; i < g.size(); ++i)
                if (g(i) > gain_box || g(i) < -gain_box) in_box = false;
            if (!in_box) {
                result.truncated = true;
                continue;
            }
            auto key = key_of(a.transitions[t].target, g);
            if (!seen.emplace(key, true).second) continue;
            Path p = node.path;
            p.push_back(t);
            queue.push_back({a.transitions[t].target, std::move(g), std::move(p),
                             node.depth + 1});
        }
    }
    return result;
}

bool for_each_cycle(const Vass& a, int max_len, size_t cap,
                    const std::function<bool(const Path&)>& visit) {
    size_t count = 0;
    bool ok = true;
    Path current;
    std::vector<std::vector<int>> out(a.state_count());
    for (int t = 0; t < a.transition_count(); ++t) out[a.transitions[t].source].push_back(t);

    // (length, lex) order: lengths ascending; within a length, DFS over
    // ascending transition indices is lexicographic.
    std::function<void(int, int, int)> exact = [&](int start, int q, int remaining) {
        for (int t : out[q]) {
            if (!ok) return;
            const int r = a.transitions[t].target;
            current.push_back(t);
            if (remaining == 1) {
                if (r == start) {
                    if (++count > cap) {
                        ok = false;
                    } else if (!visit(current)) {
                        ok = false;
                    }
                }
            } else {
                exact(start, r, remaining - 1);
            }
            current.pop_back();
        }
    };
    for (int len = 1; len <= max_len && ok; ++len)
        for (int start = 0; start < a.state_count() && ok; ++start)
            exact(start, start, len);
    return ok;
}

OracleReport oracle_regular_average(const Vass& a, const CostFunction& f,
                                    const Rat& threshold, int max_prefix,
                                    int max_cycle) {
    if (max_prefix < 0 || max_cycle < 0)
        throw MisuseError("oracle_regular_average: bounds must be >= 0");
    OracleReport report;
    report.max_prefix = max_prefix;
    report.max_cycle = max_cycle;

    Int max_update = 1;
    for (const Transition& t : a.transitions)
        for (Index i = 0; i < t.update.size(); ++i)
            max_update = std::max(max_update, Int(abs(t.update(i))));
    const Int gain_box = Int(max_prefix) * max_update;
    const PrefixGainSearch prefixes =
        search_prefix_gains(a, max_prefix, gain_box, 200000);

    std::optional<Lasso> found;
    for_each_cycle(a, max_cycle, 2'000'000, [&](const Path& cycle) {
        const int start = path_start(a, cycle);
        if (prefixes.by_state[start].empty()) return true;
        const PathSummary s = path_summary(a, f, cycle);
        const Int d = s.gain.dot(s.vals);
        if (d > 0) return true;
        const Int len(static_cast<long>(cycle.size()));
        for (int idx : prefixes.by_state[start]) {
            const PrefixGain& pg = prefixes.entries[idx];
            bool good = false;
            if (d < 0) {
                good = true;  // value is -infinity
            } else {
                const Int sum = sum_from(a, f, pg.gain, cycle);
                good = Rat(sum) <= threshold * Rat(len);
            }
            if (good) {
                found = Lasso{pg.path, cycle};
                return false;
            }
        }
        return true;
    });

    if (found) {
        // Re-check the witness before reporting.
        const LassoVerdict v = lasso_value(a, f, *found);
        if (!v.value.leq(threshold))
            throw std::logic_error("oracle: witness failed re-verification");
        report.answer = OracleReport::Answer::Yes;
        report.witness = std::move(found);
    }
    return report;
}

}  // namespace vass
