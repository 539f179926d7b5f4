#include "vassavg/reach.hpp"

#include <deque>
#include <map>

namespace vass {

ReachResult reachable(const ReachQuery& query) {
    const Vass& a = query.vass;
    if (a.domain != Domain::Natural) throw MisuseError("reachable: needs a NATURAL-domain VASS");
    if (query.budget < 1) throw MisuseError("reachable: budget must be >= 1");
    const auto nonnegative = [](const IntVec& v) {
        for (Index i = 0; i < v.size(); ++i)
            if (v(i) < 0) return false;
        return true;
    };
    if (query.source.counters.size() != a.dimension ||
        query.target.counters.size() != a.dimension)
        throw StructuralError("reachable: configuration dimension mismatch");
    if (!nonnegative(query.source.counters) || !nonnegative(query.target.counters))
        throw StructuralError("reachable: configurations must be nonnegative");

    ReachResult result;

    using Key = std::pair<int, std::vector<Int>>;
    const auto key_of = [](const Config& c) {
        return Key(c.state, std::vector<Int>(c.counters.data(), c.counters.data() + c.counters.size()));
    };
    // parent: (transition index, parent key)
    std::map<Key, std::pair<int, Key>> parent;
    std::deque<Config> frontier;

    parent.emplace(key_of(query.source), std::make_pair(-1, key_of(query.source)));
    frontier.push_back(query.source);

    std::optional<Key> hit;
    if (query.source == query.target) hit = key_of(query.source);

    while (!frontier.empty() && !hit) {
        const Config current = frontier.front();
        frontier.pop_front();
        ++result.explored;
        if (result.explored >= query.budget) {
            result.cap_hit = true;
            break;
        }
        for (int t = 0; t < a.transition_count(); ++t) {
            if (a.transitions[t].source != current.state) continue;
            Config next{a.transitions[t].target, current.counters + a.transitions[t].update};
            if (!nonnegative(next.counters)) continue;
            if (query.counter_cap) {
                bool over = false;
                for (Index i = 0; i < next.counters.size(); ++i)
                    if (next.counters(i) > *query.counter_cap) over = true;
                if (over) {
                    result.cap_hit = true;
                    continue;
                }
            }
            const Key key = key_of(next);
            if (parent.count(key)) continue;
            parent.emplace(key, std::make_pair(t, key_of(current)));
            if (next == query.target) {
                hit = key;
                break;
            }
            frontier.push_back(next);
        }
    }

    if (hit) {
        Path rev;
        Key at = *hit;
        while (true) {
            const auto& [edge, prev] = parent.at(at);
            if (edge < 0) break;
            rev.push_back(edge);
            at = prev;
        }
        std::reverse(rev.begin(), rev.end());
        // Re-validate before reporting.
        const SimulationResult sim = simulate(a, query.source, rev);
        if (sim.first_negative || !(sim.configs.back() == query.target))
            throw std::logic_error("reachable: path failed re-validation");
        result.kind = ReachResult::Kind::Reachable;
        result.path = std::move(rev);
    } else if (!result.cap_hit && frontier.empty()) {
        result.kind = ReachResult::Kind::NotReachable;
    } else {
        result.kind = ReachResult::Kind::Unknown;
    }
    return result;
}

}  // namespace vass
