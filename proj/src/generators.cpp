#include "vassavg/generators.hpp"

#include "vassavg/graph.hpp"

#include <algorithm>
#include <random>
#include <sstream>

namespace vass {

void validate_cnf(const CnfFormula& formula) {
    if (formula.variable_count < 1) throw MisuseError("cnf: needs at least one variable");
    if (formula.clauses.empty()) throw MisuseError("cnf: empty clause list");
    for (const auto& clause : formula.clauses) {
        for (int lit : clause) {
            if (lit == 0 || std::abs(lit) > formula.variable_count)
                throw MisuseError("cnf: literal out of range");
        }
    }
}

bool brute_force_satisfiable(const CnfFormula& formula) {
    validate_cnf(formula);
    const int n = formula.variable_count;
    for (std::uint64_t mask = 0; mask < (std::uint64_t(1) << n); ++mask) {
        bool all = true;
        for (const auto& clause : formula.clauses) {
            bool sat = false;
            for (int lit : clause) {
                const int v = std::abs(lit) - 1;
                const bool val = (mask >> v) & 1;
                if ((lit > 0) == val) {
                    sat = true;
                    break;
                }
            }
            if (!sat) {
                all = false;
                break;
            }
        }
        if (all) return true;
    }
    return false;
}

CnfFormula parse_dimacs(const std::string& text) {
    CnfFormula formula;
    std::istringstream in(text);
    std::string line;
    bool have_header = false;
    std::vector<int> pending;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == 'c') continue;
        std::istringstream ls(line);
        if (!have_header) {
            std::string p, fmt;
            int vars = 0, clauses = 0;
            if (!(ls >> p >> fmt >> vars >> clauses) || p != "p" || fmt != "cnf")
                throw MisuseError("dimacs: expected 'p cnf <vars> <clauses>' header");
            formula.variable_count = vars;
            have_header = true;
            continue;
        }
        int lit;
        while (ls >> lit) {
            if (lit == 0) {
                if (pending.empty()) throw MisuseError("dimacs: empty clause");
                if (pending.size() > 3) throw MisuseError("dimacs: clause wider than 3");
                while (pending.size() < 3) pending.push_back(pending.back());
                formula.clauses.push_back({pending[0], pending[1], pending[2]});
                pending.clear();
            } else {
                pending.push_back(lit);
            }
        }
    }
    if (!have_header) throw MisuseError("dimacs: missing header");
    if (!pending.empty()) throw MisuseError("dimacs: clause not terminated by 0");
    validate_cnf(formula);
    return formula;
}

std::string to_dimacs(const CnfFormula& formula) {
    std::ostringstream out;
    out << "p cnf " << formula.variable_count << " " << formula.clauses.size() << "\n";
    for (const auto& clause : formula.clauses)
        out << clause[0] << " " << clause[1] << " " << clause[2] << " 0\n";
    return out.str();
}

std::pair<Vass, CostFunction> running_example() {
    Vass a;
    a.dimension = 2;
    a.domain = Domain::Integer;
    a.state_names = {"A", "B", "C"};
    a.initial_states = {1};
    const auto vec2 = [](long x, long y) {
        IntVec v(2);
        v << Int(x), Int(y);
        return v;
    };
    a.transitions = {
        {1, 0, vec2(1, 0)},    // e1: B -> A
        {0, 1, vec2(0, -1)},   // e2: A -> B
        {1, 2, vec2(0, 3)},    // e3: B -> C
        {2, 1, vec2(-2, 0)},   // e4: C -> B
    };
    a.transition_names = {"e1", "e2", "e3", "e4"};
    CostFunction f;
    f.labeling = {vec2(4, 0), vec2(1, 1), vec2(0, 1)};
    validate_vass(a);
    validate_cost(a, f);
    return {a, f};
}

ThreeSatInstance threesat_to_vass(const CnfFormula& formula) {
    validate_cnf(formula);
    const int n = formula.variable_count;
    const int l = static_cast<int>(formula.clauses.size());
    const Index dim = 2 * n;

    ThreeSatInstance inst;
    Vass& a = inst.vass;
    a.dimension = dim;
    a.domain = Domain::Integer;

    // States: q_0 .. q_n, then 3 per clause layer, then the closing sink.
    for (int i = 0; i <= n; ++i) a.state_names.push_back("q" + std::to_string(i));
    for (int j = 1; j <= l; ++j)
        for (int i = 1; i <= 3; ++i)
            a.state_names.push_back("q" + std::to_string(j) + "_" + std::to_string(i));
    a.state_names.push_back("qf");
    const auto layer_state = [&](int j, int i) { return (n + 1) + 3 * (j - 1) + (i - 1); };
    const int final_state = (n + 1) + 3 * l;
    a.initial_states = {0};

    const auto unit = [&](Index c) {
        IntVec v = IntVec::Zero(dim);
        v(c) = 1;
        return v;
    };
    const auto zero = [&]() { return IntVec::Zero(dim); };
    int edge = 0;
    const auto add = [&](int src, int dst, IntVec update) {
        a.transitions.push_back({src, dst, std::move(update)});
        a.transition_names.push_back("t" + std::to_string(edge++));
    };

    // Part I: from q_{i-1} to q_i, incrementing counter i or i+n.
    for (int i = 1; i <= n; ++i) {
        add(i - 1, i, unit(i - 1));
        add(i - 1, i, unit(n + i - 1));
    }
    // Entry into the first layer.
    for (int i = 1; i <= 3; ++i) add(n, layer_state(1, i), zero());
    // Between layers.
    for (int j = 1; j < l; ++j)
        for (int i = 1; i <= 3; ++i)
            for (int i2 = 1; i2 <= 3; ++i2) add(layer_state(j, i), layer_state(j + 1, i2), zero());
    // Last layer to the sink, and the closing back edge.
    for (int i = 1; i <= 3; ++i) add(layer_state(l, i), final_state, zero());
    add(final_state, 0, zero());

    // Labels: zero everywhere except the layer states, which charge the
    // counter of the complementary literal.
    CostFunction& f = inst.cost;
    f.labeling.assign(a.state_names.size(), zero());
    for (int j = 1; j <= l; ++j) {
        for (int i = 1; i <= 3; ++i) {
            const int lit = formula.clauses[j - 1][i - 1];
            const int v = std::abs(lit);
            const Index counter = lit > 0 ? Index(n + v - 1) : Index(v - 1);
            f.labeling[layer_state(j, i)] = unit(counter);
        }
    }

    inst.threshold = Rat(0);
    validate_vass(a);
    validate_cost(a, f);
    return inst;
}

std::pair<Vass, CostFunction> random_vass(const RandomModelParams& params) {
    if (params.states < 1 || params.transitions < 1 || params.dimension < 1 ||
        params.update_range < 0 || params.coefficient_range < 0)
        throw MisuseError("random_vass: parameters must be positive");

    std::mt19937_64 rng(params.seed);
    std::uniform_int_distribution<int> state_dist(0, params.states - 1);
    std::uniform_int_distribution<long> update_dist(-params.update_range,
                                                    params.update_range);
    std::uniform_int_distribution<long> coeff_dist(0, params.coefficient_range);

    for (int attempt = 0; attempt < 10000; ++attempt) {
        Vass a;
        a.dimension = params.dimension;
        a.domain = Domain::Integer;
        for (int q = 0; q < params.states; ++q) a.state_names.push_back("s" + std::to_string(q));
        a.initial_states = {0};
        for (int t = 0; t < params.transitions; ++t) {
            IntVec update(params.dimension);
            for (Index i = 0; i < update.size(); ++i) update(i) = Int(update_dist(rng));
            a.transitions.push_back({state_dist(rng), state_dist(rng), std::move(update)});
            a.transition_names.push_back("t" + std::to_string(t));
        }
        const std::vector<bool> reach = reachable_states(a);
        if (!std::all_of(reach.begin(), reach.end(), [](bool b) { return b; })) continue;

        CostFunction f;
        for (int q = 0; q < params.states; ++q) {
            IntVec label(params.dimension);
            for (Index i = 0; i < label.size(); ++i) label(i) = Int(coeff_dist(rng));
            f.labeling.push_back(std::move(label));
        }
        validate_vass(a);
        validate_cost(a, f);
        return {a, f};
    }
    throw MisuseError("random_vass: could not generate a fully reachable model");
}

}  // namespace vass
