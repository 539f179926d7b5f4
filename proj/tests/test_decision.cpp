#include "vassavg/decision.hpp"
#include "vassavg/generators.hpp"
#include "vassavg/semantics.hpp"

#include <doctest.h>

#include <random>

using namespace vass;

namespace {

IntVec ivec(std::initializer_list<long> values) {
    IntVec v(static_cast<Index>(values.size()));
    Index i = 0;
    for (long x : values) v(i++) = Int(x);
    return v;
}

Vass one_state(std::vector<std::vector<long>> loops, Domain domain = Domain::Integer) {
    Vass a;
    a.dimension = static_cast<Index>(loops.front().size());
    a.domain = domain;
    a.state_names = {"q"};
    a.initial_states = {0};
    int i = 0;
    for (const auto& up : loops) {
        IntVec u(a.dimension);
        for (Index d = 0; d < a.dimension; ++d) u(d) = Int(up[d]);
        a.transitions.push_back({0, 0, std::move(u)});
        a.transition_names.push_back("t" + std::to_string(i++));
    }
    return a;
}

Query make_query(Vass a, CostFunction f, ProblemKind kind, Rat threshold = Rat(0)) {
    Query q;
    q.vass = std::move(a);
    q.cost = std::move(f);
    q.kind = kind;
    q.threshold = std::move(threshold);
    return q;
}

void check_witness(const Query& q, const Answer& answer) {
    REQUIRE(answer.yes());
    REQUIRE(answer.witness.has_value());
    const LassoVerdict v = lasso_value(q.vass, q.cost, *answer.witness);
    switch (q.kind) {
        case ProblemKind::RegularNegInf:
            CHECK(v.value.kind == ExtendedValue::Kind::NegInfinity);
            break;
        case ProblemKind::RegularFinite:
            CHECK(v.value.kind != ExtendedValue::Kind::PosInfinity);
            break;
        case ProblemKind::RegularAverage:
            CHECK(v.value.leq(q.threshold));
            break;
    }
}

}  // namespace

TEST_CASE("neg-inf: worked example answers NO") {
    const auto [a, f] = running_example();
    const Answer answer = regular_neg_inf_Z(make_query(a, f, ProblemKind::RegularNegInf));
    CHECK(answer.no());
    CHECK(!answer.reason.empty());
}

TEST_CASE("neg-inf: single negative loop answers YES") {
    const Vass a = one_state({{-1}});
    const CostFunction f = uniform_cost(a, ivec({1}));
    const Query q = make_query(a, f, ProblemKind::RegularNegInf);
    const Answer answer = regular_neg_inf_Z(q);
    check_witness(q, answer);
    CHECK(answer.witness->cycle == Path{0});
}

TEST_CASE("neg-inf: mixing two loops still yields a witness") {
    const Vass a = one_state({{1}, {-1}});
    const CostFunction f = uniform_cost(a, ivec({1}));
    const Query q = make_query(a, f, ProblemKind::RegularNegInf);
    check_witness(q, regular_neg_inf_Z(q));
}

TEST_CASE("neg-inf rejects the NATURAL domain") {
    Vass a = one_state({{1}});
    a.domain = Domain::Natural;
    const CostFunction f = uniform_cost(a, ivec({1}));
    CHECK_THROWS_AS(regular_neg_inf_Z(make_query(a, f, ProblemKind::RegularNegInf)),
                    UnsupportedError);
}

TEST_CASE("finite value: worked example answers YES with the balanced cycle") {
    const auto [a, f] = running_example();
    const Query q = make_query(a, f, ProblemKind::RegularFinite);
    const Answer answer = regular_finite_value_Z(q);
    check_witness(q, answer);
}

TEST_CASE("finite value: growing loop answers NO, mixed loops YES") {
    const Vass up = one_state({{1}});
    const CostFunction fu = uniform_cost(up, ivec({1}));
    CHECK(regular_finite_value_Z(make_query(up, fu, ProblemKind::RegularFinite)).no());

    const Vass both = one_state({{1}, {-1}});
    const CostFunction fb = uniform_cost(both, ivec({1}));
    const Query q = make_query(both, fb, ProblemKind::RegularFinite);
    check_witness(q, regular_finite_value_Z(q));
}

TEST_CASE("average: worked example is YES at every threshold") {
    const auto [a, f] = running_example();
    for (const char* text : {"3/2", "0", "-5", "-100"}) {
        const Rat lambda = *parse_rat(text);
        const Query q = make_query(a, f, ProblemKind::RegularAverage, lambda);
        const Answer answer = regular_average_Z(q);
        INFO("threshold ", text);
        check_witness(q, answer);
    }
}

TEST_CASE("average: zero loop answers NO below zero") {
    const Vass a = one_state({{0}});
    const CostFunction f = uniform_cost(a, ivec({1}));
    const Answer answer =
        regular_average_Z(make_query(a, f, ProblemKind::RegularAverage, Rat(-1)));
    CHECK(answer.no());
    CHECK(!answer.reason.empty());

    // and YES at zero
    const Query q0 = make_query(a, f, ProblemKind::RegularAverage, Rat(0));
    check_witness(q0, regular_average_Z(q0));
}

TEST_CASE("average: threshold monotonicity on random instances") {
    std::mt19937_64 rng(71);
    int yes_seen = 0;
    for (int round = 0; round < 25; ++round) {
        RandomModelParams params;
        params.states = 3;
        params.transitions = 5;
        params.dimension = 2;
        params.seed = rng();
        const auto [a, f] = random_vass(params);
        const Rat thresholds[3] = {Rat(-1), Rat(0), Rat(1)};
        Answer answers[3];
        for (int i = 0; i < 3; ++i)
            answers[i] = regular_average_Z(
                make_query(a, f, ProblemKind::RegularAverage, thresholds[i]));
        for (int i = 0; i + 1 < 3; ++i) {
            if (answers[i].yes()) {
                CHECK(answers[i + 1].yes());
            }
            if (answers[i + 1].no()) {
                CHECK(!answers[i].yes());
            }
        }
        if (answers[0].yes()) ++yes_seen;
        for (int i = 0; i < 3; ++i) {
            if (answers[i].yes()) {
                const LassoVerdict v = lasso_value(a, f, *answers[i].witness);
                CHECK(v.value.leq(thresholds[i]));
            }
        }
    }
    CHECK(yes_seen > 0);
}

TEST_CASE("uniform over Z: the loop examples") {
    const Vass down = one_state({{-1}});
    const Answer yes = uniform_average_Z(down, ivec({1}), Rat(5));
    CHECK(yes.yes());

    const Vass up = one_state({{1}});
    const Answer no = uniform_average_Z(up, ivec({1}), Rat(1000));
    CHECK(no.no());

    const Vass both = one_state({{1}, {-1}});
    const Answer zero = uniform_average_Z(both, ivec({1}), Rat(0));
    CHECK(zero.yes());
}

TEST_CASE("uniform over N: the loop examples") {
    const Vass still = one_state({{0}}, Domain::Natural);
    CHECK(uniform_average_N(still, ivec({1}), Rat(0)).yes());

    const Vass both = one_state({{1}, {-1}}, Domain::Natural);
    const Answer half = uniform_average_N(both, ivec({1}), make_rat(Int(1), Int(2)));
    CHECK(half.yes());
    const Answer quarter = uniform_average_N(both, ivec({1}), make_rat(Int(1), Int(4)));
    CHECK(quarter.no());

    // zero coefficients are outside the decidable fragment
    CHECK_THROWS_AS(uniform_average_N(both, ivec({0}), Rat(0)), UnsupportedError);
}

TEST_CASE("reachability-to-average transformation structure") {
    const Vass a = one_state({{1}}, Domain::Natural);
    const Config zero{0, ivec({0})};
    const ReachToAverage out = reachability_to_average_N(a, zero, zero);
    CHECK(out.vass.state_count() == 3);  // q, qS, qF
    CHECK(out.vass.dimension == 2);
    CHECK(out.threshold == Rat(0));
    // exactly two self-loops at qF: identity and decrement of the fresh counter
    int idle = 0, dec = 0;
    for (const Transition& t : out.vass.transitions) {
        if (t.source == out.sink_state && t.target == out.sink_state) {
            if (t.update == IntVec::Zero(2)) ++idle;
            IntVec d = IntVec::Zero(2);
            d(1) = -1;
            if (t.update == d) ++dec;
        }
    }
    CHECK(idle == 1);
    CHECK(dec == 1);

    // target == source: transformed instance answers YES
    const Answer answer = uniform_average_N(out.vass, ivec({1, 1}), Rat(0));
    CHECK(answer.yes());
}

TEST_CASE("finite value over N: the loop examples") {
    const Vass still = one_state({{0}}, Domain::Natural);
    const CostFunction fs = uniform_cost(still, ivec({1}));
    const Query qs = make_query(still, fs, ProblemKind::RegularFinite);
    const Answer yes = regular_finite_value_N(qs);
    REQUIRE(yes.yes());
    CHECK(is_natural_valid(still, *yes.witness));

    const Vass up = one_state({{1}}, Domain::Natural);
    const CostFunction fu = uniform_cost(up, ivec({1}));
    const Answer unknown = regular_finite_value_N(make_query(up, fu, ProblemKind::RegularFinite));
    CHECK(unknown.unknown());

    const Vass both = one_state({{1}, {-1}}, Domain::Natural);
    const CostFunction fb = uniform_cost(both, ivec({1}));
    const Answer mixed = regular_finite_value_N(make_query(both, fb, ProblemKind::RegularFinite));
    REQUIRE(mixed.yes());
    CHECK(is_natural_valid(both, *mixed.witness));
    const LassoVerdict v = lasso_value(both, fb, *mixed.witness);
    CHECK(v.value.is_finite());

    CHECK_THROWS_AS(regular_finite_value_N(make_query(one_state({{1}}), fu,
                                                       ProblemKind::RegularFinite)),
                    MisuseError);
}

TEST_CASE("oracle agreement on random integer instances") {
    std::mt19937_64 rng(73);
    int oracle_yes = 0;
    for (int round = 0; round < 60; ++round) {
        RandomModelParams params;
        params.states = 2 + static_cast<int>(rng() % 3);
        params.transitions = params.states + static_cast<int>(rng() % 3);
        params.dimension = 1 + static_cast<int>(rng() % 3);
        params.seed = rng();
        const auto [a, f] = random_vass(params);
        for (const long lt : {0L, -1L}) {
            const Rat lambda(lt);
            const OracleReport oracle = oracle_regular_average(a, f, lambda, 8, 8);
            const Answer pipeline =
                regular_average_Z(make_query(a, f, ProblemKind::RegularAverage, lambda));
            if (oracle.answer == OracleReport::Answer::Yes) {
                ++oracle_yes;
                CHECK(pipeline.yes());
            }
            if (pipeline.yes()) {
                const LassoVerdict v = lasso_value(a, f, *pipeline.witness);
                CHECK(v.value.leq(lambda));
            }
            if (pipeline.no()) CHECK(oracle.answer != OracleReport::Answer::Yes);
        }
    }
    CHECK(oracle_yes > 10);
}

TEST_CASE("3-SAT instances decide satisfiability") {
    // satisfiable singleton
    CnfFormula sat;
    sat.variable_count = 1;
    sat.clauses = {{1, 1, 1}};
    const ThreeSatInstance si = threesat_to_vass(sat);
    const Query fq = make_query(si.vass, si.cost, ProblemKind::RegularFinite);
    CHECK(regular_finite_value_Z(fq).yes());
    const Query aq = make_query(si.vass, si.cost, ProblemKind::RegularAverage, Rat(0));
    const Answer at_zero = regular_average_Z(aq);
    check_witness(aq, at_zero);

    // contradiction
    CnfFormula unsat;
    unsat.variable_count = 1;
    unsat.clauses = {{1, 1, 1}, {-1, -1, -1}};
    const ThreeSatInstance ui = threesat_to_vass(unsat);
    const Answer no =
        regular_finite_value_Z(make_query(ui.vass, ui.cost, ProblemKind::RegularFinite));
    CHECK(no.no());
}

TEST_CASE("answers carry budget notes and steps") {
    const auto [a, f] = running_example();
    const Answer answer =
        regular_average_Z(make_query(a, f, ProblemKind::RegularAverage, Rat(0)));
    CHECK(!answer.step.empty());
    CHECK(answer.budget.count("simple_cycles"));
}
