#include "vassavg/generators.hpp"
#include "vassavg/semantics.hpp"

#include <doctest.h>

#include <random>

using namespace vass;

namespace {

IntVec vec2(long x, long y) {
    IntVec v(2);
    v << Int(x), Int(y);
    return v;
}

Vass single_state_loop(long update, long coefficient, CostFunction* cost) {
    Vass a;
    a.dimension = 1;
    a.domain = Domain::Integer;
    a.state_names = {"q"};
    a.initial_states = {0};
    IntVec u(1);
    u << Int(update);
    a.transitions = {{0, 0, u}};
    a.transition_names = {"t"};
    IntVec l(1);
    l << Int(coefficient);
    cost->labeling = {l};
    return a;
}

}  // namespace

TEST_CASE("lasso value of the worked example is 3/2") {
    const auto [a, f] = running_example();
    const LassoVerdict v = lasso_value(a, f, Lasso{{}, {0, 1, 2, 3}});
    CHECK(v.value == ExtendedValue::of(make_rat(Int(3), Int(2))));
    CHECK(v.per_iteration_sum == 6);
    CHECK(v.cycle_length == 4);
}

TEST_CASE("one-transition negative loop evaluates to -infinity") {
    CostFunction f;
    const Vass a = single_state_loop(-1, 1, &f);
    const LassoVerdict v = lasso_value(a, f, Lasso{{}, {0}});
    CHECK(v.value == ExtendedValue::neg_infinity());
}

TEST_CASE("prefix (e3 e4)^j shifts the value to (6-3j)/4") {
    const auto [a, f] = running_example();
    const Path pump{2, 3};
    for (long j = 0; j <= 3; ++j) {
        Lasso lasso{repeat(pump, j), {0, 1, 2, 3}};
        const LassoVerdict v = lasso_value(a, f, lasso);
        CHECK(v.value == ExtendedValue::of(make_rat(Int(6 - 3 * j), Int(4))));
    }
}

TEST_CASE("numeric prefix averages converge to the block value") {
    const auto [a, f] = running_example();
    const Lasso lasso{{}, {0, 1, 2, 3}};
    const long N = 100;
    const auto averages = numeric_prefix_averages(a, f, lasso, 4 * N);
    const Rat target = make_rat(Int(3), Int(2));
    const Rat deviation = averages.back() - target;
    CHECK(abs(deviation.get_num()) * 100 <= 25 * deviation.get_den());

    // constant-zero cost: all averages zero
    CostFunction zero;
    zero.labeling = {IntVec::Zero(2), IntVec::Zero(2), IntVec::Zero(2)};
    for (const Rat& r : numeric_prefix_averages(a, zero, lasso, 10)) CHECK(r == 0);

    // +1 loop with coefficient 1: strictly increasing averages
    CostFunction fl;
    const Vass loop = single_state_loop(1, 1, &fl);
    const auto rising = numeric_prefix_averages(loop, fl, Lasso{{}, {0}}, 12);
    for (size_t i = 1; i < rising.size(); ++i) CHECK(rising[i] > rising[i - 1]);
}

TEST_CASE("trichotomy matches the sign of Gain.Vals on small lassos") {
    std::mt19937_64 rng(11);
    int checked = 0;
    for (int round = 0; round < 40; ++round) {
        RandomModelParams params;
        params.states = 3;
        params.transitions = 5;
        params.dimension = 2;
        params.seed = rng();
        const auto [a, f] = random_vass(params);
        for_each_cycle(a, 4, 200, [&, a = a, f = f](const Path& cycle) {
            const PathSummary s = path_summary(a, f, cycle);
            const Int d = s.gain.dot(s.vals);
            // anchor at the cycle start if it is initial; otherwise skip
            if (path_start(a, cycle) != a.initial_states[0]) return true;
            const LassoVerdict v = lasso_value(a, f, Lasso{{}, cycle});
            if (d < 0) CHECK(v.value.kind == ExtendedValue::Kind::NegInfinity);
            if (d > 0) CHECK(v.value.kind == ExtendedValue::Kind::PosInfinity);
            if (d == 0) CHECK(v.value.is_finite());
            ++checked;
            return true;
        });
    }
    CHECK(checked > 50);
}

TEST_CASE("rotation preserves the value for zero-gain cycles") {
    // For cycles with Gain = 0 the aligned value is rotation-invariant;
    // with nonzero gain it is not (the worked example rotates 3/2 to 3/4),
    // so the property is asserted on zero-gain cycles only.
    std::mt19937_64 rng(13);
    int checked = 0;
    for (int round = 0; round < 60 && checked < 25; ++round) {
        RandomModelParams params;
        params.states = 3;
        params.transitions = 6;
        params.dimension = 2;
        params.seed = rng();
        const auto [a, f] = random_vass(params);
        for_each_cycle(a, 5, 500, [&, a = a, f = f](const Path& cycle) {
            const PathSummary s = path_summary(a, f, cycle);
            if (s.gain != IntVec::Zero(a.dimension)) return true;
            if (path_start(a, cycle) != a.initial_states[0]) return true;
            const LassoVerdict base = lasso_value(a, f, Lasso{{}, cycle});
            for (size_t r = 1; r < cycle.size(); ++r) {
                Path sigma(cycle.begin(), cycle.begin() + r);
                Path rotated(cycle.begin() + r, cycle.end());
                rotated.insert(rotated.end(), cycle.begin(), cycle.begin() + r);
                const LassoVerdict rot = lasso_value(a, f, Lasso{sigma, rotated});
                CHECK(rot.value == base.value);
            }
            ++checked;
            return true;
        });
    }
    CHECK(checked >= 10);
}

TEST_CASE("worked-example rotation shifts the aligned value as predicted") {
    // Documented counterexample to unrestricted rotation invariance: the
    // aligned value changes by Gain(cycle).Vals(sigma) / |cycle|.
    const auto [a, f] = running_example();
    const LassoVerdict v0 = lasso_value(a, f, Lasso{{}, {0, 1, 2, 3}});
    const LassoVerdict v2 = lasso_value(a, f, Lasso{{0, 1}, {2, 3, 0, 1}});
    CHECK(v0.value == ExtendedValue::of(make_rat(Int(3), Int(2))));
    CHECK(v2.value == ExtendedValue::of(make_rat(Int(3), Int(4))));
}

TEST_CASE("oracle finds the worked-example witnesses") {
    const auto [a, f] = running_example();

    const OracleReport at_val = oracle_regular_average(a, f, make_rat(Int(3), Int(2)), 0, 4);
    REQUIRE(at_val.answer == OracleReport::Answer::Yes);
    CHECK(at_val.witness->cycle == Path{0, 1, 2, 3});

    // threshold -3/2 with prefix budget 8: j = 4 gives (6-12)/4 = -3/2
    const OracleReport pumped = oracle_regular_average(a, f, make_rat(Int(-3), Int(2)), 8, 4);
    REQUIRE(pumped.answer == OracleReport::Answer::Yes);
    const LassoVerdict v = lasso_value(a, f, *pumped.witness);
    CHECK(v.value.leq(make_rat(Int(-3), Int(2))));

    // j = 6 gives exactly -3 and needs prefix length 12
    const OracleReport deep = oracle_regular_average(a, f, Rat(-3), 12, 4);
    REQUIRE(deep.answer == OracleReport::Answer::Yes);
    CHECK(lasso_value(a, f, *deep.witness).value.leq(Rat(-3)));

    CostFunction fl;
    const Vass loop = single_state_loop(1, 1, &fl);
    const OracleReport none = oracle_regular_average(loop, fl, Rat(1000), 4, 4);
    CHECK(none.answer == OracleReport::Answer::Unknown);
}

TEST_CASE("oracle witnesses always re-verify") {
    std::mt19937_64 rng(17);
    for (int round = 0; round < 30; ++round) {
        RandomModelParams params;
        params.states = 3;
        params.transitions = 5;
        params.dimension = 2;
        params.seed = rng();
        const auto [a, f] = random_vass(params);
        const Rat threshold(static_cast<long>(rng() % 5) - 2);
        const OracleReport report = oracle_regular_average(a, f, threshold, 4, 4);
        if (report.answer == OracleReport::Answer::Yes) {
            const LassoVerdict v = lasso_value(a, f, *report.witness);
            CHECK(v.value.leq(threshold));
        }
    }
}

TEST_CASE("natural-domain lasso evaluation rejects invalid lassos") {
    CostFunction f;
    Vass a = single_state_loop(-1, 1, &f);
    a.domain = Domain::Natural;
    CHECK_THROWS_AS(lasso_value(a, f, Lasso{{}, {0}}), ValidityError);
}
