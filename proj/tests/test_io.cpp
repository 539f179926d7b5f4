#include "vassavg/generators.hpp"
#include "vassavg/io.hpp"

#include <doctest.h>

#include <random>

using namespace vass;

namespace {

const char* kExampleText = R"(# worked example
domain Z
dim 2
state A
state B
state C
init B
trans e1 B A 1 0
trans e2 A B 0 -1
trans e3 B C 0 3
trans e4 C B -2 0
cost A 4 0
cost B 1 1
cost C 0 1
)";

}  // namespace

TEST_CASE("parsing the worked-example document") {
    const ModelDocument doc = parse_model(kExampleText);
    CHECK(doc.vass.state_count() == 3);
    CHECK(doc.vass.transition_count() == 4);
    CHECK(doc.vass.dimension == 2);
    CHECK(doc.vass.domain == Domain::Integer);
    CHECK(doc.vass.state_names[1] == "B");
    CHECK(doc.vass.initial_states == std::vector<int>{1});
    CHECK(doc.cost.labeling[0](0) == 4);

    const auto [a, f] = running_example();
    // structurally identical to the built-in generator up to names
    CHECK(serialize_model(doc.vass, doc.cost) == serialize_model(a, f));
}

TEST_CASE("diagnostics carry kind, line and column") {
    // negative coefficient: semantic
    try {
        parse_model("domain Z\ndim 2\nstate A\ninit A\ncost A -1 0\n");
        FAIL("expected ParseError");
    } catch (const ParseError& e) {
        CHECK(e.kind == ParseError::Kind::Semantic);
        CHECK(e.where.line == 5);
        CHECK(std::string(e.what()).find("negative coefficient") != std::string::npos);
    }

    // undeclared state: semantic
    try {
        parse_model("domain Z\ndim 2\nstate B\ninit B\ntrans e1 B X 1 0\ncost B 0 0\n");
        FAIL("expected ParseError");
    } catch (const ParseError& e) {
        CHECK(e.kind == ParseError::Kind::Semantic);
        CHECK(std::string(e.what()).find("unknown state") != std::string::npos);
    }

    // malformed line: syntax
    try {
        parse_model("domain Z\ndim x\n");
        FAIL("expected ParseError");
    } catch (const ParseError& e) {
        CHECK(e.kind == ParseError::Kind::Syntax);
        CHECK(e.where.line == 2);
    }

    // missing cost line: semantic
    CHECK_THROWS_AS(parse_model("domain Z\ndim 1\nstate A\ninit A\n"), ParseError);
}

TEST_CASE("round trip on random models") {
    std::mt19937_64 rng(67);
    for (int round = 0; round < 100; ++round) {
        RandomModelParams params;
        params.states = 2 + static_cast<int>(rng() % 4);
        params.transitions = params.states + static_cast<int>(rng() % 4);
        params.dimension = 1 + static_cast<int>(rng() % 3);
        params.seed = rng();
        const auto [a, f] = random_vass(params);
        const std::string text = serialize_model(a, f);
        const ModelDocument doc = parse_model(text);
        CHECK(serialize_model(doc.vass, doc.cost) == text);
        CHECK(doc.vass.dimension == a.dimension);
        CHECK(doc.vass.transition_count() == a.transition_count());
    }
}

TEST_CASE("path parsing by transition names") {
    const ModelDocument doc = parse_model(kExampleText);
    CHECK(parse_path(doc.vass, "e1 e2 e3 e4") == Path{0, 1, 2, 3});
    CHECK(parse_path(doc.vass, "") == Path{});
    CHECK_THROWS_AS(parse_path(doc.vass, "e9"), MisuseError);
    CHECK(transition_names(doc.vass, {0, 3}) == std::vector<std::string>{"e1", "e4"});
}

TEST_CASE("rational parsing and printing") {
    CHECK(*parse_rat("3/2") == make_rat(Int(3), Int(2)));
    CHECK(*parse_rat("-5") == Rat(-5));
    CHECK(*parse_rat("6/4") == make_rat(Int(3), Int(2)));
    CHECK(!parse_rat("1/0").has_value());
    CHECK(!parse_rat("x").has_value());
    CHECK(rat_string(make_rat(Int(-6), Int(4))) == "-3/2");
    CHECK(rat_string(Rat(7)) == "7");
}
