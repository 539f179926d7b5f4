// Command-line driver: check decision problems, evaluate lassos, generate
// models, and apply the reachability-to-average transformation.
//
// Exit codes for `check`: 0 = YES, 1 = NO, 2 = UNKNOWN, >= 10 = errors.

#include "vassavg/decision.hpp"
#include "vassavg/generators.hpp"
#include "vassavg/io.hpp"
#include "vassavg/semantics.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <sstream>

namespace {

constexpr int kExitYes = 0;
constexpr int kExitNo = 1;
constexpr int kExitUnknown = 2;
constexpr int kExitUsage = 10;
constexpr int kExitParse = 11;
constexpr int kExitUnsupported = 12;

std::string read_input(const std::string& path) {
    if (path.empty() || path == "-") {
        std::ostringstream buffer;
        buffer << std::cin.rdbuf();
        return buffer.str();
    }
    std::ifstream file(path);
    if (!file) throw vass::MisuseError("cannot open input file '" + path + "'");
    std::ostringstream buffer;
    buffer << file.rdbuf();
    return buffer.str();
}

int exit_code(const vass::Answer& answer) {
    switch (answer.verdict) {
        case vass::Answer::Verdict::Yes: return kExitYes;
        case vass::Answer::Verdict::No: return kExitNo;
        case vass::Answer::Verdict::Unknown: return kExitUnknown;
    }
    return kExitUsage;
}

void print_answer(const vass::Vass& a, const vass::Answer& answer, bool json) {
    if (json) {
        std::cout << vass::answer_to_json(a, answer);
        return;
    }
    switch (answer.verdict) {
        case vass::Answer::Verdict::Yes: {
            std::cout << "YES";
            if (answer.certified_value) std::cout << " value=" << answer.certified_value->str();
            std::cout << " step=" << answer.step << "\n";
            if (answer.witness) {
                std::cout << "witness prefix:";
                for (const auto& n : transition_names(a, answer.witness->prefix))
                    std::cout << " " << n;
                std::cout << "\nwitness cycle:";
                for (const auto& n : transition_names(a, answer.witness->cycle))
                    std::cout << " " << n;
                std::cout << "\n";
            }
            break;
        }
        case vass::Answer::Verdict::No:
            std::cout << "NO (" << answer.reason << ") step=" << answer.step << "\n";
            break;
        case vass::Answer::Verdict::Unknown:
            std::cout << "UNKNOWN (" << answer.reason << ")\n";
            break;
    }
}

vass::Rat require_threshold(const std::string& text) {
    auto rat = vass::parse_rat(text);
    if (!rat) throw vass::MisuseError("threshold must be an integer or 'p/q'");
    return *rat;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Long-run average analysis for vector addition systems with states"};
    app.require_subcommand(1);

    // --- check ---
    auto* check = app.add_subcommand("check", "decide a long-run average problem");
    std::string problem, threshold_text = "0", input_path;
    bool json = false;
    check->add_option("--problem", problem,
                      "regular-average | regular-finite | regular-neg-inf | uniform-average")
        ->required();
    check->add_option("--threshold", threshold_text, "rational threshold (regular-average)");
    check->add_option("--input", input_path, "model file ('-' or absent for stdin)");
    check->add_flag("--json", json, "emit the JSON result document");

    // --- eval-lasso ---
    auto* eval = app.add_subcommand("eval-lasso", "exact value of a lasso");
    std::string eval_input, prefix_text, cycle_text;
    bool eval_json = false;
    long horizon = 0;
    eval->add_option("--input", eval_input, "model file ('-' or absent for stdin)");
    eval->add_option("--prefix", prefix_text, "prefix transition names (may be empty)");
    eval->add_option("--cycle", cycle_text, "cycle transition names")->required();
    eval->add_option("--averages", horizon, "also print the first N exact partial averages");
    eval->add_flag("--json", eval_json, "emit JSON");

    // --- gen ---
    auto* gen = app.add_subcommand("gen", "generate models");
    auto* gen_ae = gen->add_subcommand("example-ae", "the 3-state worked example");
    auto* gen_3sat = gen->add_subcommand("3sat", "reduction from a 3-CNF formula");
    std::string cnf_path;
    gen_3sat->add_option("--cnf", cnf_path, "DIMACS file ('-' or absent for stdin)");
    auto* gen_random = gen->add_subcommand("random", "seeded random model");
    vass::RandomModelParams params;
    gen_random->add_option("--states", params.states);
    gen_random->add_option("--transitions", params.transitions);
    gen_random->add_option("--dim", params.dimension);
    gen_random->add_option("--update-range", params.update_range);
    gen_random->add_option("--coeff-range", params.coefficient_range);
    gen_random->add_option("--seed", params.seed);
    gen->require_subcommand(1);

    // --- transform ---
    auto* transform = app.add_subcommand("transform", "model-to-model reductions");
    auto* reach = transform->add_subcommand(
        "reach-to-avg", "configuration reachability to uniform average value");
    std::string reach_input, source_state, target_state;
    reach->add_option("--input", reach_input, "model file ('-' or absent for stdin)");
    reach->add_option("--source", source_state, "source state (counters 0)")->required();
    reach->add_option("--target", target_state, "target state (counters 0)")->required();
    transform->require_subcommand(1);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return 0;  // --help
        std::cerr << app.help() << "\n";
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    }

    try {
        if (*check) {
            const vass::ModelDocument doc = vass::parse_model(read_input(input_path));
            vass::Answer answer;
            if (problem == "regular-average") {
                if (doc.vass.domain == vass::Domain::Integer) {
                    vass::Query query{doc.vass, doc.cost, vass::ProblemKind::RegularAverage,
                                      require_threshold(threshold_text), {}};
                    answer = vass::regular_average_Z(query);
                } else {
                    if (!vass::is_uniform(doc.cost))
                        throw vass::UnsupportedError(
                            "the average-value problem over N with general costs is "
                            "undecidable; use a uniform cost");
                    answer = vass::uniform_average_N(doc.vass, doc.cost.labeling[0],
                                                     require_threshold(threshold_text));
                }
            } else if (problem == "uniform-average") {
                if (!vass::is_uniform(doc.cost))
                    throw vass::MisuseError("uniform-average requires a uniform cost function");
                const vass::IntVec& coefficients = doc.cost.labeling[0];
                answer = doc.vass.domain == vass::Domain::Integer
                             ? vass::uniform_average_Z(doc.vass, coefficients,
                                                       require_threshold(threshold_text))
                             : vass::uniform_average_N(doc.vass, coefficients,
                                                       require_threshold(threshold_text));
            } else if (problem == "regular-finite") {
                vass::Query query{doc.vass, doc.cost, vass::ProblemKind::RegularFinite,
                                  vass::Rat(0), {}};
                answer = doc.vass.domain == vass::Domain::Integer
                             ? vass::regular_finite_value_Z(query)
                             : vass::regular_finite_value_N(query);
            } else if (problem == "regular-neg-inf") {
                vass::Query query{doc.vass, doc.cost, vass::ProblemKind::RegularNegInf,
                                  vass::Rat(0), {}};
                answer = vass::regular_neg_inf_Z(query);
            } else {
                throw vass::MisuseError("unknown problem '" + problem + "'");
            }
            print_answer(doc.vass, answer, json);
            return exit_code(answer);
        }

        if (*eval) {
            const vass::ModelDocument doc = vass::parse_model(read_input(eval_input));
            vass::Lasso lasso{vass::parse_path(doc.vass, prefix_text),
                              vass::parse_path(doc.vass, cycle_text)};
            const vass::LassoVerdict v = vass::lasso_value(doc.vass, doc.cost, lasso);
            if (eval_json) {
                std::cout << "{\"value\": \"" << v.value.str() << "\"}\n";
            } else {
                std::cout << v.value.str() << "\n";
            }
            if (horizon > 0) {
                const auto averages =
                    vass::numeric_prefix_averages(doc.vass, doc.cost, lasso, horizon);
                for (const auto& r : averages) std::cout << vass::rat_string(r) << "\n";
            }
            return 0;
        }

        if (*gen) {
            if (*gen_ae) {
                const auto [a, f] = vass::running_example();
                std::cout << vass::serialize_model(a, f);
            } else if (*gen_3sat) {
                const vass::CnfFormula formula = vass::parse_dimacs(read_input(cnf_path));
                const vass::ThreeSatInstance inst = vass::threesat_to_vass(formula);
                std::cout << vass::serialize_model(inst.vass, inst.cost);
            } else if (*gen_random) {
                const auto [a, f] = vass::random_vass(params);
                std::cout << vass::serialize_model(a, f);
            }
            return 0;
        }

        if (*transform) {
            const vass::ModelDocument doc = vass::parse_model(read_input(reach_input));
            const auto find_state = [&](const std::string& name) {
                for (int q = 0; q < doc.vass.state_count(); ++q)
                    if (doc.vass.state_names[q] == name) return q;
                throw vass::MisuseError("unknown state '" + name + "'");
            };
            const vass::Config source{find_state(source_state),
                                      vass::IntVec::Zero(doc.vass.dimension)};
            const vass::Config target{find_state(target_state),
                                      vass::IntVec::Zero(doc.vass.dimension)};
            const vass::ReachToAverage out =
                vass::reachability_to_average_N(doc.vass, source, target);
            std::cout << vass::serialize_model(out.vass, out.cost);
            return 0;
        }
    } catch (const vass::ParseError& e) {
        std::cerr << "parse error at " << e.where.line << ":" << e.where.column << ": "
                  << e.what() << "\n";
        return kExitParse;
    } catch (const vass::UnsupportedError& e) {
        std::cerr << "unsupported: " << e.what() << "\n";
        return kExitUnsupported;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    }
    return kExitUsage;
}
