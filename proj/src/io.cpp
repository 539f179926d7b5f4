#include "vassavg/io.hpp"

#include <json.hpp>

#include <algorithm>
#include <cctype>
#include <map>
#include <optional>
#include <sstream>

namespace vass {

namespace {

struct Token {
    std::string text;
    int column = 0;
};

std::vector<Token> tokenize(const std::string& line) {
    std::vector<Token> tokens;
    size_t i = 0;
    while (i < line.size()) {
        if (std::isspace(static_cast<unsigned char>(line[i]))) {
            ++i;
            continue;
        }
        if (line[i] == '#') break;
        size_t j = i;
        while (j < line.size() && !std::isspace(static_cast<unsigned char>(line[j]))) ++j;
        tokens.push_back({line.substr(i, j - i), static_cast<int>(i + 1)});
        i = j;
    }
    return tokens;
}

std::optional<Int> parse_int(const std::string& text) {
    if (text.empty()) return std::nullopt;
    size_t i = (text[0] == '-' || text[0] == '+') ? 1 : 0;
    if (i == text.size()) return std::nullopt;
    for (; i < text.size(); ++i)
        if (!std::isdigit(static_cast<unsigned char>(text[i]))) return std::nullopt;
    return Int(text);
}

}  // namespace

ModelDocument parse_model(const std::string& text) {
    ModelDocument doc;
    Vass& a = doc.vass;
    a.dimension = 0;

    struct PendingTrans {
        std::string name, src, dst;
        std::vector<Int> update;
        SourceSpan span;
    };
    struct PendingCost {
        std::string state;
        std::vector<Int> coefficients;
        SourceSpan span;
    };
    std::vector<std::string> declared;            // state declaration order
    std::map<std::string, SourceSpan> decl_span;
    std::vector<std::string> initials;
    std::vector<SourceSpan> initial_spans;
    std::vector<PendingTrans> transitions;
    std::vector<PendingCost> costs;
    bool have_domain = false, have_dim = false;

    const auto declare = [&](const std::string& name, SourceSpan span) {
        if (!decl_span.count(name)) {
            declared.push_back(name);
            decl_span[name] = span;
        }
    };

    std::istringstream in(text);
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const auto tokens = tokenize(line);
        if (tokens.empty()) continue;
        const SourceSpan span{line_no, tokens[0].column};
        const std::string& head = tokens[0].text;
        const auto syntax = [&](int col, const std::string& message) -> ParseError {
            return ParseError(ParseError::Kind::Syntax, SourceSpan{line_no, col}, message);
        };

        if (head == "domain") {
            if (tokens.size() != 2 || (tokens[1].text != "Z" && tokens[1].text != "N"))
                throw syntax(span.column, "expected 'domain Z' or 'domain N'");
            a.domain = tokens[1].text == "Z" ? Domain::Integer : Domain::Natural;
            have_domain = true;
        } else if (head == "dim") {
            if (tokens.size() != 2) throw syntax(span.column, "expected 'dim <k>'");
            auto k = parse_int(tokens[1].text);
            if (!k || *k < 1) throw syntax(tokens[1].column, "dimension must be a positive integer");
            a.dimension = static_cast<Index>(k->get_si());
            have_dim = true;
        } else if (head == "state") {
            if (tokens.size() != 2) throw syntax(span.column, "expected 'state <name>'");
            declare(tokens[1].text, span);
        } else if (head == "init") {
            if (tokens.size() < 2) throw syntax(span.column, "expected 'init <name> ...'");
            for (size_t i = 1; i < tokens.size(); ++i) {
                initials.push_back(tokens[i].text);
                initial_spans.push_back({line_no, tokens[i].column});
            }
        } else if (head == "trans") {
            if (!have_dim) throw syntax(span.column, "'dim' must precede 'trans'");
            if (tokens.size() != 4 + static_cast<size_t>(a.dimension))
                throw syntax(span.column, "expected 'trans <name> <src> <dst> <d1> ... <dk>'");
            PendingTrans t;
            t.name = tokens[1].text;
            t.src = tokens[2].text;
            t.dst = tokens[3].text;
            for (Index i = 0; i < a.dimension; ++i) {
                auto v = parse_int(tokens[4 + i].text);
                if (!v) throw syntax(tokens[4 + i].column, "update entries must be integers");
                t.update.push_back(*v);
            }
            t.span = span;
            transitions.push_back(std::move(t));
        } else if (head == "cost") {
            if (!have_dim) throw syntax(span.column, "'dim' must precede 'cost'");
            if (tokens.size() != 2 + static_cast<size_t>(a.dimension))
                throw syntax(span.column, "expected 'cost <name> <a1> ... <ak>'");
            PendingCost c;
            c.state = tokens[1].text;
            for (Index i = 0; i < a.dimension; ++i) {
                auto v = parse_int(tokens[2 + i].text);
                if (!v) throw syntax(tokens[2 + i].column, "cost entries must be integers");
                if (*v < 0)
                    throw ParseError(ParseError::Kind::Semantic,
                                     SourceSpan{line_no, tokens[2 + i].column},
                                     "negative coefficient (labels must be natural)");
                c.coefficients.push_back(*v);
            }
            c.span = span;
            declare(c.state, span);
            costs.push_back(std::move(c));
        } else {
            throw syntax(span.column, "unknown directive '" + head + "'");
        }
    }

    const auto semantic = [&](SourceSpan at, const std::string& message) -> ParseError {
        return ParseError(ParseError::Kind::Semantic, at, message);
    };
    if (!have_domain) throw semantic({1, 1}, "missing 'domain' directive");
    if (!have_dim) throw semantic({1, 1}, "missing 'dim' directive");
    if (declared.empty()) throw semantic({1, 1}, "no states declared");

    std::map<std::string, int> state_index;
    for (size_t i = 0; i < declared.size(); ++i) {
        state_index[declared[i]] = static_cast<int>(i);
        a.state_names.push_back(declared[i]);
        doc.state_spans.push_back(decl_span[declared[i]]);
    }
    const auto lookup = [&](const std::string& name, SourceSpan at) {
        auto it = state_index.find(name);
        if (it == state_index.end()) throw semantic(at, "unknown state '" + name + "'");
        return it->second;
    };

    if (initials.empty()) throw semantic({1, 1}, "missing 'init' directive");
    for (size_t i = 0; i < initials.size(); ++i)
        a.initial_states.push_back(lookup(initials[i], initial_spans[i]));
    std::sort(a.initial_states.begin(), a.initial_states.end());
    a.initial_states.erase(std::unique(a.initial_states.begin(), a.initial_states.end()),
                           a.initial_states.end());

    std::map<std::string, SourceSpan> trans_names;
    for (const PendingTrans& t : transitions) {
        if (trans_names.count(t.name))
            throw semantic(t.span, "duplicate transition name '" + t.name + "'");
        trans_names[t.name] = t.span;
        IntVec update(a.dimension);
        for (Index i = 0; i < a.dimension; ++i) update(i) = t.update[i];
        a.transitions.push_back({lookup(t.src, t.span), lookup(t.dst, t.span), std::move(update)});
        a.transition_names.push_back(t.name);
        doc.transition_spans.push_back(t.span);
    }

    doc.cost.labeling.assign(a.state_names.size(), IntVec());
    std::vector<bool> have_cost(a.state_names.size(), false);
    for (const PendingCost& c : costs) {
        const int q = lookup(c.state, c.span);
        if (have_cost[q]) throw semantic(c.span, "duplicate cost for state '" + c.state + "'");
        have_cost[q] = true;
        IntVec l(a.dimension);
        for (Index i = 0; i < a.dimension; ++i) l(i) = c.coefficients[i];
        doc.cost.labeling[q] = std::move(l);
    }
    for (size_t q = 0; q < have_cost.size(); ++q)
        if (!have_cost[q])
            throw semantic(doc.state_spans[q], "state '" + a.state_names[q] + "' has no cost line");

    validate_vass(a);
    validate_cost(a, doc.cost);
    return doc;
}

std::string serialize_model(const Vass& a, const CostFunction& f) {
    std::ostringstream out;
    out << "domain " << (a.domain == Domain::Integer ? "Z" : "N") << "\n";
    out << "dim " << a.dimension << "\n";
    for (const std::string& name : a.state_names) out << "state " << name << "\n";
    out << "init";
    for (int q : a.initial_states) out << " " << a.state_names[q];
    out << "\n";
    for (int t = 0; t < a.transition_count(); ++t) {
        const Transition& tr = a.transitions[t];
        out << "trans " << a.transition_names[t] << " " << a.state_names[tr.source] << " "
            << a.state_names[tr.target];
        for (Index i = 0; i < tr.update.size(); ++i) out << " " << tr.update(i);
        out << "\n";
    }
    for (int q = 0; q < a.state_count(); ++q) {
        out << "cost " << a.state_names[q];
        for (Index i = 0; i < f.labeling[q].size(); ++i) out << " " << f.labeling[q](i);
        out << "\n";
    }
    return out.str();
}

Path parse_path(const Vass& a, const std::string& names) {
    std::map<std::string, int> index;
    for (int t = 0; t < a.transition_count(); ++t) index[a.transition_names[t]] = t;
    Path path;
    std::istringstream in(names);
    std::string name;
    while (in >> name) {
        auto it = index.find(name);
        if (it == index.end()) throw MisuseError("unknown transition '" + name + "'");
        path.push_back(it->second);
    }
    return path;
}

std::vector<std::string> transition_names(const Vass& a, const Path& path) {
    std::vector<std::string> names;
    for (int t : path) names.push_back(a.transition_names.at(t));
    return names;
}

std::string answer_to_json(const Vass& a, const Answer& answer) {
    nlohmann::ordered_json j;
    switch (answer.verdict) {
        case Answer::Verdict::Yes: j["answer"] = "YES"; break;
        case Answer::Verdict::No: j["answer"] = "NO"; break;
        case Answer::Verdict::Unknown: j["answer"] = "UNKNOWN"; break;
    }
    if (answer.certified_value) {
        j["value"] = answer.certified_value->str();
    } else {
        j["value"] = nullptr;
    }
    if (answer.witness) {
        nlohmann::ordered_json w;
        w["prefix"] = transition_names(a, answer.witness->prefix);
        w["cycle"] = transition_names(a, answer.witness->cycle);
        j["witness"] = std::move(w);
    } else {
        j["witness"] = nullptr;
    }
    j["step"] = answer.step;
    nlohmann::ordered_json budget = nlohmann::ordered_json::object();
    for (const auto& [key, value] : answer.budget) budget[key] = value;
    if (!answer.reason.empty()) budget["reason"] = answer.reason;
    j["budget"] = std::move(budget);
    j["verified"] = answer.yes();
    return j.dump(2) + "\n";
}

}  // namespace vass
