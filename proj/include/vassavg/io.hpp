// Textual model format, JSON result reporting, and name-based lookups
// used by the command line.
//
// Model grammar (line-based, '#' starts a comment):
//   domain Z|N
//   dim <k>
//   state <name>                     (optional pre-declaration)
//   init <name> [<name> ...]
//   trans <name> <src> <dst> <d1> ... <dk>
//   cost <name> <a1> ... <ak>        (required for every state)
// States are declared by `state` or `cost` lines; `init` and `trans` may
// only reference declared states.

#pragma once

#include "vassavg/decision.hpp"
#include "vassavg/model.hpp"

#include <string>
#include <vector>

namespace vass {

struct SourceSpan {
    int line = 0;
    int column = 0;
};

struct ParseError : std::runtime_error {
    enum class Kind { Syntax, Semantic };
    Kind kind;
    SourceSpan where;
    ParseError(Kind k, SourceSpan at, const std::string& message)
        : std::runtime_error(message), kind(k), where(at) {}
};

struct ModelDocument {
    Vass vass;
    CostFunction cost;
    std::vector<SourceSpan> state_spans;       // per state index
    std::vector<SourceSpan> transition_spans;  // per transition index
};

// Throws ParseError with line/column diagnostics.
ModelDocument parse_model(const std::string& text);

// Canonical text form; parse(serialize(m)) is structurally equal to m.
std::string serialize_model(const Vass& a, const CostFunction& f);

// Transition indices from whitespace-separated transition names.
Path parse_path(const Vass& a, const std::string& names);

std::vector<std::string> transition_names(const Vass& a, const Path& path);

// The CLI result document:
// {"answer": ..., "value": ..., "witness": ..., "step": ..., "budget": ...,
//  "verified": ...}; byte-deterministic for fixed inputs.
std::string answer_to_json(const Vass& a, const Answer& answer);

}  // namespace vass
