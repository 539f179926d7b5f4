#pragma once

#include <stdexcept>
#include <string>

namespace vass {

// III-formed objects: broken chaining, dimension mismatches, dangling indices.
struct StructuralError : std::runtime_error {
    explicit StructuralError(const std::string& what) : std::runtime_error(what) {}
};

// Objects that are well-formed but violate a semantic requirement,
// e.g. a lasso that is not valid under the NATURAL domain.
struct ValidityError : std::runtime_error {
    explicit ValidityError(const std::string& what) : std::runtime_error(what) {}
};

// Caller asked for an operation outside its contract (wrong domain,
// non-uniform cost passed to a uniform-only procedure, ...).
struct MisuseError : std::runtime_error {
    explicit MisuseError(const std::string& what) : std::runtime_error(what) {}
};

// Problems that no procedure exists for (undecidable combinations).
struct UnsupportedError : std::runtime_error {
    explicit UnsupportedError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace vass
