#pragma once

#include <optional>
#include <string>
#include <vector>

#include "cfl/mil/ast.hpp"
#include "cfl/mil/source.hpp"

namespace cfl::mil {

struct ParseResult {
    std::optional<Ast> ast;  // present iff errors is empty
    std::vector<Diagnostic> errors;

    bool ok() const { return errors.empty(); }
};

// Lex + parse + static resolution (definite assignment, call targets/arity,
// duplicate names). Returns the AST or the diagnostics, never both.
ParseResult parse(const std::string& source);

// Parse without the resolution pass (grammar errors only).
ParseResult parse_unresolved(const std::string& source);

}  // namespace cfl::mil
