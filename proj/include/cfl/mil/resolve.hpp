#pragma once

#include <vector>

#include "cfl/mil/ast.hpp"
#include "cfl/mil/source.hpp"

namespace cfl::mil {

// Static checks on a parsed program:
//   - every variable use is definitely assigned on all paths reaching it
//   - `let` does not redeclare an existing name
//   - calls target known functions with matching arity
//   - function names and parameter names are unique
// Definite assignment means an unbound read is impossible at runtime, on any
// path combination, including runs with forced predicate outcomes.
std::vector<Diagnostic> resolve(const Ast& ast);

}  // namespace cfl::mil
