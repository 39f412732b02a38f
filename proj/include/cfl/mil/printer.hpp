#pragma once

#include <string>

#include "cfl/mil/ast.hpp"

namespace cfl::mil {

// Canonical source renderer. parse(render(parse(s))) equals parse(s) for every
// valid s. Lowered conditions print in an embedded-assignment display form
// (`if (P1_0 = ((P1_1 = a) && (P1_2 = b)))`) and phi records as comments; both
// appear only in transformed/instrumented trees, which are display-only.
std::string render(const Ast& ast);
std::string render_expr(const Expr& e);

}  // namespace cfl::mil
