#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "cfl/mil/ast.hpp"

namespace cfl::mil {

// One row per predicate: conjunct_index 0 is the whole condition; atomic
// parts of a compound are numbered 1..m left to right in evaluation order.
// Single-atom conditions get only the index-0 row.
struct PredicateEntry {
    int pred_id = 0;  // unique row id
    enum class ControlKind { If, IfElse, While } control;
    std::string var;         // P<k>_j
    std::string expression;  // rendered predicate text
    int line = 0;
    int conjunct_index = 0;
};

struct PredicateTable {
    std::vector<PredicateEntry> entries;
};

struct TransformError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Rewrites every branch/loop condition into a lowered condition that assigns
// the predicate values to fresh P<k>_j booleans, preserving evaluation order
// and short-circuit behavior exactly. Only top-level &&/|| chains are split
// into atoms; the combined P<k>_0 is always assigned. Observable behavior
// (stdout, status, step accounting) is unchanged.
//
// Throws TransformError if the program already uses P<k>_j-shaped names.
PredicateTable transform_predicates(Ast& ast);

// Convenience: clone + transform.
std::pair<Ast, PredicateTable> transformed_copy(const Ast& ast);

}  // namespace cfl::mil
