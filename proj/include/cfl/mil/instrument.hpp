#pragma once

#include <string>
#include <vector>

#include "cfl/mil/ast.hpp"
#include "cfl/mil/transform.hpp"

namespace cfl::mil {

enum class SiteKind { Assignment, Predicate, Param, Phi };

const char* site_kind_name(SiteKind k);

// One recording site: a versioned assignment target. Parents are the sites
// whose values feed this one (the causal covariates). A use of a phi-versioned
// variable contributes both the phi site and that phi's gating predicate site,
// mirroring instrumentation that records merged values together with their
// controlling predicates.
struct Site {
    int id = 0;
    std::string function;
    std::string base;  // variable name (P<k>_j for predicates)
    int version = 1;
    int line = 0;   // original source line
    int block = 0;  // preorder CFG block number
    SiteKind kind = SiteKind::Assignment;
    std::vector<int> parents;  // sorted, unique
    int gate_site = -1;        // phi only: controlling P<k>_0 site
    std::string type_hint;     // int | float | bool | str | unknown

    std::string versioned_name() const { return base + "_" + std::to_string(version); }
};

struct SiteTable {
    std::vector<Site> sites;  // sites[i].id == i

    size_t size() const { return sites.size(); }
    const Site& at(int id) const { return sites.at(static_cast<size_t>(id)); }
};

struct InstrumentedProgram {
    Ast ast;  // transformed, with site ids and phi records attached
    SiteTable sites;
    PredicateTable predicates;
};

// Assigns SSA versions, derives parent sets, and inserts phi recording sites
// at if-merges and loop entries/exits for loop-carried variables. The ast must
// already be predicate-transformed; it is annotated in place.
//
// Throws std::logic_error if versioning would read an unassigned name, which
// a resolved program makes impossible.
SiteTable instrument(Ast& ast);

// parse-result convenience: clone + transform + instrument.
InstrumentedProgram instrument_program(const Ast& source_ast);

// Lowered conditions of an instrumented program, in preorder.
struct ConditionSite {
    int ordinal = 0;
    int combined_site = -1;
    int line = 0;
};
std::vector<ConditionSite> collect_condition_sites(const Ast& ast);

}  // namespace cfl::mil
