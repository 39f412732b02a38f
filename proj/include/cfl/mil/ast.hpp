#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "cfl/mil/source.hpp"

namespace cfl::mil {

enum class TypeName { Int, Float, Bool, Str };

enum class BinOp { Add, Sub, Mul, Div, Mod, Eq, Ne, Lt, Le, Gt, Ge, And, Or };
enum class UnOp { Neg, Not };
enum class CastKind { Int, Float, Str };

const char* binop_text(BinOp op);
const char* type_text(TypeName t);

struct Expr;
using ExprPtr = std::unique_ptr<Expr>;

struct Expr {
    enum class Kind { IntLit, FloatLit, BoolLit, StrLit, Var, Unary, Binary, Call, Cast };
    Kind kind;
    SourceSpan span;

    int64_t int_val = 0;
    double float_val = 0.0;
    bool bool_val = false;
    std::string str_val;
    std::string lexeme;  // original token text of numeric literals

    std::string name;  // Var / Call
    UnOp un_op = UnOp::Neg;
    BinOp bin_op = BinOp::Add;
    SourceSpan op_span;  // operator token, for textual mutation
    CastKind cast = CastKind::Int;

    // Unary/Cast child at [0]; Binary children at [0], [1]; Call arguments.
    std::vector<ExprPtr> children;

    ExprPtr clone() const;
};

struct Stmt;
using StmtPtr = std::unique_ptr<Stmt>;

// Condition lowered by the predicate transform. Atoms are evaluated left to
// right with short-circuit; each evaluated atom assigns its P-variable and the
// combined value is always assigned to combined_var. A single-atom condition
// carries one atom whose variable *is* combined_var.
struct LoweredCond {
    enum class Comb { Single, And, Or };
    struct Atom {
        std::string var;  // P<k>_j
        ExprPtr expr;
        int site_id = -1;  // set by the instrumenter
    };
    int ordinal = 0;  // k in P<k>_j
    Comb comb = Comb::Single;
    std::vector<Atom> atoms;
    std::string combined_var;  // P<k>_0
    int combined_site_id = -1;

    std::unique_ptr<LoweredCond> clone() const;
};

// Merge-point value recording inserted by the instrumenter. Records the
// current value of `var` (NA when unbound) under `site_id`; it never changes
// program state and costs no interpreter steps.
struct PhiRecord {
    int site_id = -1;
    std::string var;
};

struct Stmt {
    enum class Kind { Assign, If, While, Print, Assert, ExprStmt, Return };
    Kind kind;
    SourceSpan span;

    // Assign
    std::string target;
    bool let = false;
    int site_id = -1;  // set by the instrumenter

    // Assign value / Print / Assert / ExprStmt / Return (may be null for bare return)
    ExprPtr value;

    // If / While. Exactly one of cond | lowered is set.
    ExprPtr cond;
    std::unique_ptr<LoweredCond> lowered;
    std::vector<StmtPtr> body;       // then-branch or loop body
    std::vector<StmtPtr> else_body;  // if only

    std::vector<PhiRecord> merge_phis;  // if: recorded after the merge
    std::vector<PhiRecord> entry_phis;  // while: recorded before each condition evaluation
    std::vector<PhiRecord> exit_phis;   // while: recorded once after the loop

    StmtPtr clone() const;
};

struct Param {
    std::string name;
    TypeName type;
    SourceSpan span;
};

struct FunctionDecl {
    std::string name;
    std::vector<Param> params;
    std::vector<StmtPtr> body;
    SourceSpan span;
    std::vector<int> param_site_ids;  // set by the instrumenter, aligned with params

    FunctionDecl clone() const;
};

struct Ast {
    std::vector<FunctionDecl> functions;

    Ast clone() const;
    const FunctionDecl* find_function(const std::string& name) const;
};

std::vector<StmtPtr> clone_body(const std::vector<StmtPtr>& body);

}  // namespace cfl::mil
