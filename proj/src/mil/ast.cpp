#include "cfl/mil/ast.hpp"

namespace cfl::mil {

const char* binop_text(BinOp op) {
    switch (op) {
        case BinOp::Add: return "+";
        case BinOp::Sub: return "-";
        case BinOp::Mul: return "*";
        case BinOp::Div: return "/";
        case BinOp::Mod: return "%";
        case BinOp::Eq: return "==";
        case BinOp::Ne: return "!=";
        case BinOp::Lt: return "<";
        case BinOp::Le: return "<=";
        case BinOp::Gt: return ">";
        case BinOp::Ge: return ">=";
        case BinOp::And: return "&&";
        case BinOp::Or: return "||";
    }
    return "?";
}

const char* type_text(TypeName t) {
    switch (t) {
        case TypeName::Int: return "int";
        case TypeName::Float: return "float";
        case TypeName::Bool: return "bool";
        case TypeName::Str: return "str";
    }
    return "?";
}

ExprPtr Expr::clone() const {
    auto e = std::make_unique<Expr>();
    e->kind = kind;
    e->span = span;
    e->int_val = int_val;
    e->float_val = float_val;
    e->bool_val = bool_val;
    e->str_val = str_val;
    e->lexeme = lexeme;
    e->name = name;
    e->un_op = un_op;
    e->bin_op = bin_op;
    e->op_span = op_span;
    e->cast = cast;
    e->children.reserve(children.size());
    for (const auto& c : children) e->children.push_back(c->clone());
    return e;
}

std::unique_ptr<LoweredCond> LoweredCond::clone() const {
    auto lc = std::make_unique<LoweredCond>();
    lc->ordinal = ordinal;
    lc->comb = comb;
    lc->combined_var = combined_var;
    lc->combined_site_id = combined_site_id;
    lc->atoms.reserve(atoms.size());
    for (const auto& a : atoms) {
        LoweredCond::Atom atom;
        atom.var = a.var;
        atom.expr = a.expr->clone();
        atom.site_id = a.site_id;
        lc->atoms.push_back(std::move(atom));
    }
    return lc;
}

StmtPtr Stmt::clone() const {
    auto s = std::make_unique<Stmt>();
    s->kind = kind;
    s->span = span;
    s->target = target;
    s->let = let;
    s->site_id = site_id;
    if (value) s->value = value->clone();
    if (cond) s->cond = cond->clone();
    if (lowered) s->lowered = lowered->clone();
    s->body = clone_body(body);
    s->else_body = clone_body(else_body);
    s->merge_phis = merge_phis;
    s->entry_phis = entry_phis;
    s->exit_phis = exit_phis;
    return s;
}

std::vector<StmtPtr> clone_body(const std::vector<StmtPtr>& body) {
    std::vector<StmtPtr> out;
    out.reserve(body.size());
    for (const auto& s : body) out.push_back(s->clone());
    return out;
}

FunctionDecl FunctionDecl::clone() const {
    FunctionDecl f;
    f.name = name;
    f.params = params;
    f.body = clone_body(body);
    f.span = span;
    f.param_site_ids = param_site_ids;
    return f;
}

Ast Ast::clone() const {
    Ast a;
    a.functions.reserve(functions.size());
    for (const auto& f : functions) a.functions.push_back(f.clone());
    return a;
}

const FunctionDecl* Ast::find_function(const std::string& name) const {
    for (const auto& f : functions)
        if (f.name == name) return &f;
    return nullptr;
}

}  // namespace cfl::mil
