#include "cfl/mil/transform.hpp"

#include <cctype>

#include "cfl/mil/printer.hpp"

namespace cfl::mil {

namespace {

bool is_pvar_name(const std::string& name) {
    if (name.size() < 4 || name[0] != 'P') return false;
    size_t i = 1;
    while (i < name.size() && std::isdigit(static_cast<unsigned char>(name[i]))) ++i;
    if (i == 1 || i >= name.size() || name[i] != '_') return false;
    size_t j = i + 1;
    if (j >= name.size()) return false;
    while (j < name.size()) {
        if (!std::isdigit(static_cast<unsigned char>(name[j]))) return false;
        ++j;
    }
    return true;
}

void check_expr_names(const Expr& e) {
    if ((e.kind == Expr::Kind::Var || e.kind == Expr::Kind::Call) && is_pvar_name(e.name))
        throw TransformError("identifier '" + e.name + "' collides with predicate variable naming");
    for (const auto& c : e.children) check_expr_names(*c);
}

void check_stmt_names(const Stmt& s) {
    if (s.kind == Stmt::Kind::Assign && is_pvar_name(s.target))
        throw TransformError("identifier '" + s.target + "' collides with predicate variable naming");
    if (s.value) check_expr_names(*s.value);
    if (s.cond) check_expr_names(*s.cond);
    for (const auto& c : s.body) check_stmt_names(*c);
    for (const auto& c : s.else_body) check_stmt_names(*c);
}

// Flattens the top-level &&/|| chain of `e` (left-assoc parse order) into
// evaluation-ordered atoms. Parenthesized or negated sub-expressions stay
// whole.
void flatten(ExprPtr e, BinOp op, std::vector<ExprPtr>& atoms) {
    if (e->kind == Expr::Kind::Binary && e->bin_op == op) {
        ExprPtr lhs = std::move(e->children[0]);
        ExprPtr rhs = std::move(e->children[1]);
        flatten(std::move(lhs), op, atoms);
        atoms.push_back(std::move(rhs));
        return;
    }
    atoms.push_back(std::move(e));
}

class Transformer {
  public:
    explicit Transformer(PredicateTable& table) : table_(table) {}

    void run(Ast& ast) {
        for (auto& fn : ast.functions)
            for (auto& s : fn.body) walk(*s);
    }

  private:
    PredicateTable& table_;
    int next_ordinal_ = 1;
    int next_row_ = 1;

    void walk(Stmt& s) {
        if (s.kind == Stmt::Kind::If || s.kind == Stmt::Kind::While) {
            lower_condition(s);
            for (auto& c : s.body) walk(*c);
            for (auto& c : s.else_body) walk(*c);
        }
    }

    void add_row(PredicateEntry::ControlKind control, const std::string& var,
                 const std::string& expression, int line, int conjunct) {
        table_.entries.push_back({next_row_++, control, var, expression, line, conjunct});
    }

    void lower_condition(Stmt& s) {
        int k = next_ordinal_++;
        auto control = s.kind == Stmt::Kind::While ? PredicateEntry::ControlKind::While
                       : s.else_body.empty()       ? PredicateEntry::ControlKind::If
                                                   : PredicateEntry::ControlKind::IfElse;
        int line = s.cond->span.line;
        std::string whole = render_expr(*s.cond);

        auto lc = std::make_unique<LoweredCond>();
        lc->ordinal = k;
        lc->combined_var = "P" + std::to_string(k) + "_0";

        BinOp top{};
        bool compound = s.cond->kind == Expr::Kind::Binary &&
                        (s.cond->bin_op == BinOp::And || s.cond->bin_op == BinOp::Or);
        if (compound) top = s.cond->bin_op;

        add_row(control, lc->combined_var, whole, line, 0);
        if (!compound) {
            lc->comb = LoweredCond::Comb::Single;
            LoweredCond::Atom atom;
            atom.var = lc->combined_var;
            atom.expr = std::move(s.cond);
            lc->atoms.push_back(std::move(atom));
        } else {
            lc->comb = top == BinOp::And ? LoweredCond::Comb::And : LoweredCond::Comb::Or;
            std::vector<ExprPtr> parts;
            flatten(std::move(s.cond), top, parts);
            for (size_t j = 0; j < parts.size(); ++j) {
                LoweredCond::Atom atom;
                atom.var = "P" + std::to_string(k) + "_" + std::to_string(j + 1);
                add_row(control, atom.var, render_expr(*parts[j]), parts[j]->span.line,
                        static_cast<int>(j + 1));
                atom.expr = std::move(parts[j]);
                lc->atoms.push_back(std::move(atom));
            }
        }
        s.cond.reset();
        s.lowered = std::move(lc);
    }
};

}  // namespace

PredicateTable transform_predicates(Ast& ast) {
    for (const auto& fn : ast.functions) {
        for (const auto& p : fn.params)
            if (is_pvar_name(p.name))
                throw TransformError("identifier '" + p.name + "' collides with predicate variable naming");
        for (const auto& s : fn.body) check_stmt_names(*s);
    }
    PredicateTable table;
    Transformer(table).run(ast);
    return table;
}

std::pair<Ast, PredicateTable> transformed_copy(const Ast& ast) {
    Ast copy = ast.clone();
    PredicateTable table = transform_predicates(copy);
    return {std::move(copy), std::move(table)};
}

}  // namespace cfl::mil
