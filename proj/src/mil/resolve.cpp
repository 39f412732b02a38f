#include "cfl/mil/resolve.hpp"

#include <algorithm>
#include <set>
#include <string>
#include <unordered_map>

namespace cfl::mil {

namespace {

using Defined = std::set<std::string>;

class Resolver {
  public:
    explicit Resolver(const Ast& ast) : ast_(ast) {
        for (const auto& f : ast.functions) {
            if (arity_.count(f.name)) {
                report(Diagnostic::Kind::Redeclaration, f.span,
                       "duplicate function '" + f.name + "'");
            }
            arity_[f.name] = f.params.size();
        }
    }

    std::vector<Diagnostic> run() {
        for (const auto& f : ast_.functions) {
            Defined defined;
            for (const auto& p : f.params) {
                if (!defined.insert(p.name).second)
                    report(Diagnostic::Kind::Redeclaration, p.span,
                           "duplicate parameter '" + p.name + "'");
            }
            check_body(f.body, defined);
        }
        return std::move(diags_);
    }

  private:
    const Ast& ast_;
    std::unordered_map<std::string, size_t> arity_;
    std::vector<Diagnostic> diags_;

    void report(Diagnostic::Kind kind, SourceSpan at, std::string msg) {
        diags_.push_back({kind, at, std::move(msg)});
    }

    // Returns the set of names definitely assigned after the body runs.
    Defined check_body(const std::vector<StmtPtr>& body, Defined defined) {
        for (const auto& s : body) defined = check_stmt(*s, std::move(defined));
        return defined;
    }

    Defined check_stmt(const Stmt& s, Defined defined) {
        switch (s.kind) {
            case Stmt::Kind::Assign:
                check_expr(*s.value, defined);
                if (s.let && defined.count(s.target))
                    report(Diagnostic::Kind::Redeclaration, s.span,
                           "'let' redeclares variable '" + s.target + "'");
                defined.insert(s.target);
                return defined;
            case Stmt::Kind::Print:
            case Stmt::Kind::Assert:
            case Stmt::Kind::ExprStmt:
                check_expr(*s.value, defined);
                return defined;
            case Stmt::Kind::Return:
                if (s.value) check_expr(*s.value, defined);
                return defined;
            case Stmt::Kind::If: {
                check_expr(*s.cond, defined);
                Defined after_then = check_body(s.body, defined);
                Defined after_else = check_body(s.else_body, defined);
                Defined both;
                std::set_intersection(after_then.begin(), after_then.end(), after_else.begin(),
                                      after_else.end(), std::inserter(both, both.begin()));
                return both;
            }
            case Stmt::Kind::While:
                check_expr(*s.cond, defined);
                check_body(s.body, defined);  // body may not run; additions don't escape
                return defined;
        }
        return defined;
    }

    void check_expr(const Expr& e, const Defined& defined) {
        switch (e.kind) {
            case Expr::Kind::Var:
                if (!defined.count(e.name))
                    report(Diagnostic::Kind::UnresolvedVariable, e.span,
                           "variable '" + e.name + "' may be used before assignment");
                return;
            case Expr::Kind::Call: {
                auto it = arity_.find(e.name);
                if (it == arity_.end()) {
                    report(Diagnostic::Kind::UnknownFunction, e.span,
                           "unknown function '" + e.name + "'");
                } else if (it->second != e.children.size()) {
                    report(Diagnostic::Kind::ArityMismatch, e.span,
                           "function '" + e.name + "' expects " + std::to_string(it->second) +
                               " argument(s), got " + std::to_string(e.children.size()));
                }
                for (const auto& a : e.children) check_expr(*a, defined);
                return;
            }
            default:
                for (const auto& c : e.children) check_expr(*c, defined);
                return;
        }
    }
};

}  // namespace

std::vector<Diagnostic> resolve(const Ast& ast) { return Resolver(ast).run(); }

}  // namespace cfl::mil
