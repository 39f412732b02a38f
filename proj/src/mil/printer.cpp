#include "cfl/mil/printer.hpp"

#include <sstream>

#include "cfl/support/numfmt.hpp"

namespace cfl::mil {

namespace {

int precedence(const Expr& e) {
    switch (e.kind) {
        case Expr::Kind::Binary:
            switch (e.bin_op) {
                case BinOp::Or: return 1;
                case BinOp::And: return 2;
                case BinOp::Eq: case BinOp::Ne: case BinOp::Lt:
                case BinOp::Le: case BinOp::Gt: case BinOp::Ge: return 4;
                case BinOp::Add: case BinOp::Sub: return 5;
                default: return 6;
            }
        case Expr::Kind::Unary:
            return e.un_op == UnOp::Not ? 3 : 7;
        default:
            return 8;
    }
}

void write_expr(std::ostringstream& out, const Expr& e);

void write_child(std::ostringstream& out, const Expr& child, bool parens) {
    if (parens) out << '(';
    write_expr(out, child);
    if (parens) out << ')';
}

void write_expr(std::ostringstream& out, const Expr& e) {
    switch (e.kind) {
        case Expr::Kind::IntLit: out << format_int(e.int_val); return;
        case Expr::Kind::FloatLit: {
            // the original lexeme keeps the float/int lexical distinction stable
            if (!e.lexeme.empty()) {
                out << e.lexeme;
                return;
            }
            std::string s = format_double(e.float_val);
            out << s;
            if (s.find_first_of(".e") == std::string::npos) out << ".0";
            return;
        }
        case Expr::Kind::BoolLit: out << (e.bool_val ? "true" : "false"); return;
        case Expr::Kind::StrLit: {
            out << '"';
            for (char c : e.str_val) {
                switch (c) {
                    case '\n': out << "\\n"; break;
                    case '\t': out << "\\t"; break;
                    case '\\': out << "\\\\"; break;
                    case '"': out << "\\\""; break;
                    default: out << c;
                }
            }
            out << '"';
            return;
        }
        case Expr::Kind::Var: out << e.name; return;
        case Expr::Kind::Cast:
            out << (e.cast == CastKind::Int ? "int" : e.cast == CastKind::Float ? "float" : "str");
            out << '(';
            write_expr(out, *e.children[0]);
            out << ')';
            return;
        case Expr::Kind::Call:
            out << e.name << '(';
            for (size_t i = 0; i < e.children.size(); ++i) {
                if (i) out << ", ";
                write_expr(out, *e.children[i]);
            }
            out << ')';
            return;
        case Expr::Kind::Unary: {
            int p = precedence(e);
            out << (e.un_op == UnOp::Not ? "!" : "-");
            write_child(out, *e.children[0], precedence(*e.children[0]) < p);
            return;
        }
        case Expr::Kind::Binary: {
            int p = precedence(e);
            const Expr& lhs = *e.children[0];
            const Expr& rhs = *e.children[1];
            // comparisons are non-associative; everything else is left-associative
            bool lhs_parens = p == 4 ? precedence(lhs) <= p : precedence(lhs) < p;
            write_child(out, lhs, lhs_parens);
            out << ' ' << binop_text(e.bin_op) << ' ';
            write_child(out, rhs, precedence(rhs) <= p);
            return;
        }
    }
}

std::string cond_display(const LoweredCond& lc) {
    std::ostringstream out;
    if (lc.comb == LoweredCond::Comb::Single) {
        out << lc.combined_var << " = ";
        write_expr(out, *lc.atoms[0].expr);
        return out.str();
    }
    out << lc.combined_var << " = (";
    const char* join = lc.comb == LoweredCond::Comb::And ? " && " : " || ";
    for (size_t i = 0; i < lc.atoms.size(); ++i) {
        if (i) out << join;
        out << '(' << lc.atoms[i].var << " = ";
        write_expr(out, *lc.atoms[i].expr);
        out << ')';
    }
    out << ')';
    return out.str();
}

class Writer {
  public:
    std::string run(const Ast& ast) {
        for (size_t i = 0; i < ast.functions.size(); ++i) {
            if (i) out_ << '\n';
            write_function(ast.functions[i]);
        }
        return out_.str();
    }

  private:
    std::ostringstream out_;
    int depth_ = 0;

    void indent() {
        for (int i = 0; i < depth_; ++i) out_ << "    ";
    }

    void write_function(const FunctionDecl& fn) {
        out_ << "fn " << fn.name << '(';
        for (size_t i = 0; i < fn.params.size(); ++i) {
            if (i) out_ << ", ";
            out_ << fn.params[i].name << ": " << type_text(fn.params[i].type);
        }
        out_ << ") {\n";
        ++depth_;
        write_body(fn.body);
        --depth_;
        out_ << "}\n";
    }

    void write_body(const std::vector<StmtPtr>& body) {
        for (const auto& s : body) write_stmt(*s);
    }

    void write_phis(const std::vector<PhiRecord>& phis, const char* tag) {
        for (const auto& p : phis) {
            indent();
            out_ << "# phi:" << tag << " site " << p.site_id << " records " << p.var << '\n';
        }
    }

    void write_stmt(const Stmt& s) {
        switch (s.kind) {
            case Stmt::Kind::Assign:
                indent();
                if (s.let) out_ << "let ";
                out_ << s.target << " = ";
                write_expr(out_, *s.value);
                out_ << ";\n";
                return;
            case Stmt::Kind::Print:
            case Stmt::Kind::Assert:
                indent();
                out_ << (s.kind == Stmt::Kind::Print ? "print(" : "assert(");
                write_expr(out_, *s.value);
                out_ << ");\n";
                return;
            case Stmt::Kind::ExprStmt:
                indent();
                write_expr(out_, *s.value);
                out_ << ";\n";
                return;
            case Stmt::Kind::Return:
                indent();
                out_ << "return";
                if (s.value) {
                    out_ << ' ';
                    write_expr(out_, *s.value);
                }
                out_ << ";\n";
                return;
            case Stmt::Kind::If: {
                indent();
                out_ << "if (" << cond_text(s) << ") {\n";
                ++depth_;
                write_body(s.body);
                --depth_;
                if (!s.else_body.empty()) {
                    indent();
                    if (s.else_body.size() == 1 && s.else_body[0]->kind == Stmt::Kind::If) {
                        out_ << "} else ";
                        write_else_if(*s.else_body[0]);
                    } else {
                        out_ << "} else {\n";
                        ++depth_;
                        write_body(s.else_body);
                        --depth_;
                        indent();
                        out_ << "}\n";
                    }
                } else {
                    indent();
                    out_ << "}\n";
                }
                write_phis(s.merge_phis, "merge");
                return;
            }
            case Stmt::Kind::While:
                write_phis(s.entry_phis, "entry");
                indent();
                out_ << "while (" << cond_text(s) << ") {\n";
                ++depth_;
                write_body(s.body);
                --depth_;
                indent();
                out_ << "}\n";
                write_phis(s.exit_phis, "exit");
                return;
        }
    }

    // `else if` chains print flattened; the nested If re-parses identically.
    void write_else_if(const Stmt& s) {
        out_ << "if (" << cond_text(s) << ") {\n";
        ++depth_;
        write_body(s.body);
        --depth_;
        if (!s.else_body.empty()) {
            indent();
            if (s.else_body.size() == 1 && s.else_body[0]->kind == Stmt::Kind::If) {
                out_ << "} else ";
                write_else_if(*s.else_body[0]);
                return;
            }
            out_ << "} else {\n";
            ++depth_;
            write_body(s.else_body);
            --depth_;
        }
        indent();
        out_ << "}\n";
    }

    static std::string cond_text(const Stmt& s) {
        if (s.lowered) return cond_display(*s.lowered);
        std::ostringstream out;
        write_expr(out, *s.cond);
        return out.str();
    }
};

}  // namespace

std::string render(const Ast& ast) { return Writer().run(ast); }

std::string render_expr(const Expr& e) {
    std::ostringstream out;
    write_expr(out, e);
    return out.str();
}

}  // namespace cfl::mil
