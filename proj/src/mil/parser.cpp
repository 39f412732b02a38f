#include "cfl/mil/parser.hpp"

#include "cfl/mil/lexer.hpp"
#include "cfl/mil/resolve.hpp"

namespace cfl::mil {

namespace {

class Parser {
  public:
    Parser(std::vector<Token> tokens, std::vector<Diagnostic>& errors)
        : tokens_(std::move(tokens)), errors_(errors) {}

    std::optional<Ast> program() {
        Ast ast;
        while (!at_end()) {
            if (!at_keyword("fn")) {
                error(peek().span, "expected 'fn'");
                return std::nullopt;
            }
            auto fn = function();
            if (!fn) return std::nullopt;
            ast.functions.push_back(std::move(*fn));
        }
        return ast;
    }

  private:
    std::vector<Token> tokens_;
    std::vector<Diagnostic>& errors_;
    size_t pos_ = 0;

    const Token& peek(size_t ahead = 0) const {
        size_t i = pos_ + ahead;
        return i < tokens_.size() ? tokens_[i] : tokens_.back();
    }
    const Token& advance() { return tokens_[pos_ < tokens_.size() - 1 ? pos_++ : pos_]; }
    bool at_end() const { return peek().kind == Token::Kind::End; }
    bool at_keyword(const char* kw) const {
        return peek().kind == Token::Kind::Keyword && peek().text == kw;
    }
    bool at_punct(const char* p) const {
        return peek().kind == Token::Kind::Punct && peek().text == p;
    }
    bool at_op(const char* op) const { return peek().kind == Token::Kind::Op && peek().text == op; }

    void error(SourceSpan at, std::string msg) {
        errors_.push_back({Diagnostic::Kind::SyntaxError, at, std::move(msg)});
    }

    bool expect_punct(const char* p) {
        if (at_punct(p)) {
            advance();
            return true;
        }
        error(peek().span, std::string("expected '") + p + "', found '" + describe(peek()) + "'");
        return false;
    }
    bool expect_op(const char* op) {
        if (at_op(op)) {
            advance();
            return true;
        }
        error(peek().span, std::string("expected '") + op + "', found '" + describe(peek()) + "'");
        return false;
    }

    static std::string describe(const Token& t) {
        return t.kind == Token::Kind::End ? "end of input" : t.text;
    }

    std::optional<TypeName> type_name() {
        if (peek().kind == Token::Kind::Keyword) {
            const std::string& w = peek().text;
            if (w == "int") { advance(); return TypeName::Int; }
            if (w == "float") { advance(); return TypeName::Float; }
            if (w == "bool") { advance(); return TypeName::Bool; }
            if (w == "str") { advance(); return TypeName::Str; }
        }
        error(peek().span, "expected type name (int, float, bool, str)");
        return std::nullopt;
    }

    std::optional<FunctionDecl> function() {
        FunctionDecl fn;
        fn.span = peek().span;
        advance();  // fn
        if (peek().kind != Token::Kind::Ident) {
            error(peek().span, "expected function name");
            return std::nullopt;
        }
        fn.name = advance().text;
        if (!expect_punct("(")) return std::nullopt;
        if (!at_punct(")")) {
            for (;;) {
                if (peek().kind != Token::Kind::Ident) {
                    error(peek().span, "expected parameter name");
                    return std::nullopt;
                }
                Param p;
                p.span = peek().span;
                p.name = advance().text;
                if (!expect_punct(":")) return std::nullopt;
                auto t = type_name();
                if (!t) return std::nullopt;
                p.type = *t;
                fn.params.push_back(std::move(p));
                if (at_punct(",")) {
                    advance();
                    continue;
                }
                break;
            }
        }
        if (!expect_punct(")")) return std::nullopt;
        auto body = block();
        if (!body) return std::nullopt;
        fn.body = std::move(*body);
        return fn;
    }

    std::optional<std::vector<StmtPtr>> block() {
        if (!expect_punct("{")) return std::nullopt;
        std::vector<StmtPtr> stmts;
        while (!at_punct("}")) {
            if (at_end()) {
                error(peek().span, "unterminated block (expected '}')");
                return std::nullopt;
            }
            auto s = statement();
            if (!s) return std::nullopt;
            stmts.push_back(std::move(*s));
        }
        advance();  // }
        return stmts;
    }

    std::optional<StmtPtr> statement() {
        SourceSpan at = peek().span;
        if (at_keyword("let")) {
            advance();
            return assignment(at, /*let=*/true);
        }
        if (at_keyword("if")) return if_statement();
        if (at_keyword("while")) return while_statement();
        if (at_keyword("print")) return call_like(Stmt::Kind::Print);
        if (at_keyword("assert")) return call_like(Stmt::Kind::Assert);
        if (at_keyword("return")) {
            advance();
            auto s = std::make_unique<Stmt>();
            s->kind = Stmt::Kind::Return;
            s->span = at;
            if (!at_punct(";")) {
                auto e = expression();
                if (!e) return std::nullopt;
                s->value = std::move(*e);
            }
            if (!expect_punct(";")) return std::nullopt;
            return s;
        }
        if (peek().kind == Token::Kind::Ident) {
            if (peek(1).kind == Token::Kind::Op && peek(1).text == "=") return assignment(at, false);
            if (peek(1).kind == Token::Kind::Punct && peek(1).text == "(") {
                auto e = expression();
                if (!e) return std::nullopt;
                if (!expect_punct(";")) return std::nullopt;
                auto s = std::make_unique<Stmt>();
                s->kind = Stmt::Kind::ExprStmt;
                s->span = at;
                s->value = std::move(*e);
                return s;
            }
        }
        error(at, "expected statement");
        return std::nullopt;
    }

    std::optional<StmtPtr> assignment(SourceSpan at, bool let) {
        if (peek().kind != Token::Kind::Ident) {
            error(peek().span, "expected variable name");
            return std::nullopt;
        }
        auto s = std::make_unique<Stmt>();
        s->kind = Stmt::Kind::Assign;
        s->span = at;
        s->let = let;
        s->target = advance().text;
        if (!expect_op("=")) return std::nullopt;
        auto e = expression();
        if (!e) return std::nullopt;
        s->value = std::move(*e);
        if (!expect_punct(";")) return std::nullopt;
        return s;
    }

    std::optional<StmtPtr> call_like(Stmt::Kind kind) {
        auto s = std::make_unique<Stmt>();
        s->kind = kind;
        s->span = peek().span;
        advance();  // print / assert
        if (!expect_punct("(")) return std::nullopt;
        auto e = expression();
        if (!e) return std::nullopt;
        s->value = std::move(*e);
        if (!expect_punct(")")) return std::nullopt;
        if (!expect_punct(";")) return std::nullopt;
        return s;
    }

    std::optional<StmtPtr> if_statement() {
        auto s = std::make_unique<Stmt>();
        s->kind = Stmt::Kind::If;
        s->span = peek().span;
        advance();  // if
        if (!expect_punct("(")) return std::nullopt;
        auto c = expression();
        if (!c) return std::nullopt;
        s->cond = std::move(*c);
        if (!expect_punct(")")) return std::nullopt;
        auto then = block();
        if (!then) return std::nullopt;
        s->body = std::move(*then);
        if (at_keyword("else")) {
            advance();
            if (at_keyword("if")) {
                auto nested = if_statement();
                if (!nested) return std::nullopt;
                s->else_body.push_back(std::move(*nested));
            } else {
                auto els = block();
                if (!els) return std::nullopt;
                s->else_body = std::move(*els);
            }
        }
        return s;
    }

    std::optional<StmtPtr> while_statement() {
        auto s = std::make_unique<Stmt>();
        s->kind = Stmt::Kind::While;
        s->span = peek().span;
        advance();  // while
        if (!expect_punct("(")) return std::nullopt;
        auto c = expression();
        if (!c) return std::nullopt;
        s->cond = std::move(*c);
        if (!expect_punct(")")) return std::nullopt;
        auto body = block();
        if (!body) return std::nullopt;
        s->body = std::move(*body);
        return s;
    }

    // Precedence: || < && < ! < comparison < additive < multiplicative < unary-.
    std::optional<ExprPtr> expression() { return or_expr(); }

    std::optional<ExprPtr> or_expr() {
        auto lhs = and_expr();
        if (!lhs) return std::nullopt;
        while (at_op("||")) {
            SourceSpan op_at = advance().span;
            auto rhs = and_expr();
            if (!rhs) return std::nullopt;
            lhs = binary(BinOp::Or, op_at, std::move(*lhs), std::move(*rhs));
        }
        return lhs;
    }

    std::optional<ExprPtr> and_expr() {
        auto lhs = not_expr();
        if (!lhs) return std::nullopt;
        while (at_op("&&")) {
            SourceSpan op_at = advance().span;
            auto rhs = not_expr();
            if (!rhs) return std::nullopt;
            lhs = binary(BinOp::And, op_at, std::move(*lhs), std::move(*rhs));
        }
        return lhs;
    }

    std::optional<ExprPtr> not_expr() {
        if (at_op("!")) {
            SourceSpan at = advance().span;
            auto operand = not_expr();
            if (!operand) return std::nullopt;
            auto e = std::make_unique<Expr>();
            e->kind = Expr::Kind::Unary;
            e->span = at;
            e->op_span = at;
            e->un_op = UnOp::Not;
            e->children.push_back(std::move(*operand));
            return e;
        }
        return comparison();
    }

    std::optional<ExprPtr> comparison() {
        auto lhs = additive();
        if (!lhs) return std::nullopt;
        static const std::pair<const char*, BinOp> ops[] = {
            {"==", BinOp::Eq}, {"!=", BinOp::Ne}, {"<=", BinOp::Le},
            {"<", BinOp::Lt},  {">=", BinOp::Ge}, {">", BinOp::Gt},
        };
        for (auto [text, op] : ops) {
            if (at_op(text)) {
                SourceSpan op_at = advance().span;
                auto rhs = additive();
                if (!rhs) return std::nullopt;
                return binary(op, op_at, std::move(*lhs), std::move(*rhs));
            }
        }
        return lhs;
    }

    std::optional<ExprPtr> additive() {
        auto lhs = multiplicative();
        if (!lhs) return std::nullopt;
        for (;;) {
            BinOp op;
            if (at_op("+")) op = BinOp::Add;
            else if (at_op("-")) op = BinOp::Sub;
            else return lhs;
            SourceSpan op_at = advance().span;
            auto rhs = multiplicative();
            if (!rhs) return std::nullopt;
            lhs = binary(op, op_at, std::move(*lhs), std::move(*rhs));
        }
    }

    std::optional<ExprPtr> multiplicative() {
        auto lhs = unary();
        if (!lhs) return std::nullopt;
        for (;;) {
            BinOp op;
            if (at_op("*")) op = BinOp::Mul;
            else if (at_op("/")) op = BinOp::Div;
            else if (at_op("%")) op = BinOp::Mod;
            else return lhs;
            SourceSpan op_at = advance().span;
            auto rhs = unary();
            if (!rhs) return std::nullopt;
            lhs = binary(op, op_at, std::move(*lhs), std::move(*rhs));
        }
    }

    std::optional<ExprPtr> unary() {
        if (at_op("-")) {
            SourceSpan at = advance().span;
            auto operand = unary();
            if (!operand) return std::nullopt;
            auto e = std::make_unique<Expr>();
            e->kind = Expr::Kind::Unary;
            e->span = at;
            e->op_span = at;
            e->un_op = UnOp::Neg;
            e->children.push_back(std::move(*operand));
            return e;
        }
        return primary();
    }

    std::optional<ExprPtr> primary() {
        const Token& t = peek();
        switch (t.kind) {
            case Token::Kind::IntLit: {
                auto e = std::make_unique<Expr>();
                e->kind = Expr::Kind::IntLit;
                e->span = t.span;
                e->int_val = t.int_val;
                e->lexeme = t.text;
                advance();
                return e;
            }
            case Token::Kind::FloatLit: {
                auto e = std::make_unique<Expr>();
                e->kind = Expr::Kind::FloatLit;
                e->span = t.span;
                e->float_val = t.float_val;
                e->lexeme = t.text;
                advance();
                return e;
            }
            case Token::Kind::StrLit: {
                auto e = std::make_unique<Expr>();
                e->kind = Expr::Kind::StrLit;
                e->span = t.span;
                e->str_val = t.str_val;
                advance();
                return e;
            }
            case Token::Kind::Keyword: {
                if (t.text == "true" || t.text == "false") {
                    auto e = std::make_unique<Expr>();
                    e->kind = Expr::Kind::BoolLit;
                    e->span = t.span;
                    e->bool_val = t.text == "true";
                    advance();
                    return e;
                }
                if (t.text == "int" || t.text == "float" || t.text == "str") {
                    auto e = std::make_unique<Expr>();
                    e->kind = Expr::Kind::Cast;
                    e->span = t.span;
                    e->cast = t.text == "int" ? CastKind::Int
                              : t.text == "float" ? CastKind::Float
                                                  : CastKind::Str;
                    advance();
                    if (!expect_punct("(")) return std::nullopt;
                    auto inner = expression();
                    if (!inner) return std::nullopt;
                    e->children.push_back(std::move(*inner));
                    if (!expect_punct(")")) return std::nullopt;
                    return e;
                }
                error(t.span, "unexpected keyword '" + t.text + "' in expression");
                return std::nullopt;
            }
            case Token::Kind::Ident: {
                auto e = std::make_unique<Expr>();
                e->span = t.span;
                e->name = t.text;
                advance();
                if (at_punct("(")) {
                    e->kind = Expr::Kind::Call;
                    advance();
                    if (!at_punct(")")) {
                        for (;;) {
                            auto arg = expression();
                            if (!arg) return std::nullopt;
                            e->children.push_back(std::move(*arg));
                            if (at_punct(",")) {
                                advance();
                                continue;
                            }
                            break;
                        }
                    }
                    if (!expect_punct(")")) return std::nullopt;
                } else {
                    e->kind = Expr::Kind::Var;
                }
                return e;
            }
            case Token::Kind::Punct:
                if (t.text == "(") {
                    advance();
                    auto inner = expression();
                    if (!inner) return std::nullopt;
                    if (!expect_punct(")")) return std::nullopt;
                    return inner;
                }
                break;
            default:
                break;
        }
        error(t.span, "expected expression, found '" + describe(t) + "'");
        return std::nullopt;
    }

    static ExprPtr binary(BinOp op, SourceSpan op_at, ExprPtr lhs, ExprPtr rhs) {
        auto e = std::make_unique<Expr>();
        e->kind = Expr::Kind::Binary;
        e->span = lhs->span;
        e->op_span = op_at;
        e->bin_op = op;
        e->children.push_back(std::move(lhs));
        e->children.push_back(std::move(rhs));
        return e;
    }
};

ParseResult parse_impl(const std::string& source, bool resolve_names) {
    ParseResult out;
    LexResult lexed = lex(source);
    if (!lexed.errors.empty()) {
        out.errors = std::move(lexed.errors);
        return out;
    }
    Parser parser(std::move(lexed.tokens), out.errors);
    auto ast = parser.program();
    if (!ast || !out.errors.empty()) {
        out.ast.reset();
        if (out.errors.empty())
            out.errors.push_back({Diagnostic::Kind::SyntaxError, {1, 1}, "parse failed"});
        return out;
    }
    if (resolve_names) {
        auto issues = resolve(*ast);
        if (!issues.empty()) {
            out.errors = std::move(issues);
            return out;
        }
    }
    out.ast = std::move(ast);
    return out;
}

}  // namespace

ParseResult parse(const std::string& source) { return parse_impl(source, true); }

ParseResult parse_unresolved(const std::string& source) { return parse_impl(source, false); }

}  // namespace cfl::mil
