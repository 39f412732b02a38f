#include "cfl/mil/lexer.hpp"

#include <cctype>
#include <charconv>
#include <unordered_set>

namespace cfl::mil {

bool is_keyword(const std::string& word) {
    static const std::unordered_set<std::string> kw = {
        "fn", "let", "if", "else", "while", "print", "assert", "return",
        "true", "false", "int", "float", "bool", "str",
    };
    return kw.count(word) > 0;
}

namespace {

struct Cursor {
    const std::string& src;
    size_t pos = 0;
    int line = 1;
    int col = 1;

    bool done() const { return pos >= src.size(); }
    char peek(size_t ahead = 0) const { return pos + ahead < src.size() ? src[pos + ahead] : '\0'; }
    char advance() {
        char c = src[pos++];
        if (c == '\n') {
            ++line;
            col = 1;
        } else {
            ++col;
        }
        return c;
    }
    SourceSpan span() const { return {line, col}; }
};

bool ident_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; }
bool ident_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; }

}  // namespace

LexResult lex(const std::string& source) {
    LexResult out;
    Cursor cur{source};
    auto push = [&](Token::Kind kind, std::string text, SourceSpan span) {
        Token t;
        t.kind = kind;
        t.text = std::move(text);
        t.span = span;
        out.tokens.push_back(std::move(t));
        return &out.tokens.back();
    };
    auto error = [&](SourceSpan span, std::string msg) {
        out.errors.push_back({Diagnostic::Kind::SyntaxError, span, std::move(msg)});
    };

    while (!cur.done()) {
        char c = cur.peek();
        if (c == ' ' || c == '\t' || c == '\r' || c == '\n') {
            cur.advance();
            continue;
        }
        if (c == '#') {
            while (!cur.done() && cur.peek() != '\n') cur.advance();
            continue;
        }
        SourceSpan at = cur.span();
        if (ident_start(c)) {
            std::string word;
            while (!cur.done() && ident_char(cur.peek())) word += cur.advance();
            push(is_keyword(word) ? Token::Kind::Keyword : Token::Kind::Ident, word, at);
            continue;
        }
        if (std::isdigit(static_cast<unsigned char>(c))) {
            std::string num;
            bool is_float = false;
            while (!cur.done() && std::isdigit(static_cast<unsigned char>(cur.peek()))) num += cur.advance();
            if (cur.peek() == '.' && std::isdigit(static_cast<unsigned char>(cur.peek(1)))) {
                is_float = true;
                num += cur.advance();
                while (!cur.done() && std::isdigit(static_cast<unsigned char>(cur.peek()))) num += cur.advance();
            }
            if (cur.peek() == 'e' || cur.peek() == 'E') {
                size_t digits_at = (cur.peek(1) == '+' || cur.peek(1) == '-') ? 2 : 1;
                if (std::isdigit(static_cast<unsigned char>(cur.peek(digits_at)))) {
                    is_float = true;
                    for (size_t k = 0; k < digits_at; ++k) num += cur.advance();
                    while (!cur.done() && std::isdigit(static_cast<unsigned char>(cur.peek()))) num += cur.advance();
                }
            }
            Token* t = push(is_float ? Token::Kind::FloatLit : Token::Kind::IntLit, num, at);
            if (is_float) {
                t->float_val = std::strtod(num.c_str(), nullptr);
            } else {
                auto res = std::from_chars(num.data(), num.data() + num.size(), t->int_val);
                if (res.ec != std::errc()) error(at, "integer literal out of range: " + num);
            }
            continue;
        }
        if (c == '"') {
            cur.advance();
            std::string decoded;
            bool closed = false;
            while (!cur.done()) {
                char d = cur.advance();
                if (d == '"') {
                    closed = true;
                    break;
                }
                if (d == '\n') break;
                if (d == '\\') {
                    char e = cur.done() ? '\0' : cur.advance();
                    switch (e) {
                        case 'n': decoded += '\n'; break;
                        case 't': decoded += '\t'; break;
                        case '\\': decoded += '\\'; break;
                        case '"': decoded += '"'; break;
                        default: error(at, std::string("unknown escape \\") + e);
                    }
                    continue;
                }
                decoded += d;
            }
            if (!closed) {
                error(at, "unterminated string literal");
            } else {
                Token* t = push(Token::Kind::StrLit, decoded, at);
                t->str_val = decoded;
            }
            continue;
        }
        switch (c) {
            case '(': case ')': case '{': case '}': case ',': case ';': case ':':
                cur.advance();
                push(Token::Kind::Punct, std::string(1, c), at);
                continue;
            case '+': case '-': case '*': case '/': case '%':
                cur.advance();
                push(Token::Kind::Op, std::string(1, c), at);
                continue;
            case '=':
                cur.advance();
                if (cur.peek() == '=') {
                    cur.advance();
                    push(Token::Kind::Op, "==", at);
                } else {
                    push(Token::Kind::Op, "=", at);
                }
                continue;
            case '!':
                cur.advance();
                if (cur.peek() == '=') {
                    cur.advance();
                    push(Token::Kind::Op, "!=", at);
                } else {
                    push(Token::Kind::Op, "!", at);
                }
                continue;
            case '<':
                cur.advance();
                if (cur.peek() == '=') {
                    cur.advance();
                    push(Token::Kind::Op, "<=", at);
                } else {
                    push(Token::Kind::Op, "<", at);
                }
                continue;
            case '>':
                cur.advance();
                if (cur.peek() == '=') {
                    cur.advance();
                    push(Token::Kind::Op, ">=", at);
                } else {
                    push(Token::Kind::Op, ">", at);
                }
                continue;
            case '&':
                cur.advance();
                if (cur.peek() == '&') {
                    cur.advance();
                    push(Token::Kind::Op, "&&", at);
                } else {
                    error(at, "expected && (single & is not an operator)");
                }
                continue;
            case '|':
                cur.advance();
                if (cur.peek() == '|') {
                    cur.advance();
                    push(Token::Kind::Op, "||", at);
                } else {
                    error(at, "expected || (single | is not an operator)");
                }
                continue;
            default:
                error(at, std::string("unexpected character '") + c + "'");
                cur.advance();
                continue;
        }
    }
    Token end;
    end.kind = Token::Kind::End;
    end.span = cur.span();
    out.tokens.push_back(end);
    return out;
}

}  // namespace cfl::mil
