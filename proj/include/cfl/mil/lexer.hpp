#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "cfl/mil/source.hpp"

namespace cfl::mil {

struct Token {
    enum class Kind {
        Ident, Keyword, IntLit, FloatLit, StrLit,
        Punct,  // ( ) { } , ; :
        Op,     // + - * / % == != < <= > >= && || ! =
        End,
    };
    Kind kind;
    std::string text;
    SourceSpan span;
    int64_t int_val = 0;
    double float_val = 0.0;
    std::string str_val;  // decoded string literal
};

struct LexResult {
    std::vector<Token> tokens;
    std::vector<Diagnostic> errors;
};

// Tokenizes MIL source. `#` starts a comment running to end of line.
LexResult lex(const std::string& source);

bool is_keyword(const std::string& word);

}  // namespace cfl::mil
