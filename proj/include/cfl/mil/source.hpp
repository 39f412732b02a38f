#pragma once

#include <string>
#include <vector>

namespace cfl::mil {

// 1-based position of a token or node in the source text.
struct SourceSpan {
    int line = 0;
    int col = 0;
};

struct Diagnostic {
    enum class Kind { SyntaxError, UnresolvedVariable, UnknownFunction, ArityMismatch, Redeclaration };
    Kind kind = Kind::SyntaxError;
    SourceSpan at;
    std::string message;
};

inline std::string render_diagnostic(const Diagnostic& d) {
    return std::to_string(d.at.line) + ":" + std::to_string(d.at.col) + ": " + d.message;
}

}  // namespace cfl::mil
