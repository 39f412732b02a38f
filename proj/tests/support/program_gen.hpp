#pragma once

// Random MIL program generator for property tests. Generated programs always
// resolve (definite assignment holds by construction) and always terminate:
// loops are counter-bounded and the counter is frozen against reassignment
// inside its own body. Division and modulo appear only with nonzero literal
// divisors so generated programs cannot fault; status preservation is still
// exercised through asserts.

#include <string>
#include <vector>

#include "cfl/mil/value.hpp"
#include "cfl/support/rng.hpp"

namespace cfl::testgen {

class ProgramGen {
  public:
    explicit ProgramGen(uint64_t seed) : rng_(make_rng(seed, 0x9e11)) {}

    std::string generate() {
        out_.clear();
        var_counter_ = 0;
        has_helper_ = pick(2) == 0;
        if (has_helper_) {
            out_ += "fn helper(u: int, v: int) {\n";
            out_ += "    w = u * 2 + v;\n";
            out_ += "    if (w < 0) {\n        w = 0 - w;\n    }\n";
            out_ += "    return w % 97;\n";
            out_ += "}\n\n";
        }
        out_ += "fn main(p0: int, p1: int) {\n";
        Scope scope;
        scope.ints = {"p0", "p1"};
        int n = 3 + static_cast<int>(pick(5));
        for (int i = 0; i < n; ++i) statement(scope, 1, 0);
        emit_print(scope, 1);
        out_ += "}\n";
        return out_;
    }

    std::vector<mil::Value> random_args() {
        return {mil::Value::of_int(static_cast<int64_t>(pick(31)) - 10),
                mil::Value::of_int(static_cast<int64_t>(pick(31)) - 10)};
    }

  private:
    struct Scope {
        std::vector<std::string> ints;
        std::vector<std::string> strs;
        std::vector<std::string> frozen;  // loop counters: read-only inside their body

        bool assignable(const std::string& name) const {
            for (const auto& f : frozen)
                if (f == name) return false;
            return true;
        }
    };

    Rng rng_;
    std::string out_;
    int var_counter_ = 0;
    bool has_helper_ = false;

    size_t pick(size_t n) { return rand_index(rng_, n); }
    std::string fresh(const char* prefix) { return prefix + std::to_string(var_counter_++); }
    void indent(int depth) { out_.append(static_cast<size_t>(depth) * 4, ' '); }

    std::string int_literal() { return std::to_string(static_cast<int64_t>(pick(21)) - 5); }

    std::string int_expr(const Scope& scope, int depth) {
        if (depth >= 3 || pick(3) == 0) {
            if (!scope.ints.empty() && pick(3) != 0) return scope.ints[pick(scope.ints.size())];
            return int_literal();
        }
        switch (pick(has_helper_ ? 6 : 5)) {
            case 0: return int_expr(scope, depth + 1) + " + " + int_expr(scope, depth + 1);
            case 1: return int_expr(scope, depth + 1) + " - " + int_expr(scope, depth + 1);
            case 2: return int_expr(scope, depth + 1) + " * " + int_expr(scope, depth + 1);
            case 3: {
                // nonzero literal divisor keeps runs fault-free
                std::string d = std::to_string(2 + pick(7));
                return "(" + int_expr(scope, depth + 1) + ") " + (pick(2) ? "/ " : "% ") + d;
            }
            case 4: return "-(" + int_expr(scope, depth + 1) + ")";
            default:
                return "helper(" + int_expr(scope, depth + 1) + ", " + int_expr(scope, depth + 1) + ")";
        }
    }

    std::string cmp_expr(const Scope& scope, int depth) {
        static const char* ops[] = {"==", "!=", "<", "<=", ">", ">="};
        return int_expr(scope, depth + 1) + " " + ops[pick(6)] + " " + int_expr(scope, depth + 1);
    }

    std::string bool_expr(const Scope& scope, int depth) {
        size_t c = pick(10);
        if (c < 5 || depth >= 2) return cmp_expr(scope, depth);
        if (c < 6) return "!(" + bool_expr(scope, depth + 1) + ")";
        if (c < 7) return pick(2) ? "true" : "false";
        const char* join = pick(2) ? " && " : " || ";
        std::string e = cmp_expr(scope, depth);
        size_t atoms = 1 + pick(2);
        for (size_t i = 0; i < atoms; ++i) e += join + cmp_expr(scope, depth);
        return e;
    }

    std::string str_expr(const Scope& scope, int depth) {
        if (depth >= 2 || pick(2) == 0) {
            if (!scope.strs.empty() && pick(2) == 0) return scope.strs[pick(scope.strs.size())];
            static const char* lits[] = {"\"a\"", "\"bb\"", "\"xy\"", "\"\"", "\"z\""};
            return lits[pick(5)];
        }
        if (pick(3) == 0) return "str(" + int_expr(scope, depth + 1) + ")";
        return str_expr(scope, depth + 1) + " + " + str_expr(scope, depth + 1);
    }

    void emit_print(const Scope& scope, int depth) {
        indent(depth);
        if (!scope.strs.empty() && pick(3) == 0)
            out_ += "print(" + scope.strs[pick(scope.strs.size())] + ");\n";
        else
            out_ += "print(" + int_expr(scope, 1) + ");\n";
    }

    void statement(Scope& scope, int depth, int nesting) {
        size_t c = pick(12);
        if (nesting >= 2 && c >= 6) c = pick(6);  // cap structural depth
        switch (c) {
            case 0: case 1: case 2: {  // int assignment, new or existing
                std::string target;
                if (!scope.ints.empty() && pick(2) == 0) {
                    target = scope.ints[pick(scope.ints.size())];
                    if (!scope.assignable(target)) target = fresh("v");
                } else {
                    target = fresh("v");
                }
                bool is_new = true;
                for (const auto& v : scope.ints)
                    if (v == target) is_new = false;
                indent(depth);
                if (is_new && pick(2) == 0) out_ += "let ";
                out_ += target + " = " + int_expr(scope, 0) + ";\n";
                if (is_new) scope.ints.push_back(target);
                return;
            }
            case 3: {  // string assignment
                std::string target = fresh("s");
                indent(depth);
                out_ += target + " = " + str_expr(scope, 0) + ";\n";
                scope.strs.push_back(target);
                return;
            }
            case 4:
                emit_print(scope, depth);
                return;
            case 5: {  // assert that can fail: exercises status preservation
                indent(depth);
                out_ += "assert(" + int_expr(scope, 1) + " < 5000);\n";
                return;
            }
            case 6: case 7: case 8: {  // if / if-else
                indent(depth);
                out_ += "if (" + bool_expr(scope, 0) + ") {\n";
                // arm-local names stay arm-local: definite assignment
                Scope then_scope = scope;
                int n = 1 + static_cast<int>(pick(3));
                for (int i = 0; i < n; ++i) statement(then_scope, depth + 1, nesting + 1);
                if (pick(2) == 0) {
                    indent(depth);
                    out_ += "} else {\n";
                    Scope else_scope = scope;
                    int m = 1 + static_cast<int>(pick(2));
                    for (int i = 0; i < m; ++i) statement(else_scope, depth + 1, nesting + 1);
                }
                indent(depth);
                out_ += "}\n";
                return;
            }
            default: {  // bounded while
                std::string counter = fresh("i");
                size_t bound = 1 + pick(4);
                indent(depth);
                out_ += counter + " = 0;\n";
                scope.ints.push_back(counter);
                indent(depth);
                out_ += "while (" + counter + " < " + std::to_string(bound) + ") {\n";
                Scope body_scope = scope;
                body_scope.frozen.push_back(counter);
                int n = static_cast<int>(pick(3));
                for (int i = 0; i < n; ++i) statement(body_scope, depth + 1, nesting + 1);
                indent(depth + 1);
                out_ += counter + " = " + counter + " + 1;\n";
                indent(depth);
                out_ += "}\n";
                return;
            }
        }
    }
};

}  // namespace cfl::testgen
