#include "cfl/eval/mutate.hpp"

#include <algorithm>

#include "cfl/mil/interp.hpp"
#include "cfl/mil/parser.hpp"
#include "cfl/support/log.hpp"
#include "cfl/support/numfmt.hpp"
#include "cfl/support/parallel.hpp"

namespace cfl::eval {

using mil::BinOp;
using mil::Expr;

const char* mut_op_name(MutOp op) {
    switch (op) {
        case MutOp::Relational: return "relop";
        case MutOp::Arithmetic: return "arith";
        case MutOp::OffByOne: return "const";
        case MutOp::BoolConnective: return "connective";
    }
    return "relop";
}

namespace {

struct Candidate {
    MutOp op;
    mil::SourceSpan at;
    std::string original;
    std::string replacement;
    std::string variant;  // distinguishes the two off-by-one directions
};

const char* relational_swap(BinOp op) {
    switch (op) {
        case BinOp::Lt: return "<=";
        case BinOp::Le: return "<";
        case BinOp::Gt: return ">=";
        case BinOp::Ge: return ">";
        case BinOp::Eq: return "!=";
        case BinOp::Ne: return "==";
        default: return nullptr;
    }
}

const char* arithmetic_swap(BinOp op) {
    switch (op) {
        case BinOp::Add: return "-";
        case BinOp::Sub: return "+";
        case BinOp::Mul: return "/";
        case BinOp::Div: return "*";
        case BinOp::Mod: return "/";
        default: return nullptr;
    }
}

void collect_expr(const Expr& e, const std::set<MutOp>& ops, std::vector<Candidate>& out) {
    if (e.kind == Expr::Kind::Binary) {
        if (const char* r = relational_swap(e.bin_op); r && ops.count(MutOp::Relational))
            out.push_back({MutOp::Relational, e.op_span, mil::binop_text(e.bin_op), r, ""});
        if (const char* r = arithmetic_swap(e.bin_op); r && ops.count(MutOp::Arithmetic))
            out.push_back({MutOp::Arithmetic, e.op_span, mil::binop_text(e.bin_op), r, ""});
        if ((e.bin_op == BinOp::And || e.bin_op == BinOp::Or) && ops.count(MutOp::BoolConnective))
            out.push_back({MutOp::BoolConnective, e.op_span, mil::binop_text(e.bin_op),
                           e.bin_op == BinOp::And ? "||" : "&&", ""});
    }
    if (e.kind == Expr::Kind::IntLit && ops.count(MutOp::OffByOne) && !e.lexeme.empty()) {
        out.push_back({MutOp::OffByOne, e.span, e.lexeme, format_int(e.int_val + 1), "p1"});
        out.push_back({MutOp::OffByOne, e.span, e.lexeme, format_int(e.int_val - 1), "m1"});
    }
    for (const auto& c : e.children) collect_expr(*c, ops, out);
}

void collect_stmt(const mil::Stmt& s, const std::set<MutOp>& ops, std::vector<Candidate>& out) {
    if (s.value) collect_expr(*s.value, ops, out);
    if (s.cond) collect_expr(*s.cond, ops, out);
    for (const auto& c : s.body) collect_stmt(*c, ops, out);
    for (const auto& c : s.else_body) collect_stmt(*c, ops, out);
}

// Replaces `original` at (line, col) in `source`; 1-based coordinates.
// Line numbers are unchanged because replacements never contain newlines.
bool splice(const std::string& source, const Candidate& c, std::string& out) {
    size_t offset = 0;
    int line = 1;
    while (line < c.at.line) {
        size_t nl = source.find('\n', offset);
        if (nl == std::string::npos) return false;
        offset = nl + 1;
        ++line;
    }
    offset += static_cast<size_t>(c.at.col - 1);
    if (source.compare(offset, c.original.size(), c.original) != 0) return false;
    out = source.substr(0, offset) + c.replacement + source.substr(offset + c.original.size());
    return true;
}

}  // namespace

std::vector<SeededFault> seed_faults(const std::string& program_id, const std::string& source,
                                     const TestSuite& suite, const SeedOptions& options) {
    auto parsed = mil::parse(source);
    if (!parsed.ok()) throw DataError("seed_faults: program does not parse");

    std::vector<Candidate> candidates;
    for (const auto& fn : parsed.ast->functions)
        for (const auto& s : fn.body) collect_stmt(*s, options.operators, candidates);

    struct Checked {
        SeededFault fault;
        bool keep = false;
    };
    std::vector<Checked> checked(candidates.size());

    parallel_for(candidates.size(), options.jobs, [&](size_t i) {
        const Candidate& c = candidates[i];
        std::string mutated;
        if (!splice(source, c, mutated)) {
            log::warn("seed_faults: token mismatch at " + std::to_string(c.at.line) + ":" +
                      std::to_string(c.at.col) + "; candidate dropped");
            return;
        }
        auto mp = mil::parse(mutated);
        if (!mp.ok()) {
            log::debug("seed_faults: mutant at " + std::to_string(c.at.line) + " does not compile");
            return;
        }
        size_t failing = 0;
        for (const auto& test : suite.tests) {
            mil::ExecOptions exec;
            exec.step_limit = options.step_limit;
            mil::ExecutionResult result = mil::execute(*mp.ast, test.args, exec);
            if (!oracle_passes(test, result)) ++failing;
        }
        size_t passing = suite.tests.size() - failing;
        if (failing < options.min_failing || (options.require_passing && passing == 0)) {
            log::debug("seed_faults: mutant at " + std::to_string(c.at.line) + ":" +
                       std::to_string(c.at.col) + " not killed (failing=" +
                       std::to_string(failing) + "); discarded");
            return;
        }
        SeededFault out;
        out.id = std::string(mut_op_name(c.op)) + "_L" + std::to_string(c.at.line) + "C" +
                 std::to_string(c.at.col) + (c.variant.empty() ? "" : "_" + c.variant);
        out.source = std::move(mutated);
        out.failing = failing;
        out.passing = passing;
        out.spec.program_id = program_id;
        out.spec.fault_id = out.id;
        out.spec.faulty_lines = {c.at.line};
        out.spec.op = mut_op_name(c.op);
        out.spec.original_text = c.original;
        out.spec.mutated_text = c.replacement;
        out.spec.description = std::string("replaced '") + c.original + "' with '" +
                               c.replacement + "' at line " + std::to_string(c.at.line);
        checked[i].fault = std::move(out);
        checked[i].keep = true;
    });

    std::vector<SeededFault> kept;
    for (auto& c : checked) {
        if (!c.keep) continue;
        kept.push_back(std::move(c.fault));
        if (options.max_mutants > 0 && kept.size() >= options.max_mutants) break;
    }
    return kept;
}

}  // namespace cfl::eval
