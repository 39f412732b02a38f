#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "cfl/mil/instrument.hpp"
#include "cfl/mil/interp.hpp"
#include "cfl/mil/parser.hpp"
#include "cfl/mil/printer.hpp"
#include "support/program_gen.hpp"

using namespace cfl;
using mil::ExecStatus;
using mil::RuntimeErrorKind;
using mil::Value;

namespace {

mil::Ast parse_ok(const std::string& src) {
    auto r = mil::parse(src);
    REQUIRE_MESSAGE(r.ok(), ("unexpected parse failure: " +
                             (r.errors.empty() ? std::string("?") : r.errors[0].message)));
    return std::move(*r.ast);
}

mil::ExecutionResult run(const std::string& src, std::vector<Value> args = {},
                         int64_t step_limit = 1'000'000) {
    mil::Ast ast = parse_ok(src);
    mil::ExecOptions opts;
    opts.step_limit = step_limit;
    return mil::execute(ast, args, opts);
}

}  // namespace

TEST_CASE("parses a minimal program") {
    mil::Ast ast = parse_ok("fn main(x:int){ print(x+1); }");
    REQUIRE(ast.functions.size() == 1);
    CHECK(ast.functions[0].name == "main");
    REQUIRE(ast.functions[0].body.size() == 1);
    CHECK(ast.functions[0].body[0]->kind == mil::Stmt::Kind::Print);
}

TEST_CASE("parses a compound condition of two conjuncts") {
    mil::Ast ast = parse_ok("fn main(c:int, n:int){ if (0 <= c && c < n) { print(1); } }");
    const auto& stmt = *ast.functions[0].body[0];
    REQUIRE(stmt.kind == mil::Stmt::Kind::If);
    REQUIRE(stmt.cond->kind == mil::Expr::Kind::Binary);
    CHECK(stmt.cond->bin_op == mil::BinOp::And);
    CHECK(stmt.cond->children[0]->bin_op == mil::BinOp::Le);
    CHECK(stmt.cond->children[1]->bin_op == mil::BinOp::Lt);
}

TEST_CASE("syntax error carries line and column") {
    auto r = mil::parse("fn main(){ x = ; }");
    REQUIRE_FALSE(r.ok());
    CHECK(r.errors[0].kind == mil::Diagnostic::Kind::SyntaxError);
    CHECK(r.errors[0].at.line == 1);
    CHECK(r.errors[0].at.col > 1);
}

TEST_CASE("static checks catch the spec'd error classes") {
    auto unresolved = mil::parse("fn main(){ print(y); }");
    REQUIRE_FALSE(unresolved.ok());
    CHECK(unresolved.errors[0].kind == mil::Diagnostic::Kind::UnresolvedVariable);

    // defined on one path only is not definitely assigned
    auto partial = mil::parse("fn main(c:int){ if (c > 0) { x = 1; } print(x); }");
    REQUIRE_FALSE(partial.ok());
    CHECK(partial.errors[0].kind == mil::Diagnostic::Kind::UnresolvedVariable);

    // while bodies may not run at all
    auto loop = mil::parse("fn main(c:int){ while (c > 0) { x = 1; c = c - 1; } print(x); }");
    REQUIRE_FALSE(loop.ok());

    // both arms assigning makes the use valid
    CHECK(mil::parse("fn main(c:int){ if (c > 0) { x = 1; } else { x = 2; } print(x); }").ok());

    auto redecl = mil::parse("fn main(){ let x = 1; let x = 2; }");
    REQUIRE_FALSE(redecl.ok());
    CHECK(redecl.errors[0].kind == mil::Diagnostic::Kind::Redeclaration);

    auto unknown_fn = mil::parse("fn main(){ x = f(1); }");
    REQUIRE_FALSE(unknown_fn.ok());
    CHECK(unknown_fn.errors[0].kind == mil::Diagnostic::Kind::UnknownFunction);

    auto arity = mil::parse("fn f(a:int){ return a; } fn main(){ x = f(1, 2); }");
    REQUIRE_FALSE(arity.ok());
    CHECK(arity.errors[0].kind == mil::Diagnostic::Kind::ArityMismatch);
}

TEST_CASE("executes arithmetic, printing the result") {
    auto r = run("fn main(a:int, b:int){ print(a + b); }",
                 {Value::of_int(3), Value::of_int(4)});
    CHECK(r.status == ExecStatus::Completed);
    CHECK(r.stdout_text == "7\n");
}

TEST_CASE("assert(false) fails the run") {
    auto r = run("fn main(){ assert(false); }");
    CHECK(r.status == ExecStatus::AssertionFailed);
}

TEST_CASE("infinite loop hits the step limit") {
    auto r = run("fn main(){ while (true) { x = 1; } }", {}, 1000);
    CHECK(r.status == ExecStatus::RuntimeError);
    CHECK(r.error == RuntimeErrorKind::StepLimit);
}

TEST_CASE("runtime error kinds") {
    CHECK(run("fn main(a:int){ print(1 / a); }", {Value::of_int(0)}).error ==
          RuntimeErrorKind::DivByZero);
    CHECK(run("fn main(a:int){ print(a % 0); }", {Value::of_int(3)}).error ==
          RuntimeErrorKind::DivByZero);
    CHECK(run("fn main(){ print(int(\"abc\")); }").error == RuntimeErrorKind::BadCast);
    CHECK(run("fn main(){ print(1 + \"x\"); }").error == RuntimeErrorKind::BadCast);
    CHECK(run("fn main(){ if (3) { print(1); } }").error == RuntimeErrorKind::BadCast);
}

TEST_CASE("argument arity and types are checked up front") {
    mil::Ast ast = parse_ok("fn main(a:int){ print(a); }");
    CHECK_THROWS_AS(mil::execute(ast, {}), mil::ExecSetupError);
    CHECK_THROWS_AS(mil::execute(ast, {Value::of_str("x")}), mil::ExecSetupError);
}

TEST_CASE("casts and string operations") {
    CHECK(run("fn main(){ print(int(7.9)); }").stdout_text == "7\n");
    CHECK(run("fn main(){ print(float(3)); }").stdout_text == "3\n");
    CHECK(run("fn main(){ print(int(\"42\") + 1); }").stdout_text == "43\n");
    CHECK(run("fn main(){ print(\"a\" + str(12)); }").stdout_text == "a12\n");
    CHECK(run("fn main(){ print(\"ab\" < \"b\"); }").stdout_text == "true\n");
    CHECK(run("fn main(){ print(str(true)); }").stdout_text == "true\n");
    CHECK(run("fn main(){ print(1.5 + 2); }").stdout_text == "3.5\n");
}

TEST_CASE("short-circuit keeps the right operand untouched") {
    // the division would fault if evaluated
    auto r = run("fn main(a:int){ if (a > 10 && 1 / (a - a) > 0) { print(1); } print(0); }",
                 {Value::of_int(3)});
    CHECK(r.status == ExecStatus::Completed);
    CHECK(r.stdout_text == "0\n");
    auto r2 = run("fn main(a:int){ if (a < 10 || 1 / (a - a) > 0) { print(1); } }",
                  {Value::of_int(3)});
    CHECK(r2.status == ExecStatus::Completed);
    CHECK(r2.stdout_text == "1\n");
}

TEST_CASE("functions, returns, and recursion depth guard") {
    CHECK(run("fn twice(x:int){ return x * 2; } fn main(){ print(twice(21)); }").stdout_text ==
          "42\n");
    auto no_value = run("fn f(){ return; } fn main(){ x = f(); print(x); }");
    CHECK(no_value.error == RuntimeErrorKind::BadCast);
    auto rec = run("fn f(x:int){ return f(x + 1); } fn main(){ print(f(0)); }");
    CHECK(rec.status == ExecStatus::RuntimeError);
}

TEST_CASE("determinism: identical runs, identical hook sequences") {
    testgen::ProgramGen gen(1234);
    std::string src = gen.generate();
    mil::Ast ast = parse_ok(src);
    mil::InstrumentedProgram prog = mil::instrument_program(ast);
    auto trace = [&](const std::vector<Value>& args) {
        std::string log;
        mil::ExecOptions opts;
        opts.hook = [&](int site, const Value& v) {
            log += std::to_string(site) + "=" + v.tagged() + ";";
        };
        auto result = mil::execute(prog.ast, args, opts);
        return log + "|" + result.stdout_text + "|" + mil::status_name(result.status);
    };
    std::vector<Value> args = {Value::of_int(4), Value::of_int(-2)};
    CHECK(trace(args) == trace(args));
}

TEST_CASE("round-trip: parse(render(parse(s))) equals parse(s)") {
    auto canon = [](const std::string& src) {
        auto first = mil::parse(src);
        REQUIRE(first.ok());
        std::string rendered = mil::render(*first.ast);
        auto second = mil::parse(rendered);
        REQUIRE_MESSAGE(second.ok(), ("render produced unparseable output:\n" + rendered));
        CHECK(mil::render(*second.ast) == rendered);
    };
    canon("fn main(a:int){ if (a>1) { print(a); } else { if (a<0) { print(0); } } }");
    canon("fn main(){ print(-(3) * (2 + 1)); print(!(true && false)); }");
    canon("fn main(){ x = 1.50; y = 2.0; print(float(x) + y); }");
    canon("fn main(){ s = \"a\\n\\\"b\\\"\"; print(s); }");
    canon("fn main(a:int){ print((a < 1) == (a > 1)); }");
    canon("fn main(a:int){ print(a - (1 - a)); print(a % 3 * 2); }");
    for (uint64_t seed = 0; seed < 50; ++seed) {
        testgen::ProgramGen gen(seed);
        canon(gen.generate());
    }
}

TEST_CASE("generated programs always resolve and terminate") {
    for (uint64_t seed = 100; seed < 160; ++seed) {
        testgen::ProgramGen gen(seed);
        std::string src = gen.generate();
        auto r = mil::parse(src);
        REQUIRE_MESSAGE(r.ok(), ("generator produced invalid program (seed " +
                                 std::to_string(seed) + "):\n" + src));
        auto result = mil::execute(*r.ast, gen.random_args());
        CHECK(result.error != RuntimeErrorKind::StepLimit);
        CHECK(result.error != RuntimeErrorKind::BadCast);
        CHECK(result.error != RuntimeErrorKind::DivByZero);
    }
}
