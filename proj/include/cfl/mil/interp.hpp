#pragma once

#include <cstdint>
#include <functional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "cfl/mil/ast.hpp"
#include "cfl/mil/value.hpp"

namespace cfl::mil {

enum class ExecStatus { Completed, AssertionFailed, RuntimeError };
enum class RuntimeErrorKind { None, DivByZero, BadCast, StepLimit };

struct ExecutionResult {
    std::string stdout_text;
    ExecStatus status = ExecStatus::Completed;
    RuntimeErrorKind error = RuntimeErrorKind::None;
    std::string message;
    int64_t steps = 0;

    bool completed() const { return status == ExecStatus::Completed; }
};

// Fired at each instrumented assignment with the site id and assigned value.
// Call order is deterministic for a given (ast, args, options).
using RecordHook = std::function<void(int site_id, const Value&)>;

struct ExecOptions {
    int64_t step_limit = 10'000'000;  // bounds forced-predicate divergence
    int max_call_depth = 256;
    RecordHook hook;
    // Predicate ordinals whose combined P<k>_0 value is negated on every
    // dynamic evaluation (predicate switching).
    const std::set<int>* forced_negate = nullptr;
};

// Caller-side misuse: missing main, argument arity/type mismatch.
struct ExecSetupError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Runs main on the given arguments. Deterministic: identical inputs yield an
// identical result and hook sequence. Step accounting counts one step per
// executed statement or condition evaluation of the *original* program shape;
// instrumentation-inserted phi records are free, so transformed programs hit
// step_limit exactly when the original does.
ExecutionResult execute(const Ast& ast, const std::vector<Value>& args, const ExecOptions& options = {});

const char* runtime_error_name(RuntimeErrorKind kind);
const char* status_name(ExecStatus status);

}  // namespace cfl::mil
