#include "cfl/mil/interp.hpp"

#include <cerrno>
#include <cmath>
#include <cstdlib>
#include <unordered_map>

namespace cfl::mil {

const char* runtime_error_name(RuntimeErrorKind kind) {
    switch (kind) {
        case RuntimeErrorKind::None: return "none";
        case RuntimeErrorKind::DivByZero: return "div_by_zero";
        case RuntimeErrorKind::BadCast: return "bad_cast";
        case RuntimeErrorKind::StepLimit: return "step_limit";
    }
    return "none";
}

const char* status_name(ExecStatus status) {
    switch (status) {
        case ExecStatus::Completed: return "completed";
        case ExecStatus::AssertionFailed: return "assertion_failed";
        case ExecStatus::RuntimeError: return "runtime_error";
    }
    return "completed";
}

namespace {

struct RuntimeSignal {
    RuntimeErrorKind kind;
    std::string message;
};

struct AssertSignal {};

[[noreturn]] void fail(RuntimeErrorKind kind, std::string msg) {
    throw RuntimeSignal{kind, std::move(msg)};
}

using Env = std::unordered_map<std::string, Value>;

class Interp {
  public:
    Interp(const Ast& ast, const ExecOptions& options) : ast_(ast), options_(options) {
        steps_left_ = options.step_limit;
    }

    ExecutionResult run(const std::vector<Value>& args) {
        const FunctionDecl* main_fn = ast_.find_function("main");
        if (!main_fn) throw ExecSetupError("program has no 'main' function");
        if (args.size() != main_fn->params.size())
            throw ExecSetupError("main expects " + std::to_string(main_fn->params.size()) +
                                 " argument(s), got " + std::to_string(args.size()));
        for (size_t i = 0; i < args.size(); ++i) {
            if (!arg_matches(main_fn->params[i].type, args[i]))
                throw ExecSetupError("argument " + std::to_string(i + 1) + " does not match type '" +
                                     type_text(main_fn->params[i].type) + "'");
        }
        ExecutionResult result;
        try {
            Value ignored;
            call_function(*main_fn, args, ignored);
        } catch (const RuntimeSignal& sig) {
            result.status = ExecStatus::RuntimeError;
            result.error = sig.kind;
            result.message = sig.message;
        } catch (const AssertSignal&) {
            result.status = ExecStatus::AssertionFailed;
            result.message = "assertion failed";
        }
        result.stdout_text = std::move(out_);
        result.steps = options_.step_limit - steps_left_;
        return result;
    }

  private:
    const Ast& ast_;
    const ExecOptions& options_;
    std::string out_;
    int64_t steps_left_ = 0;
    int depth_ = 0;

    static bool arg_matches(TypeName t, const Value& v) {
        switch (t) {
            case TypeName::Int: return v.kind() == Value::Kind::Int;
            case TypeName::Float: return v.kind() == Value::Kind::Float;
            case TypeName::Bool: return v.kind() == Value::Kind::Bool;
            case TypeName::Str: return v.kind() == Value::Kind::Str;
        }
        return false;
    }

    void step() {
        if (--steps_left_ < 0) fail(RuntimeErrorKind::StepLimit, "step limit exceeded");
    }

    void record(int site_id, const Value& v) {
        if (site_id >= 0 && options_.hook) options_.hook(site_id, v);
    }

    enum class Flow { Normal, Returned };

    // Returns true when the callee executed `return <expr>`.
    bool call_function(const FunctionDecl& fn, const std::vector<Value>& args, Value& out) {
        if (++depth_ > options_.max_call_depth)
            fail(RuntimeErrorKind::StepLimit, "call depth limit exceeded");
        Env env;
        for (size_t i = 0; i < fn.params.size(); ++i) {
            env[fn.params[i].name] = args[i];
            if (i < fn.param_site_ids.size()) record(fn.param_site_ids[i], args[i]);
        }
        Value ret;
        bool has_value = false;
        Flow flow = exec_body(fn.body, env, ret, has_value);
        --depth_;
        if (flow == Flow::Returned && has_value) {
            out = std::move(ret);
            return true;
        }
        return false;
    }

    Flow exec_body(const std::vector<StmtPtr>& body, Env& env, Value& ret, bool& has_value) {
        for (const auto& s : body) {
            Flow flow = exec_stmt(*s, env, ret, has_value);
            if (flow == Flow::Returned) return flow;
        }
        return Flow::Normal;
    }

    Flow exec_stmt(const Stmt& s, Env& env, Value& ret, bool& has_value) {
        switch (s.kind) {
            case Stmt::Kind::Assign: {
                step();
                Value v = eval(*s.value, env);
                record(s.site_id, v);
                env[s.target] = std::move(v);
                return Flow::Normal;
            }
            case Stmt::Kind::Print: {
                step();
                Value v = eval(*s.value, env);
                out_ += v.display();
                out_ += '\n';
                return Flow::Normal;
            }
            case Stmt::Kind::Assert: {
                step();
                Value v = eval(*s.value, env);
                if (v.kind() != Value::Kind::Bool)
                    fail(RuntimeErrorKind::BadCast, "assert expects a bool");
                if (!v.as_bool()) throw AssertSignal{};
                return Flow::Normal;
            }
            case Stmt::Kind::ExprStmt: {
                step();
                eval(*s.value, env);
                return Flow::Normal;
            }
            case Stmt::Kind::Return: {
                step();
                if (s.value) {
                    ret = eval(*s.value, env);
                    has_value = true;
                } else {
                    has_value = false;
                }
                return Flow::Returned;
            }
            case Stmt::Kind::If: {
                step();
                bool taken = eval_condition(s, env);
                Flow flow = taken ? exec_body(s.body, env, ret, has_value)
                                  : exec_body(s.else_body, env, ret, has_value);
                if (flow == Flow::Returned) return flow;
                record_phis(s.merge_phis, env);
                return Flow::Normal;
            }
            case Stmt::Kind::While: {
                for (;;) {
                    record_phis(s.entry_phis, env);
                    step();
                    if (!eval_condition(s, env)) break;
                    Flow flow = exec_body(s.body, env, ret, has_value);
                    if (flow == Flow::Returned) return flow;
                }
                record_phis(s.exit_phis, env);
                return Flow::Normal;
            }
        }
        return Flow::Normal;
    }

    void record_phis(const std::vector<PhiRecord>& phis, Env& env) {
        for (const auto& p : phis) {
            auto it = env.find(p.var);
            record(p.site_id, it == env.end() ? Value::na() : it->second);
        }
    }

    bool eval_condition(const Stmt& s, Env& env) {
        if (!s.lowered) {
            Value v = eval(*s.cond, env);
            if (v.kind() != Value::Kind::Bool)
                fail(RuntimeErrorKind::BadCast, "condition must be a bool");
            return v.as_bool();
        }
        const LoweredCond& lc = *s.lowered;
        bool forced = options_.forced_negate && options_.forced_negate->count(lc.ordinal) > 0;
        bool combined;
        if (lc.comb == LoweredCond::Comb::Single) {
            combined = eval_atom(lc.atoms[0], env, /*record_atom=*/false);
        } else {
            bool stop_on = lc.comb == LoweredCond::Comb::Or;  // short-circuit value
            combined = !stop_on;
            for (const auto& atom : lc.atoms) {
                bool v = eval_atom(atom, env, /*record_atom=*/true);
                if (v == stop_on) {
                    combined = stop_on;
                    break;
                }
            }
        }
        if (forced) combined = !combined;
        Value cv = Value::of_bool(combined);
        env[lc.combined_var] = cv;
        record(lc.combined_site_id, cv);
        return combined;
    }

    bool eval_atom(const LoweredCond::Atom& atom, Env& env, bool record_atom) {
        Value v = eval(*atom.expr, env);
        if (v.kind() != Value::Kind::Bool)
            fail(RuntimeErrorKind::BadCast, "condition must be a bool");
        if (record_atom) {
            env[atom.var] = v;
            record(atom.site_id, v);
        }
        return v.as_bool();
    }

    Value eval(const Expr& e, Env& env) {
        switch (e.kind) {
            case Expr::Kind::IntLit: return Value::of_int(e.int_val);
            case Expr::Kind::FloatLit: return Value::of_float(e.float_val);
            case Expr::Kind::BoolLit: return Value::of_bool(e.bool_val);
            case Expr::Kind::StrLit: return Value::of_str(e.str_val);
            case Expr::Kind::Var: {
                auto it = env.find(e.name);
                if (it == env.end())
                    throw std::logic_error("unbound variable '" + e.name +
                                           "' escaped static checking");
                return it->second;
            }
            case Expr::Kind::Unary: {
                if (e.un_op == UnOp::Not) {
                    Value v = eval(*e.children[0], env);
                    if (v.kind() != Value::Kind::Bool)
                        fail(RuntimeErrorKind::BadCast, "'!' expects a bool");
                    return Value::of_bool(!v.as_bool());
                }
                Value v = eval(*e.children[0], env);
                if (v.kind() == Value::Kind::Int)
                    return Value::of_int(static_cast<int64_t>(0 - static_cast<uint64_t>(v.as_int())));
                if (v.kind() == Value::Kind::Float) return Value::of_float(-v.as_float());
                fail(RuntimeErrorKind::BadCast, "unary '-' expects a number");
            }
            case Expr::Kind::Cast: return eval_cast(e, env);
            case Expr::Kind::Call: {
                const FunctionDecl* fn = ast_.find_function(e.name);
                if (!fn) throw std::logic_error("unknown function escaped static checking");
                std::vector<Value> args;
                args.reserve(e.children.size());
                for (const auto& a : e.children) args.push_back(eval(*a, env));
                Value out;
                if (!call_function(*fn, args, out))
                    fail(RuntimeErrorKind::BadCast,
                         "function '" + e.name + "' returned no value");
                return out;
            }
            case Expr::Kind::Binary: return eval_binary(e, env);
        }
        fail(RuntimeErrorKind::BadCast, "unreachable expression kind");
    }

    Value eval_cast(const Expr& e, Env& env) {
        Value v = eval(*e.children[0], env);
        switch (e.cast) {
            case CastKind::Int:
                switch (v.kind()) {
                    case Value::Kind::Int: return v;
                    case Value::Kind::Float: {
                        double d = v.as_float();
                        if (!std::isfinite(d) || d >= 9.224e18 || d <= -9.224e18)
                            fail(RuntimeErrorKind::BadCast, "float out of int range");
                        return Value::of_int(static_cast<int64_t>(d));
                    }
                    case Value::Kind::Bool: return Value::of_int(v.as_bool() ? 1 : 0);
                    case Value::Kind::Str: {
                        const std::string& s = v.as_str();
                        char* end = nullptr;
                        errno = 0;
                        long long parsed = std::strtoll(s.c_str(), &end, 10);
                        if (errno != 0 || end != s.c_str() + s.size() || s.empty())
                            fail(RuntimeErrorKind::BadCast, "cannot parse '" + s + "' as int");
                        return Value::of_int(parsed);
                    }
                    default: break;
                }
                break;
            case CastKind::Float:
                switch (v.kind()) {
                    case Value::Kind::Int: return Value::of_float(static_cast<double>(v.as_int()));
                    case Value::Kind::Float: return v;
                    case Value::Kind::Bool: return Value::of_float(v.as_bool() ? 1.0 : 0.0);
                    case Value::Kind::Str: {
                        const std::string& s = v.as_str();
                        char* end = nullptr;
                        errno = 0;
                        double parsed = std::strtod(s.c_str(), &end);
                        if (errno != 0 || end != s.c_str() + s.size() || s.empty())
                            fail(RuntimeErrorKind::BadCast, "cannot parse '" + s + "' as float");
                        return Value::of_float(parsed);
                    }
                    default: break;
                }
                break;
            case CastKind::Str:
                return Value::of_str(v.display());
        }
        fail(RuntimeErrorKind::BadCast, "invalid cast operand");
    }

    Value eval_binary(const Expr& e, Env& env) {
        BinOp op = e.bin_op;
        if (op == BinOp::And || op == BinOp::Or) {
            Value lhs = eval(*e.children[0], env);
            if (lhs.kind() != Value::Kind::Bool)
                fail(RuntimeErrorKind::BadCast, "logical operator expects bools");
            // short-circuit: the right operand is untouched when decided
            if (op == BinOp::And && !lhs.as_bool()) return Value::of_bool(false);
            if (op == BinOp::Or && lhs.as_bool()) return Value::of_bool(true);
            Value rhs = eval(*e.children[1], env);
            if (rhs.kind() != Value::Kind::Bool)
                fail(RuntimeErrorKind::BadCast, "logical operator expects bools");
            return Value::of_bool(rhs.as_bool());
        }

        Value lhs = eval(*e.children[0], env);
        Value rhs = eval(*e.children[1], env);

        auto both = [&](Value::Kind k) { return lhs.kind() == k && rhs.kind() == k; };
        bool numeric = lhs.is_numeric() && rhs.is_numeric();
        bool int_pair = both(Value::Kind::Int);

        switch (op) {
            case BinOp::Add:
                if (both(Value::Kind::Str)) return Value::of_str(lhs.as_str() + rhs.as_str());
                [[fallthrough]];
            case BinOp::Sub:
            case BinOp::Mul: {
                if (!numeric) fail(RuntimeErrorKind::BadCast, "arithmetic expects numbers");
                if (int_pair) {
                    // wrapping semantics keep overflow deterministic
                    uint64_t a = static_cast<uint64_t>(lhs.as_int());
                    uint64_t b = static_cast<uint64_t>(rhs.as_int());
                    uint64_t r = op == BinOp::Add ? a + b : op == BinOp::Sub ? a - b : a * b;
                    return Value::of_int(static_cast<int64_t>(r));
                }
                double a = lhs.as_float(), b = rhs.as_float();
                return Value::of_float(op == BinOp::Add ? a + b : op == BinOp::Sub ? a - b : a * b);
            }
            case BinOp::Div: {
                if (!numeric) fail(RuntimeErrorKind::BadCast, "arithmetic expects numbers");
                if (int_pair) {
                    int64_t b = rhs.as_int();
                    if (b == 0) fail(RuntimeErrorKind::DivByZero, "division by zero");
                    if (b == -1)
                        return Value::of_int(static_cast<int64_t>(0 - static_cast<uint64_t>(lhs.as_int())));
                    return Value::of_int(lhs.as_int() / b);
                }
                if (rhs.as_float() == 0.0) fail(RuntimeErrorKind::DivByZero, "division by zero");
                return Value::of_float(lhs.as_float() / rhs.as_float());
            }
            case BinOp::Mod: {
                if (!int_pair) fail(RuntimeErrorKind::BadCast, "'%' expects ints");
                int64_t b = rhs.as_int();
                if (b == 0) fail(RuntimeErrorKind::DivByZero, "modulo by zero");
                if (b == -1) return Value::of_int(0);
                return Value::of_int(lhs.as_int() % b);
            }
            case BinOp::Eq:
            case BinOp::Ne: {
                bool eq;
                if (int_pair) eq = lhs.as_int() == rhs.as_int();
                else if (numeric) eq = lhs.as_float() == rhs.as_float();
                else if (both(Value::Kind::Bool)) eq = lhs.as_bool() == rhs.as_bool();
                else if (both(Value::Kind::Str)) eq = lhs.as_str() == rhs.as_str();
                else fail(RuntimeErrorKind::BadCast, "'==' operands have incompatible types");
                return Value::of_bool(op == BinOp::Eq ? eq : !eq);
            }
            case BinOp::Lt:
            case BinOp::Le:
            case BinOp::Gt:
            case BinOp::Ge: {
                int cmp;
                if (int_pair) cmp = lhs.as_int() < rhs.as_int() ? -1 : lhs.as_int() == rhs.as_int() ? 0 : 1;
                else if (numeric) cmp = lhs.as_float() < rhs.as_float() ? -1 : lhs.as_float() == rhs.as_float() ? 0 : 1;
                else if (both(Value::Kind::Str)) cmp = lhs.as_str() < rhs.as_str() ? -1 : lhs.as_str() == rhs.as_str() ? 0 : 1;
                else fail(RuntimeErrorKind::BadCast, "comparison operands have incompatible types");
                switch (op) {
                    case BinOp::Lt: return Value::of_bool(cmp < 0);
                    case BinOp::Le: return Value::of_bool(cmp <= 0);
                    case BinOp::Gt: return Value::of_bool(cmp > 0);
                    default: return Value::of_bool(cmp >= 0);
                }
            }
            default:
                break;
        }
        fail(RuntimeErrorKind::BadCast, "unreachable operator");
    }
};

}  // namespace

ExecutionResult execute(const Ast& ast, const std::vector<Value>& args, const ExecOptions& options) {
    return Interp(ast, options).run(args);
}

}  // namespace cfl::mil
