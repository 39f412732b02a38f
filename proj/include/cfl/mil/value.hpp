#pragma once

#include <cstdint>
#include <string>
#include <utility>

#include "cfl/support/numfmt.hpp"

namespace cfl::mil {

// Runtime value. NA never results from MIL evaluation; it marks sites that
// were not executed in a run (instrumentation bookkeeping only).
class Value {
  public:
    enum class Kind { Int, Float, Bool, Str, NA };

    Value() : kind_(Kind::NA) {}
    static Value na() { return Value(); }
    static Value of_int(int64_t v) {
        Value x;
        x.kind_ = Kind::Int;
        x.int_ = v;
        return x;
    }
    static Value of_float(double v) {
        Value x;
        x.kind_ = Kind::Float;
        x.float_ = v;
        return x;
    }
    static Value of_bool(bool v) {
        Value x;
        x.kind_ = Kind::Bool;
        x.bool_ = v;
        return x;
    }
    static Value of_str(std::string v) {
        Value x;
        x.kind_ = Kind::Str;
        x.str_ = std::move(v);
        return x;
    }

    Kind kind() const { return kind_; }
    bool is_na() const { return kind_ == Kind::NA; }
    bool is_numeric() const { return kind_ == Kind::Int || kind_ == Kind::Float; }
    int64_t as_int() const { return int_; }
    double as_float() const { return kind_ == Kind::Int ? static_cast<double>(int_) : float_; }
    bool as_bool() const { return bool_; }
    const std::string& as_str() const { return str_; }

    // Exact, kind-sensitive equality (Int 1 != Float 1.0); used by profiles
    // and rep-set bookkeeping, not by MIL `==`.
    bool operator==(const Value& o) const {
        if (kind_ != o.kind_) return false;
        switch (kind_) {
            case Kind::Int: return int_ == o.int_;
            case Kind::Float: return float_ == o.float_;
            case Kind::Bool: return bool_ == o.bool_;
            case Kind::Str: return str_ == o.str_;
            case Kind::NA: return true;
        }
        return false;
    }
    bool operator!=(const Value& o) const { return !(*this == o); }

    // Canonical ordering for deterministic iteration: by kind tag, then value.
    bool operator<(const Value& o) const {
        if (kind_ != o.kind_) return static_cast<int>(kind_) < static_cast<int>(o.kind_);
        switch (kind_) {
            case Kind::Int: return int_ < o.int_;
            case Kind::Float: return float_ < o.float_;
            case Kind::Bool: return bool_ < o.bool_;
            case Kind::Str: return str_ < o.str_;
            case Kind::NA: return false;
        }
        return false;
    }

    // Rendering used by str() casts and print.
    std::string display() const {
        switch (kind_) {
            case Kind::Int: return format_int(int_);
            case Kind::Float: return format_double(float_);
            case Kind::Bool: return bool_ ? "true" : "false";
            case Kind::Str: return str_;
            case Kind::NA: return "NA";
        }
        return "NA";
    }

    // Type-tagged form; distinct values of different kinds never collide.
    std::string tagged() const {
        switch (kind_) {
            case Kind::Int: return "i:" + format_int(int_);
            case Kind::Float: return "f:" + format_double(float_);
            case Kind::Bool: return bool_ ? "b:true" : "b:false";
            case Kind::Str: return "s:" + str_;
            case Kind::NA: return "na";
        }
        return "na";
    }

  private:
    Kind kind_;
    int64_t int_ = 0;
    double float_ = 0.0;
    bool bool_ = false;
    std::string str_;
};

}  // namespace cfl::mil
