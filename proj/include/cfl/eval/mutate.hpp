#pragma once

#include <cstdint>
#include <set>
#include <string>
#include <vector>

#include "cfl/eval/metrics.hpp"
#include "cfl/mil/ast.hpp"
#include "cfl/profile.hpp"

namespace cfl::eval {

enum class MutOp { Relational, Arithmetic, OffByOne, BoolConnective };

const char* mut_op_name(MutOp op);

struct SeedOptions {
    std::set<MutOp> operators = {MutOp::Relational, MutOp::Arithmetic, MutOp::OffByOne,
                                 MutOp::BoolConnective};
    size_t min_failing = 1;      // kill threshold
    bool require_passing = true; // discard mutants that fail the whole suite
    size_t max_mutants = 0;      // 0: unlimited
    int64_t step_limit = 10'000'000;
    unsigned jobs = 1;
};

struct SeededFault {
    std::string id;
    std::string source;  // mutated program text (line numbers preserved)
    FaultSpec spec;
    size_t failing = 0;
    size_t passing = 0;
};

// Single-token textual mutants of `source` (relational swap, arithmetic swap,
// off-by-one constants, &&/|| swap), kept only when they parse and are killed
// by the suite: at least min_failing tests fail under the suite oracle.
// Unkilled or non-compiling mutants are discarded with a log entry.
// Enumeration and ids are deterministic.
std::vector<SeededFault> seed_faults(const std::string& program_id, const std::string& source,
                                     const TestSuite& suite, const SeedOptions& options = {});

}  // namespace cfl::eval
