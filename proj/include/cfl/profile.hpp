#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "cfl/mil/instrument.hpp"
#include "cfl/mil/interp.hpp"
#include "cfl/mil/value.hpp"

namespace cfl {

struct TestCase {
    std::string id;
    std::vector<mil::Value> args;
    // Present: pass iff run completes and stdout matches exactly.
    // Absent: pass iff run completes.
    std::optional<std::string> expected_stdout;
};

struct TestSuite {
    std::vector<TestCase> tests;
};

struct ProfileRow {
    std::string test_id;
    int y = 0;  // 1 iff the oracle was violated
    // Last value recorded per site; NA when the site never fired.
    std::vector<mil::Value> values;
    // Parent values captured at the last firing, aligned with site.parents;
    // empty for sites that never fired.
    std::vector<std::vector<mil::Value>> covs;

    bool fired(int site) const { return !values[static_cast<size_t>(site)].is_na(); }
};

struct ProfileMatrix {
    size_t n_sites = 0;
    std::vector<ProfileRow> rows;

    size_t failing() const {
        size_t n = 0;
        for (const auto& r : rows) n += static_cast<size_t>(r.y);
        return n;
    }
    size_t passing() const { return rows.size() - failing(); }
};

struct ProfileOptions {
    int64_t step_limit = 10'000'000;
    unsigned jobs = 1;
};

// Executes the instrumented program on every test, one row per test, in suite
// order. Runtime errors are not fatal: the partial profile is kept and the
// row is marked failing. Deterministic for any job count.
ProfileMatrix run_suite(const mil::InstrumentedProgram& prog, const TestSuite& suite,
                        const ProfileOptions& options = {});

// Outcome of one test under the suite oracle (shared with predicate switching).
bool oracle_passes(const TestCase& test, const mil::ExecutionResult& result);

// Suite file: {"tests": [{"id", "args", "expected_stdout"?}, ...]}.
TestSuite parse_suite_json(const std::string& text);
TestSuite load_suite(const std::string& path);
std::string suite_to_json(const TestSuite& suite);

// Profiles: JSON Lines, one object per execution with fields
// test_id, y, sites (site_id -> value | null), covs (site_id -> {parent -> value}).
void write_profiles_jsonl(std::ostream& out, const ProfileMatrix& matrix,
                          const mil::SiteTable& sites);
ProfileMatrix read_profiles_jsonl(std::istream& in, const mil::SiteTable& sites);

struct DataError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace cfl
