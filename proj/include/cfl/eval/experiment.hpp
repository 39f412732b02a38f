#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "cfl/eval/metrics.hpp"
#include "cfl/eval/mutate.hpp"
#include "cfl/profile.hpp"
#include "cfl/score/ranking.hpp"

namespace cfl::eval {

// corpus/<program>/{program.mil, suite.json[, fault.json][, faults/<id>.mil + <id>.json]}
struct CorpusEntry {
    std::string id;
    std::string dir;
    std::string program_source;
    TestSuite suite;
    std::optional<FaultSpec> self_fault;   // program.mil is itself the faulty version
    std::vector<SeededFault> disk_faults;  // pre-seeded fault versions on disk
};

std::vector<CorpusEntry> load_corpus(const std::string& dir);

FaultSpec fault_spec_from_json(const nlohmann::json& j);
nlohmann::ordered_json fault_spec_to_json(const FaultSpec& spec);

struct ExperimentOptions {
    uint64_t seed = 42;
    int repetitions = 10;
    std::vector<Technique> techniques = {Technique::UniVal, Technique::Ochiai, Technique::DStar,
                                         Technique::Baah,   Technique::Esp,    Technique::PredSwitch};
    unsigned jobs = 1;
    int n_trees = 500;
    int min_rows = 6;
    bool include_phi = false;
    int64_t step_limit = 10'000'000;
    size_t min_failing = 2;              // versions below this are excluded
    size_t max_faults_per_program = 4;   // when seeding in-memory
};

struct VersionResult {
    std::string program;
    std::string fault_id;
    std::vector<int> faulty_lines;
    bool seeded = false;
    bool predicate_fault = false;
    bool confounding_prone = false;  // faulty predicate with downstream dependents
    size_t n_tests = 0;
    size_t n_failing = 0;
    int fault_site = -1;  // combined predicate site at the faulty line, if any
    ImbalanceResult imbalance;
    std::map<std::string, double> exam;           // technique -> mean EXAM over repetitions
    std::map<std::string, double> rank;           // technique -> mean average-rank of the fault
    std::map<std::string, std::vector<double>> exam_reps;  // per-repetition detail
};

struct Exclusion {
    std::string program;
    std::string fault_id;
    std::string reason;
};

struct Report {
    ExperimentOptions config;
    std::vector<VersionResult> versions;
    std::vector<Exclusion> exclusions;
};

// Runs every corpus version x technique cell; repetitions apply to the
// stochastic technique (per-repetition seeds derive from the base seed).
// Output is deterministic for any job count.
Report run_experiment(const std::vector<CorpusEntry>& corpus, const ExperimentOptions& options);

nlohmann::ordered_json report_to_json(const Report& report);
std::string report_to_markdown(const Report& report);
// version,site,imbalance_raw,imbalance_std,exam_unival,exam_ochiai
std::string scatter_csv(const Report& report);

}  // namespace cfl::eval
