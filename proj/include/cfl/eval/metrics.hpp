#pragma once

#include <optional>
#include <set>
#include <string>
#include <vector>

#include "cfl/mil/instrument.hpp"
#include "cfl/profile.hpp"
#include "cfl/score/ranking.hpp"

namespace cfl::eval {

struct FaultSpec {
    std::string program_id;
    std::string fault_id;
    std::set<int> faulty_lines;
    std::string description;
    // seeding mutation, when the fault came from seed_faults
    std::string op;
    std::string original_text;
    std::string mutated_text;
};

// Percentage of ranked elements examined before the fault, assuming half of a
// tie group is examined: (strictly_above + tie_group/2) / total * 100.
// Unranked faults cost 100.
double exam_score(const Ranking& ranking, const FaultSpec& fault);

// Average-rank position of the best faulty element: strictly_above + (tie+1)/2.
// Returns nullopt when no faulty line is ranked.
std::optional<double> effective_rank(const Ranking& ranking, const FaultSpec& fault);

// Number of per-version ranks (average-rank tie handling) that are <= N.
size_t hit_at_n(const std::vector<double>& ranks, double n);

struct ImbalanceResult {
    bool defined = false;  // false: one treatment group empty or no numeric covariates
    double raw = 0.0;      // mean over covariates of |mean difference|
    double standardized = 0.0;  // gaps divided by pooled std first
    size_t covariates = 0;
};

// Covariate imbalance of a predicate site: both treatment groups (true/false)
// over runs where the predicate fired, numeric covariates only (booleans and
// strings excluded). Standardized gaps cap at 1e6 when a pooled std is zero
// but the group means differ.
ImbalanceResult covariate_imbalance(const ProfileMatrix& profiles, const mil::SiteTable& sites,
                                    int predicate_site);

// Pearson-style candidate lines for a fault of omission at `line`: the lines
// directly before and after the omission point plus the nearest enclosing
// predicate line, restricted to lines that exist in the site table.
std::set<int> omission_candidates(const mil::SiteTable& sites, int line);

// Nearest ranked line to any faulty line (absolute distance, earlier line on
// ties); used to score predicate switching against non-predicate faults.
std::optional<int> nearest_ranked_line(const Ranking& ranking, const std::set<int>& lines);

}  // namespace cfl::eval
