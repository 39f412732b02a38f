#pragma once

#include <map>
#include <string>
#include <vector>

#include "cfl/mil/instrument.hpp"

namespace cfl {

enum class Technique { UniVal, Ochiai, DStar, Baah, Esp, PredSwitch };

const char* technique_name(Technique t);
bool technique_from_name(const std::string& name, Technique& out);

struct RankingEntry {
    int line = 0;
    enum class Kind { Predicate, Assignment } kind = Kind::Assignment;
    std::vector<int> site_ids;  // sites on this line, ascending
    double score = 0.0;
    std::string technique;
};

// Sorted non-increasing by score; ties broken by line for stable output.
// Cost metrics re-derive tie groups from equal scores.
struct Ranking {
    std::vector<RankingEntry> entries;
};

// The rankable line universe: lines owning at least one non-phi site
// (assignment, predicate, or param), or any site when include_phi is set.
// All techniques except predicate switching rank this same universe so EXAM
// costs are comparable; unscored lines take score `unscored`.
Ranking assemble_ranking(const std::map<int, double>& site_scores, const mil::SiteTable& sites,
                         bool include_phi, Technique technique, double unscored = 0.0);

// CSV with header technique,line,kind,score,site_ids (site_ids ;-separated).
std::string ranking_to_csv(const Ranking& ranking, bool header = true);

}  // namespace cfl
