#pragma once

#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "cfl/mil/instrument.hpp"
#include "cfl/mil/value.hpp"
#include "cfl/profile.hpp"
#include "cfl/rf/forest.hpp"
#include "cfl/score/ranking.hpp"

namespace cfl {

// How a profile column behaves as model data.
enum class ValueClass { Boolean, Numeric, String, Mixed };

ValueClass classify_values(const std::vector<mil::Value>& values);

// Representative treatment values at which counterfactual means are taken.
struct RepSet {
    int site_id = -1;
    enum class Kind { Boolean, Categorical, NumericQuantile, StringCluster } kind = Kind::Boolean;
    std::vector<mil::Value> values;  // distinct, deterministic order
};

// Booleans and categoricals: all recorded values. Numerics: the 0.05,
// 0.15, ..., 0.95 linear-interpolation quantiles, duplicates collapsed.
// Strings: DBSCAN (MinPts 2, eps from the knee of the 1-NN distance curve,
// falling back to the median pairwise distance) over the OSA distance matrix
// of distinct values; each cluster contributes its medoid and each noise
// point itself.
//
// Throws std::invalid_argument when the column has fewer than two distinct
// values (such sites are omitted from scoring).
RepSet representative_values(const std::vector<mil::Value>& column, int site_id);

// max over pairs of counterfactual-mean differences == max(means) - min(means).
double suspiciousness(const std::vector<double>& means);

struct SiteScore {
    int site_id = -1;
    bool scored = false;
    std::string skip_reason;  // set when not scored
    double score = 0.0;
    RepSet reps;
    std::vector<double> means;  // aligned with reps.values
    double naive_gap = 0.0;     // unadjusted max group-mean difference of Y
    size_t rows_used = 0;
};

struct ScoreOptions {
    uint64_t seed = 42;
    bool include_phi = false;
    int n_trees = 500;
    int mtry = 0;
    int min_node_size = 5;
    int min_rows = 6;  // executions required to fit a model
    unsigned jobs = 1;
    // treatment site -> parent sites excluded from its covariates (ablation
    // experiments; empty in normal runs)
    std::map<int, std::set<int>> ablate_parents;
};

struct ScoreReport {
    Ranking ranking;
    std::vector<SiteScore> sites;  // one per site id
    bool degenerate_outcome = false;

    const SiteScore& site(int id) const { return sites.at(static_cast<size_t>(id)); }
};

// The analysis + localization phases: per eligible site (non-phi unless
// include_phi; >= min_rows executions; >= 2 distinct treatment values) fits a
// forest of Y on (T, parents of T), averages counterfactual predictions at
// the representative treatments over the executions where the site fired, and
// scores the site with the maximum pairwise mean difference. Lines take the
// max over their sites. Scores are always within [0, 1].
ScoreReport score_all(const ProfileMatrix& profiles, const mil::InstrumentedProgram& prog,
                      const ScoreOptions& options = {});

// Exposed for the stratified-standardization oracle tests: means for each rep
// by plugging (t, x_i) into the forest and averaging over rows.
std::vector<double> counterfactual_means(const rf::Forest& forest,
                                         const std::vector<std::vector<rf::Cell>>& covariate_rows,
                                         const RepSet& reps, ValueClass treatment_class);

rf::Cell value_to_cell(const mil::Value& v, ValueClass cls);

}  // namespace cfl
