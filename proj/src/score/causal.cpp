#include "cfl/score/causal.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "cfl/support/dbscan.hpp"
#include "cfl/support/log.hpp"
#include "cfl/support/parallel.hpp"
#include "cfl/support/rng.hpp"
#include "cfl/support/stats.hpp"
#include "cfl/support/stringdist.hpp"

namespace cfl {

using mil::Value;

ValueClass classify_values(const std::vector<Value>& values) {
    bool all_bool = true, all_num = true, all_str = true, any = false;
    for (const auto& v : values) {
        if (v.is_na()) continue;
        any = true;
        all_bool = all_bool && v.kind() == Value::Kind::Bool;
        all_num = all_num && v.is_numeric();
        all_str = all_str && v.kind() == Value::Kind::Str;
    }
    if (!any) return ValueClass::Mixed;
    if (all_bool) return ValueClass::Boolean;
    if (all_num) return ValueClass::Numeric;
    if (all_str) return ValueClass::String;
    return ValueClass::Mixed;
}

rf::Cell value_to_cell(const Value& v, ValueClass cls) {
    if (v.is_na()) return rf::Cell::na();
    switch (cls) {
        case ValueClass::Boolean: return rf::Cell::number(v.as_bool() ? 1.0 : 0.0);
        case ValueClass::Numeric: return rf::Cell::number(v.as_float());
        case ValueClass::String: return rf::Cell::of_level(v.as_str());
        case ValueClass::Mixed: return rf::Cell::of_level(v.tagged());
    }
    return rf::Cell::na();
}

namespace {

rf::ColKind col_kind_for(ValueClass cls) {
    switch (cls) {
        case ValueClass::Boolean:
        case ValueClass::Numeric: return rf::ColKind::Numeric;
        default: return rf::ColKind::Categorical;
    }
}

std::vector<Value> distinct_sorted(const std::vector<Value>& values) {
    std::vector<Value> out;
    for (const auto& v : values)
        if (!v.is_na()) out.push_back(v);
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

RepSet string_cluster_reps(const std::vector<Value>& distinct, int site_id) {
    RepSet reps;
    reps.site_id = site_id;
    reps.kind = RepSet::Kind::StringCluster;
    size_t n = distinct.size();
    std::vector<std::vector<double>> dist(n, std::vector<double>(n, 0.0));
    for (size_t i = 0; i < n; ++i)
        for (size_t j = i + 1; j < n; ++j) {
            double d = static_cast<double>(osa_distance(distinct[i].as_str(), distinct[j].as_str()));
            dist[i][j] = d;
            dist[j][i] = d;
        }
    // eps: knee of the ascending nearest-neighbor distances, else the median
    // pairwise distance. MinPts = 2*dim with dim = 1 (one treatment column).
    const size_t min_pts = 2;
    std::vector<double> nn;
    nn.reserve(n);
    for (size_t i = 0; i < n; ++i) {
        double best = 0.0;
        bool any = false;
        for (size_t j = 0; j < n; ++j) {
            if (j == i) continue;
            if (!any || dist[i][j] < best) best = dist[i][j];
            any = true;
        }
        if (any) nn.push_back(best);
    }
    std::sort(nn.begin(), nn.end());
    double eps = 0.0;
    if (!knee_of_curve(nn, eps)) {
        std::vector<double> all;
        for (size_t i = 0; i < n; ++i)
            for (size_t j = i + 1; j < n; ++j) all.push_back(dist[i][j]);
        std::sort(all.begin(), all.end());
        eps = all.empty() ? 0.0 : quantile_sorted(all, 0.5);
    }
    std::vector<int> labels = dbscan_distance_matrix(dist, eps, min_pts);
    int clusters = 0;
    for (int l : labels) clusters = std::max(clusters, l + 1);
    // cluster medoid: min total distance within the cluster, lowest index on ties
    for (int c = 0; c < clusters; ++c) {
        size_t best = 0;
        double best_total = -1.0;
        for (size_t i = 0; i < n; ++i) {
            if (labels[i] != c) continue;
            double total = 0.0;
            for (size_t j = 0; j < n; ++j)
                if (labels[j] == c) total += dist[i][j];
            if (best_total < 0.0 || total < best_total) {
                best_total = total;
                best = i;
            }
        }
        reps.values.push_back(distinct[best]);
    }
    for (size_t i = 0; i < n; ++i)
        if (labels[i] == kDbscanNoise) reps.values.push_back(distinct[i]);
    std::sort(reps.values.begin(), reps.values.end());
    reps.values.erase(std::unique(reps.values.begin(), reps.values.end()), reps.values.end());
    return reps;
}

}  // namespace

RepSet representative_values(const std::vector<Value>& column, int site_id) {
    std::vector<Value> distinct = distinct_sorted(column);
    if (distinct.size() < 2)
        throw std::invalid_argument("treatment column has fewer than two distinct values");
    ValueClass cls = classify_values(column);
    RepSet reps;
    reps.site_id = site_id;
    switch (cls) {
        case ValueClass::Boolean:
            reps.kind = RepSet::Kind::Boolean;
            reps.values = std::move(distinct);
            return reps;
        case ValueClass::Mixed:
            reps.kind = RepSet::Kind::Categorical;
            reps.values = std::move(distinct);
            return reps;
        case ValueClass::String:
            return string_cluster_reps(distinct, site_id);
        case ValueClass::Numeric: {
            reps.kind = RepSet::Kind::NumericQuantile;
            std::vector<double> xs;
            for (const auto& v : column)
                if (!v.is_na()) xs.push_back(v.as_float());
            std::sort(xs.begin(), xs.end());
            for (int k = 0; k < 10; ++k) {
                double q = quantile_sorted(xs, 0.05 + 0.1 * k);
                Value v = Value::of_float(q);
                if (reps.values.empty() || reps.values.back() != v) reps.values.push_back(v);
            }
            return reps;
        }
    }
    return reps;
}

double suspiciousness(const std::vector<double>& means) {
    if (means.size() < 2) return 0.0;
    auto [lo, hi] = std::minmax_element(means.begin(), means.end());
    return *hi - *lo;
}

std::vector<double> counterfactual_means(const rf::Forest& forest,
                                         const std::vector<std::vector<rf::Cell>>& covariate_rows,
                                         const RepSet& reps, ValueClass treatment_class) {
    std::vector<double> means;
    means.reserve(reps.values.size());
    std::vector<rf::Cell> row;
    for (const auto& t : reps.values) {
        rf::Cell treatment = value_to_cell(t, treatment_class);
        double sum = 0.0;
        for (const auto& covs : covariate_rows) {
            row.clear();
            row.push_back(treatment);
            row.insert(row.end(), covs.begin(), covs.end());
            sum += forest.predict(row);
        }
        means.push_back(covariate_rows.empty() ? 0.0 : sum / static_cast<double>(covariate_rows.size()));
    }
    return means;
}

ScoreReport score_all(const ProfileMatrix& profiles, const mil::InstrumentedProgram& prog,
                      const ScoreOptions& options) {
    ScoreReport report;
    size_t n_sites = prog.sites.size();
    report.sites.resize(n_sites);

    size_t failing = profiles.failing();
    if (failing == 0 || failing == profiles.rows.size()) {
        report.degenerate_outcome = true;
        log::warn("profiles lack both passing and failing executions; all scores degenerate to 0");
    }

    parallel_for(n_sites, options.jobs, [&](size_t idx) {
        const mil::Site& site = prog.sites.at(static_cast<int>(idx));
        SiteScore& out = report.sites[idx];
        out.site_id = site.id;
        if (site.kind == mil::SiteKind::Phi && !options.include_phi) {
            out.skip_reason = "phi site excluded";
            return;
        }
        std::vector<size_t> rows;
        for (size_t r = 0; r < profiles.rows.size(); ++r)
            if (profiles.rows[r].fired(site.id)) rows.push_back(r);
        out.rows_used = rows.size();
        if (rows.size() < static_cast<size_t>(options.min_rows)) {
            out.skip_reason = "executed in fewer than min_rows runs";
            return;
        }

        std::vector<Value> treatment;
        treatment.reserve(rows.size());
        for (size_t r : rows) treatment.push_back(profiles.rows[r].values[idx]);
        {
            std::vector<Value> d = treatment;
            std::sort(d.begin(), d.end());
            d.erase(std::unique(d.begin(), d.end()), d.end());
            if (d.size() < 2) {
                out.skip_reason = "fewer than two distinct treatment values";
                return;
            }
        }

        out.reps = representative_values(treatment, site.id);
        ValueClass t_class = classify_values(treatment);

        // unadjusted association: max group-mean difference of Y by observed T
        {
            std::map<std::string, std::pair<double, double>> groups;  // tagged -> (sum, n)
            for (size_t r : rows) {
                auto& g = groups[profiles.rows[r].values[idx].tagged()];
                g.first += profiles.rows[r].y;
                g.second += 1.0;
            }
            double lo = 1.0, hi = 0.0;
            for (auto& [key, g] : groups) {
                double m = g.first / g.second;
                lo = std::min(lo, m);
                hi = std::max(hi, m);
            }
            out.naive_gap = std::max(0.0, hi - lo);
        }

        bool y_constant = true;
        for (size_t i = 1; i < rows.size(); ++i)
            if (profiles.rows[rows[i]].y != profiles.rows[rows[0]].y) {
                y_constant = false;
                break;
            }
        if (y_constant) {
            out.scored = true;
            out.score = 0.0;
            double y0 = static_cast<double>(profiles.rows[rows[0]].y);
            out.means.assign(out.reps.values.size(), y0);
            return;
        }

        // covariates: parents of the treatment site, minus any ablated ones
        const std::vector<int>& parents = site.parents;
        std::vector<size_t> kept;
        const std::set<int>* ablated = nullptr;
        if (auto it = options.ablate_parents.find(site.id); it != options.ablate_parents.end())
            ablated = &it->second;
        for (size_t k = 0; k < parents.size(); ++k)
            if (!ablated || !ablated->count(parents[k])) kept.push_back(k);

        rf::FeatureFrame frame;
        frame.target.reserve(rows.size());
        for (size_t r : rows) frame.target.push_back(static_cast<double>(profiles.rows[r].y));

        rf::Column t_col;
        t_col.name = "T";
        t_col.kind = col_kind_for(t_class);
        for (const auto& v : treatment) t_col.cells.push_back(value_to_cell(v, t_class));
        frame.columns.push_back(std::move(t_col));

        std::vector<ValueClass> cov_classes;
        for (size_t k : kept) {
            std::vector<Value> col_values;
            col_values.reserve(rows.size());
            for (size_t r : rows) col_values.push_back(profiles.rows[r].covs[idx][k]);
            ValueClass cls = classify_values(col_values);
            cov_classes.push_back(cls);
            rf::Column col;
            col.name = prog.sites.at(parents[k]).versioned_name();
            col.kind = col_kind_for(cls);
            for (const auto& v : col_values) col.cells.push_back(value_to_cell(v, cls));
            frame.columns.push_back(std::move(col));
        }

        rf::ForestParams params;
        params.n_trees = options.n_trees;
        params.mtry = options.mtry;
        params.min_node_size = options.min_node_size;
        rf::Forest forest = rf::Forest::fit(frame, params, mix_seed(options.seed, static_cast<uint64_t>(site.id)));

        std::vector<std::vector<rf::Cell>> covariate_rows(rows.size());
        for (size_t i = 0; i < rows.size(); ++i) {
            auto& cells = covariate_rows[i];
            cells.reserve(kept.size());
            for (size_t j = 0; j < kept.size(); ++j)
                cells.push_back(value_to_cell(profiles.rows[rows[i]].covs[idx][kept[j]], cov_classes[j]));
        }
        out.means = counterfactual_means(forest, covariate_rows, out.reps, t_class);
        out.score = std::clamp(suspiciousness(out.means), 0.0, 1.0);
        out.scored = true;
    });

    std::map<int, double> site_scores;
    for (const auto& s : report.sites)
        if (s.scored) site_scores[s.site_id] = s.score;
    report.ranking = assemble_ranking(site_scores, prog.sites, options.include_phi, Technique::UniVal);
    return report;
}

}  // namespace cfl
