#include "cfl/eval/metrics.hpp"

#include <algorithm>
#include <cmath>

#include "cfl/support/log.hpp"
#include "cfl/support/stats.hpp"

namespace cfl::eval {

using mil::Value;

namespace {

// index of the best-ranked faulty entry, or -1
int best_faulty_index(const Ranking& ranking, const FaultSpec& fault) {
    for (size_t i = 0; i < ranking.entries.size(); ++i)
        if (fault.faulty_lines.count(ranking.entries[i].line)) return static_cast<int>(i);
    return -1;
}

void tie_group(const Ranking& ranking, int index, size_t& above, size_t& ties) {
    double score = ranking.entries[static_cast<size_t>(index)].score;
    above = 0;
    ties = 0;
    for (const auto& e : ranking.entries) {
        if (e.score > score) ++above;
        else if (e.score == score) ++ties;
    }
}

}  // namespace

double exam_score(const Ranking& ranking, const FaultSpec& fault) {
    if (ranking.entries.empty()) return 100.0;
    int idx = best_faulty_index(ranking, fault);
    if (idx < 0) {
        log::warn("fault '" + fault.fault_id + "' not present in ranking; EXAM = 100");
        return 100.0;
    }
    size_t above = 0, ties = 0;
    tie_group(ranking, idx, above, ties);
    double total = static_cast<double>(ranking.entries.size());
    return (static_cast<double>(above) + static_cast<double>(ties) / 2.0) / total * 100.0;
}

std::optional<double> effective_rank(const Ranking& ranking, const FaultSpec& fault) {
    int idx = best_faulty_index(ranking, fault);
    if (idx < 0) return std::nullopt;
    size_t above = 0, ties = 0;
    tie_group(ranking, idx, above, ties);
    return static_cast<double>(above) + (static_cast<double>(ties) + 1.0) / 2.0;
}

size_t hit_at_n(const std::vector<double>& ranks, double n) {
    size_t count = 0;
    for (double r : ranks)
        if (r <= n) ++count;
    return count;
}

ImbalanceResult covariate_imbalance(const ProfileMatrix& profiles, const mil::SiteTable& sites,
                                    int predicate_site) {
    ImbalanceResult result;
    const mil::Site& site = sites.at(predicate_site);
    size_t s = static_cast<size_t>(predicate_site);

    std::vector<size_t> rows;
    for (size_t r = 0; r < profiles.rows.size(); ++r)
        if (profiles.rows[r].fired(predicate_site)) rows.push_back(r);

    bool any_true = false, any_false = false;
    for (size_t r : rows) {
        const Value& v = profiles.rows[r].values[s];
        if (v.kind() != Value::Kind::Bool) return result;  // not a boolean treatment
        (v.as_bool() ? any_true : any_false) = true;
    }
    if (!any_true || !any_false) return result;

    double raw_sum = 0.0, std_sum = 0.0;
    size_t used = 0;
    for (size_t k = 0; k < site.parents.size(); ++k) {
        std::vector<double> g_true, g_false;
        bool numeric = true;
        for (size_t r : rows) {
            const Value& v = profiles.rows[r].covs[s][k];
            if (v.is_na()) continue;
            if (!v.is_numeric()) {  // booleans and strings are excluded
                numeric = false;
                break;
            }
            (profiles.rows[r].values[s].as_bool() ? g_true : g_false).push_back(v.as_float());
        }
        if (!numeric || g_true.empty() || g_false.empty()) continue;
        double diff = std::abs(mean_of(g_true) - mean_of(g_false));
        double n1 = static_cast<double>(g_true.size());
        double n0 = static_cast<double>(g_false.size());
        double s1 = sample_std(g_true), s0 = sample_std(g_false);
        double pooled = 0.0;
        if (n1 + n0 > 2)
            pooled = std::sqrt(((n1 - 1) * s1 * s1 + (n0 - 1) * s0 * s0) / (n1 + n0 - 2));
        double standardized;
        if (pooled > 0) standardized = diff / pooled;
        else standardized = diff == 0.0 ? 0.0 : 1e6;
        raw_sum += diff;
        std_sum += std::min(standardized, 1e6);
        ++used;
    }
    if (used == 0) return result;
    result.defined = true;
    result.raw = raw_sum / static_cast<double>(used);
    result.standardized = std_sum / static_cast<double>(used);
    result.covariates = used;
    return result;
}

std::set<int> omission_candidates(const mil::SiteTable& sites, int line) {
    std::set<int> existing;
    int enclosing_predicate = 0;
    int best_distance = 0;
    for (const auto& site : sites.sites) {
        existing.insert(site.line);
        if (site.kind == mil::SiteKind::Predicate && site.line < line) {
            int d = line - site.line;
            if (enclosing_predicate == 0 || d < best_distance) {
                enclosing_predicate = site.line;
                best_distance = d;
            }
        }
    }
    std::set<int> out;
    auto add_if_present = [&](int l) {
        if (existing.count(l)) out.insert(l);
    };
    add_if_present(line - 1);
    add_if_present(line);
    add_if_present(line + 1);
    if (enclosing_predicate > 0) out.insert(enclosing_predicate);
    return out;
}

std::optional<int> nearest_ranked_line(const Ranking& ranking, const std::set<int>& lines) {
    std::optional<int> best;
    int best_distance = 0;
    for (const auto& e : ranking.entries) {
        for (int fault_line : lines) {
            int d = std::abs(e.line - fault_line);
            if (!best || d < best_distance || (d == best_distance && e.line < *best)) {
                best = e.line;
                best_distance = d;
            }
        }
    }
    return best;
}

}  // namespace cfl::eval
