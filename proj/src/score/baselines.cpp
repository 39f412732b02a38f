#include "cfl/score/baselines.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

#include "cfl/support/parallel.hpp"
#include "cfl/support/stats.hpp"

namespace cfl {

using mil::Value;

SpectraCounts spectra_for_site(const ProfileMatrix& profiles, int site) {
    SpectraCounts c;
    for (const auto& row : profiles.rows) {
        bool covered = row.fired(site);
        if (row.y) (covered ? c.ef : c.nf) += 1;
        else (covered ? c.ep : c.np) += 1;
    }
    return c;
}

double ochiai(const SpectraCounts& c) {
    if (c.ef == 0) return 0.0;
    return c.ef / std::sqrt((c.ef + c.nf) * (c.ef + c.ep));
}

double dstar(const SpectraCounts& c, double star) {
    if (c.ef == 0) return 0.0;
    double denom = c.ep + c.nf;
    if (denom == 0) return std::numeric_limits<double>::infinity();
    return std::pow(c.ef, star) / denom;
}

namespace {

// Solves (X'X) b = X'y, dropping collinear columns in order (later columns
// lose), so the intercept and treatment columns survive when possible.
std::vector<double> solve_normal_equations(std::vector<std::vector<double>> a,
                                           std::vector<double> b) {
    size_t d = b.size();
    std::vector<bool> dropped(d, false);
    std::vector<double> scale(d);
    for (size_t j = 0; j < d; ++j) scale[j] = std::max(std::abs(a[j][j]), 1.0);
    for (size_t j = 0; j < d; ++j) {
        if (std::abs(a[j][j]) <= 1e-10 * scale[j]) {
            dropped[j] = true;
            continue;
        }
        for (size_t i = j + 1; i < d; ++i) {
            if (a[i][j] == 0.0) continue;
            double f = a[i][j] / a[j][j];
            for (size_t k = j; k < d; ++k) a[i][k] -= f * a[j][k];
            b[i] -= f * b[j];
        }
    }
    std::vector<double> beta(d, 0.0);
    for (size_t jj = d; jj-- > 0;) {
        if (dropped[jj]) continue;
        double acc = b[jj];
        for (size_t k = jj + 1; k < d; ++k) acc -= a[jj][k] * beta[k];
        beta[jj] = acc / a[jj][jj];
    }
    return beta;
}

}  // namespace

double baah_lr(const ProfileMatrix& profiles, const mil::SiteTable& sites, int site) {
    size_t n = profiles.rows.size();
    if (n == 0) return 0.0;

    bool t_first = profiles.rows[0].fired(site);
    bool t_constant = true;
    for (const auto& row : profiles.rows)
        if (row.fired(site) != t_first) {
            t_constant = false;
            break;
        }
    if (t_constant) return 0.0;

    // design: intercept, coverage, parent values, parent NA indicators
    const auto& parents = sites.at(site).parents;
    std::vector<size_t> na_parents;
    for (size_t k = 0; k < parents.size(); ++k)
        for (const auto& row : profiles.rows) {
            const Value& v = row.values[static_cast<size_t>(parents[k])];
            if (v.is_na() || !(v.is_numeric() || v.kind() == Value::Kind::Bool)) {
                na_parents.push_back(k);
                break;
            }
        }

    auto numeric_of = [](const Value& v) -> double {
        if (v.is_numeric()) return v.as_float();
        if (v.kind() == Value::Kind::Bool) return v.as_bool() ? 1.0 : 0.0;
        return 0.0;  // strings and NA contribute through the indicator column
    };

    size_t d = 2 + parents.size() + na_parents.size();
    std::vector<double> x(d);
    std::vector<std::vector<double>> xtx(d, std::vector<double>(d, 0.0));
    std::vector<double> xty(d, 0.0);
    for (const auto& row : profiles.rows) {
        x[0] = 1.0;
        x[1] = row.fired(site) ? 1.0 : 0.0;
        for (size_t k = 0; k < parents.size(); ++k)
            x[2 + k] = numeric_of(row.values[static_cast<size_t>(parents[k])]);
        for (size_t m = 0; m < na_parents.size(); ++m) {
            const Value& v = row.values[static_cast<size_t>(parents[na_parents[m]])];
            bool usable = v.is_numeric() || v.kind() == Value::Kind::Bool;
            x[2 + parents.size() + m] = usable ? 0.0 : 1.0;
        }
        double y = static_cast<double>(row.y);
        for (size_t i = 0; i < d; ++i) {
            for (size_t j = i; j < d; ++j) xtx[i][j] += x[i] * x[j];
            xty[i] += x[i] * y;
        }
    }
    for (size_t i = 0; i < d; ++i)
        for (size_t j = 0; j < i; ++j) xtx[i][j] = xtx[j][i];

    std::vector<double> beta = solve_normal_equations(std::move(xtx), std::move(xty));
    return std::max(0.0, beta[1]);
}

double esp_score(const ProfileMatrix& profiles, int site, bool& scored) {
    scored = false;
    std::vector<double> passing, failing;
    for (const auto& row : profiles.rows) {
        const Value& v = row.values[static_cast<size_t>(site)];
        if (v.is_na()) continue;
        double x;
        if (v.is_numeric()) x = v.as_float();
        else if (v.kind() == Value::Kind::Bool) x = v.as_bool() ? 1.0 : 0.0;
        else return 0.0;  // string-valued site: not scored
        (row.y ? failing : passing).push_back(x);
    }
    if (passing.size() < 2 || failing.empty()) return 0.0;
    scored = true;
    double mu = mean_of(passing);
    double sd = sample_std(passing);
    if (sd == 0.0) {
        for (double v : failing)
            if (v != mu) return std::numeric_limits<double>::infinity();
        return 0.0;
    }
    double z_sum = 0.0;
    for (double v : failing) z_sum += (v - mu) / sd;
    return std::abs(z_sum / static_cast<double>(failing.size()));
}

Ranking baseline_ranking(Technique technique, const ProfileMatrix& profiles,
                         const mil::InstrumentedProgram& prog, bool include_phi) {
    std::map<int, double> scores;
    for (const auto& site : prog.sites.sites) {
        if (site.kind == mil::SiteKind::Phi && !include_phi) continue;
        switch (technique) {
            case Technique::Ochiai:
                scores[site.id] = ochiai(spectra_for_site(profiles, site.id));
                break;
            case Technique::DStar:
                scores[site.id] = dstar(spectra_for_site(profiles, site.id));
                break;
            case Technique::Baah:
                scores[site.id] = baah_lr(profiles, prog.sites, site.id);
                break;
            case Technique::Esp: {
                bool ok = false;
                double s = esp_score(profiles, site.id, ok);
                if (ok) scores[site.id] = s;
                break;
            }
            default:
                throw std::invalid_argument("baseline_ranking: unsupported technique");
        }
    }
    return assemble_ranking(scores, prog.sites, include_phi, technique);
}

Ranking predicate_switch(const mil::InstrumentedProgram& prog, const TestSuite& suite,
                         const ProfileMatrix& profiles, const PredicateSwitchOptions& options) {
    std::vector<mil::ConditionSite> preds = mil::collect_condition_sites(prog.ast);

    std::vector<size_t> failing_rows;
    for (size_t r = 0; r < profiles.rows.size(); ++r)
        if (profiles.rows[r].y) failing_rows.push_back(r);

    // (failing test, executed predicate) re-run pairs
    struct Job {
        size_t row;
        size_t pred;
    };
    std::vector<Job> jobs;
    for (size_t r : failing_rows)
        for (size_t p = 0; p < preds.size(); ++p)
            if (profiles.rows[r].fired(preds[p].combined_site)) jobs.push_back({r, p});

    std::vector<char> fixed(jobs.size(), 0);
    parallel_for(jobs.size(), options.jobs, [&](size_t i) {
        const Job& job = jobs[i];
        const ProfileRow& row = profiles.rows[job.row];
        const TestCase* test = nullptr;
        for (const auto& t : suite.tests)
            if (t.id == row.test_id) {
                test = &t;
                break;
            }
        if (!test) return;
        std::set<int> forced{preds[job.pred].ordinal};
        mil::ExecOptions exec;
        exec.step_limit = options.step_limit;
        exec.forced_negate = &forced;
        mil::ExecutionResult result = mil::execute(prog.ast, test->args, exec);
        fixed[i] = oracle_passes(*test, result) ? 1 : 0;
    });

    std::map<int, double> fixes;  // combined site -> fixed count
    for (size_t i = 0; i < jobs.size(); ++i)
        if (fixed[i]) fixes[preds[jobs[i].pred].combined_site] += 1.0;

    double n_failing = static_cast<double>(failing_rows.size());
    std::map<int, std::vector<size_t>> by_line;  // line -> pred indices
    for (size_t p = 0; p < preds.size(); ++p) by_line[preds[p].line].push_back(p);

    Ranking ranking;
    for (const auto& [line, idxs] : by_line) {
        RankingEntry entry;
        entry.line = line;
        entry.kind = RankingEntry::Kind::Predicate;
        entry.technique = technique_name(Technique::PredSwitch);
        entry.score = 0.0;
        for (size_t p : idxs) {
            entry.site_ids.push_back(preds[p].combined_site);
            auto it = fixes.find(preds[p].combined_site);
            if (it != fixes.end() && n_failing > 0)
                entry.score = std::max(entry.score, it->second / n_failing);
        }
        std::sort(entry.site_ids.begin(), entry.site_ids.end());
        ranking.entries.push_back(std::move(entry));
    }
    std::stable_sort(ranking.entries.begin(), ranking.entries.end(),
                     [](const RankingEntry& a, const RankingEntry& b) {
                         if (a.score != b.score) return a.score > b.score;
                         return a.line < b.line;
                     });
    return ranking;
}

}  // namespace cfl
