#include "cfl/score/ranking.hpp"

#include <algorithm>
#include <sstream>

#include "cfl/support/numfmt.hpp"

namespace cfl {

const char* technique_name(Technique t) {
    switch (t) {
        case Technique::UniVal: return "unival";
        case Technique::Ochiai: return "ochiai";
        case Technique::DStar: return "dstar";
        case Technique::Baah: return "baah";
        case Technique::Esp: return "esp";
        case Technique::PredSwitch: return "predswitch";
    }
    return "unival";
}

bool technique_from_name(const std::string& name, Technique& out) {
    static const std::pair<const char*, Technique> table[] = {
        {"unival", Technique::UniVal}, {"ochiai", Technique::Ochiai},
        {"dstar", Technique::DStar},   {"baah", Technique::Baah},
        {"esp", Technique::Esp},       {"predswitch", Technique::PredSwitch},
    };
    for (auto& [n, t] : table)
        if (name == n) {
            out = t;
            return true;
        }
    return false;
}

Ranking assemble_ranking(const std::map<int, double>& site_scores, const mil::SiteTable& sites,
                         bool include_phi, Technique technique, double unscored) {
    std::map<int, std::vector<int>> by_line;
    for (const auto& site : sites.sites) {
        if (site.kind == mil::SiteKind::Phi && !include_phi) continue;
        by_line[site.line].push_back(site.id);
    }
    Ranking ranking;
    for (auto& [line, ids] : by_line) {
        RankingEntry entry;
        entry.line = line;
        entry.site_ids = ids;
        entry.technique = technique_name(technique);
        entry.score = unscored;
        bool have = false;
        int best_site = -1;
        for (int id : ids) {
            auto it = site_scores.find(id);
            double s = it != site_scores.end() ? it->second : unscored;
            bool better = !have || s > entry.score ||
                          (s == entry.score && sites.at(id).kind == mil::SiteKind::Predicate &&
                           best_site >= 0 && sites.at(best_site).kind != mil::SiteKind::Predicate);
            if (better) {
                entry.score = s;
                best_site = id;
                have = true;
            }
        }
        entry.kind = best_site >= 0 && sites.at(best_site).kind == mil::SiteKind::Predicate
                         ? RankingEntry::Kind::Predicate
                         : RankingEntry::Kind::Assignment;
        ranking.entries.push_back(std::move(entry));
    }
    std::stable_sort(ranking.entries.begin(), ranking.entries.end(),
                     [](const RankingEntry& a, const RankingEntry& b) {
                         if (a.score != b.score) return a.score > b.score;
                         return a.line < b.line;
                     });
    return ranking;
}

std::string ranking_to_csv(const Ranking& ranking, bool header) {
    std::ostringstream out;
    if (header) out << "technique,line,kind,score,site_ids\n";
    for (const auto& e : ranking.entries) {
        out << e.technique << ',' << e.line << ','
            << (e.kind == RankingEntry::Kind::Predicate ? "predicate" : "assignment") << ','
            << format_double(e.score) << ',';
        for (size_t i = 0; i < e.site_ids.size(); ++i) {
            if (i) out << ';';
            out << e.site_ids[i];
        }
        out << '\n';
    }
    return out.str();
}

}  // namespace cfl
