#include "cfl/eval/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>

#include "cfl/mil/parser.hpp"
#include "cfl/score/baselines.hpp"
#include "cfl/score/causal.hpp"
#include "cfl/support/log.hpp"
#include "cfl/support/numfmt.hpp"
#include "cfl/support/rng.hpp"
#include "cfl/support/stats.hpp"

namespace cfl::eval {

namespace fs = std::filesystem;
using nlohmann::json;
using nlohmann::ordered_json;

FaultSpec fault_spec_from_json(const json& j) {
    FaultSpec spec;
    spec.program_id = j.value("program", "");
    spec.fault_id = j.value("id", "");
    if (j.contains("faulty_lines"))
        for (const auto& l : j["faulty_lines"]) spec.faulty_lines.insert(l.get<int>());
    spec.description = j.value("description", "");
    spec.op = j.value("op", "");
    spec.original_text = j.value("original_text", "");
    spec.mutated_text = j.value("mutated_text", "");
    return spec;
}

ordered_json fault_spec_to_json(const FaultSpec& spec) {
    ordered_json j;
    j["program"] = spec.program_id;
    j["id"] = spec.fault_id;
    j["faulty_lines"] = spec.faulty_lines;
    j["description"] = spec.description;
    if (!spec.op.empty()) {
        j["op"] = spec.op;
        j["original_text"] = spec.original_text;
        j["mutated_text"] = spec.mutated_text;
    }
    return j;
}

namespace {

std::string read_file(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

json read_json_file(const fs::path& path) {
    try {
        return json::parse(read_file(path));
    } catch (const json::exception& e) {
        throw DataError(path.string() + ": " + e.what());
    }
}

}  // namespace

std::vector<CorpusEntry> load_corpus(const std::string& dir) {
    fs::path root(dir);
    if (!fs::is_directory(root)) throw DataError("corpus directory not found: " + dir);
    std::vector<fs::path> subdirs;
    for (const auto& entry : fs::directory_iterator(root))
        if (entry.is_directory() && fs::exists(entry.path() / "program.mil"))
            subdirs.push_back(entry.path());
    std::sort(subdirs.begin(), subdirs.end());

    std::vector<CorpusEntry> corpus;
    for (const auto& sub : subdirs) {
        CorpusEntry entry;
        entry.id = sub.filename().string();
        entry.dir = sub.string();
        entry.program_source = read_file(sub / "program.mil");
        entry.suite = load_suite((sub / "suite.json").string());
        if (fs::exists(sub / "fault.json")) {
            entry.self_fault = fault_spec_from_json(read_json_file(sub / "fault.json"));
            entry.self_fault->program_id = entry.id;
        }
        fs::path faults_dir = sub / "faults";
        if (fs::is_directory(faults_dir)) {
            std::vector<fs::path> fault_files;
            for (const auto& f : fs::directory_iterator(faults_dir))
                if (f.path().extension() == ".mil") fault_files.push_back(f.path());
            std::sort(fault_files.begin(), fault_files.end());
            for (const auto& f : fault_files) {
                fs::path sidecar = f;
                sidecar.replace_extension(".json");
                if (!fs::exists(sidecar)) {
                    log::warn("fault version " + f.string() + " has no sidecar spec; skipped");
                    continue;
                }
                SeededFault sf;
                sf.id = f.stem().string();
                sf.source = read_file(f);
                sf.spec = fault_spec_from_json(read_json_file(sidecar));
                sf.spec.program_id = entry.id;
                if (sf.spec.fault_id.empty()) sf.spec.fault_id = sf.id;
                entry.disk_faults.push_back(std::move(sf));
            }
        }
        corpus.push_back(std::move(entry));
    }
    return corpus;
}

namespace {

constexpr double kUnrankedRank = std::numeric_limits<double>::infinity();

// Spreads seeded faults across source lines, preferring predicate-shaped
// operators so the corpus keeps confounding-prone versions.
std::vector<SeededFault> pick_faults(std::vector<SeededFault> all, size_t cap) {
    auto op_priority = [](const std::string& op) {
        if (op == "relop") return 0;
        if (op == "connective") return 1;
        if (op == "const") return 2;
        return 3;
    };
    std::stable_sort(all.begin(), all.end(), [&](const SeededFault& a, const SeededFault& b) {
        return op_priority(a.spec.op) < op_priority(b.spec.op);
    });
    std::vector<SeededFault> picked;
    std::set<int> used_lines;
    for (auto& f : all) {
        if (picked.size() >= cap) break;
        int line = *f.spec.faulty_lines.begin();
        if (used_lines.count(line)) continue;
        used_lines.insert(line);
        picked.push_back(std::move(f));
    }
    for (auto& f : all) {
        if (picked.size() >= cap) break;
        if (std::any_of(picked.begin(), picked.end(),
                        [&](const SeededFault& p) { return p.id == f.id; }))
            continue;
        picked.push_back(std::move(f));
    }
    std::stable_sort(picked.begin(), picked.end(),
                     [](const SeededFault& a, const SeededFault& b) { return a.id < b.id; });
    return picked;
}

struct VersionJob {
    const CorpusEntry* entry;
    std::string fault_id;
    std::string source;
    FaultSpec spec;
    bool seeded;
};

void evaluate_version(const VersionJob& job, const ExperimentOptions& options, Report& report) {
    auto parsed = mil::parse(job.source);
    if (!parsed.ok()) {
        report.exclusions.push_back({job.entry->id, job.fault_id, "fault version does not parse"});
        return;
    }
    mil::InstrumentedProgram prog = mil::instrument_program(*parsed.ast);
    ProfileOptions profile_opts;
    profile_opts.step_limit = options.step_limit;
    profile_opts.jobs = options.jobs;
    ProfileMatrix profiles = run_suite(prog, job.entry->suite, profile_opts);

    size_t failing = profiles.failing();
    if (failing < options.min_failing) {
        report.exclusions.push_back({job.entry->id, job.fault_id,
                                     "only " + std::to_string(failing) + " failing test(s)"});
        return;
    }
    if (profiles.passing() == 0) {
        report.exclusions.push_back({job.entry->id, job.fault_id, "no passing tests"});
        return;
    }

    VersionResult result;
    result.program = job.entry->id;
    result.fault_id = job.fault_id;
    result.faulty_lines.assign(job.spec.faulty_lines.begin(), job.spec.faulty_lines.end());
    result.seeded = job.seeded;
    result.n_tests = profiles.rows.size();
    result.n_failing = failing;

    // the fault's combined predicate site, when the faulty line hosts one
    auto conditions = mil::collect_condition_sites(prog.ast);
    for (const auto& c : conditions)
        if (job.spec.faulty_lines.count(c.line)) {
            result.predicate_fault = true;
            if (result.fault_site < 0) result.fault_site = c.combined_site;
        }
    if (result.fault_site >= 0) {
        for (const auto& site : prog.sites.sites)
            if (site.id != result.fault_site &&
                std::find(site.parents.begin(), site.parents.end(), result.fault_site) !=
                    site.parents.end()) {
                result.confounding_prone = true;
                break;
            }
        result.imbalance = covariate_imbalance(profiles, prog.sites, result.fault_site);
    }

    for (Technique tech : options.techniques) {
        std::string name = technique_name(tech);
        if (tech == Technique::UniVal) {
            std::vector<double> exams, ranks;
            for (int rep = 0; rep < options.repetitions; ++rep) {
                ScoreOptions so;
                so.seed = mix_seed(options.seed, static_cast<uint64_t>(rep));
                so.n_trees = options.n_trees;
                so.min_rows = options.min_rows;
                so.include_phi = options.include_phi;
                so.jobs = options.jobs;
                ScoreReport sr = score_all(profiles, prog, so);
                exams.push_back(exam_score(sr.ranking, job.spec));
                auto r = effective_rank(sr.ranking, job.spec);
                ranks.push_back(r ? *r : kUnrankedRank);
            }
            result.exam[name] = mean_of(exams);
            result.rank[name] = mean_of(ranks);
            result.exam_reps[name] = std::move(exams);
            continue;
        }
        if (tech == Technique::PredSwitch) {
            PredicateSwitchOptions ps;
            ps.step_limit = options.step_limit;
            ps.jobs = options.jobs;
            Ranking ranking = predicate_switch(prog, job.entry->suite, profiles, ps);
            FaultSpec target = job.spec;
            bool direct = false;
            for (const auto& e : ranking.entries)
                if (target.faulty_lines.count(e.line)) {
                    direct = true;
                    break;
                }
            if (!direct) {
                // the paper's convention: cost of reaching the nearest predicate
                auto nearest = nearest_ranked_line(ranking, target.faulty_lines);
                target.faulty_lines.clear();
                if (nearest) target.faulty_lines.insert(*nearest);
            }
            result.exam[name] = exam_score(ranking, target);
            auto r = effective_rank(ranking, target);
            result.rank[name] = r ? *r : kUnrankedRank;
            continue;
        }
        Ranking ranking = baseline_ranking(tech, profiles, prog, options.include_phi);
        result.exam[name] = exam_score(ranking, job.spec);
        auto r = effective_rank(ranking, job.spec);
        result.rank[name] = r ? *r : kUnrankedRank;
    }
    report.versions.push_back(std::move(result));
}

}  // namespace

Report run_experiment(const std::vector<CorpusEntry>& corpus, const ExperimentOptions& options) {
    Report report;
    report.config = options;
    for (const auto& entry : corpus) {
        std::vector<VersionJob> jobs;
        if (entry.self_fault) {
            jobs.push_back({&entry, "self", entry.program_source, *entry.self_fault, false});
        } else {
            auto original = mil::parse(entry.program_source);
            if (!original.ok()) {
                report.exclusions.push_back({entry.id, "", "program does not parse"});
                continue;
            }
            size_t original_failures = 0;
            for (const auto& test : entry.suite.tests) {
                mil::ExecOptions exec;
                exec.step_limit = options.step_limit;
                if (!oracle_passes(test, mil::execute(*original.ast, test.args, exec)))
                    ++original_failures;
            }
            if (original_failures > 0) {
                report.exclusions.push_back(
                    {entry.id, "", "original program fails its own suite"});
                continue;
            }
            std::vector<SeededFault> faults = entry.disk_faults;
            bool from_disk = !faults.empty();
            if (!from_disk) {
                SeedOptions seed_opts;
                seed_opts.min_failing = options.min_failing;
                seed_opts.step_limit = options.step_limit;
                seed_opts.jobs = options.jobs;
                faults = pick_faults(seed_faults(entry.id, entry.program_source, entry.suite, seed_opts),
                                     options.max_faults_per_program);
            }
            for (auto& f : faults)
                jobs.push_back({&entry, f.id, f.source, f.spec, true});
        }
        for (const auto& job : jobs) evaluate_version(job, options, report);
    }
    return report;
}

namespace {

struct Aggregates {
    std::vector<std::string> techniques;
    std::map<std::string, double> mean_exam;
    std::map<std::string, std::map<std::string, double>> mean_exam_by_program;
    std::map<std::string, size_t> hit5, hit10;
    size_t confounding_versions = 0;
    std::map<std::string, double> confounding_mean_exam;
    // imbalance study over predicate-fault versions with defined imbalance
    std::vector<const VersionResult*> study;
    std::map<std::string, double> spearman_by_technique;
    size_t tercile_size = 0;
    std::map<std::string, double> tercile_mean_exam;
};

Aggregates aggregate(const Report& report) {
    Aggregates agg;
    for (Technique t : report.config.techniques) agg.techniques.push_back(technique_name(t));

    std::map<std::string, std::vector<double>> all_exams;
    std::map<std::string, std::map<std::string, std::vector<double>>> per_program;
    std::map<std::string, std::vector<double>> all_ranks;
    std::map<std::string, std::vector<double>> confounding;
    for (const auto& v : report.versions) {
        if (v.confounding_prone) ++agg.confounding_versions;
        for (const auto& name : agg.techniques) {
            auto it = v.exam.find(name);
            if (it == v.exam.end()) continue;
            all_exams[name].push_back(it->second);
            per_program[v.program][name].push_back(it->second);
            all_ranks[name].push_back(v.rank.at(name));
            if (v.confounding_prone) confounding[name].push_back(it->second);
        }
    }
    for (const auto& name : agg.techniques) {
        if (all_exams.count(name)) {
            agg.mean_exam[name] = mean_of(all_exams[name]);
            agg.hit5[name] = hit_at_n(all_ranks[name], 5.0);
            agg.hit10[name] = hit_at_n(all_ranks[name], 10.0);
        }
        if (confounding.count(name)) agg.confounding_mean_exam[name] = mean_of(confounding[name]);
    }
    for (const auto& [prog, by_tech] : per_program)
        for (const auto& [name, exams] : by_tech)
            agg.mean_exam_by_program[prog][name] = mean_of(exams);

    for (const auto& v : report.versions)
        if (v.predicate_fault && v.imbalance.defined) agg.study.push_back(&v);
    if (agg.study.size() >= 2) {
        std::vector<double> imbalance;
        for (const auto* v : agg.study) imbalance.push_back(v->imbalance.standardized);
        for (const auto& name : agg.techniques) {
            std::vector<double> exams;
            bool complete = true;
            for (const auto* v : agg.study) {
                auto it = v->exam.find(name);
                if (it == v->exam.end()) {
                    complete = false;
                    break;
                }
                exams.push_back(it->second);
            }
            if (complete) agg.spearman_by_technique[name] = spearman(imbalance, exams);
        }
        std::vector<const VersionResult*> sorted = agg.study;
        std::stable_sort(sorted.begin(), sorted.end(), [](const VersionResult* a, const VersionResult* b) {
            return a->imbalance.standardized > b->imbalance.standardized;
        });
        agg.tercile_size = (sorted.size() + 2) / 3;
        for (const auto& name : agg.techniques) {
            std::vector<double> exams;
            for (size_t i = 0; i < agg.tercile_size; ++i) {
                auto it = sorted[i]->exam.find(name);
                if (it != sorted[i]->exam.end()) exams.push_back(it->second);
            }
            if (!exams.empty()) agg.tercile_mean_exam[name] = mean_of(exams);
        }
    }
    return agg;
}

ordered_json round_map(const std::map<std::string, double>& m) {
    ordered_json j = ordered_json::object();
    for (const auto& [k, v] : m) j[k] = v;
    return j;
}

}  // namespace

ordered_json report_to_json(const Report& report) {
    Aggregates agg = aggregate(report);
    ordered_json doc;
    ordered_json config;
    config["seed"] = report.config.seed;
    config["repetitions"] = report.config.repetitions;
    config["techniques"] = agg.techniques;
    config["n_trees"] = report.config.n_trees;
    config["min_rows"] = report.config.min_rows;
    config["min_failing"] = report.config.min_failing;
    config["boolean_covariates_in_imbalance"] = "excluded";
    doc["config"] = std::move(config);

    ordered_json versions = ordered_json::array();
    for (const auto& v : report.versions) {
        ordered_json jv;
        jv["program"] = v.program;
        jv["fault"] = v.fault_id;
        jv["faulty_lines"] = v.faulty_lines;
        jv["seeded"] = v.seeded;
        jv["predicate_fault"] = v.predicate_fault;
        jv["confounding_prone"] = v.confounding_prone;
        jv["n_tests"] = v.n_tests;
        jv["n_failing"] = v.n_failing;
        if (v.fault_site >= 0) jv["fault_site"] = v.fault_site;
        if (v.imbalance.defined) {
            jv["imbalance_raw"] = v.imbalance.raw;
            jv["imbalance_std"] = v.imbalance.standardized;
        }
        ordered_json exam = ordered_json::object();
        ordered_json rank = ordered_json::object();
        for (const auto& [name, value] : v.exam) {
            exam[name] = value;
            double r = v.rank.at(name);
            rank[name] = std::isinf(r) ? ordered_json(nullptr) : ordered_json(r);
        }
        jv["exam"] = std::move(exam);
        jv["rank"] = std::move(rank);
        for (const auto& [name, reps] : v.exam_reps) jv["exam_reps_" + name] = reps;
        versions.push_back(std::move(jv));
    }
    doc["versions"] = std::move(versions);

    ordered_json aggregates;
    aggregates["versions"] = report.versions.size();
    aggregates["mean_exam"] = round_map(agg.mean_exam);
    ordered_json by_program = ordered_json::object();
    for (const auto& [prog, m] : agg.mean_exam_by_program) by_program[prog] = round_map(m);
    aggregates["mean_exam_by_program"] = std::move(by_program);
    ordered_json hits5 = ordered_json::object(), hits10 = ordered_json::object();
    for (const auto& [name, n] : agg.hit5) hits5[name] = n;
    for (const auto& [name, n] : agg.hit10) hits10[name] = n;
    aggregates["hit_at_5"] = std::move(hits5);
    aggregates["hit_at_10"] = std::move(hits10);
    aggregates["confounding_prone_versions"] = agg.confounding_versions;
    aggregates["confounding_prone_mean_exam"] = round_map(agg.confounding_mean_exam);
    ordered_json study;
    study["versions"] = agg.study.size();
    study["spearman_imbalance_vs_exam"] = round_map(agg.spearman_by_technique);
    study["top_imbalance_tercile_size"] = agg.tercile_size;
    study["top_imbalance_tercile_mean_exam"] = round_map(agg.tercile_mean_exam);
    aggregates["imbalance_study"] = std::move(study);
    doc["aggregates"] = std::move(aggregates);

    ordered_json exclusions = ordered_json::array();
    for (const auto& e : report.exclusions) {
        ordered_json je;
        je["program"] = e.program;
        je["fault"] = e.fault_id;
        je["reason"] = e.reason;
        exclusions.push_back(std::move(je));
    }
    doc["exclusions"] = std::move(exclusions);
    return doc;
}

std::string report_to_markdown(const Report& report) {
    Aggregates agg = aggregate(report);
    std::ostringstream md;
    md << "# Fault localization report\n\n";
    md << "Seed " << report.config.seed << ", " << report.config.repetitions
       << " repetition(s), " << report.versions.size() << " fault version(s), "
       << report.exclusions.size() << " exclusion(s).\n\n";

    md << "## Mean EXAM per version\n\n";
    md << "| program | fault | failing";
    for (const auto& name : agg.techniques) md << " | " << name;
    md << " |\n|---|---|---";
    for (size_t i = 0; i < agg.techniques.size(); ++i) md << "|---";
    md << "|\n";
    for (const auto& v : report.versions) {
        md << "| " << v.program << " | " << v.fault_id << " | " << v.n_failing;
        for (const auto& name : agg.techniques) {
            md << " | ";
            auto it = v.exam.find(name);
            if (it != v.exam.end()) md << format_double(it->second);
        }
        md << " |\n";
    }

    md << "\n## Aggregates\n\n";
    md << "| technique | mean EXAM | Hit@5 | Hit@10 |\n|---|---|---|---|\n";
    for (const auto& name : agg.techniques) {
        md << "| " << name << " | ";
        if (agg.mean_exam.count(name)) md << format_double(agg.mean_exam.at(name));
        md << " | " << (agg.hit5.count(name) ? std::to_string(agg.hit5.at(name)) : "")
           << " | " << (agg.hit10.count(name) ? std::to_string(agg.hit10.at(name)) : "") << " |\n";
    }

    if (agg.confounding_versions > 0) {
        md << "\n## Confounding-prone subset (" << agg.confounding_versions << " versions)\n\n";
        md << "| technique | mean EXAM |\n|---|---|\n";
        for (const auto& [name, value] : agg.confounding_mean_exam)
            md << "| " << name << " | " << format_double(value) << " |\n";
    }

    md << "\n## Covariate imbalance study\n\n";
    md << agg.study.size() << " predicate-fault version(s) with defined imbalance. "
       << "Boolean covariates are excluded from the imbalance measure.\n\n";
    if (!agg.spearman_by_technique.empty()) {
        md << "| technique | Spearman(imbalance, EXAM) | top-tercile mean EXAM |\n|---|---|---|\n";
        for (const auto& [name, rho] : agg.spearman_by_technique) {
            md << "| " << name << " | " << format_double(rho) << " | ";
            if (agg.tercile_mean_exam.count(name))
                md << format_double(agg.tercile_mean_exam.at(name));
            md << " |\n";
        }
    }

    if (!report.exclusions.empty()) {
        md << "\n## Exclusions\n\n";
        for (const auto& e : report.exclusions)
            md << "- " << e.program << (e.fault_id.empty() ? "" : "/" + e.fault_id) << ": "
               << e.reason << "\n";
    }
    return md.str();
}

std::string scatter_csv(const Report& report) {
    std::ostringstream csv;
    csv << "version,site,imbalance_raw,imbalance_std,exam_unival,exam_ochiai\n";
    for (const auto& v : report.versions) {
        if (!v.predicate_fault || !v.imbalance.defined) continue;
        csv << v.program << '/' << v.fault_id << ',' << v.fault_site << ','
            << format_double(v.imbalance.raw) << ',' << format_double(v.imbalance.standardized)
            << ',';
        if (auto it = v.exam.find("unival"); it != v.exam.end()) csv << format_double(it->second);
        csv << ',';
        if (auto it = v.exam.find("ochiai"); it != v.exam.end()) csv << format_double(it->second);
        csv << '\n';
    }
    return csv.str();
}

}  // namespace cfl::eval
