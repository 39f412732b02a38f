// causal-fl: fault-localization workbench over MIL subject programs.
// Subcommands cover the pipeline phases (transform, instrument, profile,
// localize), the comparison techniques (baseline), fault seeding, and the
// corpus experiment driver (evaluate). Diagnostics go to stderr; data goes to
// files or stdout. Exit codes: 0 success, 1 usage error, 2 data error.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "cfl/eval/experiment.hpp"
#include "cfl/mil/parser.hpp"
#include "cfl/mil/printer.hpp"
#include "cfl/profile.hpp"
#include "cfl/score/baselines.hpp"
#include "cfl/score/causal.hpp"
#include "cfl/serialize.hpp"
#include "cfl/support/log.hpp"
#include "cfl/support/numfmt.hpp"

namespace fs = std::filesystem;
using nlohmann::ordered_json;

namespace {

struct DataFailure : std::runtime_error {
    using std::runtime_error::runtime_error;
};

std::string read_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DataFailure("cannot open file: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

void write_file(const fs::path& path, const std::string& content) {
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    std::ofstream out(path);
    if (!out) throw DataFailure("cannot write file: " + path.string());
    out << content;
}

cfl::mil::Ast parse_program(const std::string& path) {
    auto result = cfl::mil::parse(read_file(path));
    if (!result.ok()) {
        std::ostringstream msg;
        msg << path << ": " << result.errors.size() << " error(s)";
        for (const auto& d : result.errors) msg << "\n  " << cfl::mil::render_diagnostic(d);
        throw DataFailure(msg.str());
    }
    return std::move(*result.ast);
}

struct CommonFlags {
    uint64_t seed = 42;
    unsigned jobs = 1;
    bool include_phi = false;
    int n_trees = 500;
    int min_rows = 6;
    int64_t step_limit = 10'000'000;
    int repetitions = 10;
};

ordered_json verbose_report(const cfl::ScoreReport& report, const cfl::mil::SiteTable& sites) {
    ordered_json arr = ordered_json::array();
    for (const auto& s : report.sites) {
        ordered_json j;
        j["site_id"] = s.site_id;
        j["name"] = sites.at(s.site_id).versioned_name();
        j["line"] = sites.at(s.site_id).line;
        j["scored"] = s.scored;
        if (!s.scored) {
            j["skip_reason"] = s.skip_reason;
            arr.push_back(std::move(j));
            continue;
        }
        j["score"] = s.score;
        j["rows_used"] = s.rows_used;
        j["naive_gap"] = s.naive_gap;
        ordered_json means = ordered_json::object();
        for (size_t i = 0; i < s.reps.values.size(); ++i)
            means[s.reps.values[i].display()] = i < s.means.size() ? s.means[i] : 0.0;
        j["counterfactual_means"] = std::move(means);
        arr.push_back(std::move(j));
    }
    ordered_json doc;
    doc["sites"] = std::move(arr);
    return doc;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"causal-fl: value- and predicate-based statistical fault localization for MIL programs"};
    app.require_subcommand(1);

    CommonFlags flags;

    // ---- transform ----
    auto* cmd_transform = app.add_subcommand("transform", "Lower branch/loop predicates to P-variable assignments");
    std::string t_program, t_out;
    cmd_transform->add_option("program", t_program, "MIL source file")->required();
    cmd_transform->add_option("-o,--out", t_out, "output directory (transformed.mil, predicates.json)");
    cmd_transform->callback([&] {
        cfl::mil::Ast ast = parse_program(t_program);
        auto [transformed, predicates] = cfl::mil::transformed_copy(ast);
        std::string source = cfl::mil::render(transformed);
        if (t_out.empty()) {
            std::cout << source;
        } else {
            write_file(fs::path(t_out) / "transformed.mil", source);
            write_file(fs::path(t_out) / "predicates.json",
                       cfl::predicate_table_to_json(predicates).dump(2) + "\n");
        }
    });

    // ---- instrument ----
    auto* cmd_instrument = app.add_subcommand("instrument", "Version assignments and derive causal parents");
    std::string i_program, i_out;
    cmd_instrument->add_option("program", i_program, "MIL source file")->required();
    cmd_instrument->add_option("-o,--out", i_out, "output directory (sites.json, predicates.json, instrumented.mil)");
    cmd_instrument->callback([&] {
        cfl::mil::Ast ast = parse_program(i_program);
        cfl::mil::InstrumentedProgram prog = cfl::mil::instrument_program(ast);
        if (i_out.empty()) {
            std::cout << cfl::site_table_to_json(prog.sites).dump(2) << "\n";
        } else {
            write_file(fs::path(i_out) / "sites.json",
                       cfl::site_table_to_json(prog.sites).dump(2) + "\n");
            write_file(fs::path(i_out) / "predicates.json",
                       cfl::predicate_table_to_json(prog.predicates).dump(2) + "\n");
            write_file(fs::path(i_out) / "instrumented.mil", cfl::mil::render(prog.ast));
        }
    });

    // ---- profile ----
    auto* cmd_profile = app.add_subcommand("profile", "Run the suite on the instrumented program and record value profiles");
    std::string p_program, p_suite, p_out;
    cmd_profile->add_option("program", p_program, "MIL source file")->required();
    cmd_profile->add_option("--suite", p_suite, "test suite JSON")->required();
    cmd_profile->add_option("-o,--out", p_out, "output directory (profiles.jsonl, sites.json)");
    cmd_profile->add_option("--jobs", flags.jobs, "worker threads");
    cmd_profile->add_option("--step-limit", flags.step_limit, "interpreter step limit");
    cmd_profile->callback([&] {
        cfl::mil::Ast ast = parse_program(p_program);
        cfl::mil::InstrumentedProgram prog = cfl::mil::instrument_program(ast);
        cfl::TestSuite suite = cfl::load_suite(p_suite);
        cfl::ProfileOptions opts;
        opts.jobs = flags.jobs;
        opts.step_limit = flags.step_limit;
        cfl::ProfileMatrix profiles = cfl::run_suite(prog, suite, opts);
        if (p_out.empty()) {
            cfl::write_profiles_jsonl(std::cout, profiles, prog.sites);
        } else {
            std::ostringstream buf;
            cfl::write_profiles_jsonl(buf, profiles, prog.sites);
            write_file(fs::path(p_out) / "profiles.jsonl", buf.str());
            write_file(fs::path(p_out) / "sites.json",
                       cfl::site_table_to_json(prog.sites).dump(2) + "\n");
        }
        std::cerr << profiles.rows.size() << " executions, " << profiles.failing()
                  << " failing\n";
    });

    // ---- localize ----
    auto* cmd_localize = app.add_subcommand("localize", "Instrument, profile, and score in one pass (counterfactual technique)");
    std::string l_program, l_suite, l_from_profiles, l_out, l_report;
    cmd_localize->add_option("program", l_program, "MIL source file")->required();
    cmd_localize->add_option("--suite", l_suite, "test suite JSON");
    cmd_localize->add_option("--from-profiles", l_from_profiles, "reuse recorded profiles (JSONL) instead of executing");
    cmd_localize->add_option("-o,--out", l_out, "output directory (ranking.csv)");
    cmd_localize->add_option("--report", l_report, "verbose JSON report path (per-site counterfactual means)");
    cmd_localize->add_option("--seed", flags.seed, "random seed");
    cmd_localize->add_option("--jobs", flags.jobs, "worker threads");
    cmd_localize->add_flag("--include-phi", flags.include_phi, "score merge-record sites too");
    cmd_localize->add_option("--n-trees", flags.n_trees, "trees per forest");
    cmd_localize->add_option("--min-rows", flags.min_rows, "executions required to model a site");
    cmd_localize->add_option("--step-limit", flags.step_limit, "interpreter step limit");
    cmd_localize->callback([&] {
        if (l_suite.empty() == l_from_profiles.empty())
            throw CLI::ValidationError("localize", "exactly one of --suite or --from-profiles is required");
        cfl::mil::Ast ast = parse_program(l_program);
        cfl::mil::InstrumentedProgram prog = cfl::mil::instrument_program(ast);
        cfl::ProfileMatrix profiles;
        if (!l_suite.empty()) {
            cfl::TestSuite suite = cfl::load_suite(l_suite);
            cfl::ProfileOptions popts;
            popts.jobs = flags.jobs;
            popts.step_limit = flags.step_limit;
            profiles = cfl::run_suite(prog, suite, popts);
        } else {
            std::ifstream in(l_from_profiles);
            if (!in) throw DataFailure("cannot open profiles file: " + l_from_profiles);
            profiles = cfl::read_profiles_jsonl(in, prog.sites);
        }
        cfl::ScoreOptions sopts;
        sopts.seed = flags.seed;
        sopts.jobs = flags.jobs;
        sopts.include_phi = flags.include_phi;
        sopts.n_trees = flags.n_trees;
        sopts.min_rows = flags.min_rows;
        cfl::ScoreReport report = cfl::score_all(profiles, prog, sopts);
        std::string csv = cfl::ranking_to_csv(report.ranking);
        std::cout << csv;
        if (!l_out.empty()) write_file(fs::path(l_out) / "ranking.csv", csv);
        if (!l_report.empty())
            write_file(l_report, verbose_report(report, prog.sites).dump(2) + "\n");
    });

    // ---- baseline ----
    auto* cmd_baseline = app.add_subcommand("baseline", "Comparison techniques over the same profiles");
    std::string b_program, b_suite, b_technique = "all", b_out;
    cmd_baseline->add_option("program", b_program, "MIL source file")->required();
    cmd_baseline->add_option("--suite", b_suite, "test suite JSON")->required();
    cmd_baseline->add_option("--technique", b_technique, "ochiai|dstar|baah|esp|predswitch|all");
    cmd_baseline->add_option("-o,--out", b_out, "output directory (ranking_<technique>.csv)");
    cmd_baseline->add_option("--jobs", flags.jobs, "worker threads");
    cmd_baseline->add_flag("--include-phi", flags.include_phi, "rank merge-record sites too");
    cmd_baseline->add_option("--step-limit", flags.step_limit, "interpreter step limit");
    cmd_baseline->callback([&] {
        std::vector<cfl::Technique> chosen;
        if (b_technique == "all") {
            chosen = {cfl::Technique::Ochiai, cfl::Technique::DStar, cfl::Technique::Baah,
                      cfl::Technique::Esp, cfl::Technique::PredSwitch};
        } else {
            cfl::Technique t;
            if (!cfl::technique_from_name(b_technique, t) || t == cfl::Technique::UniVal)
                throw CLI::ValidationError("--technique",
                                           "expected one of ochiai|dstar|baah|esp|predswitch|all");
            chosen = {t};
        }
        cfl::mil::Ast ast = parse_program(b_program);
        cfl::mil::InstrumentedProgram prog = cfl::mil::instrument_program(ast);
        cfl::TestSuite suite = cfl::load_suite(b_suite);
        cfl::ProfileOptions popts;
        popts.jobs = flags.jobs;
        popts.step_limit = flags.step_limit;
        cfl::ProfileMatrix profiles = cfl::run_suite(prog, suite, popts);
        bool first = true;
        for (cfl::Technique t : chosen) {
            cfl::Ranking ranking;
            if (t == cfl::Technique::PredSwitch) {
                cfl::PredicateSwitchOptions ps;
                ps.step_limit = flags.step_limit;
                ps.jobs = flags.jobs;
                ranking = cfl::predicate_switch(prog, suite, profiles, ps);
            } else {
                ranking = cfl::baseline_ranking(t, profiles, prog, flags.include_phi);
            }
            std::string csv = cfl::ranking_to_csv(ranking, first);
            std::cout << csv;
            if (!b_out.empty())
                write_file(fs::path(b_out) / (std::string("ranking_") + cfl::technique_name(t) + ".csv"),
                           cfl::ranking_to_csv(ranking));
            first = false;
        }
    });

    // ---- evaluate ----
    auto* cmd_evaluate = app.add_subcommand("evaluate", "Run the corpus experiment and write the report");
    std::string e_corpus, e_out, e_technique = "all";
    size_t e_min_failing = 2, e_max_faults = 4;
    cmd_evaluate->add_option("--corpus", e_corpus, "corpus directory")->required();
    cmd_evaluate->add_option("-o,--out", e_out, "output directory (report.json, report.md, scatter.csv)")->required();
    cmd_evaluate->add_option("--technique", e_technique, "technique or 'all'");
    cmd_evaluate->add_option("--seed", flags.seed, "random seed");
    cmd_evaluate->add_option("--repetitions", flags.repetitions, "repetitions for the stochastic technique");
    cmd_evaluate->add_option("--jobs", flags.jobs, "worker threads");
    cmd_evaluate->add_option("--n-trees", flags.n_trees, "trees per forest");
    cmd_evaluate->add_option("--min-rows", flags.min_rows, "executions required to model a site");
    cmd_evaluate->add_option("--min-failing", e_min_failing, "failing tests required per version");
    cmd_evaluate->add_option("--max-faults", e_max_faults, "seeded faults per program");
    cmd_evaluate->add_option("--step-limit", flags.step_limit, "interpreter step limit");
    cmd_evaluate->callback([&] {
        cfl::eval::ExperimentOptions opts;
        opts.seed = flags.seed;
        opts.repetitions = flags.repetitions;
        opts.jobs = flags.jobs;
        opts.n_trees = flags.n_trees;
        opts.min_rows = flags.min_rows;
        opts.step_limit = flags.step_limit;
        opts.min_failing = e_min_failing;
        opts.max_faults_per_program = e_max_faults;
        if (e_technique != "all") {
            cfl::Technique t;
            if (!cfl::technique_from_name(e_technique, t))
                throw CLI::ValidationError("--technique", "unknown technique: " + e_technique);
            opts.techniques = {t};
        }
        auto corpus = cfl::eval::load_corpus(e_corpus);
        cfl::eval::Report report = cfl::eval::run_experiment(corpus, opts);
        write_file(fs::path(e_out) / "report.json",
                   cfl::eval::report_to_json(report).dump(2) + "\n");
        write_file(fs::path(e_out) / "report.md", cfl::eval::report_to_markdown(report));
        write_file(fs::path(e_out) / "scatter.csv", cfl::eval::scatter_csv(report));
        std::cerr << report.versions.size() << " version(s) evaluated, "
                  << report.exclusions.size() << " excluded\n";
    });

    // ---- seed-faults ----
    auto* cmd_seed = app.add_subcommand("seed-faults", "Generate killed single-token mutants of a program");
    std::string s_program, s_suite, s_out;
    size_t s_min_failing = 1, s_max = 0;
    cmd_seed->add_option("program", s_program, "MIL source file")->required();
    cmd_seed->add_option("--suite", s_suite, "test suite JSON")->required();
    cmd_seed->add_option("-o,--out", s_out, "output directory (<id>.mil, <id>.json)")->required();
    cmd_seed->add_option("--min-failing", s_min_failing, "failing tests required to keep a mutant");
    cmd_seed->add_option("--max", s_max, "keep at most this many mutants (0: all)");
    cmd_seed->add_option("--jobs", flags.jobs, "worker threads");
    cmd_seed->add_option("--step-limit", flags.step_limit, "interpreter step limit");
    cmd_seed->callback([&] {
        std::string source = read_file(s_program);
        cfl::TestSuite suite = cfl::load_suite(s_suite);
        cfl::eval::SeedOptions opts;
        opts.min_failing = s_min_failing;
        opts.max_mutants = s_max;
        opts.step_limit = flags.step_limit;
        opts.jobs = flags.jobs;
        std::string program_id = fs::path(s_program).stem().string();
        auto faults = cfl::eval::seed_faults(program_id, source, suite, opts);
        for (const auto& f : faults) {
            write_file(fs::path(s_out) / (f.id + ".mil"), f.source);
            write_file(fs::path(s_out) / (f.id + ".json"),
                       cfl::eval::fault_spec_to_json(f.spec).dump(2) + "\n");
            std::cout << f.id << " failing=" << f.failing << " passing=" << f.passing << "\n";
        }
        std::cerr << faults.size() << " killed mutant(s) written to " << s_out << "\n";
    });

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << e.what() << "\n\n" << app.help() << "\n";
        return 1;
    } catch (const DataFailure& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const cfl::DataError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
