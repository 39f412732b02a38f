// mil-suitegen: deterministic test-suite generation for corpus programs.
// Reads a generator spec (arg ranges, boundary tuples, seed), runs the
// reference program to capture expected stdout, and writes suite.json.
//
//   mil-suitegen program.mil suitegen.json -o suite.json [--reference fixed.mil]

#include <fstream>
#include <iostream>
#include <set>
#include <sstream>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "cfl/mil/interp.hpp"
#include "cfl/mil/parser.hpp"
#include "cfl/profile.hpp"
#include "cfl/support/rng.hpp"

using nlohmann::json;

namespace {

std::string read_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

cfl::mil::Ast parse_or_die(const std::string& path) {
    auto result = cfl::mil::parse(read_file(path));
    if (!result.ok()) {
        for (const auto& d : result.errors)
            std::cerr << path << ":" << cfl::mil::render_diagnostic(d) << "\n";
        throw std::runtime_error("parse failed: " + path);
    }
    return std::move(*result.ast);
}

cfl::mil::Value json_to_value(const json& j) {
    if (j.is_boolean()) return cfl::mil::Value::of_bool(j.get<bool>());
    if (j.is_number_float()) return cfl::mil::Value::of_float(j.get<double>());
    if (j.is_number_integer()) return cfl::mil::Value::of_int(j.get<int64_t>());
    if (j.is_string()) return cfl::mil::Value::of_str(j.get<std::string>());
    throw std::runtime_error("unsupported argument literal: " + j.dump());
}

cfl::mil::Value sample_param(const json& spec, cfl::Rng& rng) {
    std::string kind = spec.value("kind", "int");
    if (kind == "int") {
        int64_t lo = spec.value("min", 0);
        int64_t hi = spec.value("max", 10);
        return cfl::mil::Value::of_int(lo + static_cast<int64_t>(cfl::rand_index(
                                                rng, static_cast<size_t>(hi - lo + 1))));
    }
    if (kind == "float") {
        double lo = spec.value("min", 0.0);
        double hi = spec.value("max", 1.0);
        return cfl::mil::Value::of_float(lo + (hi - lo) * cfl::rand_unit(rng));
    }
    if (kind == "bool") return cfl::mil::Value::of_bool(cfl::rand_index(rng, 2) == 1);
    if (kind == "choice") {
        const auto& values = spec.at("values");
        return json_to_value(values.at(cfl::rand_index(rng, values.size())));
    }
    throw std::runtime_error("unknown param kind: " + kind);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"deterministic MIL suite generator"};
    std::string program_path, spec_path, out_path, reference_path;
    app.add_option("program", program_path)->required();
    app.add_option("spec", spec_path)->required();
    app.add_option("-o,--out", out_path)->required();
    app.add_option("--reference", reference_path, "program that defines expected output");
    try {
        app.parse(argc, argv);
        json spec = json::parse(read_file(spec_path));
        cfl::mil::Ast reference =
            parse_or_die(reference_path.empty() ? program_path : reference_path);

        uint64_t seed = spec.value("seed", 7);
        size_t count = spec.value("count", 50);
        const auto& params = spec.at("params");

        cfl::TestSuite suite;
        std::set<std::string> seen;
        auto add_case = [&](std::vector<cfl::mil::Value> args) {
            std::string key;
            for (const auto& a : args) key += a.tagged() + "|";
            if (!seen.insert(key).second) return;
            cfl::mil::ExecOptions exec;
            cfl::mil::ExecutionResult result = cfl::mil::execute(reference, args, exec);
            if (!result.completed()) {
                std::cerr << "warning: reference run failed (" << result.message
                          << "); tuple skipped\n";
                return;
            }
            cfl::TestCase tc;
            tc.id = "t" + std::to_string(suite.tests.size() + 1);
            tc.args = std::move(args);
            tc.expected_stdout = result.stdout_text;
            suite.tests.push_back(std::move(tc));
        };

        if (spec.contains("boundary"))
            for (const auto& tuple : spec["boundary"]) {
                std::vector<cfl::mil::Value> args;
                for (const auto& a : tuple) args.push_back(json_to_value(a));
                add_case(std::move(args));
            }
        size_t attempts = 0;
        while (suite.tests.size() < count && attempts < count * 40) {
            cfl::Rng rng = cfl::make_rng(seed, attempts);
            ++attempts;
            std::vector<cfl::mil::Value> args;
            for (const auto& p : params) args.push_back(sample_param(p, rng));
            add_case(std::move(args));
        }
        if (suite.tests.size() < count)
            std::cerr << "warning: generated only " << suite.tests.size() << " of " << count
                      << " requested tests\n";

        std::ofstream out(out_path);
        out << cfl::suite_to_json(suite);
        std::cerr << suite.tests.size() << " tests written to " << out_path << "\n";
    } catch (const CLI::ParseError& e) {
        std::cerr << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
