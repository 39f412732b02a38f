#include "cfl/profile.hpp"

#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "cfl/support/parallel.hpp"

namespace cfl {

using nlohmann::json;
using ordered_json = nlohmann::ordered_json;

bool oracle_passes(const TestCase& test, const mil::ExecutionResult& result) {
    if (!result.completed()) return false;
    if (test.expected_stdout) return result.stdout_text == *test.expected_stdout;
    return true;
}

ProfileMatrix run_suite(const mil::InstrumentedProgram& prog, const TestSuite& suite,
                        const ProfileOptions& options) {
    ProfileMatrix matrix;
    matrix.n_sites = prog.sites.size();
    matrix.rows.resize(suite.tests.size());
    parallel_for(suite.tests.size(), options.jobs, [&](size_t i) {
        const TestCase& test = suite.tests[i];
        ProfileRow row;
        row.test_id = test.id;
        row.values.assign(prog.sites.size(), mil::Value::na());
        row.covs.resize(prog.sites.size());
        mil::ExecOptions exec;
        exec.step_limit = options.step_limit;
        exec.hook = [&](int site_id, const mil::Value& v) {
            // A phi record of a still-unbound variable carries no observation.
            if (v.is_na()) return;
            size_t s = static_cast<size_t>(site_id);
            row.values[s] = v;
            const auto& parents = prog.sites.at(site_id).parents;
            auto& snapshot = row.covs[s];
            snapshot.clear();
            snapshot.reserve(parents.size());
            for (int p : parents) snapshot.push_back(row.values[static_cast<size_t>(p)]);
        };
        mil::ExecutionResult result = mil::execute(prog.ast, test.args, exec);
        row.y = oracle_passes(test, result) ? 0 : 1;
        matrix.rows[i] = std::move(row);
    });
    return matrix;
}

namespace {

ordered_json value_to_json(const mil::Value& v) {
    switch (v.kind()) {
        case mil::Value::Kind::Int: return v.as_int();
        case mil::Value::Kind::Float: return v.as_float();
        case mil::Value::Kind::Bool: return v.as_bool();
        case mil::Value::Kind::Str: return v.as_str();
        case mil::Value::Kind::NA: return nullptr;
    }
    return nullptr;
}

mil::Value value_from_json(const json& j) {
    if (j.is_null()) return mil::Value::na();
    if (j.is_boolean()) return mil::Value::of_bool(j.get<bool>());
    if (j.is_number_float()) return mil::Value::of_float(j.get<double>());
    if (j.is_number_integer()) return mil::Value::of_int(j.get<int64_t>());
    if (j.is_string()) return mil::Value::of_str(j.get<std::string>());
    throw DataError("unsupported JSON value for a profile entry");
}

}  // namespace

TestSuite parse_suite_json(const std::string& text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::exception& e) {
        throw DataError(std::string("invalid suite JSON: ") + e.what());
    }
    if (!doc.is_object() || !doc.contains("tests") || !doc["tests"].is_array())
        throw DataError("suite JSON must be an object with a 'tests' array");
    TestSuite suite;
    for (const auto& t : doc["tests"]) {
        TestCase tc;
        if (t.contains("id")) {
            const auto& id = t["id"];
            tc.id = id.is_string() ? id.get<std::string>() : id.dump();
        } else {
            tc.id = "t" + std::to_string(suite.tests.size() + 1);
        }
        if (!t.contains("args") || !t["args"].is_array())
            throw DataError("test '" + tc.id + "' is missing an 'args' array");
        for (const auto& a : t["args"]) {
            mil::Value v = value_from_json(a);
            if (v.is_na()) throw DataError("test '" + tc.id + "' has a null argument");
            tc.args.push_back(std::move(v));
        }
        if (t.contains("expected_stdout")) {
            if (!t["expected_stdout"].is_string())
                throw DataError("test '" + tc.id + "': expected_stdout must be a string");
            tc.expected_stdout = t["expected_stdout"].get<std::string>();
        }
        suite.tests.push_back(std::move(tc));
    }
    return suite;
}

TestSuite load_suite(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open suite file: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_suite_json(buf.str());
}

std::string suite_to_json(const TestSuite& suite) {
    ordered_json tests = ordered_json::array();
    for (const auto& t : suite.tests) {
        ordered_json jt;
        jt["id"] = t.id;
        ordered_json args = ordered_json::array();
        for (const auto& a : t.args) args.push_back(value_to_json(a));
        jt["args"] = std::move(args);
        if (t.expected_stdout) jt["expected_stdout"] = *t.expected_stdout;
        tests.push_back(std::move(jt));
    }
    ordered_json doc;
    doc["tests"] = std::move(tests);
    return doc.dump(2) + "\n";
}

void write_profiles_jsonl(std::ostream& out, const ProfileMatrix& matrix,
                          const mil::SiteTable& sites) {
    for (const auto& row : matrix.rows) {
        ordered_json j;
        j["test_id"] = row.test_id;
        j["y"] = row.y;
        ordered_json jsites = ordered_json::object();
        for (size_t s = 0; s < row.values.size(); ++s)
            jsites[std::to_string(s)] = value_to_json(row.values[s]);
        j["sites"] = std::move(jsites);
        ordered_json jcovs = ordered_json::object();
        for (size_t s = 0; s < row.values.size(); ++s) {
            if (row.values[s].is_na()) continue;
            ordered_json snap = ordered_json::object();
            const auto& parents = sites.at(static_cast<int>(s)).parents;
            for (size_t k = 0; k < parents.size(); ++k)
                snap[std::to_string(parents[k])] = value_to_json(row.covs[s][k]);
            jcovs[std::to_string(s)] = std::move(snap);
        }
        j["covs"] = std::move(jcovs);
        out << j.dump() << "\n";
    }
}

ProfileMatrix read_profiles_jsonl(std::istream& in, const mil::SiteTable& sites) {
    ProfileMatrix matrix;
    matrix.n_sites = sites.size();
    std::string line;
    size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        json j;
        try {
            j = json::parse(line);
        } catch (const json::exception& e) {
            throw DataError("profiles line " + std::to_string(lineno) + ": " + e.what());
        }
        ProfileRow row;
        row.test_id = j.value("test_id", std::string("t") + std::to_string(lineno));
        row.y = j.value("y", 0);
        row.values.assign(sites.size(), mil::Value::na());
        row.covs.resize(sites.size());
        if (j.contains("sites"))
            for (const auto& [key, val] : j["sites"].items()) {
                size_t s = static_cast<size_t>(std::stoul(key));
                if (s >= sites.size())
                    throw DataError("profiles line " + std::to_string(lineno) +
                                    ": unknown site id " + key);
                row.values[s] = value_from_json(val);
            }
        if (j.contains("covs"))
            for (const auto& [key, snap] : j["covs"].items()) {
                size_t s = static_cast<size_t>(std::stoul(key));
                if (s >= sites.size())
                    throw DataError("profiles line " + std::to_string(lineno) +
                                    ": unknown site id " + key);
                const auto& parents = sites.at(static_cast<int>(s)).parents;
                auto& out_snap = row.covs[s];
                out_snap.assign(parents.size(), mil::Value::na());
                for (size_t k = 0; k < parents.size(); ++k) {
                    std::string pid = std::to_string(parents[k]);
                    if (snap.contains(pid)) out_snap[k] = value_from_json(snap[pid]);
                }
            }
        matrix.rows.push_back(std::move(row));
    }
    return matrix;
}

}  // namespace cfl
