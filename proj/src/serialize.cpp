#include "cfl/serialize.hpp"

namespace cfl {

using nlohmann::ordered_json;

ordered_json site_table_to_json(const mil::SiteTable& sites) {
    ordered_json arr = ordered_json::array();
    for (const auto& s : sites.sites) {
        ordered_json j;
        j["site_id"] = s.id;
        j["function"] = s.function;
        j["base"] = s.base;
        j["version"] = s.version;
        j["name"] = s.versioned_name();
        j["line"] = s.line;
        j["block"] = s.block;
        j["kind"] = mil::site_kind_name(s.kind);
        j["parents"] = s.parents;
        if (s.gate_site >= 0) j["gate_site"] = s.gate_site;
        j["type_hint"] = s.type_hint;
        arr.push_back(std::move(j));
    }
    ordered_json doc;
    doc["sites"] = std::move(arr);
    return doc;
}

ordered_json predicate_table_to_json(const mil::PredicateTable& table) {
    ordered_json arr = ordered_json::array();
    for (const auto& e : table.entries) {
        ordered_json j;
        j["pred_id"] = e.pred_id;
        switch (e.control) {
            case mil::PredicateEntry::ControlKind::If: j["control_kind"] = "if"; break;
            case mil::PredicateEntry::ControlKind::IfElse: j["control_kind"] = "if-else"; break;
            case mil::PredicateEntry::ControlKind::While: j["control_kind"] = "while"; break;
        }
        j["var"] = e.var;
        j["expression"] = e.expression;
        j["line"] = e.line;
        j["conjunct_index"] = e.conjunct_index;
        arr.push_back(std::move(j));
    }
    ordered_json doc;
    doc["predicates"] = std::move(arr);
    return doc;
}

}  // namespace cfl
