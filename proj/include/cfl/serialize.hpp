#pragma once

#include <string>

#include <nlohmann/json.hpp>

#include "cfl/mil/instrument.hpp"
#include "cfl/mil/transform.hpp"

namespace cfl {

// sites.json: {"sites": [{site_id, function, base, version, line, block,
//                          kind, parents, gate_site?, type_hint}]}
nlohmann::ordered_json site_table_to_json(const mil::SiteTable& sites);

// predicates.json: {"predicates": [{pred_id, control_kind, var, expression,
//                                    line, conjunct_index}]}
nlohmann::ordered_json predicate_table_to_json(const mil::PredicateTable& table);

}  // namespace cfl
