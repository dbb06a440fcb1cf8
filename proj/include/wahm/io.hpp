#pragma once

#include <string>

#include "json.hpp"

#include "wahm/hierarchy.hpp"
#include "wahm/refine.hpp"

namespace wahm {

// Mesh dump: {"dim", "degree", "depth", "coarse_grid", "subdomains": [[l, [[k...], ...]], ...]}
// listing Omega_l (l >= 1) as cells of level l-1. Loading re-validates nesting.
nlohmann::json hierarchy_to_json(const SubdomainHierarchy& h);
SubdomainHierarchy hierarchy_from_json(const nlohmann::json& j);

// Marks: {"dim", "marks": [[l, [[k...], ...]], ...]} with cells of level l.
nlohmann::json marks_to_json(const MarkSet& marks, int dim);
MarkSet marks_from_json(const nlohmann::json& j);

nlohmann::json read_json_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& text);

}  // namespace wahm
