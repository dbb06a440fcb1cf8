#pragma once

#include <cstdint>
#include <optional>
#include <ostream>
#include <string>

#include "json.hpp"

#include "wahm/hierarchy.hpp"
#include "wahm/refine.hpp"
#include "wahm/solve.hpp"

namespace wahm::cli {

// Starting mesh of a run: uniform, graded-diagonal, random-wahm (seeded) or file.
struct InitialMesh {
  std::string kind = "uniform";
  int depth = 3;
  double band = 1.0;
  int steps = 3;
  int marks = 4;
  std::string path;
};

struct RunConfig {
  int dim = 2;
  int degree = 3;
  int coarse_grid = 8;
  double theta = 0.5;
  std::string method = "wa";  // wa, sa2 or both
  std::string estimator = "element";
  nlohmann::json problem = "poisson-arctan";  // id, or {"kind": "l2"|"poisson", "expression": "..."}
  int max_iter = 8;
  std::uint64_t seed = 0;
  std::string output = "out";
  InitialMesh initial;
  int levels = 5;  // convergence only
};

/// Throws InvalidArgument naming the offending field. Unknown keys are rejected.
RunConfig parse_run_config(const nlohmann::json& j);
nlohmann::json to_json(const RunConfig& c);

/// SHA-1 of the git blob holding the compact JSON dump.
std::string config_hash(const nlohmann::json& j);

Problem make_problem(const RunConfig& c);
HierarchicalMesh make_initial_mesh(const RunConfig& c);

/// 1024 px square, y up; one rect per active cell, stroke width shrinking with the level;
/// marked cells shaded underneath. Throws UnsupportedDimension.
std::string render_svg(const HierarchicalMesh& mesh, const MarkSet* overlay = nullptr);

struct CheckRequest {
  bool weak = false;
  std::optional<int> strict;
  bool clustered = false;
  bool list_cells = true;
};

// Commands return the process exit status: 0 success, 1 a requested predicate failed,
// 2 invalid input. Errors are reported on `err`.
int cmd_check(const std::string& mesh_path, const CheckRequest& request, std::ostream& out, std::ostream& err);
int cmd_run(const std::string& config_path, std::ostream& out, std::ostream& err);
int cmd_render(const std::string& mesh_path, const std::string& overlay_path, const std::string& out_path,
               std::ostream& out, std::ostream& err);
int cmd_convergence(const std::string& config_path, std::ostream& out, std::ostream& err);

}  // namespace wahm::cli
