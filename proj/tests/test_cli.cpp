#include "doctest.h"

#include <filesystem>
#include <fstream>
#include <regex>
#include <set>
#include <sstream>

#include "cli.hpp"
#include "wahm/generators.hpp"
#include "wahm/io.hpp"

using namespace wahm;
namespace fs = std::filesystem;

namespace {

const std::string kFixtures = WAHM_FIXTURES_DIR;

std::string fixture(const std::string& name) { return kFixtures + "/" + name; }

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("wahm_cli_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

fs::path write_config(const fs::path& dir, nlohmann::json j) {
  j["output"] = (dir / "out").string();
  const fs::path p = dir / "config.json";
  std::ofstream(p) << j.dump();
  return p;
}

int check(const std::string& path, cli::CheckRequest req, std::string* text = nullptr) {
  std::ostringstream out, err;
  req.list_cells = false;
  const int rc = cli::cmd_check(path, req, out, err);
  if (text) *text = out.str() + err.str();
  return rc;
}

std::size_t count(const std::string& s, const std::string& what) {
  std::size_t n = 0;
  for (auto pos = s.find(what); pos != std::string::npos; pos = s.find(what, pos + 1)) ++n;
  return n;
}

}  // namespace

TEST_CASE("check verdicts") {
  CHECK(check(fixture("uniform_8x8.json"), {}) == 0);

  std::string text;
  CHECK(check(fixture("wahm_not_sa2.json"), {}, &text) == 1);
  CHECK(text.find("weakly admissible: pass") != std::string::npos);
  CHECK(text.find("strictly admissible (m=2): fail") != std::string::npos);
  CHECK(check(fixture("wahm_not_sa2.json"), {.weak = true}) == 0);
  CHECK(check(fixture("wahm_not_sa2.json"), {.strict = 2}) == 1);
  CHECK(check(fixture("wahm_not_sa2.json"), {.strict = 3}) == 0);

  CHECK(check(fixture("corrupted_nesting.json"), {}, &text) == 2);
  CHECK(text.find("(1,(9,9))") != std::string::npos);
  CHECK(check(fixture("missing.json"), {}) == 2);
}

TEST_CASE("check lists approximation powers") {
  std::ostringstream out, err;
  cli::cmd_check(fixture("uniform_8x8.json"), {}, out, err);
  CHECK(count(out.str(), "\n  0 ") == 64);
}

TEST_CASE("render") {
  const auto mesh = HierarchicalMesh(hierarchy_from_json(read_json_file(fixture("uniform_8x8.json"))));
  const std::string plain = cli::render_svg(mesh);
  CHECK(count(plain, "class=\"cell\"") == 64);
  CHECK(count(plain, "class=\"mark\"") == 0);
  const MarkSet empty = marks_from_json(read_json_file(fixture("empty_marks.json")));
  CHECK(count(cli::render_svg(mesh, &empty), "class=\"mark\"") == 0);

  // y axis points up: cell (0, 7) sits at the top edge.
  CHECK(plain.find("data-level=\"0\" x=\"0\" y=\"0\" width=\"128\"") != std::string::npos);

  const HierarchicalMesh graded(graded_diagonal_hierarchy(Domain(2, 8), 3, 3, 1.0));
  const std::string g = cli::render_svg(graded);
  std::set<std::string> levels;
  const std::regex re("class=\"cell\" data-level=\"(\\d+)\"");
  for (auto it = std::sregex_iterator(g.begin(), g.end(), re); it != std::sregex_iterator(); ++it) {
    levels.insert((*it)[1]);
  }
  CHECK(levels.size() == 3);

  const fs::path dir = scratch("render");
  std::ostringstream out, err;
  CHECK(cli::cmd_render(fixture("line_1d.json"), "", (dir / "x.svg").string(), out, err) == 2);
  CHECK(err.str().find("unsupported-dimension") != std::string::npos);
}

TEST_CASE("config validation") {
  const fs::path dir = scratch("config");
  std::ostringstream out, err;
  CHECK(cli::cmd_run(write_config(dir, {{"theta", 0.0}}).string(), out, err) == 2);
  CHECK(err.str().find("theta") != std::string::npos);
  CHECK(cli::cmd_run(write_config(dir, {{"thetta", 0.5}}).string(), out, err) == 2);
  CHECK(cli::cmd_run(write_config(dir, {{"problem", "l2-nothing"}}).string(), out, err) == 2);
  CHECK(cli::cmd_run(write_config(dir, {{"method", "sa3"}}).string(), out, err) == 2);
  CHECK(cli::cmd_run(write_config(dir, {{"problem", "poisson-arctan"}, {"degree", 1}}).string(), out, err) == 2);
  CHECK_NOTHROW(cli::parse_run_config({{"problem", {{"kind", "poisson"}, {"expression", "x*y"}}}}));
}

TEST_CASE("config hash is a git blob id") {
  CHECK(cli::config_hash(nlohmann::json{{"a", 1}}) == "daa5053ecf5f9a37b2de733d0751cc1ab53ac010");
  const auto a = cli::to_json(cli::parse_run_config({{"theta", 0.5}}));
  const auto b = cli::to_json(cli::parse_run_config({{"theta", 0.7}}));
  CHECK(cli::config_hash(a) != cli::config_hash(b));
  CHECK(cli::config_hash(a) == cli::config_hash(cli::to_json(cli::parse_run_config(nlohmann::json::object()))));
}

TEST_CASE("run with no iterations writes the initial state only") {
  const fs::path dir = scratch("run0");
  std::ostringstream out, err;
  const auto cfg = write_config(dir, {{"problem", "l2-arctan"}, {"degree", 2}, {"coarse_grid", 4}, {"max_iter", 0}});
  REQUIRE(cli::cmd_run(cfg.string(), out, err) == 0);
  const std::string csv = slurp(dir / "out" / "results.csv");
  CHECK(count(csv, "\n") == 2);
  CHECK(fs::exists(dir / "out" / "meshes" / "wa_0.json"));
  CHECK(fs::exists(dir / "out" / "meshes" / "wa_0.svg"));
  CHECK(fs::is_empty(dir / "out" / "marks"));
  CHECK(fs::exists(dir / "out" / "manifest.json"));
}

TEST_CASE("run artifacts: deterministic, re-ingestible, monotone") {
  const fs::path dir = scratch("run");
  const nlohmann::json base{{"problem", "poisson-arctan"}, {"degree", 2}, {"coarse_grid", 4},
                            {"method", "both"},            {"max_iter", 3}, {"theta", 0.5}};
  std::ostringstream out, err;
  REQUIRE(cli::cmd_run(write_config(dir, base).string(), out, err) == 0);
  const std::string first = slurp(dir / "out" / "results.csv");
  REQUIRE(cli::cmd_run(write_config(dir, base).string(), out, err) == 0);
  CHECK(slurp(dir / "out" / "results.csv") == first);

  const auto manifest = nlohmann::json::parse(slurp(dir / "out" / "manifest.json"));
  CHECK(manifest.at("config_hash").get<std::string>().size() == 40);
  CHECK(manifest.at("notes").at(0) == "reconstructed-estimator");

  for (int k = 0; k <= 3; ++k) {
    CHECK(check((dir / "out" / "meshes" / ("wa_" + std::to_string(k) + ".json")).string(),
                {.weak = true, .clustered = true}) == 0);
    CHECK(check((dir / "out" / "meshes" / ("sa2_" + std::to_string(k) + ".json")).string(), {.strict = 2}) == 0);
  }

  // Rows: iter, method, dofs, n_active, global_error, ...
  std::istringstream rows(first);
  std::string line;
  std::getline(rows, line);
  std::string prev_method;
  double prev_dofs = 0, prev_err = 0;
  while (std::getline(rows, line)) {
    std::vector<std::string> f;
    std::stringstream ls(line);
    for (std::string cell; std::getline(ls, cell, ',');) f.push_back(cell);
    const double dofs = std::stod(f[2]), e = std::stod(f[4]);
    if (f[1] == prev_method) {
      CHECK(dofs > prev_dofs);
      CHECK(e < prev_err);
    }
    prev_method = f[1];
    prev_dofs = dofs;
    prev_err = e;
  }
}

TEST_CASE("single-step table carries the indices") {
  const fs::path dir = scratch("table");
  std::ostringstream out, err;
  const auto cfg = write_config(dir, {{"problem", "l2-gauss"},
                                      {"method", "both"},
                                      {"max_iter", 1},
                                      {"initial", {{"kind", "graded-diagonal"}, {"depth", 2}}}});
  REQUIRE(cli::cmd_run(cfg.string(), out, err) == 0);
  std::istringstream rows(slurp(dir / "out" / "results.csv"));
  std::string line;
  int indexed = 0;
  while (std::getline(rows, line)) {
    if (line.rfind("1,", 0) == 0) {
      CHECK(line.find(",,") == std::string::npos);
      ++indexed;
    }
  }
  CHECK(indexed == 2);
}

TEST_CASE("convergence flags exact reproduction") {
  const fs::path dir = scratch("conv");
  std::ostringstream out, err;
  const auto cfg = write_config(dir, {{"problem", {{"kind", "l2"}, {"expression", "x^2*y + 3*y^2 - x"}}},
                                      {"degree", 2},
                                      {"coarse_grid", 4},
                                      {"levels", 2},
                                      {"initial", {{"kind", "graded-diagonal"}, {"depth", 2}}}});
  REQUIRE(cli::cmd_convergence(cfg.string(), out, err) == 0);
  const std::string csv = slurp(dir / "out" / "convergence.csv");
  CHECK(count(csv, ",exact\n") == 8);
}
