#include "cli.hpp"

#include <openssl/sha.h>

#include <cmath>
#include <filesystem>
#include <iomanip>
#include <set>
#include <sstream>

#include "wahm/error.hpp"
#include "wahm/generators.hpp"
#include "wahm/io.hpp"
#include "wahm/quasi.hpp"

namespace wahm::cli {

namespace fs = std::filesystem;

namespace {

[[noreturn]] void bad(const std::string& field, const std::string& why) {
  throw Error(ErrorCode::InvalidArgument, "config field '" + field + "': " + why);
}

template <class T>
T get(const nlohmann::json& j, const char* key, T fallback) {
  if (!j.contains(key)) return fallback;
  try {
    return j.at(key).get<T>();
  } catch (const nlohmann::json::exception&) {
    bad(key, "wrong type");
  }
}

std::string cell_label(const CellId& c, int dim) {
  std::ostringstream os;
  os << c.level;
  for (int i = 0; i < dim; ++i) os << ' ' << c.index[i];
  return os.str();
}

std::vector<Method> methods_of(const RunConfig& c) {
  if (c.method == "both") return {Method::WA, Method::SA2};
  return {method_from_string(c.method)};
}

}  // namespace

RunConfig parse_run_config(const nlohmann::json& j) {
  if (!j.is_object()) throw Error(ErrorCode::InvalidArgument, "config must be a JSON object");
  static const std::set<std::string> known{"dim",    "degree", "coarse_grid", "theta",   "method", "estimator",
                                           "problem", "max_iter", "seed",     "output", "initial", "levels"};
  for (const auto& [key, value] : j.items()) {
    if (!known.count(key)) bad(key, "unknown field");
  }
  RunConfig c;
  c.dim = get(j, "dim", c.dim);
  c.degree = get(j, "degree", c.degree);
  c.coarse_grid = get(j, "coarse_grid", c.coarse_grid);
  c.theta = get(j, "theta", c.theta);
  c.method = get(j, "method", c.method);
  c.estimator = get(j, "estimator", c.estimator);
  if (j.contains("problem")) c.problem = j.at("problem");
  c.max_iter = get(j, "max_iter", c.max_iter);
  c.seed = get(j, "seed", c.seed);
  c.output = get(j, "output", c.output);
  c.levels = get(j, "levels", c.levels);
  if (j.contains("initial")) {
    const auto& i = j.at("initial");
    if (!i.is_object()) bad("initial", "must be an object");
    for (const auto& [key, value] : i.items()) {
      if (key != "kind" && key != "depth" && key != "band" && key != "steps" && key != "marks" && key != "path") {
        bad("initial." + key, "unknown field");
      }
    }
    c.initial.kind = get(i, "kind", c.initial.kind);
    c.initial.depth = get(i, "depth", c.initial.depth);
    c.initial.band = get(i, "band", c.initial.band);
    c.initial.steps = get(i, "steps", c.initial.steps);
    c.initial.marks = get(i, "marks", c.initial.marks);
    c.initial.path = get(i, "path", c.initial.path);
  }

  if (c.dim < 1 || c.dim > 3) bad("dim", "must be 1, 2 or 3");
  if (c.degree < 1 || c.degree > 6) bad("degree", "must lie in 1..6");
  if (c.coarse_grid < 1) bad("coarse_grid", "must be positive");
  if (!(c.theta > 0.0 && c.theta <= 1.0)) bad("theta", "must lie in (0, 1]");
  if (c.method != "wa" && c.method != "sa2" && c.method != "both") bad("method", "expected wa, sa2 or both");
  try {
    estimator_from_string(c.estimator);
  } catch (const Error&) {
    bad("estimator", "expected element or support-aggregated");
  }
  if (c.max_iter < 0) bad("max_iter", "must be nonnegative");
  if (c.levels < 2) bad("levels", "at least 2");
  if (c.output.empty()) bad("output", "must not be empty");
  const auto& k = c.initial.kind;
  if (k != "uniform" && k != "graded-diagonal" && k != "random-wahm" && k != "file") {
    bad("initial.kind", "expected uniform, graded-diagonal, random-wahm or file");
  }
  if (c.initial.depth < 1) bad("initial.depth", "must be positive");
  if (k == "file" && c.initial.path.empty()) bad("initial.path", "required for kind file");
  if (k == "graded-diagonal" && c.dim != 2) bad("initial.kind", "graded-diagonal needs dim 2");
  const Problem pb = make_problem(c);
  if (pb.kind == Problem::Kind::Poisson && c.degree < 2) bad("degree", "Poisson runs need degree >= 2");
  return c;
}

nlohmann::json to_json(const RunConfig& c) {
  return {{"dim", c.dim},
          {"degree", c.degree},
          {"coarse_grid", c.coarse_grid},
          {"theta", c.theta},
          {"method", c.method},
          {"estimator", c.estimator},
          {"problem", c.problem},
          {"max_iter", c.max_iter},
          {"seed", c.seed},
          {"output", c.output},
          {"levels", c.levels},
          {"initial",
           {{"kind", c.initial.kind},
            {"depth", c.initial.depth},
            {"band", c.initial.band},
            {"steps", c.initial.steps},
            {"marks", c.initial.marks},
            {"path", c.initial.path}}}};
}

std::string config_hash(const nlohmann::json& j) {
  const std::string body = j.dump();
  const std::string blob = "blob " + std::to_string(body.size()) + '\0' + body;
  unsigned char digest[SHA_DIGEST_LENGTH];
  SHA1(reinterpret_cast<const unsigned char*>(blob.data()), blob.size(), digest);
  std::ostringstream os;
  for (unsigned char b : digest) os << std::hex << std::setw(2) << std::setfill('0') << static_cast<int>(b);
  return os.str();
}

Problem make_problem(const RunConfig& c) {
  if (c.problem.is_string()) {
    try {
      return named_problem(c.problem.get<std::string>(), c.dim);
    } catch (const Error& e) {
      bad("problem", e.what());
    }
  }
  if (!c.problem.is_object() || !c.problem.contains("expression")) {
    bad("problem", "expected an id or {\"kind\", \"expression\"}");
  }
  const std::string kind = c.problem.value("kind", "l2");
  Expr u;
  try {
    u = Expr::parse(c.problem.at("expression").get<std::string>());
  } catch (const std::exception& e) {
    bad("problem.expression", e.what());
  }
  if (kind == "l2") return l2_problem("custom-l2", u, c.dim);
  if (kind == "poisson") return poisson_problem("custom-poisson", u, c.dim);
  bad("problem.kind", "expected l2 or poisson");
}

HierarchicalMesh make_initial_mesh(const RunConfig& c) {
  const Domain domain(c.dim, c.coarse_grid);
  const auto& i = c.initial;
  if (i.kind == "uniform") return HierarchicalMesh(SubdomainHierarchy::uniform(domain, c.degree));
  if (i.kind == "graded-diagonal") {
    return HierarchicalMesh(graded_diagonal_hierarchy(domain, c.degree, i.depth, i.band));
  }
  if (i.kind == "random-wahm") {
    Rng rng(c.seed);
    return random_wahm(domain, c.degree, i.steps, static_cast<std::size_t>(std::max(1, i.marks)), rng);
  }
  HierarchicalMesh m(hierarchy_from_json(read_json_file(i.path)));
  if (m.dim() != c.dim || m.degree() != c.degree) {
    bad("initial.path", "mesh dimension or degree differs from the config");
  }
  return m;
}

std::string render_svg(const HierarchicalMesh& mesh, const MarkSet* overlay) {
  if (mesh.dim() != 2) throw Error(ErrorCode::UnsupportedDimension, "render needs a two-dimensional mesh");
  constexpr double kSize = 1024.0;
  const Domain& d = mesh.domain();
  auto rect = [&](std::ostream& os, const CellId& c, const char* cls, const std::string& style) {
    const double h = d.cell_size(c.level) * kSize;
    os << "<rect class=\"" << cls << "\" data-level=\"" << c.level << "\" x=\"" << c.index[0] * h << "\" y=\""
       << kSize - (c.index[1] + 1) * h << "\" width=\"" << h << "\" height=\"" << h << "\" " << style << "/>\n";
  };
  std::ostringstream os;
  os << std::setprecision(8);
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"1024\" height=\"1024\" viewBox=\"0 0 1024 1024\">\n";
  if (overlay) {
    for (const auto& c : overlay->cells()) rect(os, c, "mark", "fill=\"#e8a0a0\" stroke=\"none\"");
  }
  for (const auto& c : mesh.active_cells()) {
    std::ostringstream style;
    style << "fill=\"none\" stroke=\"#202020\" stroke-width=\"" << std::max(0.25, 2.0 / (1 << c.level)) << "\"";
    rect(os, c, "cell", style.str());
  }
  os << "</svg>\n";
  return os.str();
}

int cmd_check(const std::string& mesh_path, const CheckRequest& request, std::ostream& out, std::ostream& err) {
  try {
    const HierarchicalMesh mesh(hierarchy_from_json(read_json_file(mesh_path)));
    const int dim = mesh.dim();
    const bool any = request.weak || request.strict || request.clustered;
    const int m = request.strict.value_or(2);
    const auto weak = is_weakly_admissible(mesh);
    const auto strict = is_strictly_admissible(mesh, m);
    const bool clustered = is_clustered(mesh);
    auto verdict = [&](const AdmissibilityReport& r) {
      std::string s = r.ok ? "pass" : "fail";
      if (!r.ok && r.witness) s += " (level " + std::to_string(r.level) + ", cell " + to_string(*r.witness, dim) + ")";
      return s;
    };
    out << "mesh: dim " << dim << ", degree " << mesh.degree() << ", depth " << mesh.depth() << ", coarse grid "
        << mesh.domain().coarse << ", active cells " << mesh.num_active() << '\n';
    out << "weakly admissible: " << verdict(weak) << '\n';
    out << "strictly admissible (m=" << m << "): " << verdict(strict) << '\n';
    out << "clustered: " << (clustered ? "pass" : "fail") << '\n';
    if (request.list_cells) {
      out << "cells (level index... power):\n";
      for (const auto& c : mesh.active_cells()) out << "  " << cell_label(c, dim) << ' ' << approximation_power(mesh, c) << '\n';
    }
    bool ok = true;
    if (!any || request.weak) ok = ok && weak.ok;
    if (!any || request.strict) ok = ok && strict.ok;
    if (!any || request.clustered) ok = ok && clustered;
    out << "result: " << (ok ? "PASS" : "FAIL") << '\n';
    return ok ? 0 : 1;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  }
}

int cmd_render(const std::string& mesh_path, const std::string& overlay_path, const std::string& out_path,
               std::ostream& out, std::ostream& err) {
  try {
    const HierarchicalMesh mesh(hierarchy_from_json(read_json_file(mesh_path)));
    std::optional<MarkSet> overlay;
    if (!overlay_path.empty()) overlay = marks_from_json(read_json_file(overlay_path));
    write_text_file(out_path, render_svg(mesh, overlay ? &*overlay : nullptr));
    out << "wrote " << out_path << " (" << mesh.num_active() << " cells)\n";
    return 0;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  }
}

int cmd_run(const std::string& config_path, std::ostream& out, std::ostream& err) {
  RunConfig config;
  try {
    config = parse_run_config(read_json_file(config_path));
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  }
  const Problem problem = make_problem(config);
  const nlohmann::json canonical = to_json(config);
  const fs::path dir(config.output);
  std::vector<LoopRecord> all;
  nlohmann::json files = nlohmann::json::array();
  try {
    fs::create_directories(dir / "meshes");
    fs::create_directories(dir / "marks");
    const HierarchicalMesh initial = make_initial_mesh(config);
    for (Method method : methods_of(config)) {
      LoopOptions opt;
      opt.method = method;
      opt.theta = config.theta;
      opt.max_iter = config.max_iter;
      opt.estimator = estimator_from_string(config.estimator);
      int reached = -1;
      LoopResult res;
      try {
        res = run_adaptive_loop(problem, initial, opt, [&](const LoopRecord& r) {
          reached = r.iteration;
          out << to_string(method) << " iter " << r.iteration << ": dofs " << r.dofs << ", error "
              << r.global_error << '\n';
        });
      } catch (const std::exception& e) {
        throw Error(ErrorCode::InvalidArgument,
                    to_string(method) + " iteration " + std::to_string(reached + 1) + ": " + e.what());
      }
      for (std::size_t k = 0; k < res.records.size(); ++k) {
        const std::string stem = (method == Method::WA ? "wa_" : "sa2_") + std::to_string(k);
        const HierarchicalMesh& mesh = res.meshes[k];
        const MarkSet* marks = k < res.marks.size() ? &res.marks[k] : nullptr;
        write_text_file((dir / "meshes" / (stem + ".json")).string(), hierarchy_to_json(mesh.hierarchy()).dump(1));
        files.push_back("meshes/" + stem + ".json");
        if (mesh.dim() == 2) {
          write_text_file((dir / "meshes" / (stem + ".svg")).string(), render_svg(mesh, marks));
          files.push_back("meshes/" + stem + ".svg");
        }
        if (marks) {
          write_text_file((dir / "marks" / (stem + ".json")).string(), marks_to_json(*marks, mesh.dim()).dump(1));
          files.push_back("marks/" + stem + ".json");
        }
      }
      all.insert(all.end(), res.records.begin(), res.records.end());
    }
    write_text_file((dir / "results.csv").string(), records_to_csv(all));
    files.push_back("results.csv");
    nlohmann::json notes = nlohmann::json::array();
    if (problem.kind == Problem::Kind::Poisson) notes.push_back("reconstructed-estimator");
    if (config.estimator == "support-aggregated") notes.push_back("support-aggregated-variant");
    const nlohmann::json manifest{{"config", canonical},
                                  {"config_hash", config_hash(canonical)},
                                  {"problem", problem.name},
                                  {"expression", problem.u.to_string()},
                                  {"theta", config.theta},
                                  {"degree", config.degree},
                                  {"seed", config.seed},
                                  {"notes", notes},
                                  {"files", files}};
    write_text_file((dir / "manifest.json").string(), manifest.dump(2) + "\n");
    out << "wrote " << (dir / "results.csv").string() << " and " << files.size() << " artifacts\n";
    return 0;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  }
}

int cmd_convergence(const std::string& config_path, std::ostream& out, std::ostream& err) {
  try {
    const RunConfig config = parse_run_config(read_json_file(config_path));
    const Problem problem = make_problem(config);
    const SmoothFunction f = smooth_function(problem.u, config.dim, 1);
    const Function fv = value_of(f);
    std::vector<std::string> sequences{"uniform"};
    if (config.dim == 2) sequences.push_back("wahm");
    std::ostringstream csv;
    csv << std::setprecision(10);
    csv << "sequence,operator,level,dofs,h,L2_error,H1_seminorm_error,EOC_L2,EOC_H1,status\n";
    for (const auto& seq : sequences) {
      for (const std::string op : {"qi", "l2"}) {
        double prev_h = 0, prev_l2 = 0, prev_h1 = 0;
        for (int j = 0; j < config.levels; ++j) {
          const Domain domain(config.dim, config.coarse_grid << j);
          const HierarchicalMesh mesh =
              seq == "uniform"
                  ? HierarchicalMesh(SubdomainHierarchy::uniform(domain, config.degree))
                  : HierarchicalMesh(graded_diagonal_hierarchy(domain, config.degree, config.initial.depth,
                                                               config.initial.band));
          const auto basis = build_hb_basis(mesh);
          const SplineField s = op == "qi" ? QuasiInterpolant(basis).multilevel(fv) : l2_projection(fv, basis);
          CellSet all;
          for (const auto& c : mesh.active_cells()) all.insert(c);
          const double l2 = qi_error(f, s, all, {}, 2.0);
          const double h1 = seminorm_error(f, s, all, 1);
          const double h = domain.cell_size(mesh.depth() - 1);
          const double scale = std::max(1.0, sobolev_seminorm(f, domain, all, 0, config.degree + 3));
          const bool exact = l2 <= 1e-10 * scale;
          csv << seq << ',' << op << ',' << j << ',' << basis->size() << ',' << h << ',' << l2 << ',' << h1 << ',';
          if (j > 0 && !exact && prev_l2 > 0) {
            csv << std::log(prev_l2 / l2) / std::log(prev_h / h) << ',' << std::log(prev_h1 / h1) / std::log(prev_h / h);
          } else {
            csv << ',';
          }
          csv << ',' << (exact ? "exact" : "") << '\n';
          prev_h = h;
          prev_l2 = exact ? 0.0 : l2;
          prev_h1 = h1;
          out << seq << ' ' << op << " level " << j << ": dofs " << basis->size() << ", L2 " << l2 << ", H1 " << h1
              << '\n';
        }
      }
    }
    fs::create_directories(config.output);
    const fs::path path = fs::path(config.output) / "convergence.csv";
    write_text_file(path.string(), csv.str());
    out << "wrote " << path.string() << '\n';
    return 0;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  }
}

}  // namespace wahm::cli
