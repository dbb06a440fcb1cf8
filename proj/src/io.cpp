#include "wahm/io.hpp"

#include <fstream>
#include <sstream>

#include "wahm/error.hpp"

namespace wahm {

namespace {

nlohmann::json cells_to_json(const LevelSet& cells, int dim) {
  nlohmann::json out = nlohmann::json::array();
  for (const auto& k : cells) out.push_back(std::vector<int>(k.begin(), k.begin() + dim));
  return out;
}

Index index_from_json(const nlohmann::json& j, int dim) {
  if (!j.is_array() || static_cast<int>(j.size()) != dim) {
    throw Error(ErrorCode::ParseError, "cell index must have " + std::to_string(dim) + " entries");
  }
  Index k{};
  for (int i = 0; i < dim; ++i) k[i] = j[i].get<int>();
  return k;
}

template <class Fn>
void for_each_level_entry(const nlohmann::json& list, int dim, Fn&& fn) {
  if (!list.is_array()) throw Error(ErrorCode::ParseError, "expected a list of [level, cells] pairs");
  for (const auto& entry : list) {
    if (!entry.is_array() || entry.size() != 2 || !entry[1].is_array()) {
      throw Error(ErrorCode::ParseError, "expected [level, [cells]]");
    }
    const int level = entry[0].get<int>();
    for (const auto& k : entry[1]) fn(level, index_from_json(k, dim));
  }
}

}  // namespace

nlohmann::json hierarchy_to_json(const SubdomainHierarchy& h) {
  nlohmann::json subdomains = nlohmann::json::array();
  for (int l = 1; l < h.depth(); ++l) subdomains.push_back({l, cells_to_json(h.subdomain(l), h.dim())});
  return {{"dim", h.dim()},
          {"degree", h.degree()},
          {"depth", h.depth()},
          {"coarse_grid", h.domain().coarse},
          {"subdomains", std::move(subdomains)}};
}

SubdomainHierarchy hierarchy_from_json(const nlohmann::json& j) {
  try {
    const int dim = j.at("dim").get<int>();
    const int degree = j.at("degree").get<int>();
    const int coarse = j.at("coarse_grid").get<int>();
    const Domain domain(dim, coarse);
    std::vector<LevelSet> refined;
    for_each_level_entry(j.at("subdomains"), dim, [&](int level, const Index& k) {
      if (level < 1) throw Error(ErrorCode::ParseError, "subdomain levels start at 1");
      if (static_cast<int>(refined.size()) < level) refined.resize(level);
      refined[level - 1].insert(k);
    });
    SubdomainHierarchy h(domain, degree, std::move(refined));
    if (j.contains("depth") && j.at("depth").get<int>() != h.depth()) {
      throw Error(ErrorCode::InvalidHierarchy, "declared depth " + std::to_string(j.at("depth").get<int>()) +
                                                   " differs from " + std::to_string(h.depth()));
    }
    return h;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::ParseError, e.what());
  }
}

nlohmann::json marks_to_json(const MarkSet& marks, int dim) {
  nlohmann::json list = nlohmann::json::array();
  for (int l = 0; l < marks.levels(); ++l) {
    if (!marks.level(l).empty()) list.push_back({l, cells_to_json(marks.level(l), dim)});
  }
  return {{"dim", dim}, {"marks", std::move(list)}};
}

MarkSet marks_from_json(const nlohmann::json& j) {
  try {
    const int dim = j.at("dim").get<int>();
    MarkSet out;
    for_each_level_entry(j.at("marks"), dim, [&](int level, const Index& k) { out.insert({level, k}); });
    return out;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::ParseError, e.what());
  }
}

nlohmann::json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::ParseError, "cannot open " + path);
  try {
    return nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::ParseError, path + ": " + e.what());
  }
}

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::InvalidArgument, "cannot write " + path);
  out << text;
}

}  // namespace wahm
