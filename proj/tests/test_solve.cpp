#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "wahm/error.hpp"
#include "wahm/generators.hpp"
#include "wahm/solve.hpp"

using namespace wahm;

namespace {

HierarchicalMesh uniform(int n, int p) { return HierarchicalMesh(SubdomainHierarchy::uniform(Domain(2, n), p)); }

CellSet all_cells(const HierarchicalMesh& mesh) {
  CellSet out;
  for (const auto& c : mesh.active_cells()) out.insert(c);
  return out;
}

std::vector<double> ranks(const std::vector<double>& v) {
  std::vector<std::size_t> order(v.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](auto a, auto b) { return v[a] < v[b]; });
  std::vector<double> r(v.size());
  for (std::size_t i = 0; i < order.size(); ++i) r[order[i]] = static_cast<double>(i);
  return r;
}

double spearman(const std::vector<double>& a, const std::vector<double>& b) {
  const auto ra = ranks(a), rb = ranks(b);
  const double n = static_cast<double>(a.size());
  double d2 = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) d2 += (ra[i] - rb[i]) * (ra[i] - rb[i]);
  return 1.0 - 6.0 * d2 / (n * (n * n - 1.0));
}

}  // namespace

TEST_CASE("L2 projection reproduces hierarchical splines") {
  Rng rng(3);
  const HierarchicalMesh mesh = random_wahm(Domain(2, 4), 2, 3, 3, rng);
  const auto basis = build_hb_basis(mesh);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<double> c(basis->size());
  for (auto& v : c) v = u(rng);
  const SplineField target(basis, c);
  const SplineField s = l2_projection([&](const Point& x) { return target.eval(x); }, basis);
  double worst = 0.0;
  for (std::size_t i = 0; i < c.size(); ++i) worst = std::max(worst, std::abs(s.coefficients()[i] - c[i]));
  CHECK(worst < 1e-9);
  const EstimatorMap est = estimate_l2([&](const Point& x) { return target.eval(x); }, s);
  for (const auto& [cell, e] : est) CHECK(e < 1e-9);
}

TEST_CASE("L2 projection of the arctan layer") {
  Rng rng(4);
  const HierarchicalMesh mesh = random_wahm(Domain(2, 8), 3, 2, 4, rng);
  const auto basis = build_hb_basis(mesh);
  const Problem pb = named_problem("l2-arctan", 2);
  const SplineField s = l2_projection(pb.rhs, basis);

  // Galerkin orthogonality on 10 random dofs.
  std::vector<int> dofs;
  std::uniform_int_distribution<int> pick(0, static_cast<int>(basis->size()) - 1);
  for (int i = 0; i < 10; ++i) dofs.push_back(pick(rng));
  const double fnorm = sobolev_seminorm(pb.exact, mesh.domain(), all_cells(mesh), 0, 6);
  for (double r : orthogonality_residuals(pb.rhs, s, dofs)) CHECK(r < 1e-9 * fnorm);

  // Element errors tile the global error.
  const EstimatorMap est = estimate_l2(pb.rhs, s);
  double sum = 0.0;
  for (const auto& [c, e] : est) sum += e * e;
  const double global = qi_error(pb.exact, s, all_cells(mesh), {}, 2.0);
  CHECK(std::sqrt(sum) == doctest::Approx(global).epsilon(1e-10));

  // Best approximation beats the quasi-interpolant.
  const SplineField pi = QuasiInterpolant(basis).multilevel(pb.rhs);
  CHECK(global <= qi_error(pb.exact, pi, all_cells(mesh), {}, 2.0));

  // The largest estimator sits on the diagonal.
  const auto top = std::max_element(est.begin(), est.end(), [](auto& a, auto& b) { return a.second < b.second; });
  const CellId q = top->first;
  CHECK(std::abs(q.index[0] - q.index[1]) <= 1);
}

TEST_CASE("Poisson with a polynomial solution") {
  const Expr u = Expr::parse("x*(1-x)*y*(1-y)");
  for (int p = 2; p <= 3; ++p) {
    const HierarchicalMesh mesh = uniform(4, p);
    const Problem pb = poisson_problem("poly", u, 2);
    const SplineField uh = solve_poisson(pb.rhs, value_of(pb.exact), build_hb_basis(mesh));
    CHECK(seminorm_error(pb.exact, uh, all_cells(mesh), 1) < 1e-8);
    for (const auto& [c, e] : estimate_residual(pb.rhs, uh)) CHECK(e < 1e-7);
  }
}

TEST_CASE("Poisson with zero data and the penalty check") {
  const HierarchicalMesh mesh = uniform(4, 3);
  const auto basis = build_hb_basis(mesh);
  const Function zero = [](const Point&) { return 0.0; };
  const SplineField uh = solve_poisson(zero, zero, basis);
  for (double c : uh.coefficients()) CHECK(c == 0.0);
  CHECK_THROWS_AS(solve_poisson(zero, zero, basis, {0.01}), Error);
  try {
    solve_poisson(zero, zero, basis, {0.01});
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::PenaltyTooSmall);
  }
}

TEST_CASE("Poisson energy convergence on uniform meshes") {
  const Problem pb = poisson_problem("smooth", Expr::parse("sin(3*x)*exp(y)"), 2);
  std::vector<double> err;
  for (int n : {8, 16, 32}) {
    const HierarchicalMesh mesh = uniform(n, 2);
    const SplineField uh = solve_poisson(pb.rhs, value_of(pb.exact), build_hb_basis(mesh));
    err.push_back(seminorm_error(pb.exact, uh, all_cells(mesh), 1));
  }
  CHECK(std::log2(err[1] / err[2]) == doctest::Approx(2.0).epsilon(0.05));
}

TEST_CASE("maximum marking") {
  EstimatorMap est{{{0, {0, 0, 0}}, 1.0}, {{0, {1, 0, 0}}, 3.0}, {{0, {2, 0, 0}}, 3.0}, {{0, {3, 0, 0}}, 0.0}};
  CHECK(mark_maximum(est, 1.0).size() == 2);
  CHECK(mark_maximum(est, 1e-12).size() == 3);
  EstimatorMap scaled;
  for (const auto& [c, e] : est) scaled[c] = 7.5 * e;
  CHECK(mark_maximum(scaled, 0.3) == mark_maximum(est, 0.3));
  CHECK_THROWS_AS(mark_maximum({}, 0.5), Error);
  CHECK_THROWS_AS(mark_maximum(est, 0.0), Error);
}

TEST_CASE("support-aggregated marking marks whole supports") {
  const HierarchicalMesh mesh = uniform(8, 2);
  const auto basis = build_hb_basis(mesh);
  EstimatorMap est;
  for (const auto& c : mesh.active_cells()) est[c] = c.index == Index{4, 4, 0} ? 1.0 : 0.01;
  const MarkSet marks = mark_support_aggregated(est, *basis, 0.9);
  // The nine functions over cell (4,4) tie; their supports cover the 5x5 block around it.
  CHECK(marks.size() == 25);
  CHECK(marks.contains({0, {2, 2, 0}}));
  CHECK(marks.contains({0, {6, 6, 0}}));
}

TEST_CASE("error indices") {
  const auto wa = error_indices(1.68e-3, 5.75e-5, 757, 1771);
  CHECK(wa.i_err == doctest::Approx(1.4656).epsilon(1e-3));
  CHECK(wa.i_eff == doctest::Approx(3.97).epsilon(5e-3));
  const auto sa = error_indices(1.68e-3, 6.73e-4, 757, 974);
  CHECK(sa.i_err == doctest::Approx(0.397).epsilon(5e-3));
  CHECK(error_indices(2.0, 2.0, 10, 20).i_err == 0.0);
  CHECK_THROWS_AS(error_indices(0.0, 1.0, 10, 20), Error);
  CHECK_THROWS_AS(error_indices(1.0, -1.0, 10, 20), Error);
}

TEST_CASE("adaptive L2 loop keeps admissibility and reduces the marked error") {
  const Problem pb = named_problem("l2-arctan", 2);
  for (Method m : {Method::WA, Method::SA2}) {
    LoopOptions opt;
    opt.method = m;
    opt.theta = 0.5;
    opt.max_iter = 3;
    const LoopResult res = run_adaptive_loop(pb, uniform(4, 2), opt);
    REQUIRE(res.records.size() == 4);
    CHECK(res.meshes.size() == 4);
    CHECK(res.marks.size() == 3);
    CHECK(std::isnan(res.records[0].i_err));
    for (std::size_t i = 0; i < res.records.size(); ++i) {
      CHECK(res.records[i].admissible);
      if (i > 0) {
        CHECK(res.records[i].dofs > res.records[i - 1].dofs);
        CHECK(res.records[i].marked_error < res.records[i].previous_error);
      }
    }
  }
  LoopOptions none;
  none.max_iter = 0;
  const LoopResult zero = run_adaptive_loop(pb, uniform(4, 2), none);
  CHECK(zero.records.size() == 1);
  CHECK(zero.marks.empty());
  const std::string csv = records_to_csv(zero.records);
  CHECK(csv.rfind("iter,method,dofs,n_active,global_error,marked_error,I_err,I_eff,sum_estimators\n", 0) == 0);
}

TEST_CASE("residual estimator tracks the energy error along a loop") {
  const Problem pb = named_problem("poisson-arctan", 2);
  LoopOptions opt;
  opt.method = Method::WA;
  opt.theta = 0.5;
  opt.max_iter = 5;
  const LoopResult res = run_adaptive_loop(pb, uniform(8, 2), opt);
  std::vector<double> est, err;
  for (const auto& r : res.records) {
    est.push_back(r.sum_estimators);
    err.push_back(r.global_error * r.global_error);
  }
  CHECK(spearman(est, err) > 0.9);
}
