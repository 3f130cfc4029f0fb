#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstring>
#include <random>

#include "macgame/lp.hpp"
#include "oracles.hpp"

using namespace macgame;

namespace {

LinearProgram make_lp(std::size_t n, std::vector<double> c) {
  LinearProgram lp;
  lp.num_vars = n;
  lp.objective = std::move(c);
  return lp;
}

}  // namespace

TEST_CASE("simplex solves a trivial equality-constrained program") {
  LinearProgram lp = make_lp(2, {1.0, 0.0});
  lp.eq_rows = {{1.0, 1.0}};
  lp.eq_rhs = {1.0};
  const LpSolution sol = solve(lp);
  REQUIRE(sol.status == LpStatus::optimal);
  CHECK(sol.value == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(sol.x[0] == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(sol.x[1] == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("simplex reports infeasible and unbounded programs") {
  LinearProgram lp = make_lp(1, {1.0});
  lp.ineq_rows = {{1.0}};
  lp.ineq_rhs = {-1.0};  // x <= -1 with x >= 0
  CHECK(solve(lp).status == LpStatus::infeasible);

  LinearProgram free_lp = make_lp(2, {1.0, 0.0});
  CHECK(solve(free_lp).status == LpStatus::unbounded);
}

TEST_CASE("simplex matches the vertex-enumeration oracle on random programs") {
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> coeff(-1.0, 1.0);
  std::uniform_int_distribution<int> nvars(2, 8);
  std::uniform_int_distribution<int> neq(0, 2);
  std::uniform_int_distribution<int> nineq(1, 5);
  int solved = 0;
  for (int t = 0; t < 60; ++t) {
    const std::size_t n = nvars(rng);
    LinearProgram lp;
    lp.num_vars = n;
    lp.objective.resize(n);
    for (double& v : lp.objective) v = coeff(rng);
    const int me = neq(rng), mi = nineq(rng);
    for (int r = 0; r < me; ++r) {
      std::vector<double> row(n);
      for (double& v : row) v = coeff(rng);
      lp.eq_rows.push_back(row);
      lp.eq_rhs.push_back(0.5 * std::abs(coeff(rng)));
    }
    for (int r = 0; r < mi; ++r) {
      std::vector<double> row(n);
      for (double& v : row) v = coeff(rng);
      lp.ineq_rows.push_back(row);
      lp.ineq_rhs.push_back(coeff(rng));
    }
    // Box every variable so the oracle never has to reason about rays.
    for (std::size_t j = 0; j < n; ++j) {
      std::vector<double> row(n, 0.0);
      row[j] = 1.0;
      lp.ineq_rows.push_back(row);
      lp.ineq_rhs.push_back(10.0);
    }

    const LpSolution sol = solve(lp);
    const testing::OracleResult oracle = testing::enumerate_vertices_max(lp);
    if (oracle.feasible) {
      REQUIRE(sol.status == LpStatus::optimal);
      CHECK(sol.value == doctest::Approx(oracle.value).epsilon(0).scale(1).epsilon(1e-8));
      ++solved;
    } else {
      CHECK(sol.status == LpStatus::infeasible);
    }
  }
  CHECK(solved > 20);  // the generator must actually exercise the optimal path
}

TEST_CASE("identical inputs give bit-identical solutions") {
  LinearProgram lp = make_lp(4, {0.3, -0.1, 0.7, 0.2});
  lp.eq_rows = {{1.0, 1.0, 1.0, 1.0}};
  lp.eq_rhs = {1.0};
  lp.ineq_rows = {{0.5, 0.0, 1.0, 0.25}};
  lp.ineq_rhs = {0.4};
  const LpSolution a = solve(lp);
  const LpSolution b = solve(lp);
  REQUIRE(a.status == LpStatus::optimal);
  REQUIRE(b.status == LpStatus::optimal);
  REQUIRE(a.x.size() == b.x.size());
  CHECK(std::memcmp(a.x.data(), b.x.data(), a.x.size() * sizeof(double)) == 0);
}

TEST_CASE("optimal solutions satisfy the feasibility certificate") {
  LinearProgram lp = make_lp(3, {1.0, 2.0, -1.0});
  lp.eq_rows = {{1.0, 1.0, 1.0}};
  lp.eq_rhs = {1.0};
  lp.ineq_rows = {{1.0, 2.0, 0.0}};
  lp.ineq_rhs = {1.5};
  const LpSolution sol = solve(lp);
  REQUIRE(sol.status == LpStatus::optimal);
  double eq = 0.0, ineq = 0.0;
  for (std::size_t j = 0; j < 3; ++j) {
    eq += sol.x[j];
    ineq += lp.ineq_rows[0][j] * sol.x[j];
    CHECK(sol.x[j] >= -1e-9);
  }
  CHECK(std::abs(eq - 1.0) <= 1e-9);
  CHECK(ineq <= 1.5 + 1e-9);
  CHECK(sol.value == doctest::Approx(lp.objective[0] * sol.x[0] + lp.objective[1] * sol.x[1] +
                                     lp.objective[2] * sol.x[2])
                         .epsilon(1e-9));
}

TEST_CASE("weak duality bounds the primal value") {
  // max x + y s.t. x + 2y <= 2, 2x + y <= 2: dual-feasible y = (1/3, 1/3)
  // certifies 4/3, y = (1, 1) certifies 4.
  LinearProgram lp = make_lp(2, {1.0, 1.0});
  lp.ineq_rows = {{1.0, 2.0}, {2.0, 1.0}};
  lp.ineq_rhs = {2.0, 2.0};
  const LpSolution sol = solve(lp);
  REQUIRE(sol.status == LpStatus::optimal);
  CHECK(sol.value <= 4.0 / 3.0 + 1e-9);
  CHECK(sol.value <= 4.0 + 1e-9);
  CHECK(sol.value == doctest::Approx(4.0 / 3.0).epsilon(1e-9));
}

TEST_CASE("pinned objectives implement lexicographic stages") {
  // Stage 1: max x + y over x + y <= 1, x <= 0.75 -> value 1 on a whole edge.
  // Stage 2: max x over the pinned stage-1 face -> (0.75, 0.25) by hand.
  LinearProgram lp = make_lp(2, {1.0, 1.0});
  lp.ineq_rows = {{1.0, 1.0}, {1.0, 0.0}};
  lp.ineq_rhs = {1.0, 0.75};
  const LpSolution stage1 = solve(lp);
  REQUIRE(stage1.status == LpStatus::optimal);
  CHECK(stage1.value == doctest::Approx(1.0).epsilon(1e-12));

  LinearProgram stage2 = with_pinned_objective(lp, {1.0, 1.0}, stage1.value, 0.0);
  stage2.objective = {1.0, 0.0};
  const LpSolution sol2 = solve(stage2);
  REQUIRE(sol2.status == LpStatus::optimal);
  CHECK(sol2.x[0] == doctest::Approx(0.75).epsilon(1e-9));
  CHECK(sol2.x[1] == doctest::Approx(0.25).epsilon(1e-9));
}

TEST_CASE("pinning a non-binding direction keeps the previous optimum feasible") {
  LinearProgram lp = make_lp(2, {1.0, 0.0});
  lp.ineq_rows = {{1.0, 1.0}};
  lp.ineq_rhs = {1.0};
  const LpSolution sol = solve(lp);
  REQUIRE(sol.status == LpStatus::optimal);
  const LinearProgram pinned = with_pinned_objective(lp, {0.0, 1.0}, sol.x[1], 1e-9);
  const LpSolution again = solve(pinned);
  REQUIRE(again.status == LpStatus::optimal);
  CHECK(again.value == doctest::Approx(sol.value).epsilon(1e-9));
}

TEST_CASE("malformed programs are rejected, pathological ones fail loudly") {
  LinearProgram lp = make_lp(2, {1.0, std::nan("")});
  CHECK_THROWS_AS(solve(lp), std::invalid_argument);

  LinearProgram hard = make_lp(2, {1.0, 2.0});  // needs two phase-2 pivots
  hard.ineq_rows = {{1.0, 0.0}, {0.0, 1.0}};
  hard.ineq_rhs = {1.0, 1.0};
  SolverOptions opts;
  opts.max_iterations = 1;  // starve the solver; must not claim optimal
  CHECK(solve(hard, opts).status == LpStatus::numerical_error);
}

TEST_CASE("lp-format dump round-trips the shape of the program") {
  LinearProgram lp = make_lp(2, {1.0, -2.0});
  lp.eq_rows = {{1.0, 1.0}};
  lp.eq_rhs = {1.0};
  lp.ineq_rows = {{0.5, 0.0}};
  lp.ineq_rhs = {0.25};
  const std::string text = to_lp_format(lp);
  CHECK(text.find("Maximize") != std::string::npos);
  CHECK(text.find("Subject To") != std::string::npos);
  CHECK(text.find("= 1") != std::string::npos);
  CHECK(text.find("<= 0.25") != std::string::npos);
}
