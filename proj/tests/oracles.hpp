// Test-only oracles, kept independent of the solver implementation they check.
#pragma once

#include <cmath>
#include <limits>
#include <vector>

#include <Eigen/Dense>

#include "macgame/lp.hpp"

namespace macgame::testing {

struct OracleResult {
  bool feasible = false;
  double value = 0.0;
  std::vector<double> x;
};

// Brute-force LP maximization by enumerating all basic solutions of the
// standard form (slacks appended, redundant rows removed first): every
// vertex of a pointed feasible polyhedron is a basic feasible solution, so
// scanning all column subsets and keeping the feasible maximum is exact.
inline OracleResult enumerate_vertices_max(const LinearProgram& lp, double tol = 1e-9) {
  const std::size_t n = lp.num_vars;
  const std::size_t me = lp.eq_rows.size();
  const std::size_t mi = lp.ineq_rows.size();
  const std::size_t cols = n + mi;

  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(me + mi, cols);
  Eigen::VectorXd b(me + mi);
  for (std::size_t r = 0; r < me; ++r) {
    for (std::size_t j = 0; j < n; ++j) a(r, j) = lp.eq_rows[r][j];
    b(r) = lp.eq_rhs[r];
  }
  for (std::size_t r = 0; r < mi; ++r) {
    for (std::size_t j = 0; j < n; ++j) a(me + r, j) = lp.ineq_rows[r][j];
    a(me + r, n + r) = 1.0;
    b(me + r) = lp.ineq_rhs[r];
  }

  // Row-reduce [A | b] to drop dependent rows; an inconsistent dependent row
  // means the system (and so the LP) is infeasible.
  Eigen::MatrixXd work(me + mi, cols + 1);
  work << a, b;
  std::size_t row = 0;
  for (std::size_t col = 0; col < cols && row < static_cast<std::size_t>(work.rows()); ++col) {
    std::size_t best = row;
    for (std::size_t r = row + 1; r < static_cast<std::size_t>(work.rows()); ++r)
      if (std::abs(work(r, col)) > std::abs(work(best, col))) best = r;
    if (std::abs(work(best, col)) < 1e-11) continue;
    work.row(row).swap(work.row(best));
    for (std::size_t r = 0; r < static_cast<std::size_t>(work.rows()); ++r) {
      if (r == row) continue;
      work.row(r) -= (work(r, col) / work(row, col)) * work.row(row);
    }
    ++row;
  }
  const std::size_t rank = row;
  for (std::size_t r = rank; r < static_cast<std::size_t>(work.rows()); ++r)
    if (std::abs(work(r, cols)) > 1e-8) return {};  // 0 = nonzero: infeasible

  // Keep an independent subset of the original rows matching the rank.
  Eigen::MatrixXd a_red(rank, cols);
  Eigen::VectorXd b_red(rank);
  {
    std::size_t kept = 0;
    Eigen::MatrixXd probe(0, cols);
    for (std::size_t r = 0; r < me + mi && kept < rank; ++r) {
      Eigen::MatrixXd trial(kept + 1, cols);
      if (kept > 0) trial.topRows(kept) = a_red.topRows(kept);
      trial.row(kept) = a.row(r);
      if (Eigen::FullPivLU<Eigen::MatrixXd>(trial).rank() == static_cast<Eigen::Index>(kept + 1)) {
        a_red.row(kept) = a.row(r);
        b_red(kept) = b(r);
        ++kept;
      }
    }
  }

  OracleResult best;
  best.value = -std::numeric_limits<double>::infinity();
  std::vector<std::size_t> pick(rank);
  for (std::size_t i = 0; i < rank; ++i) pick[i] = i;
  const auto advance = [&]() {
    std::size_t i = rank;
    while (i > 0) {
      --i;
      if (pick[i] + (rank - i) < cols) {
        ++pick[i];
        for (std::size_t j = i + 1; j < rank; ++j) pick[j] = pick[j - 1] + 1;
        return true;
      }
    }
    return false;
  };
  if (rank == 0) {
    // No binding rows at all: x = 0 is the only basic point.
    best.feasible = true;
    best.x.assign(n, 0.0);
    best.value = 0.0;
    return best;
  }
  do {
    Eigen::MatrixXd basis(rank, rank);
    for (std::size_t c = 0; c < rank; ++c) basis.col(c) = a_red.col(pick[c]);
    Eigen::FullPivLU<Eigen::MatrixXd> lu(basis);
    if (!lu.isInvertible()) continue;
    Eigen::VectorXd xb = lu.solve(b_red);
    bool ok = true;
    for (std::size_t c = 0; c < rank; ++c) ok = ok && xb(c) >= -tol;
    if (!ok) continue;
    double value = 0.0;
    std::vector<double> x(n, 0.0);
    for (std::size_t c = 0; c < rank; ++c) {
      if (pick[c] < n) {
        x[pick[c]] = xb(c);
        value += lp.objective[pick[c]] * xb(c);
      }
    }
    if (!best.feasible || value > best.value) {
      best.feasible = true;
      best.value = value;
      best.x = std::move(x);
    }
  } while (advance());
  return best;
}

}  // namespace macgame::testing
