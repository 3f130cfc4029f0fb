#include "macgame/lp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

#include <Eigen/Dense>

namespace macgame {

const char* to_string(LpStatus status) {
  switch (status) {
    case LpStatus::optimal: return "optimal";
    case LpStatus::infeasible: return "infeasible";
    case LpStatus::unbounded: return "unbounded";
    case LpStatus::numerical_error: return "numerical_error";
  }
  return "unknown";
}

void validate(const LinearProgram& lp) {
  auto check = [](bool ok, const char* what) {
    if (!ok) throw std::invalid_argument(std::string("LinearProgram: ") + what);
  };
  check(lp.objective.size() == lp.num_vars, "objective length != num_vars");
  check(lp.eq_rows.size() == lp.eq_rhs.size(), "eq row/rhs count mismatch");
  check(lp.ineq_rows.size() == lp.ineq_rhs.size(), "ineq row/rhs count mismatch");
  auto finite = [&](double v) { return std::isfinite(v); };
  for (double v : lp.objective) check(finite(v), "objective has NaN/inf");
  for (std::size_t r = 0; r < lp.eq_rows.size(); ++r) {
    check(lp.eq_rows[r].size() == lp.num_vars, "eq row length != num_vars");
    for (double v : lp.eq_rows[r]) check(finite(v), "eq row has NaN/inf");
    check(finite(lp.eq_rhs[r]), "eq rhs has NaN/inf");
  }
  for (std::size_t r = 0; r < lp.ineq_rows.size(); ++r) {
    check(lp.ineq_rows[r].size() == lp.num_vars, "ineq row length != num_vars");
    for (double v : lp.ineq_rows[r]) check(finite(v), "ineq row has NaN/inf");
    check(finite(lp.ineq_rhs[r]), "ineq rhs has NaN/inf");
  }
}

namespace {

constexpr std::size_t kNone = static_cast<std::size_t>(-1);

struct Tableau {
  std::size_t cols = 0;
  std::vector<std::vector<double>> rows;
  std::vector<double> rhs;
  std::vector<std::size_t> basis;  // basis[r] = basic column of row r
};

// Gauss-Jordan pivot on (pr, pc); updates the reduced-cost row when given.
void pivot(Tableau& t, std::size_t pr, std::size_t pc, std::vector<double>* reduced) {
  std::vector<double>& prow = t.rows[pr];
  const double pv = prow[pc];
  for (double& v : prow) v /= pv;
  t.rhs[pr] /= pv;
  prow[pc] = 1.0;
  for (std::size_t r = 0; r < t.rows.size(); ++r) {
    if (r == pr) continue;
    const double f = t.rows[r][pc];
    if (f == 0.0) continue;
    for (std::size_t j = 0; j < t.cols; ++j) t.rows[r][j] -= f * prow[j];
    t.rhs[r] -= f * t.rhs[pr];
    t.rows[r][pc] = 0.0;
  }
  if (reduced != nullptr) {
    const double f = (*reduced)[pc];
    if (f != 0.0) {
      for (std::size_t j = 0; j < t.cols; ++j) (*reduced)[j] -= f * prow[j];
      (*reduced)[pc] = 0.0;
    }
  }
  t.basis[pr] = pc;
}

enum class PivotOutcome { optimal, unbounded, iteration_limit };

// Maximizes cost.x with Bland's rule: the entering column is the smallest
// eligible index, the leaving row breaks ratio ties on the smallest basic
// index. Columns >= first_banned never enter (used to retire artificials).
PivotOutcome run_simplex(Tableau& t, const std::vector<double>& cost, std::size_t first_banned,
                         double pivot_tol, int& iterations, std::size_t max_iterations) {
  std::vector<double> reduced(cost);
  for (std::size_t r = 0; r < t.rows.size(); ++r) {
    const double cb = cost[t.basis[r]];
    if (cb == 0.0) continue;
    for (std::size_t j = 0; j < t.cols; ++j) reduced[j] -= cb * t.rows[r][j];
  }
  for (std::size_t r = 0; r < t.rows.size(); ++r) reduced[t.basis[r]] = 0.0;

  while (true) {
    std::size_t enter = kNone;
    for (std::size_t j = 0; j < first_banned; ++j) {
      if (reduced[j] > pivot_tol) {
        enter = j;
        break;
      }
    }
    if (enter == kNone) return PivotOutcome::optimal;

    std::size_t leave = kNone;
    double best_ratio = std::numeric_limits<double>::infinity();
    for (std::size_t r = 0; r < t.rows.size(); ++r) {
      const double a = t.rows[r][enter];
      if (a <= pivot_tol) continue;
      const double ratio = std::max(t.rhs[r], 0.0) / a;
      if (ratio < best_ratio ||
          (ratio == best_ratio && leave != kNone && t.basis[r] < t.basis[leave])) {
        best_ratio = ratio;
        leave = r;
      }
    }
    if (leave == kNone) return PivotOutcome::unbounded;

    pivot(t, leave, enter, &reduced);
    if (static_cast<std::size_t>(++iterations) > max_iterations)
      return PivotOutcome::iteration_limit;
  }
}

}  // namespace

LpSolution solve(const LinearProgram& lp, const SolverOptions& options) {
  validate(lp);
  const std::size_t n = lp.num_vars;
  const std::size_t me = lp.eq_rows.size();
  const std::size_t mi = lp.ineq_rows.size();
  const std::size_t m = me + mi;
  const std::size_t n_struct = n + mi;  // structural + slack

  // Standard form with nonnegative rhs; slack column i is n + i.
  std::vector<std::vector<double>> a_std(m, std::vector<double>(n_struct, 0.0));
  std::vector<double> b_std(m, 0.0);
  for (std::size_t r = 0; r < me; ++r) {
    std::copy(lp.eq_rows[r].begin(), lp.eq_rows[r].end(), a_std[r].begin());
    b_std[r] = lp.eq_rhs[r];
  }
  for (std::size_t i = 0; i < mi; ++i) {
    std::copy(lp.ineq_rows[i].begin(), lp.ineq_rows[i].end(), a_std[me + i].begin());
    a_std[me + i][n + i] = 1.0;
    b_std[me + i] = lp.ineq_rhs[i];
  }
  for (std::size_t r = 0; r < m; ++r) {
    if (b_std[r] < 0.0) {
      for (double& v : a_std[r]) v = -v;
      b_std[r] = -b_std[r];
    }
  }

  // Initial basis: slack where its sign survived, artificials elsewhere.
  std::vector<std::size_t> art_rows;
  std::vector<std::size_t> basis(m, kNone);
  for (std::size_t i = 0; i < mi; ++i)
    if (a_std[me + i][n + i] == 1.0) basis[me + i] = n + i;
  for (std::size_t r = 0; r < m; ++r)
    if (basis[r] == kNone) art_rows.push_back(r);

  const std::size_t n_art = art_rows.size();
  const std::size_t ncols = n_struct + n_art;

  Tableau t;
  t.cols = ncols;
  t.rhs = b_std;
  t.basis = basis;
  t.rows.assign(m, std::vector<double>(ncols, 0.0));
  for (std::size_t r = 0; r < m; ++r)
    std::copy(a_std[r].begin(), a_std[r].end(), t.rows[r].begin());
  for (std::size_t k = 0; k < n_art; ++k) {
    t.rows[art_rows[k]][n_struct + k] = 1.0;
    t.basis[art_rows[k]] = n_struct + k;
  }
  std::vector<std::size_t> active(m);  // tableau row -> standard-form row
  for (std::size_t r = 0; r < m; ++r) active[r] = r;

  const std::size_t max_iterations =
      options.max_iterations ? options.max_iterations : 2000 + 200 * (m + ncols);
  LpSolution out;

  if (n_art > 0) {
    std::vector<double> phase1(ncols, 0.0);
    for (std::size_t k = 0; k < n_art; ++k) phase1[n_struct + k] = -1.0;
    const PivotOutcome rc =
        run_simplex(t, phase1, ncols, options.pivot_tol, out.iterations, max_iterations);
    if (rc != PivotOutcome::optimal) {
      out.status = LpStatus::numerical_error;  // phase 1 is bounded by construction
      return out;
    }
    double infeasibility = 0.0;
    for (std::size_t r = 0; r < t.rows.size(); ++r)
      if (t.basis[r] >= n_struct) infeasibility += std::max(t.rhs[r], 0.0);
    if (infeasibility > 1e-7) {
      out.status = LpStatus::infeasible;
      return out;
    }
    // Retire artificials: pivot them out where a structural column is
    // available, drop the row as redundant otherwise.
    for (std::size_t r = 0; r < t.rows.size();) {
      if (t.basis[r] < n_struct) {
        ++r;
        continue;
      }
      std::size_t pc = kNone;
      for (std::size_t j = 0; j < n_struct; ++j) {
        if (std::abs(t.rows[r][j]) > 1e-7) {
          pc = j;
          break;
        }
      }
      if (pc != kNone) {
        pivot(t, r, pc, nullptr);
        ++r;
      } else {
        t.rows.erase(t.rows.begin() + r);
        t.rhs.erase(t.rhs.begin() + r);
        t.basis.erase(t.basis.begin() + r);
        active.erase(active.begin() + r);
      }
    }
  }

  std::vector<double> phase2(ncols, 0.0);
  std::copy(lp.objective.begin(), lp.objective.end(), phase2.begin());
  const PivotOutcome rc =
      run_simplex(t, phase2, n_struct, options.pivot_tol, out.iterations, max_iterations);
  if (rc == PivotOutcome::iteration_limit) {
    out.status = LpStatus::numerical_error;
    return out;
  }
  if (rc == PivotOutcome::unbounded) {
    out.status = LpStatus::unbounded;
    return out;
  }

  // Recompute the vertex from the final basis against the original data; the
  // tableau values carry accumulated pivot error, the basis does not.
  const std::size_t mm = t.rows.size();
  std::vector<double> x(n_struct, 0.0);
  if (mm > 0) {
    Eigen::MatrixXd basis_matrix(mm, mm);
    Eigen::VectorXd rhs_vec(mm);
    for (std::size_t r = 0; r < mm; ++r) {
      rhs_vec(static_cast<Eigen::Index>(r)) = b_std[active[r]];
      for (std::size_t c = 0; c < mm; ++c)
        basis_matrix(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) =
            a_std[active[r]][t.basis[c]];
    }
    Eigen::VectorXd xb = basis_matrix.partialPivLu().solve(rhs_vec);
    const double scale = 1.0 + rhs_vec.cwiseAbs().maxCoeff();
    if (!xb.allFinite() || (basis_matrix * xb - rhs_vec).cwiseAbs().maxCoeff() > 1e-7 * scale) {
      out.status = LpStatus::numerical_error;
      return out;
    }
    for (std::size_t c = 0; c < mm; ++c) x[t.basis[c]] = xb(static_cast<Eigen::Index>(c));
  }

  // Certify against the original program before reporting optimal.
  double worst = 0.0;
  for (std::size_t r = 0; r < me; ++r) {
    double dot = 0.0;
    for (std::size_t j = 0; j < n; ++j) dot += lp.eq_rows[r][j] * x[j];
    worst = std::max(worst, std::abs(dot - lp.eq_rhs[r]));
  }
  for (std::size_t r = 0; r < mi; ++r) {
    double dot = 0.0;
    for (std::size_t j = 0; j < n; ++j) dot += lp.ineq_rows[r][j] * x[j];
    worst = std::max(worst, dot - lp.ineq_rhs[r]);
  }
  for (std::size_t j = 0; j < n; ++j) worst = std::max(worst, -x[j]);
  if (worst > options.feas_tol) {
    out.status = LpStatus::numerical_error;
    return out;
  }

  out.x.assign(x.begin(), x.begin() + n);
  out.value = 0.0;
  for (std::size_t j = 0; j < n; ++j) out.value += lp.objective[j] * out.x[j];
  out.status = LpStatus::optimal;
  return out;
}

LinearProgram with_pinned_objective(const LinearProgram& lp,
                                    const std::vector<double>& direction, double value,
                                    double tol) {
  if (direction.size() != lp.num_vars)
    throw std::invalid_argument("with_pinned_objective: direction length != num_vars");
  LinearProgram out = lp;
  out.ineq_rows.push_back(direction);
  out.ineq_rhs.push_back(value + tol);
  std::vector<double> neg(direction.size());
  for (std::size_t j = 0; j < direction.size(); ++j) neg[j] = -direction[j];
  out.ineq_rows.push_back(std::move(neg));
  out.ineq_rhs.push_back(-(value - tol));
  return out;
}

std::string to_lp_format(const LinearProgram& lp) {
  std::ostringstream os;
  os.precision(17);
  auto write_row = [&](const std::vector<double>& row) {
    bool any = false;
    for (std::size_t j = 0; j < row.size(); ++j) {
      if (row[j] == 0.0) continue;
      os << (row[j] >= 0.0 ? " + " : " - ") << std::abs(row[j]) << " x" << (j + 1);
      any = true;
    }
    if (!any) os << " 0 x1";
  };
  os << "Maximize\n obj:";
  write_row(lp.objective);
  os << "\nSubject To\n";
  for (std::size_t r = 0; r < lp.eq_rows.size(); ++r) {
    os << " e" << (r + 1) << ":";
    write_row(lp.eq_rows[r]);
    os << " = " << lp.eq_rhs[r] << "\n";
  }
  for (std::size_t r = 0; r < lp.ineq_rows.size(); ++r) {
    os << " i" << (r + 1) << ":";
    write_row(lp.ineq_rows[r]);
    os << " <= " << lp.ineq_rhs[r] << "\n";
  }
  os << "End\n";
  return os.str();
}

}  // namespace macgame
