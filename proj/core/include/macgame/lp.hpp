#pragma once

#include <cstddef>
#include <string>
#include <vector>

namespace macgame {

/// maximize objective . x
/// subject to  eq_rows[i] . x == eq_rhs[i]
///             ineq_rows[i] . x <= ineq_rhs[i]
///             x >= 0
struct LinearProgram {
  std::size_t num_vars = 0;
  std::vector<double> objective;
  std::vector<std::vector<double>> eq_rows;
  std::vector<double> eq_rhs;
  std::vector<std::vector<double>> ineq_rows;
  std::vector<double> ineq_rhs;
};

enum class LpStatus { optimal, infeasible, unbounded, numerical_error };

const char* to_string(LpStatus status);

struct LpSolution {
  LpStatus status = LpStatus::numerical_error;
  std::vector<double> x;  ///< present iff optimal; a vertex of the polytope
  double value = 0.0;     ///< objective . x, iff optimal
  int iterations = 0;
};

struct SolverOptions {
  double feas_tol = 1e-9;   ///< max violation accepted in an optimal solution
  double pivot_tol = 1e-9;  ///< reduced-cost / pivot-element threshold
  std::size_t max_iterations = 0;  ///< 0 = automatic (scales with problem size)
};

/// Throws std::invalid_argument on malformed input (length mismatch, NaN or
/// infinite coefficients).
void validate(const LinearProgram& lp);

/// Dense two-phase simplex with Bland's smallest-index pivot rule: identical
/// inputs take identical pivots, so repeated solves are bit-identical. The
/// returned point is recomputed from the final basis against the original
/// data and verified against feas_tol; anything that fails that check comes
/// back as numerical_error, never as a silently wrong optimum.
LpSolution solve(const LinearProgram& lp, const SolverOptions& options = {});

/// Copy of lp with two extra inequality rows restricting direction . x to
/// [value - tol, value + tol]. Stacking these pins realizes lexicographic
/// stages: each stage optimizes over the (tol-relaxed) argmax set of the
/// previous ones.
LinearProgram with_pinned_objective(const LinearProgram& lp,
                                    const std::vector<double>& direction, double value,
                                    double tol);

/// CPLEX LP-format text dump, for cross-checking against external tools.
std::string to_lp_format(const LinearProgram& lp);

}  // namespace macgame
