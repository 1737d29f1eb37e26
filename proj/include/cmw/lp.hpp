#pragma once

#include <cstddef>
#include <limits>
#include <string>
#include <utility>
#include <vector>

namespace cmw {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

enum class LpStatus { Optimal, Infeasible, Unbounded, IterationLimit };

std::string to_string(LpStatus s);

/** Linear program in computational form:
 *      minimize c'x  subject to  A x = b,  lower <= x <= upper.
 *  Free variables are expressed with infinite bounds, never by splitting.
 *  Inequality rows are modelled by explicit slack columns (see LpBuilder).
 */
struct LpProblem {
  std::size_t n = 0;            ///< number of variables
  std::size_t m = 0;            ///< number of equality rows
  std::vector<double> c;        ///< n objective coefficients
  std::vector<double> A;        ///< m*n row-major constraint matrix
  std::vector<double> b;        ///< m right-hand sides
  std::vector<double> lower;    ///< n lower bounds, -inf allowed
  std::vector<double> upper;    ///< n upper bounds, +inf allowed

  double& at(std::size_t i, std::size_t j) { return A[i * n + j]; }
  double at(std::size_t i, std::size_t j) const { return A[i * n + j]; }

  /// Throws std::invalid_argument on dimension mismatch, NaN input,
  /// crossing bounds, or more than kMaxVariables variables.
  void validate() const;

  static constexpr std::size_t kMaxVariables = 5000;  ///< dense-storage cap
};

struct LpOptions {
  double feas_tol = 1e-9;
  double opt_tol = 1e-9;
  int max_iters = 0;            ///< 0 selects an automatic cap
  int degeneracy_trigger = 40;  ///< degenerate pivots before Bland's rule
};

struct LpSolution {
  LpStatus status = LpStatus::IterationLimit;
  double value = 0.0;                 ///< c'x at the returned point
  std::vector<double> x;              ///< n primal values (when Optimal)
  std::vector<double> duals;          ///< m equality-row multipliers y
  std::vector<double> reduced_costs;  ///< n values c_j - y'A_j
  int iterations = 0;
  bool bland_activated = false;       ///< anti-cycling rule was engaged
  double primal_residual = 0.0;       ///< max |Ax - b| and bound violation
  double dual_residual = 0.0;         ///< max sign-violation of reduced costs
};

/** Bounded-variable revised simplex with an explicit dense basis inverse.
 *  Phase 1 minimizes artificial infeasibility; Dantzig pricing switches to
 *  Bland's rule after a degeneracy streak. Never reports Optimal without
 *  primal and dual certificates passing the residual tolerances. */
LpSolution solve_lp(const LpProblem& p, const LpOptions& opt = {});

/** Exhaustive basic-solution enumeration, the test oracle for solve_lp.
 *  Returns every distinct vertex (basic feasible solution) with its
 *  objective value; an infeasible program yields an empty list.
 *  Throws std::invalid_argument when n > 12. */
std::vector<std::pair<std::vector<double>, double>> enumerate_vertices(
    const LpProblem& p, const LpOptions& opt = {});

enum class RowSense { Eq, Le, Ge };

/** Incremental assembler that lowers Le/Ge rows to equality form with slack
 *  columns appended after the structural variables. Row duals returned by
 *  solve_lp keep the original row indices. */
class LpBuilder {
 public:
  /// Adds a variable, returns its column index.
  std::size_t add_var(double lo, double hi, double cost);
  /// Adds a row from sparse (column, coefficient) terms, returns row index.
  std::size_t add_row(RowSense sense, double rhs,
                      std::vector<std::pair<std::size_t, double>> terms);
  std::size_t num_vars() const { return n_; }
  std::size_t num_rows() const { return senses_.size(); }
  /// Materializes the equality-form problem (appends slacks).
  LpProblem build() const;

 private:
  std::size_t n_ = 0;
  std::vector<double> lo_, hi_, cost_;
  std::vector<RowSense> senses_;
  std::vector<double> rhs_;
  std::vector<std::vector<std::pair<std::size_t, double>>> rows_;
};

}  // namespace cmw
