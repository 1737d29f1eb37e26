#pragma once

#include <cstddef>
#include <vector>

#include "cmw/conjugate.hpp"
#include "cmw/lp.hpp"

namespace cmw {

/** One uncertain function f_i(x, z) = xpart(x) + x'P z + c'z + d:
 *  convex in x (affine or diagonal quadratic), affine in z. */
struct BiFunction {
  std::vector<double> P;  ///< n x zdim bilinear table, row-major; empty = 0
  XFunction xpart;
  std::vector<double> c;  ///< zdim coefficients of the z-linear part
  double d = 0.0;

  /// xpart with the z-dependent shift folded in: f_i(., z) as an XFunction.
  XFunction freeze_z(const std::vector<double>& z, std::size_t n,
                     std::size_t zdim) const;
  /// Coefficients of z -> f_i(x, z) at fixed x: (coef, constant).
  std::pair<std::vector<double>, double> freeze_x(const std::vector<double>& x,
                                                  std::size_t n,
                                                  std::size_t zdim) const;
};

/** Uncertain convex program over a vertex polytope:
 *      minimize_x  max_{z in Z} f_0(x, z)
 *      subject to  F_i(x) = max_{z in Z} f_i(x, z) <= 0,  i = 1..m,
 *  with an optional box on x. Z is given by its vertices, so every F_i is an
 *  exact vertex maximum. */
struct UncertainProgram {
  std::size_t n = 0;
  std::size_t zdim = 0;
  std::vector<std::vector<double>> Z;    ///< polytope vertices
  std::vector<BiFunction> functions;     ///< f_0 then the m constraints
  std::vector<double> x_lo, x_hi;        ///< optional box, empty = none

  std::size_t m() const { return functions.size() - 1; }
  bool has_box() const { return !x_lo.empty(); }
  double f_eval(std::size_t i, const std::vector<double>& x,
                const std::vector<double>& z) const;
  /// Exact vertex maximum F_i(x).
  double robust_eval(std::size_t i, const std::vector<double>& x) const;
  void validate() const;
};

struct PwResult {
  LpStatus status = LpStatus::Infeasible;
  double value = 0.0;
  std::vector<double> x;
  int subgradient_iters = 0;  ///< 0 for the pure-LP (all-affine) route
};

/** Solves the robust counterpart. All-affine programs go through one epigraph
 *  LP over the vertex rows. A diagonal-quadratic objective (with affine
 *  constraints) is first descended by projected subgradient (step 1/k, cap
 *  10000, best iterate) and then resolved exactly by enumerating KKT active
 *  sets of the strictly convex QP. */
PwResult primal_worst(const UncertainProgram& prog);

/** Feasible point of the optimistic dual: per-function uncertainty choices
 *  z_i, nonnegative weights wstar_i (i >= 1; the objective's weight is fixed
 *  at 1), and linear forms dstar_i that must sum to zero, with z_0 in Z and
 *  z_i in wstar_i * Z. */
struct DbPoint {
  std::vector<std::vector<double>> z;      ///< m+1 entries
  std::vector<double> wstar;               ///< m entries, for f_1..f_m
  std::vector<std::vector<double>> dstar;  ///< m+1 entries
};

/// Throws std::invalid_argument when an invariant fails (tolerance 1e-9 on
/// the zero-sum, hull-membership LPs for the z's).
void validate_db_point(const UncertainProgram& prog, const DbPoint& pt);

/** Objective of the optimistic dual at pt:
 *      -h_0(z_0, dstar_0) - sum_i (h_i wstar_i)(z_i, dstar_i),
 *  where h_i(z, dstar) is the x-conjugate of f_i(., z) and the weighting is
 *  right scalar multiplication. Returns -inf when any conjugate is +inf;
 *  invariant violations throw instead. */
double db_evaluate(const UncertainProgram& prog, const DbPoint& pt);

/** Builds the dual point from the optimal multipliers of the primal solve:
 *  wstar_i aggregates the vertex-row multipliers of constraint i, z_i their
 *  vertex average, and dstar_i = wstar_i (q_i x* + a_i) + P_i z_i, which sums
 *  to zero by stationarity. Requires a solvable program; boxes must be
 *  encoded as affine constraint functions (an explicit x-box would carry
 *  multipliers outside the aggregation). */
DbPoint db_construct_from_kkt(const UncertainProgram& prog);

/** Lagrangian dual value at a fixed uncertainty choice per function:
 *      sup_{u >= 0} inf_x f_0(x, z_0) + sum_i u_i f_i(x, z_i).
 *  All-affine: one LP (infeasible -> -inf, unbounded -> +inf). Quadratic
 *  objective: exact concave maximization by projected Newton with an active
 *  set on u >= 0. Each z_i must lie in conv(Z). */
double nonconvex_db_evaluate(const UncertainProgram& prog,
                             const std::vector<std::vector<double>>& z_tuple);

struct SlaterReport {
  bool holds = false;
  double margin = 0.0;  ///< min over x of max_i F_i(x); holds iff < -tol
  std::vector<double> witness;
};

/// Strict robust feasibility: minimizes max_{i>=1} F_i(x) (epigraph LP over
/// vertex rows when constraints are affine) and tests the optimum < -1e-9.
SlaterReport check_prop41_i(const UncertainProgram& prog);

/// Nonempty and bounded robust feasible set: explicit box, or, for affine
/// constraints, a feasibility LP plus 2n coordinate-range LPs all bounded.
bool check_prop41_ii(const UncertainProgram& prog);

/// Strict dual regularity at pt: every wstar_i > tol, z_i / wstar_i in the
/// relative interior of Z, and every conjugate at pt finite.
bool check_prop42(const UncertainProgram& prog, const DbPoint& pt,
                  double delta = 1e-9);

}  // namespace cmw
