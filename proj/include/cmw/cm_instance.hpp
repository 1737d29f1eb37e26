#pragma once

#include <cstddef>
#include <vector>

#include "cmw/measures.hpp"

namespace cmw {

/** Analytic extension rule for the transport cost, used when a dual
 *  certificate is evaluated on a grid finer than the instance's own.
 *  None means "table only": evaluation off the stored grid is an error. */
enum class CostRule { None, SquaredW, SameVElseInf, Zero };

/// Analytic extension rule for the objective integrand f, same contract.
enum class FRule {
  None,
  IndicatorWBelowOne,   ///< f(v, w) = 1{w < 1}
  GTimesIndicatorW0,    ///< f(v, w) = g(v) * 1{w = 0}, g tabulated per v point
  NegInvOnePlusAbsW,    ///< f(v, w) = -1 / (1 + |w|)
  VTimesWMinusOne,      ///< f(v, w) = v_0 * (w - 1)
};

/** One conditional-moment transport instance on finite support:
 *  reference measure mu-hat (atoms (v-hat, w-hat)), a second-coordinate
 *  product grid, a cost table with +inf marking excluded pairs, the objective
 *  table f on the grid, the conditional target h per distinct v-hat, and the
 *  transport budget rho. */
struct CmInstance {
  DiscreteMeasure first;
  ProductGrid second;
  std::vector<double> cost;  ///< rows() x grid size, +inf allowed, row-major
  std::vector<double> f;     ///< one value per grid point
  std::vector<double> h;     ///< one value per distinct v-hat group
  double rho = 0.0;
  CostRule cost_rule = CostRule::None;
  FRule f_rule = FRule::None;
  std::vector<double> g_values;  ///< per second-grid v point, GTimesIndicatorW0

  std::size_t rows() const { return first.atoms.size(); }
  std::size_t cols() const { return second.size(); }
  double cost_at(std::size_t j, std::size_t k) const {
    return cost[j * cols() + k];
  }
  bool included(std::size_t j, std::size_t k) const;

  /// Rule-based cost for an arbitrary point; throws when cost_rule is None.
  double cost_value(std::size_t j, const std::vector<double>& v, double w) const;
  /// Rule-based objective for an arbitrary point; throws when f_rule is None.
  double f_value(const std::vector<double>& v, double w) const;

  GroupIndex groups() const { return group_by_vhat(first); }

  /// Structural checks: shapes, finite f and rho, costs >= 0 with +inf
  /// allowed, at least one included pair per atom, h sized per group.
  void validate() const;
};

}  // namespace cmw
