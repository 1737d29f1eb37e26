#pragma once

#include <cstddef>
#include <string>
#include <vector>

namespace cmw {

/** Product grid on V x W: every pair (v_points[iv], w_points[iw]) is a grid
 *  point, flattened as k = iv * |W| + iw. V points may be multi-dimensional;
 *  W points are reals in strictly increasing order. */
struct ProductGrid {
  std::vector<std::vector<double>> v_points;
  std::vector<double> w_points;
  std::vector<std::string> labels;  ///< optional, one per v point when present

  std::size_t size() const { return v_points.size() * w_points.size(); }
  std::size_t v_index(std::size_t k) const { return k / w_points.size(); }
  const std::vector<double>& v_of(std::size_t k) const {
    return v_points[k / w_points.size()];
  }
  double w_of(std::size_t k) const { return w_points[k % w_points.size()]; }

  void validate() const;
  bool same_shape(const ProductGrid& o) const;
};

/// One support atom (v-hat, w-hat) of a discrete measure on V x W.
struct Atom {
  std::vector<double> v;
  double w = 0.0;
};

/// Finitely supported probability measure given by atoms and masses.
struct DiscreteMeasure {
  std::vector<Atom> atoms;
  std::vector<double> mass;

  /// Throws unless masses are nonnegative (to -1e-15) and sum to 1 +- 1e-12.
  void validate() const;
};

/** Grouping of first-support atoms by their v-hat value. Keys are compared
 *  bitwise: two v-hats belong to one group only when every coordinate is
 *  identical as a double. */
struct GroupIndex {
  std::vector<std::vector<double>> keys;          ///< distinct v-hat values
  std::vector<std::vector<std::size_t>> members;  ///< atom indices per group
  std::vector<double> nu;                         ///< nu-hat(v-hat) per group

  std::size_t size() const { return keys.size(); }
};

GroupIndex group_by_vhat(const DiscreteMeasure& first);

/** Coupling between a first measure mu-hat and the second-coordinate product
 *  grid: gamma[j][k] is the mass transported from atom j to grid point k.
 *  Row sums reproduce mu-hat exactly (to 1e-12). */
struct Coupling {
  DiscreteMeasure first;
  ProductGrid second;
  std::vector<double> gamma;  ///< |first| x grid.size(), row-major

  double& at(std::size_t j, std::size_t k) { return gamma[j * second.size() + k]; }
  double at(std::size_t j, std::size_t k) const {
    return gamma[j * second.size() + k];
  }
  std::size_t rows() const { return first.atoms.size(); }
  std::size_t cols() const { return second.size(); }

  void validate() const;
};

/// Conditional first-moment residual per distinct v-hat group:
/// (sum_{j in group, k} gamma[j][k] * w_k) / nu-hat(v-hat)  -  h(v-hat).
struct ConditionalResidual {
  std::vector<double> value;  ///< aligned with GroupIndex order
};

/// Column sums of gamma as a measure on the second grid.
DiscreteMeasure second_marginal(const Coupling& g);

/// h is given per group, aligned with group_by_vhat(g.first).
ConditionalResidual conditional_residual(const Coupling& g,
                                         const std::vector<double>& h);

/// Total variation distance (1/2) sum |gamma1 - gamma2| between couplings on
/// identical supports. Throws on shape mismatch.
double tv_distance(const Coupling& a, const Coupling& b);

/// Convex combination (1-t) a + t b, t in [0,1], identical supports required.
Coupling mix(const Coupling& a, const Coupling& b, double t);

/// E_gamma[f] for f tabulated on the second grid (one value per grid point).
double expectation(const Coupling& g, const std::vector<double>& f);

/// E_gamma[f] for f tabulated per (first atom, grid point) pair, row-major.
double expectation_pairwise(const Coupling& g, const std::vector<double>& f);

}  // namespace cmw
