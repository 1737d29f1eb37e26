#pragma once

#include <functional>
#include <vector>

namespace cmw {

enum class XKind { Affine, DiagQuadratic };

/** Function of the decision variable x used inside uncertain constraints:
 *  either affine a'x + d or separable convex quadratic
 *  (1/2) sum_i q_i x_i^2 + a'x + d with q_i >= 0. */
struct XFunction {
  XKind kind = XKind::Affine;
  std::vector<double> q;  ///< diagonal curvature, used iff DiagQuadratic
  std::vector<double> a;
  double d = 0.0;

  std::size_t dim() const { return a.size(); }
  double eval(const std::vector<double>& x) const;
  /// gradient q.*x + a (affine: a)
  std::vector<double> grad(const std::vector<double>& x) const;
  /// Throws std::invalid_argument on size mismatch or negative curvature.
  void validate() const;
};

/// Result of a convex-conjugate evaluation f*(dstar) = sup_x dstar'x - f(x).
struct ConjugateValue {
  bool finite = false;
  double value = 0.0;             ///< meaningful iff finite
  std::vector<double> maximizer;  ///< an attaining x, present iff finite
};

/** Closed-form conjugate. Affine: indicator of dstar == a (tolerance 1e-12)
 *  with value -d. DiagQuadratic: +inf when some q_i = 0 has dstar_i != a_i;
 *  otherwise sum over q_i > 0 of (dstar_i - a_i)^2 / (2 q_i) - d. */
ConjugateValue conjugate(const XFunction& f, const std::vector<double>& dstar);

/// Bivariate evaluator h(z, dstar) used by right scalar multiplication.
using BiConjugate =
    std::function<double(const std::vector<double>&, const std::vector<double>&)>;

/** Right scalar multiplication (h c)(z, dstar):
 *  c > 0: c * h(z/c, dstar/c);  c = 0: 0 when (z, dstar) == (0, 0) within
 *  1e-12 and +inf otherwise. Negative c throws. */
double right_scale(const BiConjugate& h, double c, const std::vector<double>& z,
                   const std::vector<double>& dstar);

/** Relative-interior membership z/wstar in ri(conv(vertices)), certified by
 *  the feasibility LP {lambda >= delta, sum lambda = 1, sum lambda_v v = z/wstar}
 *  solved three orders tighter than delta (so vertex points are rejected
 *  rather than admitted on feasibility tolerance). Requires wstar > 0. */
bool ri_membership(const std::vector<double>& z, double wstar,
                   const std::vector<std::vector<double>>& vertices,
                   double delta = 1e-9);

/** Plain convex-hull membership (delta = 0 variant, lambda >= 0). */
bool hull_membership(const std::vector<double>& z, double wstar,
                     const std::vector<std::vector<double>>& vertices,
                     double tol = 1e-9);

}  // namespace cmw
