#include "cmw/conjugate.hpp"

#include <cmath>
#include <stdexcept>

#include "cmw/lp.hpp"

namespace cmw {

double XFunction::eval(const std::vector<double>& x) const {
  if (x.size() != dim())
    throw std::invalid_argument("XFunction::eval: dimension mismatch");
  double s = d;
  for (std::size_t i = 0; i < dim(); ++i) {
    s += a[i] * x[i];
    if (kind == XKind::DiagQuadratic) s += 0.5 * q[i] * x[i] * x[i];
  }
  return s;
}

std::vector<double> XFunction::grad(const std::vector<double>& x) const {
  if (x.size() != dim())
    throw std::invalid_argument("XFunction::grad: dimension mismatch");
  std::vector<double> g = a;
  if (kind == XKind::DiagQuadratic)
    for (std::size_t i = 0; i < dim(); ++i) g[i] += q[i] * x[i];
  return g;
}

void XFunction::validate() const {
  if (kind == XKind::DiagQuadratic) {
    if (q.size() != a.size())
      throw std::invalid_argument("XFunction: q/a size mismatch");
    for (double qi : q)
      if (!(qi >= 0.0))
        throw std::invalid_argument("XFunction: negative curvature breaks convexity");
  }
  for (double v : a)
    if (!std::isfinite(v))
      throw std::invalid_argument("XFunction: non-finite coefficient");
  if (!std::isfinite(d))
    throw std::invalid_argument("XFunction: non-finite constant");
}

ConjugateValue conjugate(const XFunction& f, const std::vector<double>& dstar) {
  f.validate();
  if (dstar.size() != f.dim())
    throw std::invalid_argument("conjugate: dstar dimension mismatch");
  constexpr double kDomTol = 1e-12;
  ConjugateValue out;
  if (f.kind == XKind::Affine) {
    for (std::size_t i = 0; i < f.dim(); ++i)
      if (std::fabs(dstar[i] - f.a[i]) > kDomTol) return out;  // +inf
    out.finite = true;
    out.value = -f.d;
    out.maximizer.assign(f.dim(), 0.0);
    return out;
  }
  double s = -f.d;
  std::vector<double> x(f.dim(), 0.0);
  for (std::size_t i = 0; i < f.dim(); ++i) {
    const double r = dstar[i] - f.a[i];
    if (f.q[i] > 0.0) {
      s += r * r / (2.0 * f.q[i]);
      x[i] = r / f.q[i];
    } else if (std::fabs(r) > kDomTol) {
      return out;  // flat direction with nonzero slope: sup is +inf
    }
  }
  out.finite = true;
  out.value = s;
  out.maximizer = std::move(x);
  return out;
}

double right_scale(const BiConjugate& h, double c, const std::vector<double>& z,
                   const std::vector<double>& dstar) {
  if (c < 0.0)
    throw std::invalid_argument("right_scale: negative scale " + std::to_string(c));
  constexpr double kZeroTol = 1e-12;
  if (c == 0.0) {
    for (double v : z)
      if (std::fabs(v) > kZeroTol) return kInf;
    for (double v : dstar)
      if (std::fabs(v) > kZeroTol) return kInf;
    return 0.0;
  }
  std::vector<double> zs(z.size()), ds(dstar.size());
  for (std::size_t i = 0; i < z.size(); ++i) zs[i] = z[i] / c;
  for (std::size_t i = 0; i < dstar.size(); ++i) ds[i] = dstar[i] / c;
  return c * h(zs, ds);
}

namespace {
bool hull_lp(const std::vector<double>& z, double wstar,
             const std::vector<std::vector<double>>& vertices, double lam_lo,
             double tol) {
  if (!(wstar > 0.0))
    throw std::invalid_argument("membership: wstar must be positive");
  if (vertices.empty())
    throw std::invalid_argument("membership: empty vertex list");
  const std::size_t dim = vertices.front().size();
  if (z.size() != dim)
    throw std::invalid_argument("membership: dimension mismatch");
  for (const auto& v : vertices)
    if (v.size() != dim)
      throw std::invalid_argument("membership: ragged vertex list");

  LpBuilder bld;
  std::vector<std::size_t> lam;
  for (std::size_t v = 0; v < vertices.size(); ++v)
    lam.push_back(bld.add_var(lam_lo, kInf, 0.0));
  std::vector<std::pair<std::size_t, double>> ones;
  for (auto j : lam) ones.push_back({j, 1.0});
  bld.add_row(RowSense::Eq, 1.0, ones);
  for (std::size_t i = 0; i < dim; ++i) {
    std::vector<std::pair<std::size_t, double>> terms;
    for (std::size_t v = 0; v < vertices.size(); ++v)
      terms.push_back({lam[v], vertices[v][i]});
    bld.add_row(RowSense::Eq, z[i] / wstar, terms);
  }
  LpOptions opt;
  opt.feas_tol = tol;
  return solve_lp(bld.build(), opt).status == LpStatus::Optimal;
}
}  // namespace

bool ri_membership(const std::vector<double>& z, double wstar,
                   const std::vector<std::vector<double>>& vertices,
                   double delta) {
  // The certifying LP must resolve residuals well below the strictness
  // margin, otherwise a vertex point passes on feasibility tolerance alone.
  const double feas = std::min(1e-9, std::max(1e-13, delta * 1e-3));
  return hull_lp(z, wstar, vertices, delta, feas);
}

bool hull_membership(const std::vector<double>& z, double wstar,
                     const std::vector<std::vector<double>>& vertices,
                     double tol) {
  return hull_lp(z, wstar, vertices, 0.0, tol);
}

}  // namespace cmw
