#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "cmw/cmw.hpp"

namespace cmw {
namespace {

/** Per-atom tables of f and cost on the inner grid, precomputed once so the
 *  serial and parallel scans evaluate identical expressions per cell. */
struct ScanTables {
  std::size_t J = 0, K = 0;
  double rho = 0.0;
  std::vector<double> mass;    ///< per atom
  std::vector<double> wh;      ///< J x K: (w_k - h_{g(j)})
  std::vector<double> fv;      ///< J x K
  std::vector<double> cv;      ///< J x K, +inf marks an excluded pair
};

ScanTables make_tables(const CmInstance& inst, const ProductGrid& inner) {
  inst.validate();
  inner.validate();
  ScanTables t;
  t.J = inst.rows();
  t.K = inner.size();
  t.rho = inst.rho;
  t.mass = inst.first.mass;

  const GroupIndex groups = inst.groups();
  std::vector<std::size_t> group_of_atom(t.J, 0);
  for (std::size_t g = 0; g < groups.size(); ++g)
    for (std::size_t j : groups.members[g]) group_of_atom[j] = g;

  const bool own_grid = inner.v_points == inst.second.v_points &&
                        inner.w_points == inst.second.w_points;
  t.wh.resize(t.J * t.K);
  t.fv.resize(t.J * t.K);
  t.cv.resize(t.J * t.K);
  for (std::size_t j = 0; j < t.J; ++j) {
    const double hg = inst.h[group_of_atom[j]];
    bool any = false;
    for (std::size_t k = 0; k < t.K; ++k) {
      t.wh[j * t.K + k] = inner.w_of(k) - hg;
      if (own_grid) {
        t.fv[j * t.K + k] = inst.f[k];
        t.cv[j * t.K + k] = inst.cost_at(j, k);
      } else {
        t.cv[j * t.K + k] = inst.cost_value(j, inner.v_of(k), inner.w_of(k));
        t.fv[j * t.K + k] = std::isfinite(t.cv[j * t.K + k])
                                ? inst.f_value(inner.v_of(k), inner.w_of(k))
                                : 0.0;
      }
      any = any || std::isfinite(t.cv[j * t.K + k]);
    }
    if (!any)
      throw std::invalid_argument(
          "scan_certificate_box: an atom has no cost-feasible inner point");
  }
  return t;
}

double grid_point(double lo, double hi, std::size_t i, std::size_t n) {
  return n <= 1 ? lo
                : lo + static_cast<double>(i) * (hi - lo) /
                           static_cast<double>(n - 1);
}

/// Interchanged dual value at (lambda, psi), psi shared across groups.
double eval_cell(const ScanTables& t, double lam, double psi) {
  double acc = 0.0;
  for (std::size_t j = 0; j < t.J; ++j) {
    double best = -kInf;
    const double* wh = &t.wh[j * t.K];
    const double* fv = &t.fv[j * t.K];
    const double* cv = &t.cv[j * t.K];
    for (std::size_t k = 0; k < t.K; ++k) {
      if (!std::isfinite(cv[k])) continue;  // excluded at every lambda
      const double cand = fv[k] - psi * wh[k] - lam * cv[k];
      best = std::max(best, cand);
    }
    acc += t.mass[j] * best;
  }
  return lam * t.rho + acc;
}

ScanResult finish(ScanResult&& r) {
  r.min_value = *std::min_element(r.values.begin(), r.values.end());
  return std::move(r);
}

}  // namespace

ScanResult scan_certificate_box_serial(const CmInstance& inst,
                                       const ProductGrid& inner, double lam_lo,
                                       double lam_hi, std::size_t nl,
                                       double psi_lo, double psi_hi,
                                       std::size_t np) {
  if (nl == 0 || np == 0)
    throw std::invalid_argument("scan_certificate_box: empty grid");
  const ScanTables t = make_tables(inst, inner);
  ScanResult r;
  r.n_lambda = nl;
  r.n_psi = np;
  r.values.resize(nl * np);
  for (std::size_t i = 0; i < nl; ++i)
    for (std::size_t m = 0; m < np; ++m)
      r.values[i * np + m] = eval_cell(t, grid_point(lam_lo, lam_hi, i, nl),
                                       grid_point(psi_lo, psi_hi, m, np));
  return finish(std::move(r));
}

ScanResult scan_certificate_box(const CmInstance& inst, const ProductGrid& inner,
                                double lam_lo, double lam_hi, std::size_t nl,
                                double psi_lo, double psi_hi, std::size_t np) {
  if (nl == 0 || np == 0)
    throw std::invalid_argument("scan_certificate_box: empty grid");
  const ScanTables t = make_tables(inst, inner);
  ScanResult r;
  r.n_lambda = nl;
  r.n_psi = np;
  r.values.resize(nl * np);
  const long long NL = static_cast<long long>(nl);
  const long long NP = static_cast<long long>(np);
#ifdef CMW_HAVE_OPENMP
#pragma omp parallel for collapse(2) schedule(static)
#endif
  for (long long i = 0; i < NL; ++i)
    for (long long m = 0; m < NP; ++m)
      r.values[static_cast<std::size_t>(i) * np + static_cast<std::size_t>(m)] =
          eval_cell(t,
                    grid_point(lam_lo, lam_hi, static_cast<std::size_t>(i), nl),
                    grid_point(psi_lo, psi_hi, static_cast<std::size_t>(m), np));
  return finish(std::move(r));
}

}  // namespace cmw
