#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>
#include <string>

#include "cmw/cmw.hpp"

namespace cmw {
namespace {

constexpr std::size_t kNoVar = static_cast<std::size_t>(-1);

/// Column layout shared by every transport LP: one variable per cost-feasible
/// (atom, grid point) pair, excluded pairs never enter the program.
struct Layout {
  std::vector<std::pair<std::size_t, std::size_t>> pairs;
  std::vector<std::size_t> var_of;  ///< rows*cols -> column or kNoVar
  GroupIndex groups;
  std::vector<std::size_t> group_of_atom;
};

Layout make_layout(const CmInstance& inst) {
  Layout lay;
  const std::size_t J = inst.rows(), K = inst.cols();
  lay.var_of.assign(J * K, kNoVar);
  for (std::size_t j = 0; j < J; ++j)
    for (std::size_t k = 0; k < K; ++k)
      if (inst.included(j, k)) {
        lay.var_of[j * K + k] = lay.pairs.size();
        lay.pairs.emplace_back(j, k);
      }
  lay.groups = inst.groups();
  lay.group_of_atom.assign(J, 0);
  for (std::size_t g = 0; g < lay.groups.size(); ++g)
    for (std::size_t j : lay.groups.members[g]) lay.group_of_atom[j] = g;
  return lay;
}

/// Adds the marginal equality rows (one per atom) to `bld`; returns row ids.
std::vector<std::size_t> add_marginal_rows(LpBuilder& bld, const CmInstance& inst,
                                           const Layout& lay) {
  const std::size_t K = inst.cols();
  std::vector<std::size_t> ids(inst.rows());
  for (std::size_t j = 0; j < inst.rows(); ++j) {
    std::vector<std::pair<std::size_t, double>> terms;
    for (std::size_t k = 0; k < K; ++k)
      if (lay.var_of[j * K + k] != kNoVar)
        terms.emplace_back(lay.var_of[j * K + k], 1.0);
    ids[j] = bld.add_row(RowSense::Eq, inst.first.mass[j], std::move(terms));
  }
  return ids;
}

/// Adds the per-group conditional rows sum gamma (w - h_g) == 0 in mass form.
std::vector<std::size_t> add_group_rows(LpBuilder& bld, const CmInstance& inst,
                                        const Layout& lay) {
  const std::size_t K = inst.cols();
  std::vector<std::size_t> ids(lay.groups.size());
  for (std::size_t g = 0; g < lay.groups.size(); ++g) {
    std::vector<std::pair<std::size_t, double>> terms;
    for (std::size_t j : lay.groups.members[g])
      for (std::size_t k = 0; k < K; ++k)
        if (lay.var_of[j * K + k] != kNoVar)
          terms.emplace_back(lay.var_of[j * K + k],
                             inst.second.w_of(k) - inst.h[g]);
    ids[g] = bld.add_row(RowSense::Eq, 0.0, std::move(terms));
  }
  return ids;
}

std::size_t add_budget_row(LpBuilder& bld, const CmInstance& inst,
                           const Layout& lay) {
  std::vector<std::pair<std::size_t, double>> terms;
  for (std::size_t v = 0; v < lay.pairs.size(); ++v) {
    const auto [j, k] = lay.pairs[v];
    const double c = inst.cost_at(j, k);
    if (c != 0.0) terms.emplace_back(v, c);
  }
  return bld.add_row(RowSense::Le, inst.rho, std::move(terms));
}

Coupling coupling_from(const CmInstance& inst, const Layout& lay,
                       const std::vector<double>& x) {
  Coupling g;
  g.first = inst.first;
  g.second = inst.second;
  g.gamma.assign(inst.rows() * inst.cols(), 0.0);
  for (std::size_t v = 0; v < lay.pairs.size(); ++v) {
    const auto [j, k] = lay.pairs[v];
    g.gamma[j * inst.cols() + k] = std::max(0.0, x[v]);
  }
  return g;
}

}  // namespace

PrimalSolution solve_primal(const CmInstance& inst, const LpOptions& opt) {
  inst.validate();
  const Layout lay = make_layout(inst);
  LpBuilder bld;
  for (const auto& [j, k] : lay.pairs) bld.add_var(0.0, kInf, -inst.f[k]);
  add_marginal_rows(bld, inst, lay);
  const std::size_t budget_row = add_budget_row(bld, inst, lay);
  const std::vector<std::size_t> group_rows = add_group_rows(bld, inst, lay);

  const LpSolution sol = solve_lp(bld.build(), opt);
  PrimalSolution out;
  out.status = sol.status;
  if (sol.status != LpStatus::Optimal) return out;

  out.value = -sol.value;
  out.coupling = coupling_from(inst, lay, sol.x);
  out.budget = expectation_pairwise(out.coupling, inst.cost);
  out.residual = conditional_residual(out.coupling, inst.h).value;
  out.cert.lambda = std::max(0.0, -sol.duals[budget_row]);
  out.cert.psi.resize(lay.groups.size());
  for (std::size_t g = 0; g < lay.groups.size(); ++g)
    out.cert.psi[g] = -sol.duals[group_rows[g]];
  return out;
}

double compute_discrepancy(const CmInstance& inst,
                           const std::vector<double>& target,
                           const LpOptions& opt) {
  inst.validate();
  if (target.size() != inst.cols())
    throw std::invalid_argument(
        "compute_discrepancy: target must give one mass per grid point");
  for (double t : target)
    if (!(t >= -1e-12) || !std::isfinite(t))
      throw std::invalid_argument(
          "compute_discrepancy: target masses must be nonnegative");

  const Layout lay = make_layout(inst);
  const std::size_t K = inst.cols();
  LpBuilder bld;
  for (const auto& [j, k] : lay.pairs) bld.add_var(0.0, kInf, inst.cost_at(j, k));
  add_marginal_rows(bld, inst, lay);
  for (std::size_t k = 0; k < K; ++k) {
    std::vector<std::pair<std::size_t, double>> terms;
    for (std::size_t j = 0; j < inst.rows(); ++j)
      if (lay.var_of[j * K + k] != kNoVar)
        terms.emplace_back(lay.var_of[j * K + k], 1.0);
    bld.add_row(RowSense::Eq, target[k], std::move(terms));
  }
  add_group_rows(bld, inst, lay);

  const LpSolution sol = solve_lp(bld.build(), opt);
  if (sol.status == LpStatus::Infeasible) return kInf;
  if (sol.status != LpStatus::Optimal)
    throw std::runtime_error("compute_discrepancy: transport LP did not solve");
  return std::max(0.0, sol.value);
}

double eval_dual_ip(const CmInstance& inst, const DualCertificate& cert,
                    const ProductGrid& inner) {
  inst.validate();
  inner.validate();
  const GroupIndex groups = inst.groups();
  if (cert.psi.size() != groups.size())
    throw std::invalid_argument("eval_dual_ip: psi size does not match groups");
  if (cert.lambda < 0.0)
    throw std::invalid_argument("eval_dual_ip: lambda must be nonnegative");

  std::vector<std::size_t> group_of_atom(inst.rows(), 0);
  for (std::size_t g = 0; g < groups.size(); ++g)
    for (std::size_t j : groups.members[g]) group_of_atom[j] = g;

  const bool own_grid = inner.v_points == inst.second.v_points &&
                        inner.w_points == inst.second.w_points;
  double acc = 0.0;
  for (std::size_t j = 0; j < inst.rows(); ++j) {
    const std::size_t g = group_of_atom[j];
    const double hg = inst.h[g], psi = cert.psi[g];
    double best = -kInf;
    if (own_grid) {
      for (std::size_t k = 0; k < inst.cols(); ++k) {
        if (!inst.included(j, k)) continue;
        const double cand = inst.f[k] -
                            psi * (inst.second.w_of(k) - hg) -
                            cert.lambda * inst.cost_at(j, k);
        best = std::max(best, cand);
      }
    } else {
      for (std::size_t k = 0; k < inner.size(); ++k) {
        const double c = inst.cost_value(j, inner.v_of(k), inner.w_of(k));
        if (!std::isfinite(c)) continue;  // excluded at every lambda
        const double cand = inst.f_value(inner.v_of(k), inner.w_of(k)) -
                            psi * (inner.w_of(k) - hg) - cert.lambda * c;
        best = std::max(best, cand);
      }
    }
    if (best == -kInf)
      throw std::invalid_argument(
          "eval_dual_ip: atom " + std::to_string(j) +
          " has no cost-feasible point on the inner grid");
    acc += inst.first.mass[j] * best;
  }
  return cert.lambda * inst.rho + acc;
}

Assumption1Report check_assumption_a1(const CmInstance& inst,
                                      const LpOptions& opt) {
  inst.validate();
  const Layout lay = make_layout(inst);
  LpBuilder bld;
  for (const auto& [j, k] : lay.pairs) bld.add_var(0.0, kInf, inst.cost_at(j, k));
  add_marginal_rows(bld, inst, lay);
  add_group_rows(bld, inst, lay);

  const LpSolution sol = solve_lp(bld.build(), opt);
  Assumption1Report rep;
  rep.status = sol.status;
  if (sol.status != LpStatus::Optimal) return rep;
  rep.a_value = inst.rho - sol.value;
  rep.holds = rep.a_value > 1e-9;
  rep.gamma0 = coupling_from(inst, lay, sol.x);
  return rep;
}

Assumption2Report check_assumption_a2(const CmInstance& inst,
                                      const LpOptions& opt) {
  inst.validate();
  const Layout lay = make_layout(inst);
  const std::size_t K = inst.cols();

  // One LP per sign: maximize the uniform margin b >= 0 with the conditional
  // residual of every group at least b (plus sign) or at most -b (minus sign).
  const auto margin_lp = [&](bool plus) {
    LpBuilder bld;
    for ([[maybe_unused]] const auto& pr : lay.pairs) bld.add_var(0.0, kInf, 0.0);
    const std::size_t b_var = bld.add_var(0.0, kInf, -1.0);
    add_marginal_rows(bld, inst, lay);
    add_budget_row(bld, inst, lay);
    for (std::size_t g = 0; g < lay.groups.size(); ++g) {
      std::vector<std::pair<std::size_t, double>> terms;
      for (std::size_t j : lay.groups.members[g])
        for (std::size_t k = 0; k < K; ++k)
          if (lay.var_of[j * K + k] != kNoVar)
            terms.emplace_back(lay.var_of[j * K + k],
                               inst.second.w_of(k) - inst.h[g]);
      if (plus) {
        terms.emplace_back(b_var, -lay.groups.nu[g]);
        bld.add_row(RowSense::Ge, 0.0, std::move(terms));
      } else {
        terms.emplace_back(b_var, lay.groups.nu[g]);
        bld.add_row(RowSense::Le, 0.0, std::move(terms));
      }
    }
    return solve_lp(bld.build(), opt);
  };

  Assumption2Report rep;
  const LpSolution sp = margin_lp(true);
  rep.status_plus = sp.status;
  if (sp.status == LpStatus::Optimal) {
    rep.b_plus = -sp.value;
    rep.gamma_plus = coupling_from(inst, lay, sp.x);
  }
  const LpSolution sm = margin_lp(false);
  rep.status_minus = sm.status;
  if (sm.status == LpStatus::Optimal) {
    rep.b_minus = -sm.value;
    rep.gamma_minus = coupling_from(inst, lay, sm.x);
  }
  rep.b_value = std::min(rep.b_plus, rep.b_minus);
  rep.holds = sp.status == LpStatus::Optimal &&
              sm.status == LpStatus::Optimal && rep.b_value > 1e-9;
  return rep;
}

namespace {

/** Assembles the dual face polytope shared by min_sup_norm_psi and
 *  face_min_pairing: variables (m_j free, lambda >= 0, eta_g free),
 *  dual feasibility rows per included pair, and the optimal-value row
 *  fattened by a hair so the LP face is never empty to rounding. */
struct FaceLp {
  LpBuilder bld;
  std::vector<std::size_t> m_vars, eta_vars;
  std::size_t lam_var = 0;
};

FaceLp make_face_lp(const CmInstance& inst, const Layout& lay,
                    double primal_value) {
  FaceLp face;
  LpBuilder& bld = face.bld;
  face.m_vars.resize(inst.rows());
  for (std::size_t j = 0; j < inst.rows(); ++j)
    face.m_vars[j] = bld.add_var(-kInf, kInf, 0.0);
  face.lam_var = bld.add_var(0.0, kInf, 0.0);
  face.eta_vars.resize(lay.groups.size());
  for (std::size_t g = 0; g < lay.groups.size(); ++g)
    face.eta_vars[g] = bld.add_var(-kInf, kInf, 0.0);

  for (const auto& [j, k] : lay.pairs) {
    const std::size_t g = lay.group_of_atom[j];
    std::vector<std::pair<std::size_t, double>> terms;
    terms.emplace_back(face.m_vars[j], 1.0);
    if (inst.cost_at(j, k) != 0.0)
      terms.emplace_back(face.lam_var, inst.cost_at(j, k));
    const double wh = inst.second.w_of(k) - inst.h[g];
    if (wh != 0.0) terms.emplace_back(face.eta_vars[g], wh);
    bld.add_row(RowSense::Ge, inst.f[k], std::move(terms));
  }

  std::vector<std::pair<std::size_t, double>> value_terms;
  for (std::size_t j = 0; j < inst.rows(); ++j)
    if (inst.first.mass[j] != 0.0)
      value_terms.emplace_back(face.m_vars[j], inst.first.mass[j]);
  value_terms.emplace_back(face.lam_var, inst.rho);
  const double face_tol = 1e-9 * (1.0 + std::fabs(primal_value));
  bld.add_row(RowSense::Le, primal_value + face_tol, std::move(value_terms));
  return face;
}

}  // namespace

MinNormPsi min_sup_norm_psi(const CmInstance& inst, double primal_value,
                            const LpOptions& opt) {
  inst.validate();
  const Layout lay = make_layout(inst);
  FaceLp face = make_face_lp(inst, lay, primal_value);
  const std::size_t t_var = face.bld.add_var(0.0, kInf, 1.0);
  for (std::size_t g = 0; g < lay.groups.size(); ++g) {
    face.bld.add_row(RowSense::Le, 0.0,
                     {{face.eta_vars[g], 1.0}, {t_var, -1.0}});
    face.bld.add_row(RowSense::Le, 0.0,
                     {{face.eta_vars[g], -1.0}, {t_var, -1.0}});
  }
  const LpSolution sol = solve_lp(face.bld.build(), opt);
  MinNormPsi out;
  out.status = sol.status;
  if (sol.status != LpStatus::Optimal) return out;
  out.sup_norm = sol.x[t_var];
  out.cert.lambda = std::max(0.0, sol.x[face.lam_var]);
  out.cert.psi.resize(lay.groups.size());
  for (std::size_t g = 0; g < lay.groups.size(); ++g)
    out.cert.psi[g] = sol.x[face.eta_vars[g]];
  return out;
}

double face_min_pairing(const CmInstance& inst, double primal_value,
                        const std::vector<double>& dir, const LpOptions& opt) {
  inst.validate();
  const Layout lay = make_layout(inst);
  if (dir.size() != lay.groups.size())
    throw std::invalid_argument(
        "face_min_pairing: direction must have one entry per group");
  FaceLp face = make_face_lp(inst, lay, primal_value);
  LpProblem p = face.bld.build();
  for (std::size_t g = 0; g < lay.groups.size(); ++g)
    p.c[face.eta_vars[g]] = dir[g] * lay.groups.nu[g];
  const LpSolution sol = solve_lp(p, opt);
  if (sol.status == LpStatus::Unbounded) return -kInf;
  if (sol.status != LpStatus::Optimal)
    throw std::runtime_error("face_min_pairing: face LP did not solve (" +
                             to_string(sol.status) + ")");
  return sol.value;
}

SubgradientReport subgradient_check(const CmInstance& inst,
                                    const PrimalSolution& base,
                                    int num_perturbations, double magnitude,
                                    unsigned long long seed) {
  inst.validate();
  if (base.status != LpStatus::Optimal)
    throw std::invalid_argument("subgradient_check: base must be Optimal");
  const GroupIndex groups = inst.groups();
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unif(-magnitude, magnitude);

  SubgradientReport rep;
  rep.rows.reserve(static_cast<std::size_t>(num_perturbations));
  for (int it = 0; it < num_perturbations; ++it) {
    std::vector<double> theta(groups.size());
    for (double& th : theta) th = unif(rng);

    CmInstance shifted = inst;
    for (std::size_t g = 0; g < groups.size(); ++g) shifted.h[g] += theta[g];
    const PrimalSolution ps = solve_primal(shifted);

    PerturbationRow row;
    row.bound = base.value;
    for (std::size_t g = 0; g < groups.size(); ++g)
      row.bound += base.cert.psi[g] * theta[g] * groups.nu[g];
    if (ps.status == LpStatus::Optimal) {
      row.p_theta = ps.value;
      row.ok = ps.value <= row.bound + 1e-9;
    } else if (ps.status == LpStatus::Infeasible) {
      row.p_theta = -kInf;
      row.feasible = false;
    } else {
      row.ok = false;  // solver failure counts against the check
    }
    rep.all_ok = rep.all_ok && row.ok;
    rep.rows.push_back(row);
  }
  return rep;
}

std::vector<RefinementRow> refinement_study(
    const std::function<CmInstance(int)>& family,
    const std::vector<int>& sizes) {
  std::vector<RefinementRow> rows(sizes.size());
  bool failed = false;
  std::string what;

#ifdef CMW_HAVE_OPENMP
#pragma omp parallel for schedule(dynamic)
#endif
  for (long long i = 0; i < static_cast<long long>(sizes.size()); ++i) {
    try {
      const CmInstance inst = family(sizes[static_cast<std::size_t>(i)]);
      RefinementRow row;
      row.size = sizes[static_cast<std::size_t>(i)];
      const PrimalSolution ps = solve_primal(inst);
      row.status = ps.status;
      if (ps.status == LpStatus::Optimal) {
        row.primal = ps.value;
        row.lambda = ps.cert.lambda;
        row.dual_ip = eval_dual_ip(inst, ps.cert, inst.second);
        const MinNormPsi mn = min_sup_norm_psi(inst, ps.value);
        if (mn.status == LpStatus::Optimal) row.psi_sup_norm = mn.sup_norm;
      }
      rows[static_cast<std::size_t>(i)] = row;
    } catch (const std::exception& e) {
#ifdef CMW_HAVE_OPENMP
#pragma omp critical
#endif
      {
        failed = true;
        what = e.what();
      }
    }
  }
  if (failed) throw std::runtime_error("refinement_study: " + what);
  return rows;
}

}  // namespace cmw
