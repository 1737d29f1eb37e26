#pragma once

#include <functional>
#include <optional>
#include <vector>

#include "cmw/cm_instance.hpp"
#include "cmw/lp.hpp"
#include "cmw/measures.hpp"

namespace cmw {

/// Multiplier pair of the conditional-moment transport dual: the budget
/// price lambda >= 0 and one conditional multiplier per distinct v-hat.
struct DualCertificate {
  double lambda = 0.0;
  std::vector<double> psi;  ///< aligned with group_by_vhat order
};

struct PrimalSolution {
  LpStatus status = LpStatus::Infeasible;
  double value = 0.0;            ///< sup E[f], meaningful iff Optimal
  Coupling coupling;             ///< optimal transport plan
  DualCertificate cert;          ///< row prices extracted from the LP dual
  double budget = 0.0;           ///< E_gamma[c] at the optimum
  std::vector<double> residual;  ///< conditional residual per group
};

/** Maximizes E_gamma[f] over couplings with first marginal mu-hat, transport
 *  budget E[c] <= rho, and zero conditional first-moment residual. Pairs with
 *  infinite cost are excluded variables, not big-M terms. The certificate is
 *  sign-normalized so that weak duality reads
 *      value <= lambda rho + sum_j mu_j max_k [f - psi (w - h) - lambda c]. */
PrimalSolution solve_primal(const CmInstance& inst, const LpOptions& opt = {});

/** Discrepancy between mu-hat and a target second marginal: the least
 *  transport cost among couplings matching both marginals with zero
 *  conditional residual. Returns +inf when no such coupling exists.
 *  `target` lists one mass per second-grid point. */
double compute_discrepancy(const CmInstance& inst,
                           const std::vector<double>& target,
                           const LpOptions& opt = {});

/** Interchanged dual objective
 *      lambda rho + sum_j mu_j sup_{(v,w)} [f - psi(v-hat_j)(w - h) - lambda c].
 *  The supremum runs over the cost-feasible pairs only: entries excluded by
 *  an infinite cost stay excluded for every lambda >= 0, matching the primal
 *  LP's excluded variables. On the instance's own grid the stored tables are
 *  used; on a finer grid the instance's rules extend f and c (error if a rule
 *  is missing). */
double eval_dual_ip(const CmInstance& inst, const DualCertificate& cert,
                    const ProductGrid& inner);

struct Assumption1Report {
  bool holds = false;
  double a_value = 0.0;  ///< rho minus the least budget over feasible plans
  LpStatus status = LpStatus::Infeasible;
  Coupling gamma0;       ///< least-budget plan (when the LP is solvable)
};

/// Strict feasibility: some plan satisfies the conditional constraint with
/// budget strictly below rho. a_value = rho - min E[c].
Assumption1Report check_assumption_a1(const CmInstance& inst,
                                      const LpOptions& opt = {});

struct Assumption2Report {
  bool holds = false;
  double b_plus = 0.0;   ///< best uniform upward residual margin
  double b_minus = 0.0;  ///< best uniform downward residual margin
  double b_value = 0.0;  ///< min(b_plus, b_minus)
  LpStatus status_plus = LpStatus::Infeasible;
  LpStatus status_minus = LpStatus::Infeasible;
  Coupling gamma_plus;
  Coupling gamma_minus;
};

/// Two-sided perturbation room: budget-feasible plans whose conditional
/// residual is >= b uniformly (gamma_plus) and <= -b uniformly (gamma_minus).
Assumption2Report check_assumption_a2(const CmInstance& inst,
                                      const LpOptions& opt = {});

struct Lemma32Repair {
  Coupling repaired;
  double t = 0.0;  ///< mixing weight eps / (a + eps)
  double a = 0.0;  ///< strict budget room of gamma0
};

/** Budget repair by mixing toward a strictly feasible plan: given gamma_eps
 *  with zero residual and budget <= rho + eps, returns
 *  (1-t) gamma_eps + t gamma0 with t = eps/(a+eps), which is budget-feasible,
 *  keeps zero residual, and loses at most the documented objective mixture. */
Lemma32Repair lemma32_repair(const CmInstance& inst, const Coupling& gamma_eps,
                             const Coupling& gamma0, double eps);

struct ConditionalRepair {
  Coupling repaired;
  std::vector<double> t_plus;   ///< per-group mixing weights
  std::vector<double> t_minus;
  double b = 0.0;               ///< uniform margin of the repair directions
  double tv_measured = 0.0;
  double tv_bound = 0.0;        ///< (1/b) sum_g |A_g| nu_g
};

/** Pointwise conditional repair: per group, blends toward gamma_plus or
 *  gamma_minus with weights t+-(v) = max{0, -+A(v)} / (|A(v)| + |A+-(v)|),
 *  driving the residual to exactly zero. Requires residual(gamma_plus) > 0
 *  and residual(gamma_minus) < 0 on every group. */
ConditionalRepair conditional_repair(const CmInstance& inst, const Coupling& g,
                                     const Coupling& gamma_plus,
                                     const Coupling& gamma_minus);

struct MinNormPsi {
  double sup_norm = 0.0;
  DualCertificate cert;
  LpStatus status = LpStatus::Infeasible;
};

/** Least-sup-norm conditional multiplier over the dual optimal face,
 *  computed by a secondary LP (minimize t with -t <= psi <= t subject to dual
 *  feasibility and dual objective <= primal + 1e-9). */
MinNormPsi min_sup_norm_psi(const CmInstance& inst, double primal_value,
                            const LpOptions& opt = {});

struct RefinementRow {
  int size = 0;
  LpStatus status = LpStatus::Infeasible;
  double primal = 0.0;
  double dual_ip = 0.0;        ///< interchanged dual at the optimal certificate
  double psi_sup_norm = 0.0;   ///< min-sup-norm over the dual face
  double lambda = 0.0;
};

/** Runs a size-indexed family of instances and tabulates primal value, the
 *  interchanged dual at the optimum, and the minimal multiplier norm. Sizes
 *  may be evaluated concurrently; the output order follows `sizes`. */
std::vector<RefinementRow> refinement_study(
    const std::function<CmInstance(int)>& family, const std::vector<int>& sizes);

struct PerturbationRow {
  double p_theta = 0.0;        ///< perturbed optimal value, -inf if infeasible
  bool feasible = true;
  double bound = 0.0;          ///< p(0) + <psi, theta>_nu
  bool ok = true;              ///< p_theta <= bound + 1e-9
};

struct SubgradientReport {
  std::vector<PerturbationRow> rows;
  bool all_ok = true;
};

/** Supergradient inequality check: for random perturbations theta of the
 *  conditional target h, re-solves the primal and verifies
 *  p(theta) <= p(0) + sum_g psi_g theta_g nu_g + 1e-9. */
SubgradientReport subgradient_check(const CmInstance& inst,
                                    const PrimalSolution& base,
                                    int num_perturbations, double magnitude,
                                    unsigned long long seed);

/** Directional pairing min over the dual optimal face of <psi, dir>_nu,
 *  which equals the one-sided derivative of the optimal value along
 *  h -> h + t dir. Used to validate finite-difference slopes. */
double face_min_pairing(const CmInstance& inst, double primal_value,
                        const std::vector<double>& dir,
                        const LpOptions& opt = {});

/// Result grid of a certificate box scan.
struct ScanResult {
  std::size_t n_lambda = 0, n_psi = 0;
  std::vector<double> values;  ///< n_lambda x n_psi, row-major
  double min_value = 0.0;
  double at(std::size_t i, std::size_t j) const { return values[i * n_psi + j]; }
};

/** Evaluates the interchanged dual on an (nl x np) grid of certificates
 *  (lambda, psi), psi constant across groups, over the given inner grid.
 *  The serial variant is the reference; the parallel variant distributes
 *  cells across OpenMP threads and is bitwise identical to it. */
ScanResult scan_certificate_box_serial(const CmInstance& inst,
                                       const ProductGrid& inner, double lam_lo,
                                       double lam_hi, std::size_t nl,
                                       double psi_lo, double psi_hi,
                                       std::size_t np);
ScanResult scan_certificate_box(const CmInstance& inst, const ProductGrid& inner,
                                double lam_lo, double lam_hi, std::size_t nl,
                                double psi_lo, double psi_hi, std::size_t np);

}  // namespace cmw
