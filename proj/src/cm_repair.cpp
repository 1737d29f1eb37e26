#include <cmath>
#include <stdexcept>
#include <string>

#include "cmw/cmw.hpp"

namespace cmw {
namespace {

void require_plan_shape(const CmInstance& inst, const Coupling& g,
                        const char* who, const char* name) {
  if (g.rows() != inst.rows() || g.cols() != inst.cols())
    throw std::invalid_argument(std::string(who) + ": " + name +
                                " shape does not match the instance");
  g.validate();
  for (std::size_t j = 0; j < g.rows(); ++j)
    for (std::size_t k = 0; k < g.cols(); ++k)
      if (g.at(j, k) > 1e-12 && !inst.included(j, k))
        throw std::invalid_argument(std::string(who) + ": " + name +
                                    " puts mass on an excluded pair");
}

}  // namespace

Lemma32Repair lemma32_repair(const CmInstance& inst, const Coupling& gamma_eps,
                             const Coupling& gamma0, double eps) {
  inst.validate();
  if (!(eps >= 0.0) || !std::isfinite(eps))
    throw std::invalid_argument("lemma32_repair: eps must be finite and >= 0");
  require_plan_shape(inst, gamma_eps, "lemma32_repair", "gamma_eps");
  require_plan_shape(inst, gamma0, "lemma32_repair", "gamma0");

  const auto res_eps = conditional_residual(gamma_eps, inst.h).value;
  const auto res0 = conditional_residual(gamma0, inst.h).value;
  for (std::size_t g = 0; g < res_eps.size(); ++g)
    if (std::fabs(res_eps[g]) > 1e-8 || std::fabs(res0[g]) > 1e-8)
      throw std::invalid_argument(
          "lemma32_repair: both plans must satisfy the conditional constraint");

  const double budget0 = expectation_pairwise(gamma0, inst.cost);
  const double a = inst.rho - budget0;
  if (!(a > 1e-12))
    throw std::invalid_argument(
        "lemma32_repair: gamma0 must have budget strictly below rho");
  const double budget_eps = expectation_pairwise(gamma_eps, inst.cost);
  if (budget_eps > inst.rho + eps + 1e-9)
    throw std::invalid_argument(
        "lemma32_repair: gamma_eps exceeds even the relaxed budget rho + eps");

  Lemma32Repair out;
  out.a = a;
  out.t = eps / (a + eps);
  out.repaired = mix(gamma_eps, gamma0, out.t);
  return out;
}

ConditionalRepair conditional_repair(const CmInstance& inst, const Coupling& g,
                                     const Coupling& gamma_plus,
                                     const Coupling& gamma_minus) {
  inst.validate();
  require_plan_shape(inst, g, "conditional_repair", "gamma");
  require_plan_shape(inst, gamma_plus, "conditional_repair", "gamma_plus");
  require_plan_shape(inst, gamma_minus, "conditional_repair", "gamma_minus");

  const GroupIndex groups = inst.groups();
  const auto A = conditional_residual(g, inst.h).value;
  const auto Ap = conditional_residual(gamma_plus, inst.h).value;
  const auto Am = conditional_residual(gamma_minus, inst.h).value;

  ConditionalRepair out;
  out.b = kInf;
  for (std::size_t gi = 0; gi < groups.size(); ++gi) {
    if (!(Ap[gi] > 1e-12))
      throw std::invalid_argument(
          "conditional_repair: gamma_plus residual is not positive on group " +
          std::to_string(gi));
    if (!(Am[gi] < -1e-12))
      throw std::invalid_argument(
          "conditional_repair: gamma_minus residual is not negative on group " +
          std::to_string(gi));
    out.b = std::min(out.b, std::min(Ap[gi], -Am[gi]));
  }

  out.t_plus.resize(groups.size());
  out.t_minus.resize(groups.size());
  Coupling rep = g;
  for (std::size_t gi = 0; gi < groups.size(); ++gi) {
    // Blend up when the residual is negative, down when positive; weights
    // cancel the residual exactly since it is linear in the group rows.
    const double tp = std::max(0.0, -A[gi]) / (std::fabs(A[gi]) + Ap[gi]);
    const double tm = std::max(0.0, A[gi]) / (std::fabs(A[gi]) - Am[gi]);
    out.t_plus[gi] = tp;
    out.t_minus[gi] = tm;
    const double keep = 1.0 - tp - tm;
    for (std::size_t j : groups.members[gi])
      for (std::size_t k = 0; k < inst.cols(); ++k)
        rep.at(j, k) = keep * g.at(j, k) + tp * gamma_plus.at(j, k) +
                       tm * gamma_minus.at(j, k);
  }
  out.repaired = std::move(rep);
  out.tv_measured = tv_distance(g, out.repaired);
  out.tv_bound = 0.0;
  for (std::size_t gi = 0; gi < groups.size(); ++gi)
    out.tv_bound += std::fabs(A[gi]) * groups.nu[gi];
  out.tv_bound /= out.b;
  return out;
}

}  // namespace cmw
