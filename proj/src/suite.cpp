#include "cmw/suite.hpp"

#include <json.hpp>

#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <functional>
#include <random>
#include <stdexcept>

#include "cmw/cmw.hpp"
#include "cmw/instances.hpp"
#include "cmw/robust.hpp"

namespace cmw {

namespace {

std::string fmt(const char* f, ...) {
  char buf[512];
  va_list ap;
  va_start(ap, f);
  std::vsnprintf(buf, sizeof buf, f, ap);
  va_end(ap);
  return buf;
}

CmInstance named(InstanceKind kind) {
  InstanceSpec spec;
  spec.kind = std::move(kind);
  return generate_cm(spec);
}

// --------------------------------------------------------------------------
// Row 1: the two-point reference family must land exactly on its known
// value -3/4 and multiplier pair (1, 1/2).
// --------------------------------------------------------------------------
void crit_lemma34_golden(SuiteRow& row, std::uint64_t) {
  const CmInstance inst = named(Lemma34Params{});
  const PrimalSolution ps = solve_primal(inst);
  bool ok = ps.status == LpStatus::Optimal;
  double dual = 0.0, psi0 = -1e9, psi1 = -1e9;
  if (ok) {
    dual = eval_dual_ip(inst, ps.cert, inst.second);
    const MinNormPsi mn = min_sup_norm_psi(inst, ps.value);
    ok = mn.status == LpStatus::Optimal && mn.cert.psi.size() == 2;
    if (ok) {
      psi0 = mn.cert.psi[0];
      psi1 = mn.cert.psi[1];
    }
  }
  ok = ok && std::fabs(ps.value + 0.75) <= 1e-8 &&
       std::fabs(dual + 0.75) <= 1e-8 && std::fabs(psi0 - 1.0) <= 1e-6 &&
       std::fabs(psi1 - 0.5) <= 1e-6;
  row.pass = ok;
  row.detail = fmt("primal=%.10f dual=%.10f psi=(%.8f,%.8f)", ps.value, dual,
                   psi0, psi1);
}

// --------------------------------------------------------------------------
// Row 2: the budget-slack family has value 0 but no bounded certificate:
// the least multiplier norm is n, and a whole (lambda, psi) box stays
// above 0.95 when evaluated against a 1000-point inner grid.
// --------------------------------------------------------------------------
void crit_example32_gap(SuiteRow& row, std::uint64_t) {
  bool ok = true;
  double worst_primal = 0.0, box_min = kInf;
  for (int n : {4, 8, 16, 32}) {
    const CmInstance inst = named(Example32Params{0.5, n});
    const PrimalSolution ps = solve_primal(inst);
    ok = ok && ps.status == LpStatus::Optimal && std::fabs(ps.value) <= 1e-9;
    worst_primal = std::max(worst_primal, std::fabs(ps.value));

    const MinNormPsi mn = min_sup_norm_psi(inst, ps.value);
    ok = ok && mn.status == LpStatus::Optimal &&
         std::fabs(mn.sup_norm - n) <= 1e-6;

    ProductGrid inner;
    inner.v_points = inst.second.v_points;
    inner.w_points.reserve(1001);
    for (int i = 0; i <= 1000; ++i) inner.w_points.push_back(i / 1000.0);
    const ScanResult sc =
        scan_certificate_box(inst, inner, 0.0, 10.0, 50, -10.0, 10.0, 50);
    box_min = std::min(box_min, sc.min_value);
  }
  ok = ok && box_min >= 0.95;
  row.pass = ok;
  row.detail = fmt("max|primal|=%.1e psi_norm=n for n=4..32 box_min=%.4f",
                   worst_primal, box_min);
}

// --------------------------------------------------------------------------
// Row 3: on the extended grid the certificates stay bounded (norm ratio
// <= 2 across n = 4..64) while the value approaches 1.
// --------------------------------------------------------------------------
void crit_thm31_contrast(SuiteRow& row, std::uint64_t) {
  bool ok = true;
  double lo = kInf, hi = 0.0, primal64 = 0.0;
  for (int n : {4, 8, 16, 32, 64}) {
    const CmInstance inst = named(Example32ModParams{4.0, n});
    const PrimalSolution ps = solve_primal(inst);
    ok = ok && ps.status == LpStatus::Optimal;
    if (n == 64) primal64 = ps.value;
    const MinNormPsi mn = min_sup_norm_psi(inst, ps.value);
    ok = ok && mn.status == LpStatus::Optimal;
    lo = std::min(lo, mn.sup_norm);
    hi = std::max(hi, mn.sup_norm);
  }
  ok = ok && hi <= 2.0 * lo && std::fabs(primal64 - 1.0) <= 1e-2;
  row.pass = ok;
  row.detail = fmt("psi_norm in [%.6f,%.6f] ratio=%.4f primal(64)=%.6f", lo,
                   hi, hi / lo, primal64);
}

// --------------------------------------------------------------------------
// Row 4: inverse-square-root payoffs: value mean(g)/2, multipliers -g/2,
// norm sqrt(n)/2 for n = 16, 64, 256.
// --------------------------------------------------------------------------
void crit_example35_blowup(SuiteRow& row, std::uint64_t) {
  bool ok = true;
  double last_norm = 0.0;
  for (int n : {16, 64, 256}) {
    const CmInstance inst = named(Example35Params{n, 1.0});
    double mean_g = 0.0;
    for (double g : inst.g_values) mean_g += g / n;
    const PrimalSolution ps = solve_primal(inst);
    ok = ok && ps.status == LpStatus::Optimal &&
         std::fabs(ps.value - mean_g / 2) <= 1e-8;
    const MinNormPsi mn = min_sup_norm_psi(inst, ps.value);
    ok = ok && mn.status == LpStatus::Optimal &&
         mn.cert.psi.size() == std::size_t(n);
    if (ok)
      for (int j = 0; j < n; ++j)
        ok = ok && std::fabs(mn.cert.psi[j] + inst.g_values[j] / 2) <= 1e-6;
    ok = ok && std::fabs(mn.sup_norm - std::sqrt(double(n)) / 2) <= 1e-6;
    last_norm = mn.sup_norm;
  }
  row.pass = ok;
  row.detail = fmt("psi=-g/2 at n=16,64,256; |psi|(256)=%.6f", last_norm);
}

// --------------------------------------------------------------------------
// Row 5: both repair constructions on randomized instances. The budget
// repair must restore feasibility with the documented mixing weight; the
// conditional repair must zero the residual within its TV budget. The
// conditional part needs two-sided room, so instances are drawn until 50
// of them satisfy that assumption.
// --------------------------------------------------------------------------
void crit_repairs(SuiteRow& row, std::uint64_t seed) {
  const std::uint64_t s0 = seed * 1000000ULL;
  bool ok = true;
  int eligible = 0, budget_exercised = 0;
  std::uint64_t attempts = 0;
  double worst_resid = 0.0, worst_ratio = 0.0;
  while (eligible < 50 && attempts < 2500 && ok) {
    ++attempts;
    const CmInstance inst = random_cm_instance(s0 + attempts);
    const Assumption2Report a2 = check_assumption_a2(inst);
    if (!a2.holds || a2.b_value < 1e-6) continue;
    ++eligible;

    // Budget repair: tighten rho below the optimal plan's spend so the plan
    // genuinely overspends, then mix toward the cheapest plan.
    const PrimalSolution ps = solve_primal(inst);
    const Assumption1Report a1 = check_assumption_a1(inst);
    ok = ok && ps.status == LpStatus::Optimal && a1.holds;
    if (!ok) break;
    const double margin = ps.budget - (inst.rho - a1.a_value);
    CmInstance work = inst;
    double eps = 0.0;
    if (margin > 1e-3) {
      work.rho = ps.budget - margin / 2;
      eps = margin / 2;
      ++budget_exercised;
    }
    const Assumption1Report a1w = check_assumption_a1(work);
    ok = ok && a1w.holds;
    if (!ok) break;
    const Lemma32Repair rep = lemma32_repair(work, ps.coupling, a1w.gamma0, eps);
    ok = ok && std::fabs(rep.t - eps / (rep.a + eps)) <= 1e-12;
    ok = ok && expectation_pairwise(rep.repaired, work.cost) <= work.rho + 1e-10;
    for (double r : conditional_residual(rep.repaired, work.h).value) {
      worst_resid = std::max(worst_resid, std::fabs(r));
      ok = ok && std::fabs(r) <= 1e-10;
    }
    const double mixed = (1.0 - rep.t) * expectation(ps.coupling, inst.f) +
                         rep.t * expectation(a1w.gamma0, inst.f);
    ok = ok && std::fabs(expectation(rep.repaired, inst.f) - mixed) <= 1e-9;

    // Conditional repair: break the residual by mixing the two sign plans
    // group by group, then repair and compare against the TV budget.
    const GroupIndex groups = inst.groups();
    std::mt19937_64 rng(s0 + attempts * 31ULL);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    Coupling broken = a2.gamma_plus;
    for (std::size_t g = 0; g < groups.size(); ++g) {
      const double u = unif(rng);
      for (std::size_t j : groups.members[g])
        for (std::size_t k = 0; k < inst.cols(); ++k)
          broken.at(j, k) = (1.0 - u) * a2.gamma_plus.at(j, k) +
                            u * a2.gamma_minus.at(j, k);
    }
    const ConditionalRepair cr =
        conditional_repair(inst, broken, a2.gamma_plus, a2.gamma_minus);
    for (double r : conditional_residual(cr.repaired, inst.h).value)
      ok = ok && std::fabs(r) <= 1e-12;
    const double ratio = cr.tv_bound > 0.0 ? cr.tv_measured / cr.tv_bound : 0.0;
    worst_ratio = std::max(worst_ratio, ratio);
    ok = ok && cr.tv_measured <= cr.tv_bound + 1e-12;
  }
  ok = ok && eligible == 50;
  row.pass = ok;
  row.detail =
      fmt("eligible=%d/%llu overspend=%d max|resid|=%.1e tv_ratio<=%.4f",
          eligible, static_cast<unsigned long long>(attempts),
          budget_exercised, worst_resid, worst_ratio);
}

// --------------------------------------------------------------------------
// Row 6: the interchanged dual equals the primal at the extracted
// certificate and dominates it at random certificates, 200 instances.
// --------------------------------------------------------------------------
void crit_ip_weak_duality(SuiteRow& row, std::uint64_t seed) {
  const std::uint64_t s0 = seed * 2000000ULL;
  bool ok = true;
  double worst_gap = 0.0, worst_slack = kInf;
  for (int k = 1; k <= 200 && ok; ++k) {
    const CmInstance inst = random_cm_instance(s0 + k);
    const PrimalSolution ps = solve_primal(inst);
    ok = ok && ps.status == LpStatus::Optimal;
    if (!ok) break;
    const double ident = eval_dual_ip(inst, ps.cert, inst.second);
    worst_gap = std::max(worst_gap, std::fabs(ident - ps.value));
    ok = ok && std::fabs(ident - ps.value) <= 1e-8;

    std::mt19937_64 rng(s0 + k * 97ULL);
    std::uniform_real_distribution<double> ulam(0.0, 2.0), upsi(-2.0, 2.0);
    const std::size_t G = inst.groups().size();
    for (int t = 0; t < 20; ++t) {
      DualCertificate cert;
      cert.lambda = ulam(rng);
      cert.psi.resize(G);
      for (double& p : cert.psi) p = upsi(rng);
      const double val = eval_dual_ip(inst, cert, inst.second);
      worst_slack = std::min(worst_slack, val - ps.value);
      ok = ok && val >= ps.value - 1e-9;
    }
  }
  row.pass = ok;
  row.detail = fmt("200 instances max|ip-primal|=%.1e min(rand-primal)=%.2e",
                   worst_gap, worst_slack);
}

// --------------------------------------------------------------------------
// Row 7: supergradient inequality under random target perturbations, plus
// finite-difference slopes against the dual-face pairing. The slope check
// runs where the dual face is bounded (two-sided room at least 1e-3, so a
// 1e-4 step stays feasible).
// --------------------------------------------------------------------------
void crit_stability_supergradient(SuiteRow& row, std::uint64_t seed) {
  const std::uint64_t s0 = seed * 3000000ULL;
  bool ok = true;
  int fd_checked = 0;
  double worst_fd = 0.0;

  const auto fd_probe = [&](const CmInstance& inst, const PrimalSolution& base,
                            const std::vector<double>& dir) {
    const double pairing = face_min_pairing(inst, base.value, dir);
    if (!std::isfinite(pairing)) {
      ok = false;
      return;
    }
    const double step = 1e-4;
    CmInstance shifted = inst;
    for (std::size_t g = 0; g < dir.size(); ++g) shifted.h[g] += step * dir[g];
    const PrimalSolution ps = solve_primal(shifted);
    if (ps.status != LpStatus::Optimal) {
      ok = false;
      return;
    }
    const double fd = (ps.value - base.value) / step;
    worst_fd = std::max(worst_fd, std::fabs(fd - pairing));
    ok = ok && std::fabs(fd - pairing) <= 1e-3;
    ++fd_checked;
  };

  // Reference family: closed-form slopes.
  {
    const CmInstance inst = named(Lemma34Params{});
    const PrimalSolution base = solve_primal(inst);
    ok = ok && base.status == LpStatus::Optimal;
    const SubgradientReport rep = subgradient_check(inst, base, 100, 0.2, seed);
    ok = ok && rep.all_ok;
    fd_probe(inst, base, {1.0, 0.0});
    fd_probe(inst, base, {0.0, 1.0});
    fd_probe(inst, base, {-1.0, 2.0});
  }

  for (int k = 1; k <= 20 && ok; ++k) {
    const CmInstance inst = random_cm_instance(s0 + k);
    const PrimalSolution base = solve_primal(inst);
    ok = ok && base.status == LpStatus::Optimal;
    if (!ok) break;
    const SubgradientReport rep =
        subgradient_check(inst, base, 100, 0.2, s0 + k * 13ULL);
    ok = ok && rep.all_ok;

    const Assumption2Report a2 = check_assumption_a2(inst);
    if (!a2.holds || a2.b_value < 1e-3) continue;
    std::mt19937_64 rng(s0 + k * 29ULL);
    std::uniform_int_distribution<int> coin(0, 1);
    const std::size_t G = inst.groups().size();
    for (int t = 0; t < 2; ++t) {
      std::vector<double> dir(G);
      for (double& d : dir) d = coin(rng) ? 1.0 : -1.0;
      fd_probe(inst, base, dir);
    }
  }
  row.pass = ok;
  row.detail = fmt("21 instances x 100 perturbations; fd checks=%d max|err|=%.2e",
                   fd_checked, worst_fd);
}

// --------------------------------------------------------------------------
// Row 8 helpers: vertex tuples that only vary the z-dependent functions
// (box rows are z-blind, so the full product would be astronomically
// redundant), and random dual-feasible points with an exact zero sum.
// --------------------------------------------------------------------------
bool z_dependent(const BiFunction& f) {
  for (double p : f.P)
    if (p != 0.0) return true;
  for (double c : f.c)
    if (c != 0.0) return true;
  return false;
}

void for_each_vertex_tuple(
    const UncertainProgram& prog,
    const std::function<void(const std::vector<std::vector<double>>&)>& fn) {
  std::vector<std::size_t> dep;
  for (std::size_t i = 0; i < prog.functions.size(); ++i)
    if (z_dependent(prog.functions[i])) dep.push_back(i);
  std::vector<std::vector<double>> tuple(prog.functions.size(), prog.Z[0]);
  std::vector<std::size_t> idx(dep.size(), 0);
  while (true) {
    for (std::size_t t = 0; t < dep.size(); ++t)
      tuple[dep[t]] = prog.Z[idx[t]];
    fn(tuple);
    std::size_t t = 0;
    for (; t < dep.size(); ++t) {
      if (++idx[t] < prog.Z.size()) break;
      idx[t] = 0;
    }
    if (t == dep.size()) break;
  }
}

DbPoint random_db_point(const UncertainProgram& prog, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  const auto hull_z = [&](double scale) {
    std::vector<double> lam(prog.Z.size());
    double s = 0.0;
    for (double& l : lam) {
      l = 0.05 + unif(rng);
      s += l;
    }
    std::vector<double> z(prog.zdim, 0.0);
    for (std::size_t v = 0; v < prog.Z.size(); ++v)
      for (std::size_t t = 0; t < prog.zdim; ++t)
        z[t] += scale * (lam[v] / s) * prog.Z[v][t];
    return z;
  };

  const std::size_t m = prog.m();
  DbPoint pt;
  pt.z.resize(m + 1);
  pt.wstar.resize(m);
  pt.dstar.assign(m + 1, std::vector<double>(prog.n, 0.0));
  pt.z[0] = hull_z(1.0);
  for (std::size_t i = 1; i <= m; ++i) {
    const double w = unif(rng) < 0.3 ? 0.0 : 2.0 * unif(rng);
    pt.wstar[i - 1] = w;
    pt.z[i] = hull_z(w);
    const BiFunction& f = prog.functions[i];
    for (std::size_t j = 0; j < prog.n; ++j) {
      double ds = w * f.xpart.a[j];
      if (!f.P.empty())
        for (std::size_t t = 0; t < prog.zdim; ++t)
          ds += f.P[j * prog.zdim + t] * pt.z[i][t];
      pt.dstar[i][j] = ds;
    }
    for (std::size_t j = 0; j < prog.n; ++j) pt.dstar[0][j] -= pt.dstar[i][j];
  }
  return pt;
}

// --------------------------------------------------------------------------
// Row 8: the dual point assembled from the optimal multipliers reproduces
// the robust value; random dual points and all vertex tuples stay below it;
// a one-vertex polytope collapses everything to a single number.
// --------------------------------------------------------------------------
void crit_pw_equals_db(SuiteRow& row, std::uint64_t seed) {
  const std::uint64_t s0 = seed * 4000000ULL;
  bool ok = true;
  double worst_eq = 0.0, worst_collapse = 0.0;
  for (int k = 1; k <= 30 && ok; ++k) {
    const bool quad = k > 20;
    const UncertainProgram prog = random_uncertain_program(s0 + k, quad);
    ok = ok && check_prop41_i(prog).holds;
    const PwResult pw = primal_worst(prog);
    ok = ok && pw.status == LpStatus::Optimal;
    if (!ok) break;

    const DbPoint kkt = db_construct_from_kkt(prog);
    const double db = db_evaluate(prog, kkt);
    worst_eq = std::max(worst_eq, std::fabs(db - pw.value));
    ok = ok && std::fabs(db - pw.value) <= 1e-6;

    std::mt19937_64 rng(s0 + k * 101ULL);
    for (int t = 0; t < 100; ++t) {
      const DbPoint pt = random_db_point(prog, rng);
      const double val = db_evaluate(prog, pt);
      ok = ok && val <= pw.value + 1e-9;
    }
    for_each_vertex_tuple(prog, [&](const std::vector<std::vector<double>>& z) {
      const double val = nonconvex_db_evaluate(prog, z);
      ok = ok && val <= pw.value + 1e-9;
    });

    UncertainProgram single = prog;
    single.Z.resize(1);
    const PwResult pw1 = primal_worst(single);
    const DbPoint kkt1 = db_construct_from_kkt(single);
    const double db1 = db_evaluate(single, kkt1);
    const double nc1 = nonconvex_db_evaluate(
        single,
        std::vector<std::vector<double>>(single.functions.size(), single.Z[0]));
    ok = ok && pw1.status == LpStatus::Optimal;
    worst_collapse = std::max(
        {worst_collapse, std::fabs(db1 - pw1.value), std::fabs(nc1 - pw1.value)});
    ok = ok && std::fabs(db1 - pw1.value) <= 1e-8 &&
         std::fabs(nc1 - pw1.value) <= 1e-8;
  }
  row.pass = ok;
  row.detail = fmt("20 LP + 10 QP max|db-pw|=%.2e max collapse err=%.2e",
                   worst_eq, worst_collapse);
}

// --------------------------------------------------------------------------
// Row 9: the simplex core against brute-force vertex enumeration, with
// complementary slackness and strong duality as certificate checks.
// --------------------------------------------------------------------------
void crit_lp_soundness(SuiteRow& row, std::uint64_t seed) {
  const std::uint64_t s0 = seed * 5000000ULL;
  bool ok = true;
  double worst_val = 0.0, worst_cs = 0.0;
  for (int k = 1; k <= 50 && ok; ++k) {
    const LpProblem p = random_feasible_lp(s0 + k, 6);
    const LpSolution s = solve_lp(p);
    ok = ok && s.status == LpStatus::Optimal;
    if (!ok) break;

    const auto verts = enumerate_vertices(p);
    double best = kInf;
    for (const auto& [v, val] : verts) best = std::min(best, val);
    worst_val = std::max(worst_val, std::fabs(s.value - best));
    ok = ok && std::fabs(s.value - best) <= 1e-8;

    double cs = 0.0;
    double dual_val = 0.0;
    for (std::size_t i = 0; i < p.m; ++i) dual_val += s.duals[i] * p.b[i];
    for (std::size_t j = 0; j < p.n; ++j) {
      const double rc = s.reduced_costs[j];
      if (rc > 0.0) {
        cs = std::max(cs, rc * (s.x[j] - p.lower[j]));
        dual_val += rc * p.lower[j];
      } else if (rc < 0.0) {
        cs = std::max(cs, -rc * (p.upper[j] - s.x[j]));
        dual_val += rc * p.upper[j];
      }
    }
    cs = std::max(cs, std::fabs(dual_val - s.value));
    worst_cs = std::max(worst_cs, cs);
    ok = ok && cs <= 1e-8;
  }
  row.pass = ok;
  row.detail = fmt("50 LPs max|lp-vertex|=%.2e max cs residual=%.2e",
                   worst_val, worst_cs);
}

// --------------------------------------------------------------------------
// Row 10: the symmetric-grid family stays strictly negative, increases
// toward zero in R, and respects |value| <= 2/(1+R).
// --------------------------------------------------------------------------
void crit_example33_nonattainment(SuiteRow& row, std::uint64_t) {
  bool ok = true;
  double prev = -kInf;
  std::string vals;
  for (double R : {10.0, 100.0, 1000.0}) {
    const CmInstance inst = named(Example33Params{R, 200});
    const PrimalSolution ps = solve_primal(inst);
    ok = ok && ps.status == LpStatus::Optimal && ps.value < 0.0 &&
         ps.value > prev && std::fabs(ps.value) <= 2.0 / (1.0 + R);
    prev = ps.value;
    vals += fmt(" %.6f", ps.value);
  }
  row.pass = ok;
  row.detail = "values at R=10,100,1000:" + vals;
}

struct Criterion {
  const char* name;
  double budget_seconds;
  void (*fn)(SuiteRow&, std::uint64_t);
};

constexpr Criterion kCriteria[] = {
    {"lemma34_golden", 1.0, crit_lemma34_golden},
    {"example32_gap", 30.0, crit_example32_gap},
    {"thm31_contrast", 30.0, crit_thm31_contrast},
    {"example35_blowup", 10.0, crit_example35_blowup},
    {"repairs", 20.0, crit_repairs},
    {"ip_weak_duality", 60.0, crit_ip_weak_duality},
    {"stability_supergradient", 60.0, crit_stability_supergradient},
    {"pw_equals_db", 60.0, crit_pw_equals_db},
    {"lp_soundness", 10.0, crit_lp_soundness},
    {"example33_nonattainment", 10.0, crit_example33_nonattainment},
};

}  // namespace

bool SuiteReport::all_pass() const {
  for (const SuiteRow& r : rows)
    if (!r.pass) return false;
  return !rows.empty();
}

SuiteReport run_suite(std::uint64_t seed, const std::string& only) {
  SuiteReport rep;
  rep.seed = seed;
  bool matched = only.empty();
  for (const Criterion& c : kCriteria) {
    if (!only.empty() && std::string(c.name).find(only) == std::string::npos)
      continue;
    matched = true;
    SuiteRow row;
    row.name = c.name;
    const auto t0 = std::chrono::steady_clock::now();
    try {
      c.fn(row, seed);
    } catch (const std::exception& e) {
      row.pass = false;
      row.detail = std::string("error: ") + e.what();
    }
    row.seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
            .count();
    if (row.seconds > c.budget_seconds) {
      row.pass = false;
      row.detail += fmt(" [over %.0fs budget]", c.budget_seconds);
    }
    rep.rows.push_back(std::move(row));
  }
  if (!matched)
    throw std::invalid_argument("run_suite: unknown row name '" + only + "'");
  return rep;
}

std::string suite_report_json(const SuiteReport& rep) {
  nlohmann::json j;
  j["version"] = 1;
  j["seed"] = rep.seed;
  j["all_pass"] = rep.all_pass();
  j["rows"] = nlohmann::json::array();
  for (const SuiteRow& r : rep.rows)
    j["rows"].push_back({{"name", r.name},
                         {"pass", r.pass},
                         {"seconds", r.seconds},
                         {"detail", r.detail}});
  // File-format hashes of the named families the suite exercises, so a
  // report pins down exactly which reference instances it certifies.
  nlohmann::json hashes;
  hashes["lemma34"] = spec_hash({Lemma34Params{}, rep.seed});
  hashes["example32"] = spec_hash({Example32Params{}, rep.seed});
  hashes["example32-mod"] = spec_hash({Example32ModParams{}, rep.seed});
  hashes["example35"] = spec_hash({Example35Params{}, rep.seed});
  hashes["example33"] = spec_hash({Example33Params{}, rep.seed});
  j["spec_hashes"] = hashes;
  return j.dump(2) + "\n";
}

}  // namespace cmw
