#include "cmw/instances.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <random>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace cmw {
namespace {

using nlohmann::json;

/// Inverse standard-normal CDF, Acklam's rational approximation
/// (|relative error| < 1.2e-9 on (0,1)).
double norm_quantile(double p) {
  if (!(p > 0.0 && p < 1.0))
    throw std::invalid_argument("norm_quantile: p must lie in (0,1)");
  static const double a[6] = {-3.969683028665376e+01, 2.209460984245205e+02,
                              -2.759285104469687e+02, 1.383577518672690e+02,
                              -3.066479806614716e+01, 2.506628277459239e+00};
  static const double b[5] = {-5.447609879822406e+01, 1.615858368580409e+02,
                              -1.556989798598866e+02, 6.680131188771972e+01,
                              -1.328068155288572e+01};
  static const double c[6] = {-7.784894002430293e-03, -3.223964580411365e-01,
                              -2.400758277161838e+00, -2.549732539343734e+00,
                              4.374664141464968e+00,  2.938163982698783e+00};
  static const double d[4] = {7.784695709041462e-03, 3.224671290700398e-01,
                              2.445134137142996e+00, 3.754408661907416e+00};
  const double plow = 0.02425, phigh = 1.0 - plow;
  if (p < plow) {
    const double q = std::sqrt(-2.0 * std::log(p));
    return (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
           ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  }
  if (p > phigh) {
    const double q = std::sqrt(-2.0 * std::log(1.0 - p));
    return -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
           ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  }
  const double q = p - 0.5, r = q * q;
  return (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
         (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
}

std::vector<double> uniform_grid(double lo, double hi, int count) {
  std::vector<double> g(static_cast<std::size_t>(count));
  for (int i = 0; i < count; ++i)
    g[static_cast<std::size_t>(i)] =
        lo + static_cast<double>(i) * (hi - lo) / static_cast<double>(count - 1);
  return g;
}

/// Shared shape of the "reward at w = 0" families: atoms (v_j, 0) with
/// uniform masses, W = {0, 2}, f = g(v) 1{w=0}, h == 1, move-in-w-only cost.
CmInstance g_indicator_family(const std::vector<double>& v,
                              const std::vector<double>& g, double rho) {
  if (v.size() != g.size() || v.empty())
    throw std::invalid_argument("instance: v and g tables must match");
  CmInstance inst;
  const std::size_t J = v.size();
  for (std::size_t j = 0; j < J; ++j) {
    inst.first.atoms.push_back({{v[j]}, 0.0});
    inst.first.mass.push_back(1.0 / static_cast<double>(J));
  }
  for (double vj : v) inst.second.v_points.push_back({vj});
  inst.second.w_points = {0.0, 2.0};
  const std::size_t K = inst.second.size();
  inst.cost.assign(J * K, kInf);
  inst.f.assign(K, 0.0);
  for (std::size_t k = 0; k < K; ++k)
    if (inst.second.w_of(k) == 0.0)
      inst.f[k] = g[inst.second.v_index(k)];
  for (std::size_t j = 0; j < J; ++j)
    for (std::size_t k = 0; k < K; ++k)
      if (inst.second.v_of(k) == inst.first.atoms[j].v) inst.cost[j * K + k] = 0.0;
  inst.h.assign(J, 1.0);
  inst.rho = rho;
  inst.cost_rule = CostRule::SameVElseInf;
  inst.f_rule = FRule::GTimesIndicatorW0;
  inst.g_values = g;
  inst.validate();
  return inst;
}

CmInstance make_example32(double eps, int n, bool extended) {
  if (!(eps > 0.0) || n < 2)
    throw std::invalid_argument("example32: needs eps > 0 and n >= 2");
  CmInstance inst;
  inst.first.atoms.push_back({{0.0}, 0.0});
  inst.first.mass.push_back(1.0);
  inst.second.v_points.push_back({0.0});
  inst.second.w_points = uniform_grid(0.0, 1.0, n + 1);
  if (extended) {
    // tail section: ceil(n sqrt(eps)) uniform steps from 1 to 1 + sqrt(eps)
    const double root = std::sqrt(eps);
    const int steps = static_cast<int>(std::ceil(static_cast<double>(n) * root));
    for (int i = 1; i <= steps; ++i)
      inst.second.w_points.push_back(
          1.0 + static_cast<double>(i) * root / static_cast<double>(steps));
  }
  const std::size_t K = inst.second.size();
  inst.cost.resize(K);
  inst.f.resize(K);
  for (std::size_t k = 0; k < K; ++k) {
    const double w = inst.second.w_of(k);
    inst.cost[k] = w * w;
    inst.f[k] = w < 1.0 ? 1.0 : 0.0;
  }
  inst.h = {1.0};
  inst.rho = 1.0 + eps;
  inst.cost_rule = CostRule::SquaredW;
  inst.f_rule = FRule::IndicatorWBelowOne;
  inst.validate();
  return inst;
}

CmInstance make_lemma31(int J, double R, int n_w) {
  if (J < 1 || n_w < 3 || !(R > 1.0))
    throw std::invalid_argument("lemma31: needs J >= 1, n_w >= 3, R > 1");
  CmInstance inst;
  for (int j = 1; j <= J; ++j) {
    const double vj =
        norm_quantile((static_cast<double>(j) - 0.5) / static_cast<double>(J));
    inst.first.atoms.push_back({{vj}, 1.0});
    inst.first.mass.push_back(1.0 / static_cast<double>(J));
    inst.second.v_points.push_back({vj});
  }
  inst.second.w_points = uniform_grid(0.0, R, n_w);
  const std::size_t K = inst.second.size();
  inst.cost.assign(static_cast<std::size_t>(J) * K, kInf);
  inst.f.resize(K);
  for (std::size_t k = 0; k < K; ++k)
    inst.f[k] = inst.second.v_of(k)[0] * (inst.second.w_of(k) - 1.0);
  for (std::size_t j = 0; j < static_cast<std::size_t>(J); ++j)
    for (std::size_t k = 0; k < K; ++k)
      if (inst.second.v_of(k) == inst.first.atoms[j].v) inst.cost[j * K + k] = 0.0;
  inst.h.assign(static_cast<std::size_t>(J), 1.0);
  inst.rho = 1.0;
  inst.cost_rule = CostRule::SameVElseInf;
  inst.f_rule = FRule::VTimesWMinusOne;
  inst.validate();
  return inst;
}

CmInstance make_example33(double R, int n) {
  if (!(R > 1.0) || n < 4)
    throw std::invalid_argument("example33: needs R > 1 and n >= 4");
  CmInstance inst;
  inst.first.atoms.push_back({{0.0}, 0.0});
  inst.first.mass.push_back(1.0);
  inst.second.v_points.push_back({0.0});
  inst.second.w_points = uniform_grid(-R, R, n);
  const std::size_t K = inst.second.size();
  inst.cost.assign(K, 0.0);
  inst.f.resize(K);
  for (std::size_t k = 0; k < K; ++k)
    inst.f[k] = -1.0 / (1.0 + std::fabs(inst.second.w_of(k)));
  inst.h = {1.0};
  inst.rho = 1.0;  // cost is identically zero, any positive budget matches
  inst.cost_rule = CostRule::Zero;
  inst.f_rule = FRule::NegInvOnePlusAbsW;
  inst.validate();
  return inst;
}

}  // namespace

FatCantorSets fat_cantor_sets(int depth) {
  if (depth < 0) throw std::invalid_argument("fat_cantor_sets: depth >= 0");
  FatCantorSets sets;
  sets.remaining = {{0.0, 1.0}};
  double len = 1.0;
  for (int step = 1; step <= depth; ++step) {
    len /= 4.0;  // removed length 4^-step
    std::vector<std::pair<double, double>> next;
    for (const auto& [lo, hi] : sets.remaining) {
      const double mid = 0.5 * (lo + hi);
      const double a = mid - 0.5 * len, b = mid + 0.5 * len;
      sets.removed.emplace_back(a, b);
      next.emplace_back(lo, a);
      next.emplace_back(b, hi);
    }
    sets.remaining = std::move(next);
  }
  return sets;
}

double fat_cantor_dist(double v, const FatCantorSets& sets) {
  double best = kInf;
  for (const auto& [lo, hi] : sets.remaining) {
    if (v >= lo && v <= hi) return 0.0;
    best = std::min(best, std::min(std::fabs(v - lo), std::fabs(v - hi)));
  }
  return best;
}

std::string kind_name(const InstanceSpec& spec) {
  struct Visitor {
    std::string operator()(const Example32Params&) const { return "example32"; }
    std::string operator()(const Example32ModParams&) const {
      return "example32-mod";
    }
    std::string operator()(const Lemma31Params&) const { return "lemma31"; }
    std::string operator()(const Lemma34Params&) const { return "lemma34"; }
    std::string operator()(const Example35Params&) const { return "example35"; }
    std::string operator()(const FatCantorParams&) const { return "fat-cantor"; }
    std::string operator()(const Example33Params&) const { return "example33"; }
    std::string operator()(const CustomCmParams&) const { return "custom-cm"; }
    std::string operator()(const CustomPwParams&) const { return "custom-pw"; }
  };
  return std::visit(Visitor{}, spec.kind);
}

GeneratedInstance generate(const InstanceSpec& spec) {
  struct Visitor {
    GeneratedInstance operator()(const Example32Params& p) const {
      return make_example32(p.eps, p.n, false);
    }
    GeneratedInstance operator()(const Example32ModParams& p) const {
      return make_example32(p.eps, p.n, true);
    }
    GeneratedInstance operator()(const Lemma31Params& p) const {
      return make_lemma31(p.J, p.R, p.n_w);
    }
    GeneratedInstance operator()(const Lemma34Params& p) const {
      return g_indicator_family(p.v_points, p.g_values, p.rho);
    }
    GeneratedInstance operator()(const Example35Params& p) const {
      if (p.n < 1) throw std::invalid_argument("example35: needs n >= 1");
      std::vector<double> v(static_cast<std::size_t>(p.n)),
          g(static_cast<std::size_t>(p.n));
      for (int j = 1; j <= p.n; ++j) {
        v[static_cast<std::size_t>(j - 1)] =
            static_cast<double>(j) / static_cast<double>(p.n);
        g[static_cast<std::size_t>(j - 1)] =
            -1.0 / std::sqrt(v[static_cast<std::size_t>(j - 1)]);
      }
      return g_indicator_family(v, g, p.rho);
    }
    GeneratedInstance operator()(const FatCantorParams& p) const {
      if (p.n < 2) throw std::invalid_argument("fat-cantor: needs n >= 2");
      const FatCantorSets sets = fat_cantor_sets(p.depth);
      std::vector<double> v(static_cast<std::size_t>(p.n)),
          g(static_cast<std::size_t>(p.n));
      for (int j = 1; j <= p.n; ++j) {
        const double vj =
            (static_cast<double>(j) - 0.5) / static_cast<double>(p.n);
        v[static_cast<std::size_t>(j - 1)] = vj;
        g[static_cast<std::size_t>(j - 1)] =
            fat_cantor_dist(vj, sets) > 0.0 ? -1.0 : 0.0;
      }
      return g_indicator_family(v, g, p.rho);
    }
    GeneratedInstance operator()(const Example33Params& p) const {
      return make_example33(p.R, p.n);
    }
    GeneratedInstance operator()(const CustomCmParams& p) const {
      p.inst.validate();
      return p.inst;
    }
    GeneratedInstance operator()(const CustomPwParams& p) const {
      p.prog.validate();
      return p.prog;
    }
  };
  return std::visit(Visitor{}, spec.kind);
}

CmInstance generate_cm(const InstanceSpec& spec) {
  GeneratedInstance g = generate(spec);
  if (auto* inst = std::get_if<CmInstance>(&g)) return std::move(*inst);
  throw std::invalid_argument("generate_cm: '" + kind_name(spec) +
                              "' is not a transport instance");
}

// --- randomized families -------------------------------------------------

CmInstance random_cm_instance(std::uint64_t seed) {
  std::mt19937_64 rng(seed ^ 0x9e3779b97f4a7c15ULL);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const auto pick = [&](int lo, int hi) {
    return lo + static_cast<int>(rng() % static_cast<std::uint64_t>(hi - lo + 1));
  };

  CmInstance inst;
  const int n_groups = pick(1, 3);
  for (int g = 0; g < n_groups; ++g) {
    inst.second.v_points.push_back({static_cast<double>(g)});
    const int atoms = pick(1, 2);
    for (int a = 0; a < atoms; ++a)
      inst.first.atoms.push_back({{static_cast<double>(g)}, 0.0});
  }
  const std::size_t J = inst.first.atoms.size();
  inst.first.mass.resize(J);
  double total = 0.0;
  for (double& m : inst.first.mass) total += (m = 0.5 + unit(rng));
  for (double& m : inst.first.mass) m /= total;

  const int Kw = pick(4, 6);
  double w = -2.0 + unit(rng) * 0.5;
  for (int k = 0; k < Kw; ++k) {
    inst.second.w_points.push_back(w);
    w += 0.3 + unit(rng) * 1.2;
  }
  const std::size_t K = inst.second.size();
  for (std::size_t j = 0; j < J; ++j)
    inst.first.atoms[j].w =
        inst.second.w_points[rng() % inst.second.w_points.size()];

  inst.f.resize(K);
  for (double& v : inst.f) v = -2.0 + 4.0 * unit(rng);
  inst.cost.assign(J * K, 0.0);
  for (std::size_t j = 0; j < J; ++j)
    for (std::size_t k = 0; k < K; ++k) {
      if (unit(rng) < 0.15) {
        inst.cost[j * K + k] = kInf;
        continue;
      }
      const double base = std::fabs(inst.second.w_of(k) - inst.first.atoms[j].w);
      const double vmatch =
          inst.second.v_of(k) == inst.first.atoms[j].v ? 0.0 : unit(rng);
      inst.cost[j * K + k] = base * (0.5 + unit(rng)) + vmatch;
    }

  // Hidden feasible plan: two included destinations per atom; h and rho are
  // read off from it, so the instance is always solvable with budget room.
  Coupling plan;
  plan.first = inst.first;
  plan.second = inst.second;
  plan.gamma.assign(J * K, 0.0);
  for (std::size_t j = 0; j < J; ++j) {
    std::vector<std::size_t> in;
    for (std::size_t k = 0; k < K; ++k)
      if (inst.included(j, k)) in.push_back(k);
    if (in.empty()) {
      const std::size_t k = rng() % K;
      inst.cost[j * K + k] = 1.0;
      in.push_back(k);
    }
    const std::size_t k1 = in[rng() % in.size()];
    const std::size_t k2 = in[rng() % in.size()];
    const double split = 0.2 + 0.6 * unit(rng);
    plan.gamma[j * K + k1] += inst.first.mass[j] * split;
    plan.gamma[j * K + k2] += inst.first.mass[j] * (1.0 - split);
  }

  const GroupIndex groups = group_by_vhat(inst.first);
  inst.h.assign(groups.size(), 0.0);
  for (std::size_t g = 0; g < groups.size(); ++g) {
    double mean = 0.0;
    for (std::size_t j : groups.members[g])
      for (std::size_t k = 0; k < K; ++k)
        mean += plan.gamma[j * K + k] * inst.second.w_of(k);
    inst.h[g] = mean / groups.nu[g];
  }
  inst.rho = expectation_pairwise(plan, inst.cost) + 0.3 + 0.7 * unit(rng);
  inst.validate();
  return inst;
}

UncertainProgram random_uncertain_program(std::uint64_t seed,
                                          bool quadratic_objective) {
  std::mt19937_64 rng(seed ^ 0x51f15eedULL);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const auto box = [&](double r) { return -r + 2.0 * r * unit(rng); };
  const auto pick = [&](int lo, int hi) {
    return lo + static_cast<int>(rng() % static_cast<std::uint64_t>(hi - lo + 1));
  };

  UncertainProgram prog;
  prog.n = static_cast<std::size_t>(pick(1, 3));
  prog.zdim = static_cast<std::size_t>(pick(1, 2));
  const int n_vertices = pick(2, 4);
  for (int v = 0; v < n_vertices; ++v) {
    std::vector<double> z(prog.zdim);
    for (double& zi : z) zi = box(1.5);
    prog.Z.push_back(std::move(z));
  }

  const auto random_fun = [&](bool quad) {
    BiFunction f;
    f.xpart.kind = quad ? XKind::DiagQuadratic : XKind::Affine;
    f.xpart.a.resize(prog.n);
    for (double& ai : f.xpart.a) ai = box(1.0);
    if (quad) {
      f.xpart.q.resize(prog.n);
      for (double& qi : f.xpart.q) qi = 0.4 + 1.1 * unit(rng);
    }
    f.xpart.d = box(0.5);
    f.P.resize(prog.n * prog.zdim);
    for (double& pij : f.P) pij = box(0.6);
    f.c.resize(prog.zdim);
    for (double& ci : f.c) ci = box(0.5);
    f.d = box(0.5);
    return f;
  };

  prog.functions.push_back(random_fun(quadratic_objective));
  const int m_uncertain = pick(1, 2);
  for (int i = 0; i < m_uncertain; ++i) {
    BiFunction f = random_fun(false);
    // Slater margin at x = 0: pull d down below the worst vertex value there.
    double worst = -kInf;
    for (const auto& z : prog.Z) {
      double val = f.xpart.d + f.d;
      for (std::size_t t = 0; t < prog.zdim; ++t) val += f.c[t] * z[t];
      worst = std::max(worst, val);
    }
    f.d -= worst + 0.5;
    prog.functions.push_back(std::move(f));
  }
  // Bounding box |x_j| <= 3 as ordinary certain constraints, so the dual
  // aggregation sees every active multiplier.
  for (std::size_t jx = 0; jx < prog.n; ++jx)
    for (double sign : {1.0, -1.0}) {
      BiFunction f;
      f.xpart.a.assign(prog.n, 0.0);
      f.xpart.a[jx] = sign;
      f.xpart.d = 0.0;
      f.P.assign(prog.n * prog.zdim, 0.0);
      f.c.assign(prog.zdim, 0.0);
      f.d = -3.0;
      prog.functions.push_back(std::move(f));
    }
  prog.validate();
  return prog;
}

LpProblem random_feasible_lp(std::uint64_t seed, std::size_t max_n) {
  std::mt19937_64 rng(seed ^ 0xfeedULL);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  LpProblem p;
  p.n = 2 + rng() % (max_n - 1);
  p.m = 1 + rng() % p.n;
  p.c.resize(p.n);
  p.lower.resize(p.n);
  p.upper.resize(p.n);
  std::vector<double> x0(p.n);
  for (std::size_t j = 0; j < p.n; ++j) {
    p.lower[j] = -2.0 + unit(rng);
    p.upper[j] = p.lower[j] + 1.0 + 2.0 * unit(rng);
    p.c[j] = -2.0 + 4.0 * unit(rng);
    x0[j] = p.lower[j] + (p.upper[j] - p.lower[j]) * (0.2 + 0.6 * unit(rng));
  }
  p.A.resize(p.m * p.n);
  for (double& a : p.A) a = -1.5 + 3.0 * unit(rng);
  p.b.assign(p.m, 0.0);
  for (std::size_t i = 0; i < p.m; ++i)
    for (std::size_t j = 0; j < p.n; ++j) p.b[i] += p.at(i, j) * x0[j];
  p.validate();
  return p;
}

// --- instance files -------------------------------------------------------

namespace {

json num_or_inf(double v) {
  if (std::isinf(v)) return json("inf");
  return json(v);
}

double parse_num_or_inf(const json& j, const char* field) {
  if (j.is_string()) {
    if (j.get<std::string>() == "inf") return kInf;
    throw std::runtime_error(std::string("instance file error: field '") +
                             field + "' has a non-numeric string value");
  }
  return j.get<double>();
}

const char* cost_rule_name(CostRule r) {
  switch (r) {
    case CostRule::None: return "none";
    case CostRule::SquaredW: return "squared-w";
    case CostRule::SameVElseInf: return "same-v-else-inf";
    case CostRule::Zero: return "zero";
  }
  return "none";
}

CostRule cost_rule_from(const std::string& s) {
  if (s == "none") return CostRule::None;
  if (s == "squared-w") return CostRule::SquaredW;
  if (s == "same-v-else-inf") return CostRule::SameVElseInf;
  if (s == "zero") return CostRule::Zero;
  throw std::runtime_error("instance file error: unknown cost_rule '" + s + "'");
}

const char* f_rule_name(FRule r) {
  switch (r) {
    case FRule::None: return "none";
    case FRule::IndicatorWBelowOne: return "indicator-w-below-one";
    case FRule::GTimesIndicatorW0: return "g-times-indicator-w0";
    case FRule::NegInvOnePlusAbsW: return "neg-inv-one-plus-abs-w";
    case FRule::VTimesWMinusOne: return "v-times-w-minus-one";
  }
  return "none";
}

FRule f_rule_from(const std::string& s) {
  if (s == "none") return FRule::None;
  if (s == "indicator-w-below-one") return FRule::IndicatorWBelowOne;
  if (s == "g-times-indicator-w0") return FRule::GTimesIndicatorW0;
  if (s == "neg-inv-one-plus-abs-w") return FRule::NegInvOnePlusAbsW;
  if (s == "v-times-w-minus-one") return FRule::VTimesWMinusOne;
  throw std::runtime_error("instance file error: unknown f_rule '" + s + "'");
}

json cm_payload(const CmInstance& inst) {
  json p;
  p["v_points"] = inst.second.v_points;
  p["w_points"] = inst.second.w_points;
  json atoms = json::array();
  for (std::size_t j = 0; j < inst.rows(); ++j)
    atoms.push_back({{"v", inst.first.atoms[j].v},
                     {"w", inst.first.atoms[j].w},
                     {"mass", inst.first.mass[j]}});
  p["mu_hat"] = std::move(atoms);
  json cost = json::array();
  for (std::size_t j = 0; j < inst.rows(); ++j) {
    json row = json::array();
    for (std::size_t k = 0; k < inst.cols(); ++k)
      row.push_back(num_or_inf(inst.cost_at(j, k)));
    cost.push_back(std::move(row));
  }
  p["cost"] = std::move(cost);
  p["f"] = inst.f;
  p["h"] = inst.h;
  p["rho"] = inst.rho;
  p["cost_rule"] = cost_rule_name(inst.cost_rule);
  p["f_rule"] = f_rule_name(inst.f_rule);
  if (!inst.g_values.empty()) p["g_values"] = inst.g_values;
  return p;
}

CmInstance cm_from_payload(const json& p) {
  CmInstance inst;
  inst.second.v_points = p.at("v_points").get<std::vector<std::vector<double>>>();
  inst.second.w_points = p.at("w_points").get<std::vector<double>>();
  for (const json& atom : p.at("mu_hat")) {
    inst.first.atoms.push_back({atom.at("v").get<std::vector<double>>(),
                                atom.at("w").get<double>()});
    inst.first.mass.push_back(atom.at("mass").get<double>());
  }
  const json& cost = p.at("cost");
  for (const json& row : cost) {
    for (const json& entry : row) inst.cost.push_back(parse_num_or_inf(entry, "cost"));
  }
  inst.f = p.at("f").get<std::vector<double>>();
  inst.h = p.at("h").get<std::vector<double>>();
  inst.rho = p.at("rho").get<double>();
  if (p.contains("cost_rule"))
    inst.cost_rule = cost_rule_from(p.at("cost_rule").get<std::string>());
  if (p.contains("f_rule"))
    inst.f_rule = f_rule_from(p.at("f_rule").get<std::string>());
  if (p.contains("g_values"))
    inst.g_values = p.at("g_values").get<std::vector<double>>();
  inst.validate();
  return inst;
}

json xfun_payload(const XFunction& xf) {
  json j;
  j["type"] = xf.kind == XKind::Affine ? "affine" : "diag-quadratic";
  if (xf.kind == XKind::DiagQuadratic) j["q"] = xf.q;
  j["a"] = xf.a;
  j["d"] = xf.d;
  return j;
}

XFunction xfun_from_payload(const json& j) {
  XFunction xf;
  const std::string type = j.at("type").get<std::string>();
  if (type == "affine") {
    xf.kind = XKind::Affine;
  } else if (type == "diag-quadratic") {
    xf.kind = XKind::DiagQuadratic;
    xf.q = j.at("q").get<std::vector<double>>();
  } else {
    throw std::runtime_error("instance file error: unknown xpart type '" + type +
                             "'");
  }
  xf.a = j.at("a").get<std::vector<double>>();
  xf.d = j.at("d").get<double>();
  return xf;
}

json pw_payload(const UncertainProgram& prog) {
  json p;
  p["n"] = prog.n;
  p["m"] = prog.m();
  p["Z_vertices"] = prog.Z;
  json funs = json::array();
  for (const BiFunction& f : prog.functions) {
    json jf;
    json rows = json::array();
    for (std::size_t r = 0; r < prog.n; ++r) {
      json row = json::array();
      for (std::size_t t = 0; t < prog.zdim; ++t)
        row.push_back(f.P.empty() ? 0.0 : f.P[r * prog.zdim + t]);
      rows.push_back(std::move(row));
    }
    jf["P"] = std::move(rows);
    jf["xpart"] = xfun_payload(f.xpart);
    jf["c"] = f.c;
    jf["d"] = f.d;
    funs.push_back(std::move(jf));
  }
  p["functions"] = std::move(funs);
  if (prog.has_box()) p["x_bounds"] = {{"lo", prog.x_lo}, {"hi", prog.x_hi}};
  return p;
}

UncertainProgram pw_from_payload(const json& p) {
  UncertainProgram prog;
  prog.n = p.at("n").get<std::size_t>();
  prog.Z = p.at("Z_vertices").get<std::vector<std::vector<double>>>();
  if (prog.Z.empty())
    throw std::runtime_error("instance file error: Z_vertices is empty");
  prog.zdim = prog.Z.front().size();
  for (const json& jf : p.at("functions")) {
    BiFunction f;
    const auto rows = jf.at("P").get<std::vector<std::vector<double>>>();
    for (const auto& row : rows)
      f.P.insert(f.P.end(), row.begin(), row.end());
    f.xpart = xfun_from_payload(jf.at("xpart"));
    f.c = jf.at("c").get<std::vector<double>>();
    f.d = jf.at("d").get<double>();
    prog.functions.push_back(std::move(f));
  }
  const std::size_t m_declared = p.at("m").get<std::size_t>();
  if (prog.functions.size() != m_declared + 1)
    throw std::runtime_error(
        "instance file error: 'functions' must hold m + 1 entries");
  if (p.contains("x_bounds")) {
    prog.x_lo = p.at("x_bounds").at("lo").get<std::vector<double>>();
    prog.x_hi = p.at("x_bounds").at("hi").get<std::vector<double>>();
  }
  prog.validate();
  return prog;
}

json params_payload(const InstanceSpec& spec) {
  struct Visitor {
    json operator()(const Example32Params& p) const {
      return {{"eps", p.eps}, {"n", p.n}};
    }
    json operator()(const Example32ModParams& p) const {
      return {{"eps", p.eps}, {"n", p.n}};
    }
    json operator()(const Lemma31Params& p) const {
      return {{"J", p.J}, {"R", p.R}, {"n_w", p.n_w}};
    }
    json operator()(const Lemma34Params& p) const {
      return {{"v_points", p.v_points},
              {"g_values", p.g_values},
              {"rho", p.rho}};
    }
    json operator()(const Example35Params& p) const {
      return {{"n", p.n}, {"rho", p.rho}};
    }
    json operator()(const FatCantorParams& p) const {
      return {{"depth", p.depth}, {"n", p.n}, {"rho", p.rho}};
    }
    json operator()(const Example33Params& p) const {
      return {{"R", p.R}, {"n", p.n}};
    }
    json operator()(const CustomCmParams& p) const { return cm_payload(p.inst); }
    json operator()(const CustomPwParams& p) const { return pw_payload(p.prog); }
  };
  return std::visit(Visitor{}, spec.kind);
}

InstanceKind kind_from_json(const std::string& name, const json& params) {
  if (name == "example32")
    return Example32Params{params.at("eps").get<double>(),
                           params.at("n").get<int>()};
  if (name == "example32-mod")
    return Example32ModParams{params.at("eps").get<double>(),
                              params.at("n").get<int>()};
  if (name == "lemma31")
    return Lemma31Params{params.at("J").get<int>(), params.at("R").get<double>(),
                         params.at("n_w").get<int>()};
  if (name == "lemma34")
    return Lemma34Params{params.at("v_points").get<std::vector<double>>(),
                         params.at("g_values").get<std::vector<double>>(),
                         params.at("rho").get<double>()};
  if (name == "example35")
    return Example35Params{params.at("n").get<int>(),
                           params.at("rho").get<double>()};
  if (name == "fat-cantor")
    return FatCantorParams{params.at("depth").get<int>(),
                           params.at("n").get<int>(),
                           params.at("rho").get<double>()};
  if (name == "example33")
    return Example33Params{params.at("R").get<double>(),
                           params.at("n").get<int>()};
  if (name == "custom-cm") return CustomCmParams{cm_from_payload(params)};
  if (name == "custom-pw") return CustomPwParams{pw_from_payload(params)};
  throw std::runtime_error("instance file error: unknown kind '" + name + "'");
}

}  // namespace

std::string spec_to_json(const InstanceSpec& spec) {
  json j;
  j["version"] = 1;
  j["seed"] = spec.seed;
  j["kind"] = kind_name(spec);
  const bool custom = std::holds_alternative<CustomCmParams>(spec.kind) ||
                      std::holds_alternative<CustomPwParams>(spec.kind);
  j[custom ? "payload" : "params"] = params_payload(spec);
  return j.dump(2) + "\n";
}

InstanceSpec spec_from_json(const std::string& text) {
  try {
    const json j = json::parse(text);
    if (!j.contains("version") || j.at("version").get<int>() != 1)
      throw std::runtime_error(
          "instance file error: missing or unsupported 'version' (expected 1)");
    InstanceSpec spec;
    if (j.contains("seed")) spec.seed = j.at("seed").get<std::uint64_t>();
    const std::string name = j.at("kind").get<std::string>();
    const char* section =
        (name == "custom-cm" || name == "custom-pw") ? "payload" : "params";
    if (!j.contains(section))
      throw std::runtime_error(std::string("instance file error: missing '") +
                               section + "' section");
    spec.kind = kind_from_json(name, j.at(section));
    return spec;
  } catch (const json::exception& e) {
    throw std::runtime_error(std::string("instance file error: ") + e.what());
  }
}

void save_spec(const InstanceSpec& spec, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
  out << spec_to_json(spec);
  if (!out) throw std::runtime_error("write to '" + path + "' failed");
}

InstanceSpec load_spec(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return spec_from_json(buf.str());
}

std::string spec_hash(const InstanceSpec& spec) {
  const std::string text = spec_to_json(spec);
  std::uint64_t h = 14695981039346656037ULL;
  for (unsigned char ch : text) {
    h ^= ch;
    h *= 1099511628211ULL;
  }
  char out[17];
  std::snprintf(out, sizeof out, "%016llx", static_cast<unsigned long long>(h));
  return out;
}

}  // namespace cmw
