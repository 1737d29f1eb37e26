#include "cmw/robust.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "cmw/linalg.hpp"

namespace cmw {
namespace {

double dot(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

}  // namespace

XFunction BiFunction::freeze_z(const std::vector<double>& z, std::size_t n,
                               std::size_t zdim) const {
  XFunction out = xpart;
  if (!P.empty())
    for (std::size_t r = 0; r < n; ++r)
      for (std::size_t t = 0; t < zdim; ++t) out.a[r] += P[r * zdim + t] * z[t];
  out.d += dot(c, z) + d;
  return out;
}

std::pair<std::vector<double>, double> BiFunction::freeze_x(
    const std::vector<double>& x, std::size_t n, std::size_t zdim) const {
  std::vector<double> coef = c;
  if (!P.empty())
    for (std::size_t r = 0; r < n; ++r)
      for (std::size_t t = 0; t < zdim; ++t) coef[t] += x[r] * P[r * zdim + t];
  return {std::move(coef), xpart.eval(x) + d};
}

double UncertainProgram::f_eval(std::size_t i, const std::vector<double>& x,
                                const std::vector<double>& z) const {
  return functions.at(i).freeze_z(z, n, zdim).eval(x);
}

double UncertainProgram::robust_eval(std::size_t i,
                                     const std::vector<double>& x) const {
  double best = -kInf;
  for (const auto& z : Z) best = std::max(best, f_eval(i, x, z));
  return best;
}

void UncertainProgram::validate() const {
  if (n == 0 || zdim == 0)
    throw std::invalid_argument("UncertainProgram: empty dimensions");
  if (Z.empty()) throw std::invalid_argument("UncertainProgram: no vertices");
  for (const auto& z : Z) {
    if (z.size() != zdim)
      throw std::invalid_argument("UncertainProgram: vertex dimension mismatch");
    for (double v : z)
      if (!std::isfinite(v))
        throw std::invalid_argument("UncertainProgram: non-finite vertex");
  }
  if (functions.empty())
    throw std::invalid_argument("UncertainProgram: missing objective function");
  for (const BiFunction& f : functions) {
    if (f.xpart.dim() != n)
      throw std::invalid_argument("UncertainProgram: xpart dimension mismatch");
    f.xpart.validate();
    if (!f.P.empty() && f.P.size() != n * zdim)
      throw std::invalid_argument("UncertainProgram: P must be n x zdim");
    for (double v : f.P)
      if (!std::isfinite(v))
        throw std::invalid_argument("UncertainProgram: non-finite P entry");
    if (f.c.size() != zdim)
      throw std::invalid_argument("UncertainProgram: c must have zdim entries");
    for (double v : f.c)
      if (!std::isfinite(v))
        throw std::invalid_argument("UncertainProgram: non-finite c entry");
    if (!std::isfinite(f.d))
      throw std::invalid_argument("UncertainProgram: non-finite constant");
  }
  if (x_lo.size() != x_hi.size())
    throw std::invalid_argument("UncertainProgram: box must give both sides");
  if (!x_lo.empty()) {
    if (x_lo.size() != n)
      throw std::invalid_argument("UncertainProgram: box dimension mismatch");
    for (std::size_t j = 0; j < n; ++j)
      if (!(x_lo[j] <= x_hi[j]))
        throw std::invalid_argument("UncertainProgram: crossing box bounds");
  }
}

namespace {

/// primal_worst plus the per-(function, vertex) epigraph multipliers that
/// db_construct_from_kkt aggregates.
struct PwInternal {
  PwResult res;
  std::vector<std::vector<double>> mult;  ///< [i][v], i = 0 .. m
};

bool all_affine(const UncertainProgram& prog, std::size_t from) {
  for (std::size_t i = from; i < prog.functions.size(); ++i)
    if (prog.functions[i].xpart.kind != XKind::Affine) return false;
  return true;
}

PwInternal solve_pw_affine(const UncertainProgram& prog) {
  LpBuilder bld;
  std::vector<std::size_t> xv;
  for (std::size_t j = 0; j < prog.n; ++j)
    xv.push_back(bld.add_var(prog.has_box() ? prog.x_lo[j] : -kInf,
                             prog.has_box() ? prog.x_hi[j] : kInf, 0.0));
  const std::size_t tv = bld.add_var(-kInf, kInf, 1.0);

  const std::size_t V = prog.Z.size();
  std::vector<std::vector<std::size_t>> row_of(prog.functions.size());
  for (std::size_t i = 0; i < prog.functions.size(); ++i)
    for (std::size_t v = 0; v < V; ++v) {
      const XFunction g = prog.functions[i].freeze_z(prog.Z[v], prog.n, prog.zdim);
      std::vector<std::pair<std::size_t, double>> terms;
      for (std::size_t j = 0; j < prog.n; ++j)
        if (g.a[j] != 0.0) terms.push_back({xv[j], g.a[j]});
      if (i == 0) terms.push_back({tv, -1.0});
      row_of[i].push_back(bld.add_row(RowSense::Le, -g.d, terms));
    }

  const LpSolution sol = solve_lp(bld.build());
  PwInternal out;
  out.res.status = sol.status;
  if (sol.status != LpStatus::Optimal) return out;
  out.res.value = sol.value;
  out.res.x.assign(sol.x.begin(), sol.x.begin() + static_cast<long>(prog.n));
  out.mult.assign(prog.functions.size(), std::vector<double>(V, 0.0));
  for (std::size_t i = 0; i < prog.functions.size(); ++i)
    for (std::size_t v = 0; v < V; ++v)
      out.mult[i][v] = std::max(0.0, -sol.duals[row_of[i][v]]);
  return out;
}

/// One affine row a'y <= rhs in the lifted space y = (x, s).
struct QpRow {
  std::vector<double> a;  ///< n + 1 coefficients
  double rhs = 0.0;
  std::size_t owner_i = 0, owner_v = 0;
  bool owned = false;  ///< false for box rows
};

PwInternal solve_pw_quadratic(const UncertainProgram& prog) {
  const BiFunction& f0 = prog.functions[0];
  for (double qj : f0.xpart.q)
    if (!(qj > 0.0))
      throw std::invalid_argument(
          "primal_worst: quadratic objective needs strictly positive curvature");
  if (!all_affine(prog, 1))
    throw std::invalid_argument(
        "primal_worst: uncertain constraints must be affine in x");

  const std::size_t n = prog.n, V = prog.Z.size(), dim = n + 1;

  // Lifted rows: epigraph rows of the objective's affine parts (the shared
  // quadratic term stays in the objective), then constraint and box rows.
  std::vector<QpRow> rows;
  const auto push_row = [&](std::vector<double> a, double rhs, std::size_t i,
                            std::size_t v, bool owned) {
    for (const QpRow& r : rows)
      if (r.a == a && r.rhs == rhs) return;  // duplicate up to bitwise equality
    rows.push_back({std::move(a), rhs, i, v, owned});
  };
  for (std::size_t i = 0; i < prog.functions.size(); ++i)
    for (std::size_t v = 0; v < V; ++v) {
      const XFunction g = prog.functions[i].freeze_z(prog.Z[v], prog.n, prog.zdim);
      std::vector<double> a(dim, 0.0);
      for (std::size_t j = 0; j < n; ++j) a[j] = g.a[j];
      if (i == 0) a[n] = -1.0;
      push_row(std::move(a), -g.d, i, v, true);
    }
  if (prog.has_box())
    for (std::size_t j = 0; j < n; ++j) {
      std::vector<double> up(dim, 0.0), lo(dim, 0.0);
      up[j] = 1.0;
      lo[j] = -1.0;
      push_row(std::move(up), prog.x_hi[j], 0, 0, false);
      push_row(std::move(lo), -prog.x_lo[j], 0, 0, false);
    }

  PwInternal out;

  {  // Constraint rows alone decide feasibility (s is free).
    LpBuilder bld;
    std::vector<std::size_t> xv;
    for (std::size_t j = 0; j < n; ++j) xv.push_back(bld.add_var(-kInf, kInf, 0.0));
    bool any = false;
    for (const QpRow& r : rows) {
      if (r.a[n] != 0.0) continue;
      std::vector<std::pair<std::size_t, double>> terms;
      for (std::size_t j = 0; j < n; ++j)
        if (r.a[j] != 0.0) terms.push_back({xv[j], r.a[j]});
      bld.add_row(RowSense::Le, r.rhs, terms);
      any = true;
    }
    if (any && solve_lp(bld.build()).status == LpStatus::Infeasible) {
      out.res.status = LpStatus::Infeasible;
      return out;
    }
  }

  const std::vector<double>& q = f0.xpart.q;
  const auto objective = [&](const std::vector<double>& x) {
    return prog.robust_eval(0, x);
  };
  const auto worst_violation = [&](const std::vector<double>& x, std::size_t* who) {
    double worst = -kInf;
    for (std::size_t i = 1; i < prog.functions.size(); ++i) {
      const double Fi = prog.robust_eval(i, x);
      if (Fi > worst) {
        worst = Fi;
        if (who) *who = i;
      }
    }
    return worst;
  };

  // Stage 1: projected subgradient on the exact-penalty composite
  // F_0(x) + kPenalty max(0, max_i F_i(x)): step 1/k, 10,000-iteration cap,
  // best-iterate tracking, early stop once the best value has not improved
  // by 1e-6 over a 500-step window. The box (when present) is the projection.
  constexpr double kPenalty = 100.0;
  std::vector<double> x(n, 0.0);
  const auto clamp = [&](std::vector<double>& y) {
    if (!prog.has_box()) return;
    for (std::size_t j = 0; j < n; ++j)
      y[j] = std::min(prog.x_hi[j], std::max(prog.x_lo[j], y[j]));
  };
  clamp(x);
  const auto composite = [&](const std::vector<double>& y) {
    return objective(y) +
           kPenalty * std::max(0.0, prog.functions.size() > 1
                                        ? worst_violation(y, nullptr)
                                        : -kInf);
  };
  double best = composite(x);
  std::vector<double> best_x = x;
  int since_improved = 0, iters = 0;
  for (int k = 1; k <= 10000; ++k) {
    // subgradient: active-vertex gradient of F_0 plus the penalty piece
    std::vector<double> gsub(n, 0.0);
    {
      std::size_t vbest = 0;
      double fb = -kInf;
      for (std::size_t v = 0; v < V; ++v) {
        const double fv = prog.f_eval(0, x, prog.Z[v]);
        if (fv > fb) {
          fb = fv;
          vbest = v;
        }
      }
      const XFunction g = f0.freeze_z(prog.Z[vbest], n, prog.zdim);
      for (std::size_t j = 0; j < n; ++j) gsub[j] = q[j] * x[j] + g.a[j];
    }
    std::size_t iworst = 0;
    if (prog.functions.size() > 1 && worst_violation(x, &iworst) > 0.0) {
      std::size_t vbest = 0;
      double fb = -kInf;
      for (std::size_t v = 0; v < V; ++v) {
        const double fv = prog.f_eval(iworst, x, prog.Z[v]);
        if (fv > fb) {
          fb = fv;
          vbest = v;
        }
      }
      const XFunction g =
          prog.functions[iworst].freeze_z(prog.Z[vbest], n, prog.zdim);
      for (std::size_t j = 0; j < n; ++j) gsub[j] += kPenalty * g.a[j];
    }
    for (std::size_t j = 0; j < n; ++j) x[j] -= gsub[j] / static_cast<double>(k);
    clamp(x);
    const double val = composite(x);
    iters = k;
    if (val < best - 1e-6) {
      best = val;
      best_x = x;
      since_improved = 0;
    } else {
      if (val < best) {
        best = val;
        best_x = x;
      }
      if (++since_improved >= 500) break;
    }
  }
  out.res.subgradient_iters = iters;

  // Stage 2: exact refinement. The lifted program min (1/2) x'Qx + s over
  // the affine rows is solved by enumerating candidate active sets: each
  // KKT system is linear because Q is fixed, and any solution with
  // nonnegative multipliers and feasible primal is globally optimal.
  const std::size_t R = rows.size();
  const std::size_t max_active = std::min(R, dim);
  std::vector<std::size_t> subset;
  std::vector<double> best_y, best_u;
  std::vector<std::size_t> best_set;
  double best_val = kInf;
  bool found = false;

  const auto try_subset = [&]() {
    const std::size_t k = subset.size();
    const std::size_t N = dim + k;
    std::vector<double> M(N * N, 0.0), rhs(N, 0.0);
    for (std::size_t j = 0; j < n; ++j) M[j * N + j] = q[j];
    for (std::size_t t = 0; t < k; ++t) {
      const QpRow& r = rows[subset[t]];
      for (std::size_t j = 0; j < dim; ++j) {
        M[j * N + dim + t] = r.a[j];
        M[(dim + t) * N + j] = r.a[j];
      }
      rhs[dim + t] = r.rhs;
    }
    rhs[n] = -1.0;  // objective gradient in s
    std::vector<double> sol = rhs;
    if (!lu_solve(M, sol, N, 1e-12)) return;
    for (std::size_t t = 0; t < k; ++t)
      if (sol[dim + t] < -1e-9) return;
    for (const QpRow& r : rows) {
      double lhs = 0.0;
      for (std::size_t j = 0; j < dim; ++j) lhs += r.a[j] * sol[j];
      if (lhs > r.rhs + 1e-9) return;
    }
    double val = sol[n];
    for (std::size_t j = 0; j < n; ++j) val += 0.5 * q[j] * sol[j] * sol[j];
    if (!found || val < best_val) {
      found = true;
      best_val = val;
      best_y.assign(sol.begin(), sol.begin() + static_cast<long>(dim));
      best_u.assign(sol.begin() + static_cast<long>(dim), sol.end());
      best_set = subset;
    }
  };
  const std::function<void(std::size_t)> enumerate = [&](std::size_t from) {
    try_subset();
    if (subset.size() == max_active) return;
    for (std::size_t r = from; r < R; ++r) {
      subset.push_back(r);
      enumerate(r + 1);
      subset.pop_back();
    }
  };
  enumerate(0);

  if (!found)
    throw std::runtime_error(
        "primal_worst: active-set search found no stationary point");
  // The subgradient stage cross-checks the exact stage: a feasible iterate
  // strictly below the refined optimum would mean a dropped active set.
  if (prog.functions.size() == 1 || worst_violation(best_x, nullptr) <= 1e-9) {
    if (objective(best_x) < best_val - 1e-6)
      throw std::runtime_error(
          "primal_worst: refinement lost the subgradient iterate");
  }
  out.res.status = LpStatus::Optimal;
  out.res.value = best_val;
  out.res.x.assign(best_y.begin(), best_y.begin() + static_cast<long>(n));
  out.mult.assign(prog.functions.size(), std::vector<double>(V, 0.0));
  for (std::size_t t = 0; t < best_set.size(); ++t) {
    const QpRow& r = rows[best_set[t]];
    if (r.owned) out.mult[r.owner_i][r.owner_v] += std::max(0.0, best_u[t]);
  }
  return out;
}

/// Multipliers on bitwise-identical vertex rows are interchangeable; the
/// uniform split is the canonical choice, and it keeps the aggregated z_i at
/// the vertex centroid whenever a function cannot tell the vertices apart.
void spread_tied_multipliers(const UncertainProgram& prog,
                             std::vector<std::vector<double>>& mult) {
  const std::size_t V = prog.Z.size();
  for (std::size_t i = 0; i < prog.functions.size(); ++i) {
    std::vector<std::vector<double>> keys(V);
    for (std::size_t v = 0; v < V; ++v) {
      const XFunction g = prog.functions[i].freeze_z(prog.Z[v], prog.n, prog.zdim);
      keys[v] = g.a;
      keys[v].push_back(g.d);
    }
    std::vector<bool> seen(V, false);
    for (std::size_t v = 0; v < V; ++v) {
      if (seen[v]) continue;
      std::vector<std::size_t> group{v};
      for (std::size_t w = v + 1; w < V; ++w)
        if (!seen[w] && keys[w] == keys[v]) {
          group.push_back(w);
          seen[w] = true;
        }
      if (group.size() < 2) continue;
      double total = 0.0;
      for (std::size_t g : group) total += mult[i][g];
      for (std::size_t g : group)
        mult[i][g] = total / static_cast<double>(group.size());
    }
  }
}

PwInternal solve_pw_internal(const UncertainProgram& prog) {
  prog.validate();
  PwInternal out;
  if (prog.functions[0].xpart.kind == XKind::Affine) {
    if (!all_affine(prog, 1))
      throw std::invalid_argument(
          "primal_worst: uncertain constraints must be affine in x");
    out = solve_pw_affine(prog);
  } else {
    out = solve_pw_quadratic(prog);
  }
  if (out.res.status == LpStatus::Optimal)
    spread_tied_multipliers(prog, out.mult);
  return out;
}

/// x-conjugate of f_i(., z) at dstar: xpart*(dstar - P z) - c'z - d.
double frozen_conjugate(const BiFunction& f, std::size_t n, std::size_t zdim,
                        const std::vector<double>& z,
                        const std::vector<double>& dstar) {
  std::vector<double> shifted = dstar;
  if (!f.P.empty())
    for (std::size_t r = 0; r < n; ++r)
      for (std::size_t t = 0; t < zdim; ++t)
        shifted[r] -= f.P[r * zdim + t] * z[t];
  const ConjugateValue cv = conjugate(f.xpart, shifted);
  if (!cv.finite) return kInf;
  return cv.value - dot(f.c, z) - f.d;
}

}  // namespace

PwResult primal_worst(const UncertainProgram& prog) {
  return solve_pw_internal(prog).res;
}

void validate_db_point(const UncertainProgram& prog, const DbPoint& pt) {
  const std::size_t m = prog.m();
  if (pt.z.size() != m + 1 || pt.dstar.size() != m + 1 || pt.wstar.size() != m)
    throw std::invalid_argument("DbPoint: needs m+1 z's, m+1 dstar's, m weights");
  for (const auto& z : pt.z)
    if (z.size() != prog.zdim)
      throw std::invalid_argument("DbPoint: z dimension mismatch");
  for (const auto& ds : pt.dstar)
    if (ds.size() != prog.n)
      throw std::invalid_argument("DbPoint: dstar dimension mismatch");
  constexpr double kTol = 1e-9;
  for (double w : pt.wstar)
    if (w < -kTol)
      throw std::invalid_argument("DbPoint: negative constraint weight");
  for (std::size_t j = 0; j < prog.n; ++j) {
    double s = 0.0;
    for (const auto& ds : pt.dstar) s += ds[j];
    if (std::fabs(s) > kTol)
      throw std::invalid_argument("DbPoint: dstar entries must sum to zero");
  }
  if (!hull_membership(pt.z[0], 1.0, prog.Z, kTol))
    throw std::invalid_argument("DbPoint: z_0 outside the vertex hull");
  for (std::size_t i = 1; i <= m; ++i) {
    const double w = pt.wstar[i - 1];
    if (w > kTol) {
      if (!hull_membership(pt.z[i], w, prog.Z, kTol))
        throw std::invalid_argument("DbPoint: z_" + std::to_string(i) +
                                    " outside its scaled vertex hull");
    } else {
      for (double v : pt.z[i])
        if (std::fabs(v) > kTol)
          throw std::invalid_argument("DbPoint: zero-weight z_" +
                                      std::to_string(i) + " must vanish");
    }
  }
}

double db_evaluate(const UncertainProgram& prog, const DbPoint& pt) {
  prog.validate();
  validate_db_point(prog, pt);
  const double h0 =
      frozen_conjugate(prog.functions[0], prog.n, prog.zdim, pt.z[0], pt.dstar[0]);
  if (!std::isfinite(h0)) return -kInf;
  double total = -h0;
  for (std::size_t i = 1; i <= prog.m(); ++i) {
    const BiFunction& f = prog.functions[i];
    const BiConjugate h = [&](const std::vector<double>& z,
                              const std::vector<double>& ds) {
      return frozen_conjugate(f, prog.n, prog.zdim, z, ds);
    };
    const double term = right_scale(h, pt.wstar[i - 1], pt.z[i], pt.dstar[i]);
    if (!std::isfinite(term)) return -kInf;
    total -= term;
  }
  return total;
}

DbPoint db_construct_from_kkt(const UncertainProgram& prog) {
  prog.validate();
  if (prog.has_box())
    throw std::invalid_argument(
        "db_construct_from_kkt: encode the box as affine constraint functions");
  const PwInternal pw = solve_pw_internal(prog);
  if (pw.res.status != LpStatus::Optimal)
    throw std::runtime_error("db_construct_from_kkt: primal stage returned " +
                             to_string(pw.res.status));
  const std::size_t m = prog.m(), V = prog.Z.size();
  DbPoint pt;
  pt.z.assign(m + 1, std::vector<double>(prog.zdim, 0.0));
  pt.wstar.assign(m, 0.0);
  pt.dstar.assign(m + 1, std::vector<double>(prog.n, 0.0));
  for (std::size_t i = 0; i <= m; ++i) {
    double w = 0.0;
    for (std::size_t v = 0; v < V; ++v) {
      const double u = pw.mult[i][v];
      w += u;
      for (std::size_t t = 0; t < prog.zdim; ++t)
        pt.z[i][t] += u * prog.Z[v][t];
    }
    if (i > 0) pt.wstar[i - 1] = w;
  }
  for (std::size_t i = 0; i <= m; ++i) {
    const BiFunction& f = prog.functions[i];
    const double w = i == 0 ? 1.0 : pt.wstar[i - 1];
    for (std::size_t j = 0; j < prog.n; ++j) {
      double grad = f.xpart.a[j];
      if (f.xpart.kind == XKind::DiagQuadratic)
        grad += f.xpart.q[j] * pw.res.x[j];
      pt.dstar[i][j] = w * grad;
      if (!f.P.empty())
        for (std::size_t t = 0; t < prog.zdim; ++t)
          pt.dstar[i][j] += f.P[j * prog.zdim + t] * pt.z[i][t];
    }
  }
  return pt;
}

double nonconvex_db_evaluate(const UncertainProgram& prog,
                             const std::vector<std::vector<double>>& z_tuple) {
  prog.validate();
  const std::size_t m = prog.m();
  if (z_tuple.size() != m + 1)
    throw std::invalid_argument("nonconvex_db_evaluate: needs m+1 z choices");
  for (const auto& z : z_tuple)
    if (!hull_membership(z, 1.0, prog.Z, 1e-9))
      throw std::invalid_argument(
          "nonconvex_db_evaluate: z choice outside the vertex hull");

  std::vector<XFunction> g;
  g.reserve(m + 1);
  for (std::size_t i = 0; i <= m; ++i)
    g.push_back(prog.functions[i].freeze_z(z_tuple[i], prog.n, prog.zdim));

  if (g[0].kind == XKind::Affine) {
    for (std::size_t i = 1; i <= m; ++i)
      if (g[i].kind != XKind::Affine)
        throw std::invalid_argument(
            "nonconvex_db_evaluate: affine objective needs affine constraints");
    // sup over u >= 0 with sum u_i a_i = -a_0 of (d_0 + sum u_i d_i):
    // outside that set the inner infimum is -inf.
    if (m == 0) {
      for (double a : g[0].a)
        if (a != 0.0) return -kInf;
      return g[0].d;
    }
    LpBuilder bld;
    std::vector<std::size_t> uv;
    for (std::size_t i = 1; i <= m; ++i)
      uv.push_back(bld.add_var(0.0, kInf, -g[i].d));
    for (std::size_t j = 0; j < prog.n; ++j) {
      std::vector<std::pair<std::size_t, double>> terms;
      for (std::size_t i = 1; i <= m; ++i)
        if (g[i].a[j] != 0.0) terms.push_back({uv[i - 1], g[i].a[j]});
      bld.add_row(RowSense::Eq, -g[0].a[j], terms);
    }
    const LpSolution sol = solve_lp(bld.build());
    if (sol.status == LpStatus::Infeasible) return -kInf;
    if (sol.status == LpStatus::Unbounded) return kInf;
    if (sol.status != LpStatus::Optimal)
      throw std::runtime_error("nonconvex_db_evaluate: multiplier LP failed");
    return g[0].d - sol.value;
  }

  for (double qj : g[0].q)
    if (!(qj > 0.0))
      throw std::invalid_argument(
          "nonconvex_db_evaluate: quadratic objective needs strictly positive "
          "curvature");
  for (std::size_t i = 1; i <= m; ++i)
    if (g[i].kind != XKind::Affine)
      throw std::invalid_argument(
          "nonconvex_db_evaluate: quadratic objective needs affine constraints");

  // phi(u) = inf_x g_0(x) + sum u_i g_i(x)
  //        = B(u) - sum_j A_j(u)^2 / (2 q_j),
  // with A(u) = a_0 + sum u_i a_i and B(u) = d_0 + sum u_i d_i: a concave
  // quadratic maximized over u >= 0 by a projected Newton active-set loop.
  const std::vector<double>& qd = g[0].q;
  if (m == 0) {
    double val = g[0].d;
    for (std::size_t j = 0; j < prog.n; ++j)
      val -= g[0].a[j] * g[0].a[j] / (2.0 * qd[j]);
    return val;
  }
  // psi(u) = -phi(u) = (1/2) u'H u + lin'u + const
  std::vector<double> H(m * m, 0.0), lin(m, 0.0);
  double cst = -g[0].d;
  for (std::size_t j = 0; j < prog.n; ++j) {
    cst += g[0].a[j] * g[0].a[j] / (2.0 * qd[j]);
    for (std::size_t i = 1; i <= m; ++i) {
      lin[i - 1] += g[i].a[j] * g[0].a[j] / qd[j];
      for (std::size_t k = 1; k <= m; ++k)
        H[(i - 1) * m + (k - 1)] += g[i].a[j] * g[k].a[j] / qd[j];
    }
  }
  for (std::size_t i = 1; i <= m; ++i) lin[i - 1] -= g[i].d;

  std::vector<double> u(m, 0.0);
  constexpr double kGradTol = 1e-11;
  for (int pass = 0; pass < 200; ++pass) {
    std::vector<double> grad = lin;
    for (std::size_t i = 0; i < m; ++i)
      for (std::size_t k = 0; k < m; ++k) grad[i] += H[i * m + k] * u[k];
    std::vector<std::size_t> free;
    bool done = true;
    for (std::size_t i = 0; i < m; ++i) {
      if (u[i] > 0.0 || grad[i] < -kGradTol) free.push_back(i);
      if (u[i] > 0.0 ? std::fabs(grad[i]) > kGradTol : grad[i] < -kGradTol)
        done = false;
    }
    if (done || free.empty()) break;
    const std::size_t F = free.size();
    double ridge = 0.0;
    for (std::size_t i = 0; i < F; ++i)
      ridge = std::max(ridge, H[free[i] * m + free[i]]);
    ridge = 1e-12 * (1.0 + ridge);
    std::vector<double> Hf(F * F), rhs(F);
    for (std::size_t i = 0; i < F; ++i) {
      rhs[i] = -grad[free[i]];
      for (std::size_t k = 0; k < F; ++k)
        Hf[i * F + k] = H[free[i] * m + free[k]] + (i == k ? ridge : 0.0);
    }
    std::vector<double> step = rhs;
    if (!cholesky_solve(Hf, step, F, 0.0)) break;
    for (std::size_t i = 0; i < F; ++i)
      u[free[i]] = std::max(0.0, u[free[i]] + step[i]);
    double norm = 0.0;
    for (double ui : u) norm = std::max(norm, std::fabs(ui));
    if (norm > 1e10) return kInf;  // dual ray: the frozen program is infeasible
  }
  double psi = cst;
  for (std::size_t i = 0; i < m; ++i) {
    psi += lin[i] * u[i];
    for (std::size_t k = 0; k < m; ++k) psi += 0.5 * H[i * m + k] * u[i] * u[k];
  }
  return -psi;
}

namespace {

/// Minimizes max_{i >= 1} F_i(x): epigraph LP when every constraint is
/// affine, otherwise a projected subgradient descent from the box center.
SlaterReport min_max_constraints(const UncertainProgram& prog) {
  SlaterReport rep;
  rep.witness.assign(prog.n, 0.0);
  if (prog.has_box())
    for (std::size_t j = 0; j < prog.n; ++j)
      rep.witness[j] = 0.5 * (prog.x_lo[j] + prog.x_hi[j]);
  if (prog.m() == 0) {  // no constraints: vacuously strictly feasible
    rep.holds = true;
    rep.margin = -kInf;
    return rep;
  }

  if (all_affine(prog, 1)) {
    const auto solve_with_floor = [&](double floor) {
      LpBuilder bld;
      std::vector<std::size_t> xv;
      for (std::size_t j = 0; j < prog.n; ++j)
        xv.push_back(bld.add_var(prog.has_box() ? prog.x_lo[j] : -kInf,
                                 prog.has_box() ? prog.x_hi[j] : kInf, 0.0));
      const std::size_t sv = bld.add_var(floor, kInf, 1.0);
      for (std::size_t i = 1; i < prog.functions.size(); ++i)
        for (const auto& z : prog.Z) {
          const XFunction g = prog.functions[i].freeze_z(z, prog.n, prog.zdim);
          std::vector<std::pair<std::size_t, double>> terms;
          for (std::size_t j = 0; j < prog.n; ++j)
            if (g.a[j] != 0.0) terms.push_back({xv[j], g.a[j]});
          terms.push_back({sv, -1.0});
          bld.add_row(RowSense::Le, -g.d, terms);
        }
      return solve_lp(bld.build());
    };
    LpSolution sol = solve_with_floor(-kInf);
    if (sol.status == LpStatus::Unbounded) {
      rep.margin = -kInf;
      rep.holds = true;
      sol = solve_with_floor(-1.0);
      if (sol.status == LpStatus::Optimal)
        rep.witness.assign(sol.x.begin(), sol.x.begin() + static_cast<long>(prog.n));
      return rep;
    }
    if (sol.status != LpStatus::Optimal)
      throw std::runtime_error("check_prop41: feasibility stage returned " +
                               to_string(sol.status));
    rep.margin = sol.value;
    rep.holds = sol.value < -1e-9;
    rep.witness.assign(sol.x.begin(), sol.x.begin() + static_cast<long>(prog.n));
    return rep;
  }

  // Quadratic constraints: subgradient descent, best iterate kept. The
  // report is a certificate when it finds a strictly feasible point; it is
  // not a proof of infeasibility.
  std::vector<double> x = rep.witness;
  const auto eval = [&](const std::vector<double>& y) {
    double worst = -kInf;
    for (std::size_t i = 1; i < prog.functions.size(); ++i)
      worst = std::max(worst, prog.robust_eval(i, y));
    return worst;
  };
  double best = eval(x);
  std::vector<double> bx = x;
  for (int k = 1; k <= 2000; ++k) {
    std::size_t iworst = 1, vworst = 0;
    double fw = -kInf;
    for (std::size_t i = 1; i < prog.functions.size(); ++i)
      for (std::size_t v = 0; v < prog.Z.size(); ++v) {
        const double fv = prog.f_eval(i, x, prog.Z[v]);
        if (fv > fw) {
          fw = fv;
          iworst = i;
          vworst = v;
        }
      }
    const XFunction g =
        prog.functions[iworst].freeze_z(prog.Z[vworst], prog.n, prog.zdim);
    for (std::size_t j = 0; j < prog.n; ++j) {
      double gj = g.a[j];
      if (g.kind == XKind::DiagQuadratic) gj += g.q[j] * x[j];
      x[j] -= gj / static_cast<double>(k);
    }
    if (prog.has_box())
      for (std::size_t j = 0; j < prog.n; ++j)
        x[j] = std::min(prog.x_hi[j], std::max(prog.x_lo[j], x[j]));
    const double val = eval(x);
    if (val < best) {
      best = val;
      bx = x;
    }
  }
  rep.margin = best;
  rep.holds = best < -1e-9;
  rep.witness = bx;
  return rep;
}

}  // namespace

SlaterReport check_prop41_i(const UncertainProgram& prog) {
  prog.validate();
  return min_max_constraints(prog);
}

bool check_prop41_ii(const UncertainProgram& prog) {
  prog.validate();
  const SlaterReport rep = min_max_constraints(prog);
  const bool nonempty = rep.margin <= 1e-9;
  if (!nonempty) return false;
  if (prog.has_box()) return true;

  if (all_affine(prog, 1)) {
    if (prog.m() == 0) return false;  // whole space, never bounded
    for (std::size_t j = 0; j < prog.n; ++j)
      for (double dir : {1.0, -1.0}) {
        LpBuilder bld;
        std::vector<std::size_t> xv;
        for (std::size_t t = 0; t < prog.n; ++t)
          xv.push_back(bld.add_var(-kInf, kInf, t == j ? dir : 0.0));
        for (std::size_t i = 1; i < prog.functions.size(); ++i)
          for (const auto& z : prog.Z) {
            const XFunction g = prog.functions[i].freeze_z(z, prog.n, prog.zdim);
            std::vector<std::pair<std::size_t, double>> terms;
            for (std::size_t t = 0; t < prog.n; ++t)
              if (g.a[t] != 0.0) terms.push_back({xv[t], g.a[t]});
            bld.add_row(RowSense::Le, -g.d, terms);
          }
        if (solve_lp(bld.build()).status != LpStatus::Optimal) return false;
      }
    return true;
  }
  // A constraint with strictly positive curvature in every coordinate is
  // coercive, so its 0-sublevel set (hence the feasible region) is bounded.
  for (std::size_t i = 1; i < prog.functions.size(); ++i) {
    const XFunction& xp = prog.functions[i].xpart;
    if (xp.kind != XKind::DiagQuadratic) continue;
    bool coercive = true;
    for (double qj : xp.q) coercive = coercive && qj > 0.0;
    if (coercive) return true;
  }
  return false;
}

bool check_prop42(const UncertainProgram& prog, const DbPoint& pt, double delta) {
  prog.validate();
  validate_db_point(prog, pt);
  for (double w : pt.wstar)
    if (!(w > delta)) return false;
  if (!ri_membership(pt.z[0], 1.0, prog.Z, delta)) return false;
  for (std::size_t i = 1; i <= prog.m(); ++i)
    if (!ri_membership(pt.z[i], pt.wstar[i - 1], prog.Z, delta)) return false;
  // Conjugate finiteness at the point; the affine conjugates' thin domains
  // are their own relative interiors, so membership is the strictness test.
  if (!std::isfinite(frozen_conjugate(prog.functions[0], prog.n, prog.zdim,
                                      pt.z[0], pt.dstar[0])))
    return false;
  for (std::size_t i = 1; i <= prog.m(); ++i) {
    const BiFunction& f = prog.functions[i];
    const BiConjugate h = [&](const std::vector<double>& z,
                              const std::vector<double>& ds) {
      return frozen_conjugate(f, prog.n, prog.zdim, z, ds);
    };
    if (!std::isfinite(right_scale(h, pt.wstar[i - 1], pt.z[i], pt.dstar[i])))
      return false;
  }
  return true;
}

}  // namespace cmw
