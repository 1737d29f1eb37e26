#include "cmw/lp.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "cmw/linalg.hpp"

namespace cmw {

std::string to_string(LpStatus s) {
  switch (s) {
    case LpStatus::Optimal: return "Optimal";
    case LpStatus::Infeasible: return "Infeasible";
    case LpStatus::Unbounded: return "Unbounded";
    case LpStatus::IterationLimit: return "IterationLimit";
  }
  return "?";
}

void LpProblem::validate() const {
  if (n > kMaxVariables)
    throw std::invalid_argument("LpProblem: " + std::to_string(n) +
                                " variables exceeds the dense-storage cap of " +
                                std::to_string(kMaxVariables));
  if (c.size() != n || lower.size() != n || upper.size() != n)
    throw std::invalid_argument("LpProblem: objective/bound size mismatch");
  if (b.size() != m || A.size() != n * m)
    throw std::invalid_argument("LpProblem: constraint size mismatch");
  for (std::size_t j = 0; j < n; ++j) {
    if (std::isnan(c[j]) || std::isnan(lower[j]) || std::isnan(upper[j]))
      throw std::invalid_argument("LpProblem: NaN in objective or bounds");
    if (std::isinf(c[j]))
      throw std::invalid_argument("LpProblem: infinite objective coefficient");
    if (lower[j] > upper[j])
      throw std::invalid_argument("LpProblem: crossing bounds at column " +
                                  std::to_string(j));
  }
  for (double v : A)
    if (!std::isfinite(v))
      throw std::invalid_argument("LpProblem: non-finite matrix entry");
  for (double v : b)
    if (!std::isfinite(v))
      throw std::invalid_argument("LpProblem: non-finite right-hand side");
}

namespace {

enum class VarState : unsigned char { Basic, AtLower, AtUpper, FreeZero };

/// Bounded-variable revised simplex over the columns of P plus one artificial
/// column per row. The basis inverse is kept explicitly and updated on every
/// pivot; x_B is maintained incrementally and refreshed periodically.
class Simplex {
 public:
  Simplex(const LpProblem& p, const LpOptions& opt) : P(p), opt_(opt) {
    m = P.m;
    n = P.n;
    ncols = n + m;
    cols.assign(ncols * m, 0.0);
    for (std::size_t i = 0; i < m; ++i)
      for (std::size_t j = 0; j < n; ++j) cols[j * m + i] = P.A[i * n + j];
    lo.assign(ncols, 0.0);
    hi.assign(ncols, 0.0);
    for (std::size_t j = 0; j < n; ++j) { lo[j] = P.lower[j]; hi[j] = P.upper[j]; }
    state.assign(ncols, VarState::AtLower);
    for (std::size_t j = 0; j < n; ++j) {
      if (lo[j] == -kInf && hi[j] == kInf) state[j] = VarState::FreeZero;
      else if (lo[j] == -kInf) state[j] = VarState::AtUpper;
      else if (hi[j] == kInf) state[j] = VarState::AtLower;
      else state[j] = std::fabs(lo[j]) <= std::fabs(hi[j]) ? VarState::AtLower
                                                           : VarState::AtUpper;
    }
    // Artificial columns: sign(residual) * e_i so their start value is >= 0.
    std::vector<double> r = P.b;
    for (std::size_t j = 0; j < n; ++j) {
      const double v = nonbasic_value(j);
      if (v == 0.0) continue;
      for (std::size_t i = 0; i < m; ++i) r[i] -= cols[j * m + i] * v;
    }
    art_sign.assign(m, 1.0);
    basis.assign(m, 0);
    xB.assign(m, 0.0);
    Binv.assign(m * m, 0.0);
    for (std::size_t i = 0; i < m; ++i) {
      art_sign[i] = (r[i] >= 0.0) ? 1.0 : -1.0;
      cols[(n + i) * m + i] = art_sign[i];
      lo[n + i] = 0.0;
      hi[n + i] = kInf;
      basis[i] = n + i;
      state[n + i] = VarState::Basic;
      xB[i] = std::fabs(r[i]);
      Binv[i * m + i] = art_sign[i];   // inverse of the diagonal sign matrix
    }
    cost.assign(ncols, 0.0);
    max_iters_ = opt_.max_iters > 0
                     ? opt_.max_iters
                     : static_cast<int>(20000 + 50 * (m + ncols));
  }

  LpSolution run() {
    LpSolution out;
    // Phase 1: minimize total artificial mass.
    for (std::size_t j = 0; j < m; ++j) cost[n + j] = 1.0;
    const bool ok1 = iterate(/*phase=*/1, out);
    if (!ok1) { out.status = LpStatus::IterationLimit; return out; }
    const double scale_b = 1.0 + max_abs(P.b);
    if (phase_objective() > opt_.feas_tol * scale_b) {
      out.status = LpStatus::Infeasible;
      out.iterations = iters_;
      out.bland_activated = bland_seen_;
      return out;
    }
    expel_artificials();
    // Phase 2: true costs, artificials pinned to zero.
    for (std::size_t j = 0; j < n; ++j) cost[j] = P.c[j];
    for (std::size_t j = 0; j < m; ++j) { cost[n + j] = 0.0; hi[n + j] = 0.0; }
    const bool ok2 = iterate(/*phase=*/2, out);
    if (!ok2) {
      out.status = unbounded_ ? LpStatus::Unbounded : LpStatus::IterationLimit;
      out.iterations = iters_;
      out.bland_activated = bland_seen_;
      return out;
    }
    extract(out);
    return out;
  }

 private:
  const LpProblem& P;
  LpOptions opt_;
  std::size_t m = 0, n = 0, ncols = 0;
  std::vector<double> cols;      // column-major (ncols x m)
  std::vector<double> lo, hi, cost;
  std::vector<VarState> state;
  std::vector<double> art_sign;
  std::vector<std::size_t> basis;
  std::vector<double> xB;
  std::vector<double> Binv;      // row-major m x m
  int iters_ = 0, degen_streak_ = 0, max_iters_ = 0;
  bool bland_ = false, bland_seen_ = false, unbounded_ = false;

  static double max_abs(const std::vector<double>& v) {
    double r = 0.0;
    for (double x : v) r = std::max(r, std::fabs(x));
    return r;
  }

  double nonbasic_value(std::size_t j) const {
    switch (state[j]) {
      case VarState::AtLower: return lo[j];
      case VarState::AtUpper: return hi[j];
      case VarState::FreeZero: return 0.0;
      case VarState::Basic: break;
    }
    return 0.0;
  }

  double phase_objective() const {
    double s = 0.0;
    for (std::size_t i = 0; i < m; ++i)
      if (basis[i] >= n) s += xB[i];
    return s;
  }

  void compute_y(std::vector<double>& y) const {
    y.assign(m, 0.0);
    for (std::size_t i = 0; i < m; ++i) {
      const double cb = cost[basis[i]];
      if (cb == 0.0) continue;
      const double* row = &Binv[i * m];
      for (std::size_t k = 0; k < m; ++k) y[k] += cb * row[k];
    }
  }

  double reduced_cost(std::size_t j, const std::vector<double>& y) const {
    double d = cost[j];
    const double* col = &cols[j * m];
    for (std::size_t k = 0; k < m; ++k) d -= y[k] * col[k];
    return d;
  }

  void refresh_xB() {
    std::vector<double> r = P.b;
    for (std::size_t j = 0; j < ncols; ++j) {
      if (state[j] == VarState::Basic) continue;
      const double v = nonbasic_value(j);
      if (v == 0.0) continue;
      const double* col = &cols[j * m];
      for (std::size_t i = 0; i < m; ++i) r[i] -= col[i] * v;
    }
    for (std::size_t i = 0; i < m; ++i) {
      const double* row = &Binv[i * m];
      double s = 0.0;
      for (std::size_t k = 0; k < m; ++k) s += row[k] * r[k];
      xB[i] = s;
    }
  }

  /// One simplex phase. Returns false on iteration limit or unboundedness
  /// (phase 2); true when no eligible entering column remains.
  bool iterate(int phase, LpSolution& out) {
    (void)phase;
    std::vector<double> y, w;
    for (;;) {
      if (iters_ >= max_iters_) return false;
      compute_y(y);
      // Pricing. Artificial columns never re-enter.
      std::size_t enter = ncols;
      double best = 0.0;
      int dir = +1;
      for (std::size_t j = 0; j < n; ++j) {
        if (state[j] == VarState::Basic) continue;
        if (lo[j] == hi[j]) continue;  // fixed column cannot move
        const double d = reduced_cost(j, y);
        double viol = 0.0;
        int s = +1;
        switch (state[j]) {
          case VarState::AtLower: viol = -d; s = +1; break;
          case VarState::AtUpper: viol = d; s = -1; break;
          case VarState::FreeZero: viol = std::fabs(d); s = d < 0.0 ? +1 : -1; break;
          case VarState::Basic: break;
        }
        if (viol <= opt_.opt_tol) continue;
        if (bland_) { enter = j; dir = s; break; }
        if (viol > best) { best = viol; enter = j; dir = s; }
      }
      if (enter == ncols) return true;  // optimal for this phase

      // FTRAN: w = Binv * a_enter.
      w.assign(m, 0.0);
      const double* col = &cols[enter * m];
      for (std::size_t i = 0; i < m; ++i) {
        const double* row = &Binv[i * m];
        double s = 0.0;
        for (std::size_t k = 0; k < m; ++k) s += row[k] * col[k];
        w[i] = s;
      }

      // Ratio test: basic blocking rows plus the entering column's own gap.
      const double piv_tol = 1e-10;
      double step = (lo[enter] > -kInf && hi[enter] < kInf)
                        ? hi[enter] - lo[enter]
                        : kInf;
      std::size_t leave = m;       // m means "bound flip"
      int leave_to_upper = 0;
      for (std::size_t i = 0; i < m; ++i) {
        const double g = dir * w[i];  // x_basis[i] moves by -g per unit step
        const std::size_t k = basis[i];
        if (g > piv_tol && lo[k] > -kInf) {
          const double room = std::max(0.0, xB[i] - lo[k]);
          const double r = room / g;
          if (r < step - 1e-12 ||
              (r < step + 1e-12 && pick_leaving(i, leave, w))) {
            step = r; leave = i; leave_to_upper = 0;
          }
        } else if (g < -piv_tol && hi[k] < kInf) {
          const double room = std::max(0.0, hi[k] - xB[i]);
          const double r = room / (-g);
          if (r < step - 1e-12 ||
              (r < step + 1e-12 && pick_leaving(i, leave, w))) {
            step = r; leave = i; leave_to_upper = 1;
          }
        }
      }
      if (step == kInf) { unbounded_ = true; return false; }

      ++iters_;
      if (step <= 1e-11) {
        if (++degen_streak_ > opt_.degeneracy_trigger) {
          bland_ = true;
          bland_seen_ = true;
        }
      } else if (step > 1e-7) {
        degen_streak_ = 0;
        bland_ = false;
      }

      const double enter_from = nonbasic_value(enter);
      if (leave == m) {
        // Bound-to-bound flip, basis unchanged.
        for (std::size_t i = 0; i < m; ++i) xB[i] -= dir * step * w[i];
        state[enter] = (state[enter] == VarState::AtLower) ? VarState::AtUpper
                                                           : VarState::AtLower;
        continue;
      }
      // Pivot: enter becomes basic at enter_from + dir*step.
      const std::size_t out_var = basis[leave];
      for (std::size_t i = 0; i < m; ++i)
        if (i != leave) xB[i] -= dir * step * w[i];
      xB[leave] = enter_from + dir * step;
      state[out_var] = leave_to_upper ? VarState::AtUpper : VarState::AtLower;
      if (lo[out_var] == -kInf && hi[out_var] == kInf)
        state[out_var] = VarState::FreeZero;
      basis[leave] = enter;
      state[enter] = VarState::Basic;
      // Binv update: eliminate column w against the pivot row.
      const double p = w[leave];
      double* prow = &Binv[leave * m];
      for (std::size_t k = 0; k < m; ++k) prow[k] /= p;
      for (std::size_t i = 0; i < m; ++i) {
        if (i == leave) continue;
        const double f = w[i];
        if (f == 0.0) continue;
        double* row = &Binv[i * m];
        for (std::size_t k = 0; k < m; ++k) row[k] -= f * prow[k];
      }
      if (iters_ % 500 == 0) refresh_xB();
    }
    (void)out;
  }

  /// Tie-break for the ratio test: Bland prefers the smallest basis variable
  /// index, Dantzig the largest pivot magnitude.
  bool pick_leaving(std::size_t cand, std::size_t incumbent,
                    const std::vector<double>& w) const {
    if (incumbent == m) return true;
    if (bland_) return basis[cand] < basis[incumbent];
    return std::fabs(w[cand]) > std::fabs(w[incumbent]);
  }

  /// Pivots leftover basic artificials onto structural columns where the row
  /// allows it; rows with no eligible column are redundant and keep their
  /// artificial pinned at zero.
  void expel_artificials() {
    for (std::size_t i = 0; i < m; ++i) {
      if (basis[i] < n) continue;
      std::size_t enter = ncols;
      double best = 0.0;
      for (std::size_t j = 0; j < n; ++j) {
        if (state[j] == VarState::Basic || lo[j] == hi[j]) continue;
        const double* col = &cols[j * m];
        const double* row = &Binv[i * m];
        double v = 0.0;
        for (std::size_t k = 0; k < m; ++k) v += row[k] * col[k];
        if (std::fabs(v) > best + 1e-12) { best = std::fabs(v); enter = j; }
      }
      if (enter == ncols || best < 1e-7) continue;  // redundant row
      // Degenerate swap: entering keeps its bound value, artificial leaves at 0.
      const double* col = &cols[enter * m];
      std::vector<double> w(m, 0.0);
      for (std::size_t r = 0; r < m; ++r) {
        const double* brow = &Binv[r * m];
        double s = 0.0;
        for (std::size_t k = 0; k < m; ++k) s += brow[k] * col[k];
        w[r] = s;
      }
      const std::size_t art = basis[i];
      const double p = w[i];
      double* prow = &Binv[i * m];
      for (std::size_t k = 0; k < m; ++k) prow[k] /= p;
      for (std::size_t r = 0; r < m; ++r) {
        if (r == i) continue;
        const double f = w[r];
        if (f == 0.0) continue;
        double* row = &Binv[r * m];
        for (std::size_t k = 0; k < m; ++k) row[k] -= f * prow[k];
      }
      basis[i] = enter;
      xB[i] = nonbasic_value(enter);
      state[enter] = VarState::Basic;
      state[art] = VarState::AtLower;
      hi[art] = 0.0;
    }
  }

  void extract(LpSolution& out) {
    refresh_xB();
    out.x.assign(n, 0.0);
    for (std::size_t j = 0; j < n; ++j)
      if (state[j] != VarState::Basic) out.x[j] = nonbasic_value(j);
    for (std::size_t i = 0; i < m; ++i)
      if (basis[i] < n) out.x[basis[i]] = xB[i];
    out.value = 0.0;
    for (std::size_t j = 0; j < n; ++j) out.value += P.c[j] * out.x[j];

    std::vector<double> y;
    compute_y(y);
    out.duals = y;
    out.reduced_costs.assign(n, 0.0);
    double dres = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      const double d = reduced_cost(j, y);
      out.reduced_costs[j] = d;
      switch (state[j]) {
        case VarState::AtLower: dres = std::max(dres, -d); break;
        case VarState::AtUpper: dres = std::max(dres, d); break;
        case VarState::FreeZero: dres = std::max(dres, std::fabs(d)); break;
        case VarState::Basic: dres = std::max(dres, std::fabs(d)); break;
      }
    }
    double pres = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
      double s = -P.b[i];
      for (std::size_t j = 0; j < n; ++j) s += P.A[i * n + j] * out.x[j];
      // Redundant rows keep a pinned artificial whose value must be zero.
      if (basis[i] >= n) s += art_sign[basis[i] - n] * xB[i];
      pres = std::max(pres, std::fabs(s));
    }
    for (std::size_t j = 0; j < n; ++j) {
      if (P.lower[j] > -kInf) pres = std::max(pres, P.lower[j] - out.x[j]);
      if (P.upper[j] < kInf) pres = std::max(pres, out.x[j] - P.upper[j]);
    }
    out.primal_residual = pres;
    out.dual_residual = dres;
    out.iterations = iters_;
    out.bland_activated = bland_seen_;
    const double scale_b = 1.0 + max_abs(P.b);
    const double scale_c = 1.0 + max_abs(P.c);
    out.status = (pres <= 10.0 * opt_.feas_tol * scale_b &&
                  dres <= 10.0 * opt_.opt_tol * scale_c)
                     ? LpStatus::Optimal
                     : LpStatus::IterationLimit;
  }
};

}  // namespace

LpSolution solve_lp(const LpProblem& p, const LpOptions& opt) {
  p.validate();
  if (p.n == 0) {
    LpSolution out;
    double pres = 0.0;
    for (double bi : p.b) pres = std::max(pres, std::fabs(bi));
    out.status = pres <= opt.feas_tol ? LpStatus::Optimal : LpStatus::Infeasible;
    out.duals.assign(p.m, 0.0);
    return out;
  }
  Simplex s(p, opt);
  return s.run();
}

std::vector<std::pair<std::vector<double>, double>> enumerate_vertices(
    const LpProblem& p, const LpOptions& opt) {
  p.validate();
  if (p.n > 12)
    throw std::invalid_argument(
        "enumerate_vertices: combinatorial guard refuses n > 12 (got n = " +
        std::to_string(p.n) + ")");
  std::vector<std::pair<std::vector<double>, double>> found;
  if (p.m > p.n) return found;

  std::vector<std::size_t> comb(p.m);
  const std::size_t n = p.n, m = p.m;
  // Iterate over all m-subsets of columns as candidate bases.
  std::vector<bool> choose(n, false);
  std::fill(choose.begin(), choose.begin() + m, true);
  std::vector<std::size_t> basis, nonbasis;
  do {
    basis.clear();
    nonbasis.clear();
    for (std::size_t j = 0; j < n; ++j)
      (choose[j] ? basis : nonbasis).push_back(j);
    // Every nonbasic column must rest on a finite bound.
    bool ok = true;
    std::vector<std::size_t> two_sided;
    for (std::size_t j : nonbasis) {
      const bool lf = p.lower[j] > -kInf, uf = p.upper[j] < kInf;
      if (!lf && !uf) { ok = false; break; }
      if (lf && uf && p.lower[j] != p.upper[j]) two_sided.push_back(j);
    }
    if (!ok) continue;
    const std::size_t combos = std::size_t{1} << two_sided.size();
    for (std::size_t mask = 0; mask < combos; ++mask) {
      std::vector<double> xn(n, 0.0);
      for (std::size_t j : nonbasis)
        xn[j] = p.lower[j] > -kInf ? p.lower[j] : p.upper[j];
      for (std::size_t t = 0; t < two_sided.size(); ++t)
        if (mask & (std::size_t{1} << t)) xn[two_sided[t]] = p.upper[two_sided[t]];
      std::vector<double> rhs = p.b;
      for (std::size_t j : nonbasis)
        for (std::size_t i = 0; i < m; ++i) rhs[i] -= p.at(i, j) * xn[j];
      std::vector<double> B(m * m);
      for (std::size_t i = 0; i < m; ++i)
        for (std::size_t k = 0; k < m; ++k) B[i * m + k] = p.at(i, basis[k]);
      if (!lu_solve(B, rhs, m)) continue;
      bool feas = true;
      for (std::size_t k = 0; k < m && feas; ++k) {
        const std::size_t j = basis[k];
        if (rhs[k] < p.lower[j] - opt.feas_tol ||
            rhs[k] > p.upper[j] + opt.feas_tol)
          feas = false;
        xn[j] = rhs[k];
      }
      if (!feas) continue;
      bool dup = false;
      for (const auto& [v, val] : found) {
        double diff = 0.0;
        for (std::size_t j = 0; j < n; ++j)
          diff = std::max(diff, std::fabs(v[j] - xn[j]));
        if (diff <= 1e-7) { dup = true; break; }
      }
      if (dup) continue;
      double val = 0.0;
      for (std::size_t j = 0; j < n; ++j) val += p.c[j] * xn[j];
      found.emplace_back(std::move(xn), val);
    }
  } while (std::prev_permutation(choose.begin(), choose.end()));
  return found;
}

std::size_t LpBuilder::add_var(double lo, double hi, double cost) {
  lo_.push_back(lo);
  hi_.push_back(hi);
  cost_.push_back(cost);
  return n_++;
}

std::size_t LpBuilder::add_row(RowSense sense, double rhs,
                               std::vector<std::pair<std::size_t, double>> terms) {
  senses_.push_back(sense);
  rhs_.push_back(rhs);
  rows_.push_back(std::move(terms));
  return senses_.size() - 1;
}

LpProblem LpBuilder::build() const {
  LpProblem p;
  std::size_t slacks = 0;
  for (RowSense s : senses_)
    if (s != RowSense::Eq) ++slacks;
  p.n = n_ + slacks;
  p.m = senses_.size();
  p.c.assign(p.n, 0.0);
  p.lower.assign(p.n, 0.0);
  p.upper.assign(p.n, 0.0);
  for (std::size_t j = 0; j < n_; ++j) {
    p.c[j] = cost_[j];
    p.lower[j] = lo_[j];
    p.upper[j] = hi_[j];
  }
  p.b = rhs_;
  p.A.assign(p.n * p.m, 0.0);
  std::size_t next_slack = n_;
  for (std::size_t i = 0; i < p.m; ++i) {
    for (const auto& [j, v] : rows_[i]) {
      if (j >= n_) throw std::invalid_argument("LpBuilder: bad column index");
      p.A[i * p.n + j] += v;
    }
    if (senses_[i] != RowSense::Eq) {
      const double coef = senses_[i] == RowSense::Le ? 1.0 : -1.0;
      p.A[i * p.n + next_slack] = coef;
      p.lower[next_slack] = 0.0;
      p.upper[next_slack] = kInf;
      ++next_slack;
    }
  }
  return p;
}

}  // namespace cmw
