#include "cmw/measures.hpp"

#include <cmath>
#include <stdexcept>

namespace cmw {

void ProductGrid::validate() const {
  if (v_points.empty() || w_points.empty())
    throw std::invalid_argument("ProductGrid: empty axis");
  const std::size_t dv = v_points.front().size();
  for (const auto& v : v_points) {
    if (v.size() != dv)
      throw std::invalid_argument("ProductGrid: inconsistent v dimension");
    for (double x : v)
      if (!std::isfinite(x))
        throw std::invalid_argument("ProductGrid: non-finite v coordinate");
  }
  for (std::size_t i = 0; i < w_points.size(); ++i) {
    if (!std::isfinite(w_points[i]))
      throw std::invalid_argument("ProductGrid: non-finite w point");
    if (i > 0 && !(w_points[i - 1] < w_points[i]))
      throw std::invalid_argument("ProductGrid: w points must increase strictly");
  }
  if (!labels.empty() && labels.size() != v_points.size())
    throw std::invalid_argument("ProductGrid: label count mismatch");
}

bool ProductGrid::same_shape(const ProductGrid& o) const {
  return v_points == o.v_points && w_points == o.w_points;
}

void DiscreteMeasure::validate() const {
  if (atoms.size() != mass.size())
    throw std::invalid_argument("DiscreteMeasure: atom/mass size mismatch");
  if (atoms.empty()) throw std::invalid_argument("DiscreteMeasure: empty");
  double total = 0.0;
  for (double m : mass) {
    if (!(m >= -1e-15))
      throw std::invalid_argument("DiscreteMeasure: negative mass");
    total += m;
  }
  if (std::fabs(total - 1.0) > 1e-12)
    throw std::invalid_argument("DiscreteMeasure: masses sum to " +
                                std::to_string(total) + ", expected 1");
  const std::size_t dv = atoms.front().v.size();
  for (const auto& a : atoms)
    if (a.v.size() != dv)
      throw std::invalid_argument("DiscreteMeasure: inconsistent v dimension");
}

GroupIndex group_by_vhat(const DiscreteMeasure& first) {
  GroupIndex g;
  for (std::size_t j = 0; j < first.atoms.size(); ++j) {
    const auto& key = first.atoms[j].v;
    std::size_t hit = g.keys.size();
    for (std::size_t q = 0; q < g.keys.size(); ++q) {
      if (g.keys[q] == key) { hit = q; break; }  // bitwise per coordinate
    }
    if (hit == g.keys.size()) {
      g.keys.push_back(key);
      g.members.emplace_back();
      g.nu.push_back(0.0);
    }
    g.members[hit].push_back(j);
    g.nu[hit] += first.mass[j];
  }
  return g;
}

void Coupling::validate() const {
  first.validate();
  second.validate();
  if (gamma.size() != rows() * cols())
    throw std::invalid_argument("Coupling: gamma size mismatch");
  for (double v : gamma)
    if (!(v >= -1e-15))
      throw std::invalid_argument("Coupling: negative mass entry");
  for (std::size_t j = 0; j < rows(); ++j) {
    double s = 0.0;
    for (std::size_t k = 0; k < cols(); ++k) s += at(j, k);
    if (std::fabs(s - first.mass[j]) > 1e-12)
      throw std::invalid_argument(
          "Coupling: row " + std::to_string(j) + " sums to " +
          std::to_string(s) + ", first marginal requires " +
          std::to_string(first.mass[j]));
  }
}

DiscreteMeasure second_marginal(const Coupling& g) {
  DiscreteMeasure out;
  const std::size_t K = g.cols();
  out.atoms.resize(K);
  out.mass.assign(K, 0.0);
  for (std::size_t k = 0; k < K; ++k)
    out.atoms[k] = Atom{g.second.v_of(k), g.second.w_of(k)};
  for (std::size_t j = 0; j < g.rows(); ++j)
    for (std::size_t k = 0; k < K; ++k) out.mass[k] += g.at(j, k);
  return out;
}

ConditionalResidual conditional_residual(const Coupling& g,
                                         const std::vector<double>& h) {
  const GroupIndex idx = group_by_vhat(g.first);
  if (h.size() != idx.size())
    throw std::invalid_argument("conditional_residual: h has " +
                                std::to_string(h.size()) + " entries, " +
                                std::to_string(idx.size()) + " groups exist");
  ConditionalResidual r;
  r.value.assign(idx.size(), 0.0);
  for (std::size_t q = 0; q < idx.size(); ++q) {
    if (!(idx.nu[q] > 0.0))
      throw std::invalid_argument("conditional_residual: group " +
                                  std::to_string(q) + " carries zero mass");
    double s = 0.0;
    for (std::size_t j : idx.members[q])
      for (std::size_t k = 0; k < g.cols(); ++k)
        s += g.at(j, k) * g.second.w_of(k);
    r.value[q] = s / idx.nu[q] - h[q];
  }
  return r;
}

namespace {
void require_same_support(const Coupling& a, const Coupling& b,
                          const char* who) {
  if (a.rows() != b.rows() || !a.second.same_shape(b.second))
    throw std::invalid_argument(std::string(who) +
                                ": couplings live on different supports");
  for (std::size_t j = 0; j < a.rows(); ++j)
    if (a.first.atoms[j].v != b.first.atoms[j].v ||
        a.first.atoms[j].w != b.first.atoms[j].w ||
        std::fabs(a.first.mass[j] - b.first.mass[j]) > 1e-12)
      throw std::invalid_argument(std::string(who) +
                                  ": first marginals differ at atom " +
                                  std::to_string(j));
}
}  // namespace

double tv_distance(const Coupling& a, const Coupling& b) {
  require_same_support(a, b, "tv_distance");
  double s = 0.0;
  for (std::size_t i = 0; i < a.gamma.size(); ++i)
    s += std::fabs(a.gamma[i] - b.gamma[i]);
  return 0.5 * s;
}

Coupling mix(const Coupling& a, const Coupling& b, double t) {
  require_same_support(a, b, "mix");
  if (!(t >= 0.0 && t <= 1.0))
    throw std::invalid_argument("mix: weight " + std::to_string(t) +
                                " outside [0,1]");
  Coupling out = a;
  for (std::size_t i = 0; i < out.gamma.size(); ++i)
    out.gamma[i] = (1.0 - t) * a.gamma[i] + t * b.gamma[i];
  return out;
}

double expectation(const Coupling& g, const std::vector<double>& f) {
  if (f.size() != g.cols())
    throw std::invalid_argument("expectation: table has " +
                                std::to_string(f.size()) + " entries, grid has " +
                                std::to_string(g.cols()));
  double s = 0.0;
  for (std::size_t j = 0; j < g.rows(); ++j)
    for (std::size_t k = 0; k < g.cols(); ++k) {
      const double m = g.at(j, k);
      if (m != 0.0) s += m * f[k];
    }
  return s;
}

double expectation_pairwise(const Coupling& g, const std::vector<double>& f) {
  if (f.size() != g.gamma.size())
    throw std::invalid_argument("expectation_pairwise: table size mismatch");
  double s = 0.0;
  for (std::size_t i = 0; i < g.gamma.size(); ++i) {
    const double m = g.gamma[i];
    if (m != 0.0) s += m * f[i];  // 0 * inf must not poison excluded pairs
  }
  return s;
}

}  // namespace cmw
