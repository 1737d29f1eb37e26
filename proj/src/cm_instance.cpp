#include "cmw/cm_instance.hpp"

#include <cmath>
#include <stdexcept>

#include "cmw/lp.hpp"

namespace cmw {

bool CmInstance::included(std::size_t j, std::size_t k) const {
  return std::isfinite(cost[j * cols() + k]);
}

double CmInstance::cost_value(std::size_t j, const std::vector<double>& v,
                              double w) const {
  switch (cost_rule) {
    case CostRule::SquaredW: {
      const double d = w - first.atoms[j].w;
      return d * d;
    }
    case CostRule::SameVElseInf:
      return v == first.atoms[j].v ? 0.0 : kInf;
    case CostRule::Zero:
      return 0.0;
    case CostRule::None:
      break;
  }
  throw std::invalid_argument(
      "CmInstance: cost rule unavailable, evaluation off the stored grid is "
      "not defined for this instance");
}

double CmInstance::f_value(const std::vector<double>& v, double w) const {
  switch (f_rule) {
    case FRule::IndicatorWBelowOne:
      return w < 1.0 ? 1.0 : 0.0;
    case FRule::GTimesIndicatorW0: {
      if (w != 0.0) return 0.0;
      for (std::size_t iv = 0; iv < second.v_points.size(); ++iv)
        if (second.v_points[iv] == v) return g_values[iv];
      throw std::invalid_argument(
          "CmInstance: g-table rule has no value at the requested v point");
    }
    case FRule::NegInvOnePlusAbsW:
      return -1.0 / (1.0 + std::fabs(w));
    case FRule::VTimesWMinusOne:
      return v.at(0) * (w - 1.0);
    case FRule::None:
      break;
  }
  throw std::invalid_argument(
      "CmInstance: f rule unavailable, evaluation off the stored grid is not "
      "defined for this instance");
}

void CmInstance::validate() const {
  first.validate();
  second.validate();
  if (cost.size() != rows() * cols())
    throw std::invalid_argument("CmInstance: cost table size mismatch");
  if (f.size() != cols())
    throw std::invalid_argument("CmInstance: f table size mismatch");
  if (!std::isfinite(rho))
    throw std::invalid_argument("CmInstance: rho must be finite");
  for (double v : f)
    if (!std::isfinite(v))
      throw std::invalid_argument("CmInstance: f must be finite everywhere");
  for (std::size_t j = 0; j < rows(); ++j) {
    bool any = false;
    for (std::size_t k = 0; k < cols(); ++k) {
      const double c = cost[j * cols() + k];
      if (std::isnan(c) || c < 0.0)
        throw std::invalid_argument(
            "CmInstance: costs must be nonnegative or +inf");
      any = any || std::isfinite(c);
    }
    if (!any)
      throw std::invalid_argument("CmInstance: atom " + std::to_string(j) +
                                  " has no finite-cost destination");
  }
  const auto idx = groups();
  if (h.size() != idx.size())
    throw std::invalid_argument("CmInstance: h has " + std::to_string(h.size()) +
                                " entries, " + std::to_string(idx.size()) +
                                " v-hat groups exist");
  for (double v : h)
    if (!std::isfinite(v))
      throw std::invalid_argument("CmInstance: h must be finite");
  if (f_rule == FRule::GTimesIndicatorW0 &&
      g_values.size() != second.v_points.size())
    throw std::invalid_argument("CmInstance: g table must cover the v points");
}

}  // namespace cmw
