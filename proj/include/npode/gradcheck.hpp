#pragma once

#include <cmath>
#include <functional>
#include <vector>

#include "npode/errors.hpp"

namespace npode::ad {

struct GradCheckReport {
  double max_rel_err = 0.0;
  std::vector<long> failing;  // coordinates over tolerance
  std::vector<double> numeric;
  bool pass(double tolerance) const { return max_rel_err < tolerance; }
};

// Central-difference check of an analytic gradient of a scalar function.
// Relative error per coordinate: |a - n| / max(1, |n|).
inline GradCheckReport check_gradient(
    const std::function<double(const std::vector<double>&)>& f,
    std::vector<double> point, const std::vector<double>& analytic, double step,
    double tolerance) {
  if (step <= 0) throw ContractError("check_gradient: step must be positive");
  if (analytic.size() != point.size())
    throw ContractError("check_gradient: gradient size mismatch");
  GradCheckReport rep;
  rep.numeric.resize(point.size());
  for (size_t i = 0; i < point.size(); ++i) {
    double saved = point[i];
    point[i] = saved + step;
    double fp = f(point);
    point[i] = saved - step;
    double fm = f(point);
    point[i] = saved;
    double numeric = (fp - fm) / (2.0 * step);
    rep.numeric[i] = numeric;
    double rel = std::fabs(analytic[i] - numeric) / std::max(1.0, std::fabs(numeric));
    if (rel > rep.max_rel_err) rep.max_rel_err = rel;
    if (rel >= tolerance) rep.failing.push_back(static_cast<long>(i));
  }
  return rep;
}

}  // namespace npode::ad
