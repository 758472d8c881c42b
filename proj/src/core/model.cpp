#include "core/model.hpp"

#include <cmath>
#include <stdexcept>

namespace coalflow {

DriftModel DriftModel::zero() { return {DriftKind::zero, {}, 0.0}; }

DriftModel DriftModel::linear(double c) {
  return {DriftKind::linear, {c}, std::abs(c)};
}

DriftModel DriftModel::cosine() { return {DriftKind::cosine, {}, 1.0}; }

DriftModel DriftModel::scaled_tanh(double scale) {
  // d/du tanh(k u) = k sech^2(k u), so |k| is a valid Lipschitz constant.
  return {DriftKind::scaled_tanh, {scale}, std::abs(scale)};
}

DriftModel DriftModel::from_name(const std::string& kind,
                                 const std::vector<double>& params) {
  const auto want = [&](std::size_t n) {
    if (params.size() != n) {
      throw std::invalid_argument("drift '" + kind + "' takes " +
                                  std::to_string(n) + " parameter(s)");
    }
  };
  if (kind == "zero") {
    want(0);
    return zero();
  }
  if (kind == "linear") {
    want(1);
    return linear(params[0]);
  }
  if (kind == "cosine") {
    want(0);
    return cosine();
  }
  if (kind == "scaled-tanh") {
    want(1);
    return scaled_tanh(params[0]);
  }
  throw std::invalid_argument("unknown drift kind '" + kind + "'");
}

double DriftModel::eval(double u) const {
  switch (kind_) {
    case DriftKind::zero:
      return 0.0;
    case DriftKind::linear:
      return params_[0] * u;
    case DriftKind::cosine:
      return std::cos(u);
    case DriftKind::scaled_tanh:
      return std::tanh(params_[0] * u);
  }
  return 0.0;
}

std::string DriftModel::name() const {
  switch (kind_) {
    case DriftKind::zero:
      return "zero";
    case DriftKind::linear:
      return "linear";
    case DriftKind::cosine:
      return "cosine";
    case DriftKind::scaled_tanh:
      return "scaled-tanh";
  }
  return "?";
}

Partition Partition::uniform(int n) {
  if (n < 1) throw std::invalid_argument("partition needs N >= 1");
  std::vector<double> points(static_cast<std::size_t>(n) + 1);
  for (int k = 0; k <= n; ++k) {
    points[static_cast<std::size_t>(k)] = static_cast<double>(k) / n;
  }
  points.back() = 1.0;
  return from_breakpoints(std::move(points));
}

Partition Partition::from_breakpoints(std::vector<double> points) {
  if (points.size() < 2) throw std::invalid_argument("partition needs N >= 1");
  if (points.front() != 0.0 || points.back() != 1.0) {
    throw std::invalid_argument("partition must span [0, 1]");
  }
  Partition p;
  p.mesh = 0.0;
  for (std::size_t i = 1; i < points.size(); ++i) {
    const double gap = points[i] - points[i - 1];
    if (!(gap > 0.0)) {
      throw std::invalid_argument("partition breakpoints must increase");
    }
    p.mesh = std::max(p.mesh, gap);
  }
  p.breakpoints = std::move(points);
  return p;
}

}  // namespace coalflow
