// Copyright 2026 The rdpdp Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "rdpdp/optimizer.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "absl/strings/str_format.h"

namespace rdpdp {
namespace {

// 1 / golden ratio.
constexpr double kInvPhi = 0.6180339887498948482;

}  // namespace

absl::Status ScalarSearchConfig::Validate() const {
  if (!(abs_tol > 0.0)) {
    return absl::InvalidArgumentError(
        absl::StrFormat("abs_tol must be > 0, got %g", abs_tol));
  }
  if (max_iters < 1) {
    return absl::InvalidArgumentError(
        absl::StrFormat("max_iters must be >= 1, got %d", max_iters));
  }
  if (coarse_grid < 8) {
    return absl::InvalidArgumentError(
        absl::StrFormat("coarse_grid must be >= 8, got %d", coarse_grid));
  }
  return absl::OkStatus();
}

absl::StatusOr<ScalarMinimum> MinimizeUnimodal(
    absl::FunctionRef<double(double)> objective, double lo, double hi,
    const ScalarSearchConfig& cfg) {
  if (absl::Status s = cfg.Validate(); !s.ok()) return s;
  if (!(lo < hi) || !std::isfinite(lo) || !std::isfinite(hi)) {
    return absl::InvalidArgumentError(
        absl::StrFormat("invalid search interval (%g, %g)", lo, hi));
  }
  const double eta = std::max(1e-12, 1e-12 * (hi - lo));
  const double a = lo + eta;
  const double b = hi - eta;
  if (!(a < b)) {
    return absl::InvalidArgumentError(
        absl::StrFormat("search interval (%g, %g) is too narrow", lo, hi));
  }

  const int n = cfg.coarse_grid;
  std::vector<double> xs(n);
  int best = -1;
  double best_value = std::numeric_limits<double>::infinity();
  for (int i = 0; i < n; ++i) {
    xs[i] = i == n - 1 ? b : a + (b - a) * (static_cast<double>(i) / (n - 1));
    const double v = objective(xs[i]);
    if (std::isfinite(v) && v < best_value) {
      best = i;
      best_value = v;
    }
  }
  if (best < 0) {
    return absl::FailedPreconditionError(absl::StrFormat(
        "objective is not finite anywhere on (%g, %g)", lo, hi));
  }

  ScalarMinimum result{xs[best], best_value};
  auto consider = [&result](double x, double v) {
    if (std::isfinite(v) && v < result.value) result = {x, v};
  };

  double left = xs[std::max(best - 1, 0)];
  double right = xs[std::min(best + 1, n - 1)];
  double u = right - kInvPhi * (right - left);
  double v = left + kInvPhi * (right - left);
  double fu = objective(u);
  double fv = objective(v);
  consider(u, fu);
  consider(v, fv);
  // Non-finite values are treated as +inf so the search walks away from them.
  auto key = [](double f) {
    return std::isnan(f) ? std::numeric_limits<double>::infinity() : f;
  };
  for (int it = 0; it < cfg.max_iters && right - left > cfg.abs_tol; ++it) {
    if (key(fu) <= key(fv)) {
      right = v;
      v = u;
      fv = fu;
      u = right - kInvPhi * (right - left);
      fu = objective(u);
      consider(u, fu);
    } else {
      left = u;
      u = v;
      fu = fv;
      v = left + kInvPhi * (right - left);
      fv = objective(v);
      consider(v, fv);
    }
  }
  return result;
}

absl::StatusOr<double> InvertMonotone(absl::FunctionRef<double(double)> fn,
                                      double target, double lo, double hi,
                                      Monotonicity direction,
                                      const ScalarSearchConfig& cfg) {
  if (absl::Status s = cfg.Validate(); !s.ok()) return s;
  if (!(lo < hi)) {
    return absl::InvalidArgumentError(
        absl::StrFormat("invalid bracket [%g, %g]", lo, hi));
  }
  // Flip decreasing problems so that `reached` means fn has crossed target.
  const double sign = direction == Monotonicity::kIncreasing ? 1.0 : -1.0;
  const double f_lo = fn(lo);
  const double f_hi = fn(hi);
  if (std::isnan(f_lo) || std::isnan(f_hi)) {
    return absl::InternalError("function is NaN at a bracket endpoint");
  }
  if (sign * target < sign * f_lo || sign * target > sign * f_hi) {
    return absl::OutOfRangeError(absl::StrFormat(
        "target %.17g outside [fn(%.17g), fn(%.17g)] = [%.17g, %.17g]", target,
        lo, hi, f_lo, f_hi));
  }
  if (sign * f_lo >= sign * target) return lo;

  double left = lo;
  double right = hi;
  for (int it = 0; it < cfg.max_iters && right - left > cfg.abs_tol; ++it) {
    const double mid = left + 0.5 * (right - left);
    if (mid <= left || mid >= right) break;
    const double f_mid = fn(mid);
    if (std::isnan(f_mid)) {
      return absl::InternalError(
          absl::StrFormat("function is NaN at %.17g", mid));
    }
    if (sign * f_mid >= sign * target) {
      right = mid;
    } else {
      left = mid;
    }
  }
  return right;
}

double LogAdd(double a, double b) {
  if (a == -std::numeric_limits<double>::infinity()) return b;
  if (b == -std::numeric_limits<double>::infinity()) return a;
  const double hi = std::max(a, b);
  const double lo = std::min(a, b);
  return hi + std::log1p(std::exp(lo - hi));
}

double LogExpm1(double x) {
  if (x > 40.0) return x + std::log1p(-std::exp(-x));
  return std::log(std::expm1(x));
}

}  // namespace rdpdp
