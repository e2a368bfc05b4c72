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

#ifndef RDPDP_OPTIMIZER_H_
#define RDPDP_OPTIMIZER_H_

#include "absl/functional/function_ref.h"
#include "absl/status/status.h"
#include "absl/status/statusor.h"

namespace rdpdp {

// Tolerances for the one-dimensional searches. abs_tol is measured on the
// argument, not on the function value.
struct ScalarSearchConfig {
  double abs_tol = 1e-10;
  int max_iters = 200;
  // Number of samples used to bracket a minimum before refinement.
  int coarse_grid = 256;

  absl::Status Validate() const;
};

struct ScalarMinimum {
  double argmin;
  double value;
};

// Minimizes `objective` over the open interval (lo, hi).
//
// The interval is first scanned on `coarse_grid` evenly spaced points
// (starting eta = max(1e-12, 1e-12 * (hi - lo)) inside each endpoint), then
// the best sample's neighbouring cell is refined by golden-section search.
// The scan keeps the search honest for objectives that are unimodal only in
// practice. Non-finite samples are skipped; if every sample is non-finite the
// problem is reported as infeasible (FailedPrecondition).
//
// The returned value is never larger than the best coarse sample.
absl::StatusOr<ScalarMinimum> MinimizeUnimodal(
    absl::FunctionRef<double(double)> objective, double lo, double hi,
    const ScalarSearchConfig& cfg = {});

enum class Monotonicity { kIncreasing, kDecreasing };

// Bisection solve of fn(x) = target on [lo, hi] for monotone fn.
//
// Returns the right end of the final bracket, i.e. a point at which fn has
// reached the target (fn(x) >= target when increasing, fn(x) <= target when
// decreasing). On flat stretches this is the leftmost crossing. A target
// outside [fn(lo), fn(hi)] yields OutOfRange with both endpoint values in the
// message.
absl::StatusOr<double> InvertMonotone(absl::FunctionRef<double(double)> fn,
                                      double target, double lo, double hi,
                                      Monotonicity direction,
                                      const ScalarSearchConfig& cfg = {});

// log(exp(a) + exp(b)) without overflow. -inf is log(0).
double LogAdd(double a, double b);

// log(exp(x) - 1) for x >= 0; -inf at x = 0.
double LogExpm1(double x);

}  // namespace rdpdp

#endif  // RDPDP_OPTIMIZER_H_
