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

#ifndef RDPDP_ORACLE_H_
#define RDPDP_ORACLE_H_

#include <cstdint>
#include <string>
#include <vector>

#include "absl/status/status.h"
#include "absl/status/statusor.h"

namespace rdpdp {

// Brute-force checks of the exact conversion. Nothing here uses the
// one-dimensional reduction that GammaExact relies on: the boundary is
// recomputed by scanning Bernoulli pairs (p, q) directly.

// Grids are uniform in logit(p) and logit(q) over [-20, 20], i.e. p and q
// down to about 2e-9 from either end of (0, 1).
struct GridSpec {
  // Cells per axis of the coarse scan.
  int n_coarse = 4096;
  // Cells per axis of each refinement.
  int n_refine = 4096;
  // Width of the p refinement window as a fraction of the logit domain.
  double refine_window = 0.02;

  absl::Status Validate() const;
};

// Minimum of D_alpha(P || Q) over Bernoulli pairs with
// E_{e^eps}(P || Q) >= delta.
//
// Each scanned p row is minimized over the coarse q grid and then over a fine
// q grid spanning one coarse cell either side of the row's best q. Rows come
// from the coarse p grid plus a fine p grid inside `refine_window` around the
// best coarse row. The result only decreases as n_refine doubles.
absl::StatusOr<double> BruteForceGamma(double alpha, double epsilon,
                                       double delta,
                                       const GridSpec& grid = {});

struct QStarReport {
  // max over rows of |grid minimum over q - objective at q*|, where
  // q* = (p - delta) / e^eps.
  double max_gap = 0.0;
  // Most negative (grid minimum - objective at q*); < 0 means the grid beat
  // q* by that much.
  double min_signed_gap = 0.0;
  int64_t rows_checked = 0;
  // Coarse q steps on (0, q*] where the objective went up.
  int64_t monotone_violations = 0;
};

// For each coarse p row in (delta, 1), compares the brute-force minimum over
// 0 < q < p subject to p - e^eps q >= delta with the value at q*.
absl::StatusOr<QStarReport> VerifyQStar(double alpha, double epsilon,
                                        double delta,
                                        const GridSpec& grid = {});

inline constexpr uint64_t kDefaultOracleSeed = 20200501;

struct ContainmentReport {
  int64_t samples = 0;
  int64_t violations = 0;
  uint64_t seed = kDefaultOracleSeed;
  // Largest relative amount by which a sampled chi^alpha fell below the
  // boundary (<= 0 when contained).
  double worst_excess = 0.0;
};

// Samples random Bernoulli pairs and checks that each (chi^alpha, E_{e^eps})
// point lies on or above the boundary chi(GammaExact(alpha, eps, E)), with
// relative tolerance 1e-8.
absl::StatusOr<ContainmentReport> JointRangeContainment(
    double alpha, double epsilon, int64_t n_samples,
    uint64_t seed = kDefaultOracleSeed);

inline constexpr double kOracleGammaTolerance = 1e-4;
inline constexpr double kOracleQStarTolerance = 1e-4;

struct OracleReport {
  double alpha = 0.0;
  double epsilon = 0.0;
  double delta = 0.0;
  GridSpec grid;
  double brute_force_gamma = 0.0;
  double gamma_exact = 0.0;
  double gamma_gap = 0.0;
  QStarReport q_star;
  ContainmentReport containment;
  // Names of the checks that failed; empty when everything passed.
  std::vector<std::string> failures;

  bool passed() const { return failures.empty(); }
};

// Runs all three checks. Tolerances: |gamma gap| <= 1e-4 with the grid never
// more than 1e-9 below the exact value, q* gap <= 1e-4 with no monotonicity
// violations, and no containment violations.
absl::StatusOr<OracleReport> RunOracleCheck(double alpha, double epsilon,
                                            double delta, const GridSpec& grid,
                                            int64_t n_samples, uint64_t seed);

// Serialized report. Deterministic for a given input.
std::string OracleReportJson(const OracleReport& report);

}  // namespace rdpdp

#endif  // RDPDP_ORACLE_H_
