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

#ifndef RDPDP_CONVERSION_H_
#define RDPDP_CONVERSION_H_

#include <optional>
#include <string_view>

#include "absl/status/statusor.h"
#include "rdpdp/optimizer.h"

namespace rdpdp {

// Conversions between an (alpha, gamma)-RDP guarantee and (epsilon, delta)-DP.
//
// All three exact quantities describe one curve: the lower boundary
// gamma(delta) of the set of achievable (Renyi, hockey-stick) divergence
// pairs at a fixed alpha and epsilon. GammaExact evaluates it by a
// one-dimensional minimization over Bernoulli witnesses; DeltaExact and
// EpsilonExact invert it numerically. The *Bound functions are the closed
// forms that bracket it, and the Baseline/Balle functions are the classical
// conversions kept for comparison.

enum class ConversionMethod { kExactNumeric, kClosedFormBound, kBaselineThm1, kBalle };

enum class ActiveBranch {
  // alpha * delta >= 1, where the boundary has a closed form.
  kAlphaDeltaGeOne,
  // Bound obtained by dropping the second atom of the boundary objective.
  kGBound,
  // Bound obtained by linearizing the boundary objective in delta.
  kFBound,
  // epsilon bound through the chi(gamma) expression.
  kChiBound,
};

std::string_view ToString(ConversionMethod method);
std::string_view ToString(ActiveBranch branch);

struct ConversionResult {
  double value = 0.0;
  ConversionMethod method = ConversionMethod::kExactNumeric;
  // Witness p* of the boundary minimization; set for exact gamma.
  std::optional<double> argmin_p;
  std::optional<ActiveBranch> active_branch;
};

// zeta_alpha = (1/alpha) (1 - 1/alpha)^(alpha - 1), in (1/(alpha e), 1/alpha).
class ZetaAlpha {
 public:
  static absl::StatusOr<ZetaAlpha> Create(double alpha);

  double alpha() const { return alpha_; }
  double zeta() const { return zeta_; }
  double log_zeta() const { return log_zeta_; }

 private:
  ZetaAlpha(double alpha, double log_zeta);

  double alpha_;
  double log_zeta_;
  double zeta_;
};

// log zeta_alpha without argument checks; alpha > 1.
double LogZeta(double alpha);

// log[p^a (p - d)^(1-a) + (1-p)^a (e^eps - p + d)^(1-a)] for d < p < 1.
// Minimizing this over p gives (alpha - 1) (gamma - eps) on the boundary.
absl::StatusOr<double> BoundaryLogObjective(double p, double alpha,
                                            double epsilon, double delta);

// The exact boundary gamma_alpha^eps(delta): the largest Renyi bound that
// still forces (eps, delta)-DP. delta = 0 returns 0 without a search.
absl::StatusOr<ConversionResult> GammaExact(double alpha, double epsilon,
                                            double delta,
                                            const ScalarSearchConfig& cfg = {});

// Closed-form lower bound on GammaExact: exact when alpha delta >= 1,
// otherwise max(g, f) with the attaining branch reported.
absl::StatusOr<ConversionResult> GammaBound(double alpha, double epsilon,
                                            double delta);

// The two pieces of GammaBound for 0 < alpha delta < 1.
double GammaLowerG(double alpha, double epsilon, double delta);
double GammaLowerF(double alpha, double epsilon, double delta);

// Smallest delta such that every (alpha, gamma)-RDP mechanism is
// (epsilon, delta)-DP. FailedPrecondition when gamma lies beyond the boundary
// value at delta -> 1.
absl::StatusOr<ConversionResult> DeltaExact(double alpha, double gamma,
                                            double epsilon,
                                            const ScalarSearchConfig& cfg = {});

// Upper bound on DeltaExact from inverting GammaBound.
absl::StatusOr<ConversionResult> DeltaBound(double alpha, double gamma,
                                            double epsilon,
                                            const ScalarSearchConfig& cfg = {});

// Smallest epsilon >= 0 such that every (alpha, gamma)-RDP mechanism is
// (epsilon, delta)-DP; delta in (0, 1).
absl::StatusOr<ConversionResult> EpsilonExact(
    double alpha, double gamma, double delta,
    const ScalarSearchConfig& cfg = {});

// Closed-form upper bound on EpsilonExact.
absl::StatusOr<ConversionResult> EpsilonBound(double alpha, double gamma,
                                              double delta);

// Classical conversion: delta = exp(-(alpha - 1)(eps - gamma)), clamped to
// [0, 1].
absl::StatusOr<double> BaselineDelta(double alpha, double gamma,
                                     double epsilon);
// eps = gamma - log(delta) / (alpha - 1).
absl::StatusOr<double> BaselineEpsilon(double alpha, double gamma,
                                       double delta);
// gamma - log(delta / zeta_alpha) / (alpha - 1). Not clamped, may be < 0.
absl::StatusOr<double> BalleEpsilon(double alpha, double gamma, double delta);

struct DeltaInterval {
  double lo;
  double hi;
};

struct ZeroEpsilonRegion {
  // Deltas in [zeta e^((alpha-1) gamma), 1/alpha] admit epsilon = 0, when
  // that interval is non-empty (1 - e^-gamma < 1/alpha).
  std::optional<DeltaInterval> interval;
  // epsilon = 0 for every delta above this threshold.
  double delta_free;
};

absl::StatusOr<ZeroEpsilonRegion> ZeroEpsilonDeltas(double alpha,
                                                    double gamma);

}  // namespace rdpdp

#endif  // RDPDP_CONVERSION_H_
