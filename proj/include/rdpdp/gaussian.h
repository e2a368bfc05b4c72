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

#ifndef RDPDP_GAUSSIAN_H_
#define RDPDP_GAUSSIAN_H_

#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "absl/status/statusor.h"
#include "rdpdp/optimizer.h"

namespace rdpdp {

// Privacy accounting for T-fold adaptive composition of one Gaussian
// mechanism. Every step is (alpha, alpha * rho)-RDP for all alpha > 1, so T
// steps are (alpha, alpha * rho * T)-RDP, and the remaining work is the
// conversion to (epsilon, delta)-DP optimized over alpha.

// Noise configuration of a single step. Without subsampling
// rho = sensitivity^2 / (2 sigma^2); with subsampling rate q,
// rho = q^2 / ((1 - q) sigma^2) and the sensitivity is fixed at 1.
class GaussianConfig {
 public:
  static absl::StatusOr<GaussianConfig> Create(
      double sigma, double sensitivity = 1.0,
      std::optional<double> subsampling_q = std::nullopt);

  double sigma() const { return sigma_; }
  double sensitivity() const { return sensitivity_; }
  const std::optional<double>& subsampling_q() const { return q_; }
  double rho() const { return rho_; }

 private:
  GaussianConfig(double sigma, double sensitivity, std::optional<double> q,
                 double rho)
      : sigma_(sigma), sensitivity_(sensitivity), q_(q), rho_(rho) {}

  double sigma_;
  double sensitivity_;
  std::optional<double> q_;
  double rho_;
};

absl::StatusOr<double> RhoGaussian(double sigma, double sensitivity = 1.0);
absl::StatusOr<double> RhoSubsampled(double sigma, double q);

// Epochs covered by `iterations` steps at subsampling rate q.
inline double EpochsForIterations(double q, double iterations) {
  return q * iterations;
}

// Moments-accountant epsilon: rho T + sqrt(4 rho T log(1/delta)), the
// minimum over alpha of alpha rho T - log(delta) / (alpha - 1).
absl::StatusOr<double> MaEpsilon(double rho, double iterations, double delta);

enum class AccountingMode { kClosedForm, kExact };
std::string_view ToString(AccountingMode mode);

enum class CompositionBranch {
  // inf over alpha of (rho alpha T - log(delta / zeta_alpha) / (alpha - 1))_+
  kEps0,
  // inf over alpha of log(1 + (e^(rho alpha (alpha-1) T) - 1) / (alpha delta))
  // / (alpha - 1)
  kEps1,
  // (rho T / delta + log(1 - delta))_+, i.e. alpha = 1/delta
  kAlphaInvDelta,
  // inf over alpha of the exact conversion
  kExact,
};
std::string_view ToString(CompositionBranch branch);

struct CompositionEpsilon {
  double epsilon = 0.0;
  // The three closed-form terms; epsilon equals their minimum in closed-form
  // mode.
  double eps0 = 0.0;
  double eps1 = 0.0;
  double eps_third = 0.0;
  // Order alpha that attains `epsilon`.
  double argmin_alpha = 0.0;
  // Minimizing alpha of eps0 and eps1 individually.
  double eps0_alpha = 0.0;
  double eps1_alpha = 0.0;
  CompositionBranch branch = CompositionBranch::kEps0;
};

// Epsilon of T-fold composition at the given delta. Closed-form mode takes
// the minimum of the three closed-form terms; exact mode minimizes the exact
// conversion over alpha in (1, 1/delta].
absl::StatusOr<CompositionEpsilon> CompositionEpsilonFor(
    double rho, double iterations, double delta,
    AccountingMode mode = AccountingMode::kClosedForm,
    const ScalarSearchConfig& cfg = {});

// Largest T with CompositionEpsilonFor(rho, T, delta) <= epsilon; 0 when even
// one step exceeds the budget.
absl::StatusOr<int64_t> MaxIterations(
    double rho, double epsilon, double delta,
    AccountingMode mode = AccountingMode::kClosedForm,
    const ScalarSearchConfig& cfg = {});

// Same question answered with MaEpsilon.
absl::StatusOr<int64_t> MaMaxIterations(double rho, double epsilon,
                                        double delta);

// Noise variance the moments accountant needs for T steps to be
// (epsilon, delta)-DP: sigma^2 = T / (2 X) where
// X = eps - 2 log(delta) - 2 sqrt((eps - log(delta)) log(1/delta)).
// The asymptotic reading is 2T log(1/delta) / eps^2 + T / eps.
absl::StatusOr<double> MaRequiredVariance(double iterations, double epsilon,
                                          double delta);

struct RequiredVariance {
  // inf over feasible alpha in (1, 1/delta] of
  //   alpha T / (2 eps + 2 log(delta / zeta_alpha) / (alpha - 1)).
  double variance = 0.0;
  double alpha_opt = 0.0;
  // The same expression at alpha* = 2 log(1/delta) / eps, when alpha* > 1
  // and its denominator is positive.
  double alpha_star = 0.0;
  std::optional<double> plug_in_variance;
  // Three-term large-log(1/delta) expansion of the plug-in value. For
  // reporting only; it is not a valid bound at finite delta.
  double asymptotic_variance = 0.0;
};

// Requires eps > 2 delta log(1/delta).
absl::StatusOr<RequiredVariance> RequiredVarianceFor(
    double iterations, double epsilon, double delta,
    const ScalarSearchConfig& cfg = {});

struct CurveRow {
  int64_t iterations = 0;
  std::optional<double> epochs;
  double eps_ma = 0.0;
  double eps_ours = 0.0;
  std::optional<double> eps_ours_exact;
  // eps_ma - eps_ours
  double gap = 0.0;
  double argmin_alpha = 0.0;
};

// One row per entry of `iterations`, in input order.
absl::StatusOr<std::vector<CurveRow>> PrivacyCurve(
    const GaussianConfig& config, double delta,
    std::span<const int64_t> iterations, bool include_exact = false,
    const ScalarSearchConfig& cfg = {});

}  // namespace rdpdp

#endif  // RDPDP_GAUSSIAN_H_
