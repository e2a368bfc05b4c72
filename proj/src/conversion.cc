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

#include "rdpdp/conversion.h"

#include <algorithm>
#include <cmath>
#include <limits>

#include "absl/status/status.h"
#include "absl/strings/str_format.h"

namespace rdpdp {
namespace {

// Largest delta probed when inverting the boundary; it diverges as delta -> 1.
constexpr double kDeltaCeiling = 1.0 - 1e-12;

absl::Status CheckAlpha(double alpha) {
  if (!(alpha > 1.0) || !std::isfinite(alpha)) {
    return absl::InvalidArgumentError(
        absl::StrFormat("alpha must be finite and > 1, got %g", alpha));
  }
  return absl::OkStatus();
}

absl::Status CheckNonNegative(const char* name, double x) {
  if (!(x >= 0.0) || !std::isfinite(x)) {
    return absl::InvalidArgumentError(
        absl::StrFormat("%s must be finite and >= 0, got %g", name, x));
  }
  return absl::OkStatus();
}

absl::Status CheckDeltaHalfOpen(double delta) {
  if (!(delta >= 0.0 && delta < 1.0)) {
    return absl::InvalidArgumentError(
        absl::StrFormat("delta must lie in [0, 1), got %g", delta));
  }
  return absl::OkStatus();
}

absl::Status CheckDeltaOpen(double delta) {
  if (!(delta > 0.0 && delta < 1.0)) {
    return absl::InvalidArgumentError(
        absl::StrFormat("delta must lie in (0, 1), got %g", delta));
  }
  return absl::OkStatus();
}

// log(e^eps - x) for 0 <= x < 1 <= e^eps, safe for large eps.
double LogExpMinus(double epsilon, double x) {
  return epsilon + std::log1p(-x * std::exp(-epsilon));
}

double BoundaryLogObjectiveUnchecked(double p, double alpha, double epsilon,
                                     double delta) {
  const double first = alpha * std::log(p) + (1.0 - alpha) * std::log(p - delta);
  const double second = alpha * std::log1p(-p) +
                        (1.0 - alpha) * LogExpMinus(epsilon, p - delta);
  return LogAdd(first, second);
}

}  // namespace

std::string_view ToString(ConversionMethod method) {
  switch (method) {
    case ConversionMethod::kExactNumeric:
      return "exact_numeric";
    case ConversionMethod::kClosedFormBound:
      return "closed_form_bound";
    case ConversionMethod::kBaselineThm1:
      return "baseline_thm1";
    case ConversionMethod::kBalle:
      return "balle";
  }
  return "unknown";
}

std::string_view ToString(ActiveBranch branch) {
  switch (branch) {
    case ActiveBranch::kAlphaDeltaGeOne:
      return "alpha_delta_ge_1";
    case ActiveBranch::kGBound:
      return "g_bound";
    case ActiveBranch::kFBound:
      return "f_bound";
    case ActiveBranch::kChiBound:
      return "chi_bound";
  }
  return "unknown";
}

double LogZeta(double alpha) {
  return -std::log(alpha) + (alpha - 1.0) * std::log1p(-1.0 / alpha);
}

ZetaAlpha::ZetaAlpha(double alpha, double log_zeta)
    : alpha_(alpha), log_zeta_(log_zeta), zeta_(std::exp(log_zeta)) {}

absl::StatusOr<ZetaAlpha> ZetaAlpha::Create(double alpha) {
  if (absl::Status s = CheckAlpha(alpha); !s.ok()) return s;
  return ZetaAlpha(alpha, LogZeta(alpha));
}

absl::StatusOr<double> BoundaryLogObjective(double p, double alpha,
                                            double epsilon, double delta) {
  if (absl::Status s = CheckAlpha(alpha); !s.ok()) return s;
  if (absl::Status s = CheckNonNegative("epsilon", epsilon); !s.ok()) return s;
  if (absl::Status s = CheckDeltaHalfOpen(delta); !s.ok()) return s;
  if (!(p > delta && p < 1.0)) {
    return absl::InvalidArgumentError(absl::StrFormat(
        "p must lie in (delta, 1) = (%g, 1), got %g", delta, p));
  }
  return BoundaryLogObjectiveUnchecked(p, alpha, epsilon, delta);
}

absl::StatusOr<ConversionResult> GammaExact(double alpha, double epsilon,
                                            double delta,
                                            const ScalarSearchConfig& cfg) {
  if (absl::Status s = CheckAlpha(alpha); !s.ok()) return s;
  if (absl::Status s = CheckNonNegative("epsilon", epsilon); !s.ok()) return s;
  if (absl::Status s = CheckDeltaHalfOpen(delta); !s.ok()) return s;
  ConversionResult result;
  result.method = ConversionMethod::kExactNumeric;
  if (delta == 0.0) return result;

  // Search s in (0, 1) with p = delta + (1 - delta) s, so the interval keeps
  // unit width as delta approaches 1. All logs are taken from s directly.
  const double log_width = std::log1p(-delta);
  absl::StatusOr<ScalarMinimum> min = MinimizeUnimodal(
      [&](double s) {
        const double p = delta + (1.0 - delta) * s;
        const double first = alpha * std::log(p) +
                             (1.0 - alpha) * (log_width + std::log(s));
        const double second =
            alpha * (log_width + std::log1p(-s)) +
            (1.0 - alpha) * LogExpMinus(epsilon, (1.0 - delta) * s);
        return LogAdd(first, second);
      },
      0.0, 1.0, cfg);
  if (!min.ok()) return min.status();
  result.value = std::max(epsilon + min->value / (alpha - 1.0), 0.0);
  result.argmin_p = std::min(delta + (1.0 - delta) * min->argmin,
                             std::nextafter(1.0, 0.0));
  return result;
}

double GammaLowerG(double alpha, double epsilon, double delta) {
  return epsilon - (LogZeta(alpha) - std::log(delta)) / (alpha - 1.0);
}

double GammaLowerF(double alpha, double epsilon, double delta) {
  const double ad = alpha * delta;
  const double log_ratio =
      std::log1p(-delta) - LogExpMinus(epsilon, delta);  // (1-d)/(e^eps-d)
  const double first = LogExpMinus(epsilon, ad) + alpha * log_ratio;
  return epsilon + LogAdd(first, std::log(ad)) / (alpha - 1.0);
}

absl::StatusOr<ConversionResult> GammaBound(double alpha, double epsilon,
                                            double delta) {
  if (absl::Status s = CheckAlpha(alpha); !s.ok()) return s;
  if (absl::Status s = CheckNonNegative("epsilon", epsilon); !s.ok()) return s;
  if (absl::Status s = CheckDeltaHalfOpen(delta); !s.ok()) return s;
  ConversionResult result;
  result.method = ConversionMethod::kClosedFormBound;
  if (delta == 0.0) return result;
  if (alpha * delta >= 1.0) {
    result.value = epsilon - std::log1p(-delta);
    result.active_branch = ActiveBranch::kAlphaDeltaGeOne;
    return result;
  }
  const double g = GammaLowerG(alpha, epsilon, delta);
  const double f = GammaLowerF(alpha, epsilon, delta);
  if (g >= f) {
    result.value = g;
    result.active_branch = ActiveBranch::kGBound;
  } else {
    result.value = f;
    result.active_branch = ActiveBranch::kFBound;
  }
  return result;
}

absl::StatusOr<ConversionResult> DeltaExact(double alpha, double gamma,
                                            double epsilon,
                                            const ScalarSearchConfig& cfg) {
  if (absl::Status s = CheckAlpha(alpha); !s.ok()) return s;
  if (absl::Status s = CheckNonNegative("gamma", gamma); !s.ok()) return s;
  if (absl::Status s = CheckNonNegative("epsilon", epsilon); !s.ok()) return s;
  ConversionResult result;
  result.method = ConversionMethod::kExactNumeric;
  if (gamma == 0.0) return result;

  auto boundary = [&](double delta) {
    absl::StatusOr<ConversionResult> r = GammaExact(alpha, epsilon, delta, cfg);
    return r.ok() ? r->value : std::numeric_limits<double>::quiet_NaN();
  };
  const double top = boundary(kDeltaCeiling);
  if (!(gamma <= top)) {
    return absl::FailedPreconditionError(absl::StrFormat(
        "gamma=%.17g exceeds the boundary value %.17g reached as delta -> 1; "
        "no delta < 1 is implied",
        gamma, top));
  }
  absl::StatusOr<double> delta = InvertMonotone(
      boundary, gamma, 0.0, kDeltaCeiling, Monotonicity::kIncreasing, cfg);
  if (!delta.ok()) return delta.status();
  result.value = *delta;
  if (*delta > 0.0) {
    absl::StatusOr<ConversionResult> witness =
        GammaExact(alpha, epsilon, *delta, cfg);
    if (witness.ok()) result.argmin_p = witness->argmin_p;
  }
  return result;
}

absl::StatusOr<ConversionResult> DeltaBound(double alpha, double gamma,
                                            double epsilon,
                                            const ScalarSearchConfig& cfg) {
  if (absl::Status s = CheckAlpha(alpha); !s.ok()) return s;
  if (absl::Status s = CheckNonNegative("gamma", gamma); !s.ok()) return s;
  if (absl::Status s = CheckNonNegative("epsilon", epsilon); !s.ok()) return s;
  ConversionResult result;
  result.method = ConversionMethod::kClosedFormBound;
  if (gamma == 0.0) return result;

  // Above the boundary value at delta = 1/alpha the boundary is explicit.
  const double inv_alpha = 1.0 / alpha;
  if (gamma >= epsilon - std::log1p(-inv_alpha)) {
    result.value = std::min(-std::expm1(epsilon - gamma), kDeltaCeiling);
    result.active_branch = ActiveBranch::kAlphaDeltaGeOne;
    return result;
  }

  // Otherwise the answer is below 1/alpha, where gamma >= max(g, f) holds.
  const double delta_g =
      std::exp(LogZeta(alpha) + (alpha - 1.0) * (gamma - epsilon));
  double delta_f = inv_alpha;
  auto f_piece = [&](double delta) {
    return delta == 0.0 ? 0.0 : GammaLowerF(alpha, epsilon, delta);
  };
  if (f_piece(inv_alpha) > gamma) {
    absl::StatusOr<double> inverted = InvertMonotone(
        f_piece, gamma, 0.0, inv_alpha, Monotonicity::kIncreasing, cfg);
    if (!inverted.ok()) return inverted.status();
    delta_f = *inverted;
  }
  if (delta_g <= delta_f) {
    result.value = std::min(delta_g, inv_alpha);
    result.active_branch = ActiveBranch::kGBound;
  } else {
    result.value = delta_f;
    result.active_branch = ActiveBranch::kFBound;
  }
  return result;
}

absl::StatusOr<ConversionResult> EpsilonExact(double alpha, double gamma,
                                              double delta,
                                              const ScalarSearchConfig& cfg) {
  if (absl::Status s = CheckAlpha(alpha); !s.ok()) return s;
  if (absl::Status s = CheckNonNegative("gamma", gamma); !s.ok()) return s;
  if (absl::Status s = CheckDeltaOpen(delta); !s.ok()) return s;
  ConversionResult result;
  result.method = ConversionMethod::kExactNumeric;
  if (gamma == 0.0) return result;

  auto boundary = [&](double epsilon) {
    absl::StatusOr<ConversionResult> r = GammaExact(alpha, epsilon, delta, cfg);
    return r.ok() ? r->value : std::numeric_limits<double>::quiet_NaN();
  };
  if (boundary(0.0) >= gamma) return result;

  // The closed-form bound lies above the exact value; widen if rounding
  // leaves the boundary just short of gamma there.
  absl::StatusOr<ConversionResult> bound = EpsilonBound(alpha, gamma, delta);
  if (!bound.ok()) return bound.status();
  double hi = bound->value + 1.0;
  for (int i = 0; i < 64 && boundary(hi) < gamma; ++i) hi *= 2.0;

  absl::StatusOr<double> epsilon = InvertMonotone(
      boundary, gamma, 0.0, hi, Monotonicity::kIncreasing, cfg);
  if (!epsilon.ok()) return epsilon.status();
  result.value = *epsilon;
  absl::StatusOr<ConversionResult> witness =
      GammaExact(alpha, *epsilon, delta, cfg);
  if (witness.ok()) result.argmin_p = witness->argmin_p;
  return result;
}

absl::StatusOr<ConversionResult> EpsilonBound(double alpha, double gamma,
                                              double delta) {
  if (absl::Status s = CheckAlpha(alpha); !s.ok()) return s;
  if (absl::Status s = CheckNonNegative("gamma", gamma); !s.ok()) return s;
  if (absl::Status s = CheckDeltaOpen(delta); !s.ok()) return s;
  ConversionResult result;
  result.method = ConversionMethod::kClosedFormBound;
  if (gamma == 0.0) return result;
  if (alpha * delta >= 1.0) {
    result.value = std::max(gamma + std::log1p(-delta), 0.0);
    result.active_branch = ActiveBranch::kAlphaDeltaGeOne;
    return result;
  }
  const double scaled = (alpha - 1.0) * gamma;
  const double g_piece =
      std::max(scaled - (std::log(delta) - LogZeta(alpha)), 0.0);
  // log((alpha - 1) chi(gamma) / (alpha delta) + 1), in the log domain.
  const double chi_piece =
      LogAdd(0.0, LogExpm1(scaled) - std::log(alpha * delta));
  if (g_piece <= chi_piece) {
    result.value = g_piece / (alpha - 1.0);
    result.active_branch = ActiveBranch::kGBound;
  } else {
    result.value = chi_piece / (alpha - 1.0);
    result.active_branch = ActiveBranch::kChiBound;
  }
  return result;
}

absl::StatusOr<double> BaselineDelta(double alpha, double gamma,
                                     double epsilon) {
  if (absl::Status s = CheckAlpha(alpha); !s.ok()) return s;
  if (absl::Status s = CheckNonNegative("gamma", gamma); !s.ok()) return s;
  if (absl::Status s = CheckNonNegative("epsilon", epsilon); !s.ok()) return s;
  if (epsilon <= gamma) return 1.0;
  return std::exp(-(alpha - 1.0) * (epsilon - gamma));
}

absl::StatusOr<double> BaselineEpsilon(double alpha, double gamma,
                                       double delta) {
  if (absl::Status s = CheckAlpha(alpha); !s.ok()) return s;
  if (absl::Status s = CheckNonNegative("gamma", gamma); !s.ok()) return s;
  if (absl::Status s = CheckDeltaOpen(delta); !s.ok()) return s;
  return gamma - std::log(delta) / (alpha - 1.0);
}

absl::StatusOr<double> BalleEpsilon(double alpha, double gamma, double delta) {
  if (absl::Status s = CheckAlpha(alpha); !s.ok()) return s;
  if (absl::Status s = CheckNonNegative("gamma", gamma); !s.ok()) return s;
  if (absl::Status s = CheckDeltaOpen(delta); !s.ok()) return s;
  return gamma - (std::log(delta) - LogZeta(alpha)) / (alpha - 1.0);
}

absl::StatusOr<ZeroEpsilonRegion> ZeroEpsilonDeltas(double alpha,
                                                    double gamma) {
  if (absl::Status s = CheckAlpha(alpha); !s.ok()) return s;
  if (absl::Status s = CheckNonNegative("gamma", gamma); !s.ok()) return s;
  const double inv_alpha = 1.0 / alpha;
  const double tail = -std::expm1(-gamma);  // 1 - e^-gamma
  ZeroEpsilonRegion region;
  region.delta_free = std::max(tail, inv_alpha);
  if (tail < inv_alpha) {
    region.interval = DeltaInterval{
        std::exp(LogZeta(alpha) + (alpha - 1.0) * gamma), inv_alpha};
  }
  return region;
}

}  // namespace rdpdp
