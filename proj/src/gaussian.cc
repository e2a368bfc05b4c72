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

#include "rdpdp/gaussian.h"

#include <algorithm>
#include <cmath>
#include <limits>

#include "absl/status/status.h"
#include "absl/strings/str_format.h"
#include "rdpdp/conversion.h"

namespace rdpdp {
namespace {

// Smallest alpha - 1 considered by the searches over alpha.
constexpr double kMinAlphaGap = 1e-6;
// Iteration counts beyond this are treated as unbounded.
constexpr int64_t kMaxIterations = int64_t{1} << 52;

absl::Status CheckRho(double rho) {
  if (!(rho > 0.0) || !std::isfinite(rho)) {
    return absl::InvalidArgumentError(
        absl::StrFormat("rho must be finite and > 0, got %g", rho));
  }
  return absl::OkStatus();
}

absl::Status CheckIterations(double iterations) {
  if (!(iterations >= 1.0) || !std::isfinite(iterations)) {
    return absl::InvalidArgumentError(
        absl::StrFormat("iteration count must be >= 1, got %g", iterations));
  }
  return absl::OkStatus();
}

absl::Status CheckDelta(double delta) {
  if (!(delta > 0.0 && delta < 1.0)) {
    return absl::InvalidArgumentError(
        absl::StrFormat("delta must lie in (0, 1), got %g", delta));
  }
  return absl::OkStatus();
}

absl::Status CheckEpsilon(double epsilon) {
  if (!(epsilon > 0.0) || !std::isfinite(epsilon)) {
    return absl::InvalidArgumentError(
        absl::StrFormat("epsilon must be finite and > 0, got %g", epsilon));
  }
  return absl::OkStatus();
}

// Minimizes fn(alpha) over alpha in (1, alpha_max], searching in
// log(alpha - 1) so that both alpha ~ 1 and alpha ~ 1/delta get resolution.
absl::StatusOr<ScalarMinimum> MinimizeOverAlpha(
    absl::FunctionRef<double(double)> fn, double alpha_max,
    const ScalarSearchConfig& cfg) {
  const double hi = std::log(alpha_max - 1.0);
  const double lo = std::min(std::log(kMinAlphaGap), hi - 1.0);
  absl::StatusOr<ScalarMinimum> min = MinimizeUnimodal(
      [&](double u) { return fn(1.0 + std::exp(u)); }, lo, hi, cfg);
  if (!min.ok()) return min.status();
  return ScalarMinimum{1.0 + std::exp(min->argmin), min->value};
}

double Eps0Term(double rho, double iterations, double delta, double alpha) {
  return std::max(rho * alpha * iterations -
                      (std::log(delta) - LogZeta(alpha)) / (alpha - 1.0),
                  0.0);
}

double Eps1Term(double rho, double iterations, double delta, double alpha) {
  const double exponent = rho * alpha * (alpha - 1.0) * iterations;
  return LogAdd(0.0, LogExpm1(exponent) - std::log(alpha * delta)) /
         (alpha - 1.0);
}

template <typename EpsilonFn>
absl::StatusOr<int64_t> LargestWithin(EpsilonFn epsilon_at, double budget) {
  absl::StatusOr<double> first = epsilon_at(1);
  if (!first.ok()) return first.status();
  if (*first > budget) return 0;
  int64_t lo = 1;
  int64_t hi = 2;
  while (true) {
    absl::StatusOr<double> e = epsilon_at(hi);
    if (!e.ok()) return e.status();
    if (*e > budget) break;
    lo = hi;
    if (hi >= kMaxIterations) {
      return absl::OutOfRangeError(absl::StrFormat(
          "epsilon budget %g is not exhausted within %d iterations", budget,
          kMaxIterations));
    }
    hi *= 2;
  }
  // epsilon_at(lo) <= budget < epsilon_at(hi)
  while (hi - lo > 1) {
    const int64_t mid = lo + (hi - lo) / 2;
    absl::StatusOr<double> e = epsilon_at(mid);
    if (!e.ok()) return e.status();
    if (*e <= budget) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return lo;
}

}  // namespace

absl::StatusOr<GaussianConfig> GaussianConfig::Create(
    double sigma, double sensitivity, std::optional<double> subsampling_q) {
  if (subsampling_q.has_value()) {
    if (sensitivity != 1.0) {
      return absl::InvalidArgumentError(
          "subsampled accounting assumes unit sensitivity");
    }
    absl::StatusOr<double> rho = RhoSubsampled(sigma, *subsampling_q);
    if (!rho.ok()) return rho.status();
    return GaussianConfig(sigma, 1.0, subsampling_q, *rho);
  }
  absl::StatusOr<double> rho = RhoGaussian(sigma, sensitivity);
  if (!rho.ok()) return rho.status();
  return GaussianConfig(sigma, sensitivity, std::nullopt, *rho);
}

absl::StatusOr<double> RhoGaussian(double sigma, double sensitivity) {
  if (!(sigma > 0.0) || !std::isfinite(sigma)) {
    return absl::InvalidArgumentError(
        absl::StrFormat("sigma must be finite and > 0, got %g", sigma));
  }
  if (!(sensitivity > 0.0) || !std::isfinite(sensitivity)) {
    return absl::InvalidArgumentError(absl::StrFormat(
        "sensitivity must be finite and > 0, got %g", sensitivity));
  }
  return sensitivity * sensitivity / (2.0 * sigma * sigma);
}

absl::StatusOr<double> RhoSubsampled(double sigma, double q) {
  if (!(sigma > 0.0) || !std::isfinite(sigma)) {
    return absl::InvalidArgumentError(
        absl::StrFormat("sigma must be finite and > 0, got %g", sigma));
  }
  if (!(q > 0.0 && q < 1.0)) {
    return absl::InvalidArgumentError(
        absl::StrFormat("subsampling rate must lie in (0, 1), got %g", q));
  }
  return q * q / ((1.0 - q) * sigma * sigma);
}

absl::StatusOr<double> MaEpsilon(double rho, double iterations, double delta) {
  if (absl::Status s = CheckRho(rho); !s.ok()) return s;
  if (absl::Status s = CheckIterations(iterations); !s.ok()) return s;
  if (absl::Status s = CheckDelta(delta); !s.ok()) return s;
  const double rt = rho * iterations;
  return rt + std::sqrt(-4.0 * rt * std::log(delta));
}

std::string_view ToString(AccountingMode mode) {
  switch (mode) {
    case AccountingMode::kClosedForm:
      return "closed_form";
    case AccountingMode::kExact:
      return "exact";
  }
  return "unknown";
}

std::string_view ToString(CompositionBranch branch) {
  switch (branch) {
    case CompositionBranch::kEps0:
      return "eps0";
    case CompositionBranch::kEps1:
      return "eps1";
    case CompositionBranch::kAlphaInvDelta:
      return "alpha_inv_delta";
    case CompositionBranch::kExact:
      return "exact";
  }
  return "unknown";
}

absl::StatusOr<CompositionEpsilon> CompositionEpsilonFor(
    double rho, double iterations, double delta, AccountingMode mode,
    const ScalarSearchConfig& cfg) {
  if (absl::Status s = CheckRho(rho); !s.ok()) return s;
  if (absl::Status s = CheckIterations(iterations); !s.ok()) return s;
  if (absl::Status s = CheckDelta(delta); !s.ok()) return s;
  const double alpha_max = 1.0 / delta;

  absl::StatusOr<ScalarMinimum> eps0 = MinimizeOverAlpha(
      [&](double alpha) { return Eps0Term(rho, iterations, delta, alpha); },
      alpha_max, cfg);
  if (!eps0.ok()) return eps0.status();
  absl::StatusOr<ScalarMinimum> eps1 = MinimizeOverAlpha(
      [&](double alpha) { return Eps1Term(rho, iterations, delta, alpha); },
      alpha_max, cfg);
  if (!eps1.ok()) return eps1.status();

  CompositionEpsilon out;
  out.eps0 = eps0->value;
  out.eps0_alpha = eps0->argmin;
  out.eps1 = eps1->value;
  out.eps1_alpha = eps1->argmin;
  out.eps_third = std::max(rho * iterations / delta + std::log1p(-delta), 0.0);

  out.epsilon = out.eps_third;
  out.argmin_alpha = alpha_max;
  out.branch = CompositionBranch::kAlphaInvDelta;
  if (out.eps1 < out.epsilon) {
    out.epsilon = out.eps1;
    out.argmin_alpha = out.eps1_alpha;
    out.branch = CompositionBranch::kEps1;
  }
  if (out.eps0 <= out.epsilon) {
    out.epsilon = out.eps0;
    out.argmin_alpha = out.eps0_alpha;
    out.branch = CompositionBranch::kEps0;
  }
  if (mode == AccountingMode::kClosedForm) return out;

  absl::Status inner_error;
  absl::StatusOr<ScalarMinimum> exact = MinimizeOverAlpha(
      [&](double alpha) {
        absl::StatusOr<ConversionResult> r =
            EpsilonExact(alpha, rho * alpha * iterations, delta, cfg);
        if (!r.ok()) {
          inner_error = r.status();
          return std::numeric_limits<double>::quiet_NaN();
        }
        return r->value;
      },
      alpha_max, cfg);
  if (!exact.ok()) return inner_error.ok() ? exact.status() : inner_error;
  // At alpha = 1/delta the exact conversion equals the third term.
  out.epsilon = out.eps_third;
  out.argmin_alpha = alpha_max;
  if (exact->value < out.epsilon) {
    out.epsilon = exact->value;
    out.argmin_alpha = exact->argmin;
  }
  out.branch = CompositionBranch::kExact;
  return out;
}

absl::StatusOr<int64_t> MaxIterations(double rho, double epsilon,
                                      double delta, AccountingMode mode,
                                      const ScalarSearchConfig& cfg) {
  if (absl::Status s = CheckRho(rho); !s.ok()) return s;
  if (absl::Status s = CheckEpsilon(epsilon); !s.ok()) return s;
  if (absl::Status s = CheckDelta(delta); !s.ok()) return s;
  return LargestWithin(
      [&](int64_t t) -> absl::StatusOr<double> {
        absl::StatusOr<CompositionEpsilon> e = CompositionEpsilonFor(
            rho, static_cast<double>(t), delta, mode, cfg);
        if (!e.ok()) return e.status();
        return e->epsilon;
      },
      epsilon);
}

absl::StatusOr<int64_t> MaMaxIterations(double rho, double epsilon,
                                        double delta) {
  if (absl::Status s = CheckRho(rho); !s.ok()) return s;
  if (absl::Status s = CheckEpsilon(epsilon); !s.ok()) return s;
  if (absl::Status s = CheckDelta(delta); !s.ok()) return s;
  return LargestWithin(
      [&](int64_t t) {
        return MaEpsilon(rho, static_cast<double>(t), delta);
      },
      epsilon);
}

absl::StatusOr<double> MaRequiredVariance(double iterations, double epsilon,
                                          double delta) {
  if (absl::Status s = CheckIterations(iterations); !s.ok()) return s;
  if (absl::Status s = CheckEpsilon(epsilon); !s.ok()) return s;
  if (absl::Status s = CheckDelta(delta); !s.ok()) return s;
  const double log_inv = -std::log(delta);
  // eps + 2L - 2 sqrt((eps + L) L) rewritten without the cancellation.
  const double x =
      epsilon * epsilon /
      (epsilon + 2.0 * log_inv +
       2.0 * std::sqrt((epsilon + log_inv) * log_inv));
  if (!(x > 0.0)) {
    return absl::FailedPreconditionError(absl::StrFormat(
        "no noise level reaches epsilon=%g at delta=%g", epsilon, delta));
  }
  return iterations / (2.0 * x);
}

absl::StatusOr<RequiredVariance> RequiredVarianceFor(
    double iterations, double epsilon, double delta,
    const ScalarSearchConfig& cfg) {
  if (absl::Status s = CheckIterations(iterations); !s.ok()) return s;
  if (absl::Status s = CheckEpsilon(epsilon); !s.ok()) return s;
  if (absl::Status s = CheckDelta(delta); !s.ok()) return s;
  const double log_inv = -std::log(delta);
  const double threshold = 2.0 * delta * log_inv;
  if (!(epsilon > threshold)) {
    return absl::FailedPreconditionError(absl::StrFormat(
        "epsilon=%g must exceed 2 delta log(1/delta) = %.17g", epsilon,
        threshold));
  }
  auto variance_at = [&](double alpha) {
    const double denom =
        2.0 * epsilon +
        2.0 * (std::log(delta) - LogZeta(alpha)) / (alpha - 1.0);
    if (!(denom > 0.0)) return std::numeric_limits<double>::infinity();
    return alpha * iterations / denom;
  };
  const double alpha_max = 1.0 / delta;
  absl::StatusOr<ScalarMinimum> min =
      MinimizeOverAlpha(variance_at, alpha_max, cfg);

  RequiredVariance out;
  out.variance = variance_at(alpha_max);
  out.alpha_opt = alpha_max;
  if (min.ok() && min->value < out.variance) {
    out.variance = min->value;
    out.alpha_opt = min->argmin;
  }
  if (!std::isfinite(out.variance)) {
    return absl::FailedPreconditionError(absl::StrFormat(
        "no alpha in (1, %g] yields a finite variance", alpha_max));
  }

  out.alpha_star = 2.0 * log_inv / epsilon;
  if (out.alpha_star > 1.0 && out.alpha_star <= alpha_max) {
    const double v = variance_at(out.alpha_star);
    if (std::isfinite(v)) out.plug_in_variance = v;
  }
  const double e2 = epsilon * epsilon;
  out.asymptotic_variance =
      2.0 * iterations * log_inv / e2 + iterations / epsilon -
      2.0 * iterations / e2 *
          (std::log(2.0 * log_inv) + 1.0 - std::log(epsilon));
  return out;
}

absl::StatusOr<std::vector<CurveRow>> PrivacyCurve(
    const GaussianConfig& config, double delta,
    std::span<const int64_t> iterations, bool include_exact,
    const ScalarSearchConfig& cfg) {
  if (iterations.empty()) {
    return absl::InvalidArgumentError("iteration list is empty");
  }
  std::vector<CurveRow> rows;
  rows.reserve(iterations.size());
  for (int64_t t : iterations) {
    const double td = static_cast<double>(t);
    CurveRow row;
    row.iterations = t;
    if (config.subsampling_q().has_value()) {
      row.epochs = EpochsForIterations(*config.subsampling_q(), td);
    }
    absl::StatusOr<double> ma = MaEpsilon(config.rho(), td, delta);
    if (!ma.ok()) return ma.status();
    absl::StatusOr<CompositionEpsilon> ours =
        CompositionEpsilonFor(config.rho(), td, delta,
                              AccountingMode::kClosedForm, cfg);
    if (!ours.ok()) return ours.status();
    row.eps_ma = *ma;
    row.eps_ours = ours->epsilon;
    row.argmin_alpha = ours->argmin_alpha;
    row.gap = row.eps_ma - row.eps_ours;
    if (include_exact) {
      absl::StatusOr<CompositionEpsilon> exact = CompositionEpsilonFor(
          config.rho(), td, delta, AccountingMode::kExact, cfg);
      if (!exact.ok()) return exact.status();
      row.eps_ours_exact = exact->epsilon;
    }
    rows.push_back(row);
  }
  return rows;
}

}  // namespace rdpdp
