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

#include "rdpdp/divergences.h"

#include <algorithm>
#include <cmath>
#include <limits>

#include "absl/status/status.h"
#include "absl/strings/str_format.h"

namespace rdpdp {
namespace {

absl::Status CheckAlpha(double alpha) {
  if (!(alpha > 1.0) || !std::isfinite(alpha)) {
    return absl::InvalidArgumentError(
        absl::StrFormat("alpha must be finite and > 1, got %g", alpha));
  }
  return absl::OkStatus();
}

double LogMoment(const BernoulliPair& pair, double alpha) {
  return internal::LogRenyiMoment(std::log(pair.p()), std::log1p(-pair.p()),
                                  std::log(pair.q()), std::log1p(-pair.q()),
                                  alpha);
}

}  // namespace

absl::StatusOr<BernoulliPair> BernoulliPair::Create(double p, double q) {
  if (!(p > 0.0 && p < 1.0) || !(q > 0.0 && q < 1.0)) {
    return absl::InvalidArgumentError(absl::StrFormat(
        "Bernoulli parameters must lie in (0, 1), got p=%g q=%g", p, q));
  }
  return BernoulliPair(p, q);
}

absl::StatusOr<RenyiGuarantee> RenyiGuarantee::Create(double alpha,
                                                      double gamma) {
  if (absl::Status s = CheckAlpha(alpha); !s.ok()) return s;
  if (!(gamma >= 0.0) || !std::isfinite(gamma)) {
    return absl::InvalidArgumentError(
        absl::StrFormat("gamma must be finite and >= 0, got %g", gamma));
  }
  return RenyiGuarantee(alpha, gamma);
}

absl::StatusOr<DpGuarantee> DpGuarantee::Create(double epsilon, double delta) {
  if (!(epsilon >= 0.0) || !std::isfinite(epsilon)) {
    return absl::InvalidArgumentError(
        absl::StrFormat("epsilon must be finite and >= 0, got %g", epsilon));
  }
  if (!(delta >= 0.0 && delta < 1.0)) {
    return absl::InvalidArgumentError(
        absl::StrFormat("delta must lie in [0, 1), got %g", delta));
  }
  return DpGuarantee(epsilon, delta);
}

absl::StatusOr<double> HockeyStickBinary(const BernoulliPair& pair,
                                         double lambda) {
  if (!(lambda >= 1.0)) {
    return absl::InvalidArgumentError(
        absl::StrFormat("lambda must be >= 1, got %g", lambda));
  }
  const double p = pair.p();
  const double q = pair.q();
  return std::max(p - lambda * q, 0.0) +
         std::max((1.0 - p) - lambda * (1.0 - q), 0.0);
}

absl::StatusOr<double> ChiAlphaBinary(const BernoulliPair& pair,
                                      double alpha) {
  if (absl::Status s = CheckAlpha(alpha); !s.ok()) return s;
  // The moment is >= 1 by Jensen; rounding can dip a hair below.
  const double log_moment = std::max(LogMoment(pair, alpha), 0.0);
  return std::expm1(log_moment) / (alpha - 1.0);
}

absl::StatusOr<double> RenyiBinary(const BernoulliPair& pair, double alpha) {
  if (absl::Status s = CheckAlpha(alpha); !s.ok()) return s;
  return std::max(LogMoment(pair, alpha), 0.0) / (alpha - 1.0);
}

absl::StatusOr<double> ChiOfGamma(double gamma, double alpha) {
  if (absl::Status s = CheckAlpha(alpha); !s.ok()) return s;
  if (!(gamma >= 0.0)) {
    return absl::InvalidArgumentError(
        absl::StrFormat("gamma must be >= 0, got %g", gamma));
  }
  const double x = (alpha - 1.0) * gamma;
  if (x > std::log(std::numeric_limits<double>::max())) {
    return std::numeric_limits<double>::infinity();
  }
  return std::expm1(x) / (alpha - 1.0);
}

absl::StatusOr<double> GammaOfChi(double t, double alpha) {
  if (absl::Status s = CheckAlpha(alpha); !s.ok()) return s;
  if (!(t >= 0.0)) {
    return absl::InvalidArgumentError(
        absl::StrFormat("chi value must be >= 0, got %g", t));
  }
  if (std::isinf(t)) return t;
  const double scaled = (alpha - 1.0) * t;
  if (std::isinf(scaled)) {
    return (std::log(alpha - 1.0) + std::log(t)) / (alpha - 1.0);
  }
  return std::log1p(scaled) / (alpha - 1.0);
}

}  // namespace rdpdp
