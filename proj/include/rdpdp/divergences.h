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

#ifndef RDPDP_DIVERGENCES_H_
#define RDPDP_DIVERGENCES_H_

#include <cmath>

#include "absl/status/statusor.h"

namespace rdpdp {

// Two Bernoulli distributions P = Bernoulli(p), Q = Bernoulli(q). Binary pairs
// are enough to trace the boundary of the joint range of the hockey-stick and
// chi^alpha divergences, so every divergence below is specialized to them.
class BernoulliPair {
 public:
  // Both parameters must lie in the open interval (0, 1); endpoints are
  // rejected, not clamped.
  static absl::StatusOr<BernoulliPair> Create(double p, double q);

  double p() const { return p_; }
  double q() const { return q_; }

 private:
  BernoulliPair(double p, double q) : p_(p), q_(q) {}

  double p_;
  double q_;
};

// An (alpha, gamma)-RDP guarantee. alpha > 1, gamma >= 0, both finite.
class RenyiGuarantee {
 public:
  static absl::StatusOr<RenyiGuarantee> Create(double alpha, double gamma);

  double alpha() const { return alpha_; }
  double gamma() const { return gamma_; }

 private:
  RenyiGuarantee(double alpha, double gamma) : alpha_(alpha), gamma_(gamma) {}

  double alpha_;
  double gamma_;
};

// An (epsilon, delta)-DP guarantee. epsilon >= 0, delta in [0, 1).
class DpGuarantee {
 public:
  static absl::StatusOr<DpGuarantee> Create(double epsilon, double delta);

  double epsilon() const { return epsilon_; }
  double delta() const { return delta_; }

 private:
  DpGuarantee(double epsilon, double delta)
      : epsilon_(epsilon), delta_(delta) {}

  double epsilon_;
  double delta_;
};

// E_lambda(P || Q) = (p - lambda q)_+ + ((1 - p) - lambda (1 - q))_+.
// Requires lambda >= 1.
absl::StatusOr<double> HockeyStickBinary(const BernoulliPair& pair,
                                         double lambda);

// chi^alpha(P || Q) = (p^a q^(1-a) + (1-p)^a (1-q)^(1-a) - 1) / (a - 1).
// Evaluated in the log domain; may return +inf once the moment overflows.
absl::StatusOr<double> ChiAlphaBinary(const BernoulliPair& pair, double alpha);

// Renyi divergence D_alpha(P || Q) in nats.
absl::StatusOr<double> RenyiBinary(const BernoulliPair& pair, double alpha);

// chi(gamma) = (exp((alpha - 1) gamma) - 1) / (alpha - 1). Returns +inf when
// (alpha - 1) gamma is past the double exponent range.
absl::StatusOr<double> ChiOfGamma(double gamma, double alpha);

// Inverse of ChiOfGamma: log(1 + (alpha - 1) t) / (alpha - 1).
absl::StatusOr<double> GammaOfChi(double t, double alpha);

namespace internal {

// log(p^a q^(1-a) + (1-p)^a (1-q)^(1-a)) from precomputed logarithms. This is
// (alpha - 1) * D_alpha. No argument checking; used by grid scans.
inline double LogRenyiMoment(double log_p, double log_1mp, double log_q,
                             double log_1mq, double alpha) {
  const double a = alpha * log_p + (1.0 - alpha) * log_q;
  const double b = alpha * log_1mp + (1.0 - alpha) * log_1mq;
  const double hi = a > b ? a : b;
  const double lo = a > b ? b : a;
  if (hi == -INFINITY) return -INFINITY;
  return hi + std::log1p(std::exp(lo - hi));
}

}  // namespace internal
}  // namespace rdpdp

#endif  // RDPDP_DIVERGENCES_H_
