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

#include "rdpdp/oracle.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <vector>

#include "absl/strings/str_format.h"
#include "json.hpp"
#include "rdpdp/conversion.h"
#include "rdpdp/divergences.h"

namespace rdpdp {
namespace {

constexpr double kLogitLimit = 20.0;
constexpr double kInf = std::numeric_limits<double>::infinity();

// A point of (0, 1) addressed by its logit, with everything the scans need.
struct LogitPoint {
  double value;      // p
  double one_minus;  // 1 - p
  double log_value;
  double log_one_minus;
};

LogitPoint FromLogit(double x) {
  // With t = e^-|x|: the smaller of p, 1 - p is t / (1 + t), and
  // log(1 + t) serves both logs.
  const double t = std::exp(-std::abs(x));
  const double l = std::log1p(t);
  const double big = 1.0 / (1.0 + t);
  const double small = t * big;
  if (x >= 0.0) return {big, small, -l, -l - x};
  return {small, big, x - l, -l};
}

// n + 1 nodes lo + (hi - lo) i / n. Doubling n gives a superset.
double Node(double lo, double hi, int i, int n) {
  return lo + (hi - lo) * (static_cast<double>(i) / static_cast<double>(n));
}

absl::Status CheckInputs(double alpha, double epsilon, double delta) {
  if (!(alpha > 1.0) || !std::isfinite(alpha)) {
    return absl::InvalidArgumentError(
        absl::StrFormat("alpha must be finite and > 1, got %g", alpha));
  }
  if (!(epsilon >= 0.0) || !std::isfinite(epsilon)) {
    return absl::InvalidArgumentError(
        absl::StrFormat("epsilon must be finite and >= 0, got %g", epsilon));
  }
  if (!(delta >= 0.0 && delta < 1.0)) {
    return absl::InvalidArgumentError(
        absl::StrFormat("delta must lie in [0, 1), got %g", delta));
  }
  return absl::OkStatus();
}

class PairScanner {
 public:
  PairScanner(double alpha, double epsilon, double delta, const GridSpec& grid)
      : alpha_(alpha),
        lambda_(std::exp(epsilon)),
        delta_(delta),
        grid_(grid),
        coarse_step_(2.0 * kLogitLimit / grid.n_coarse) {
    coarse_.reserve(grid.n_coarse + 1);
    for (int j = 0; j <= grid.n_coarse; ++j) {
      coarse_.push_back(
          FromLogit(Node(-kLogitLimit, kLogitLimit, j, grid.n_coarse)));
    }
  }

  double coarse_logit(int i) const {
    return Node(-kLogitLimit, kLogitLimit, i, grid_.n_coarse);
  }
  const std::vector<LogitPoint>& coarse() const { return coarse_; }

  // D_alpha, or +inf when the pair misses the hockey-stick constraint. With
  // below_p the pair must instead satisfy q < p and p - e^eps q >= delta,
  // which is the same constraint for delta > 0 and the q* line at delta = 0.
  double Objective(const LogitPoint& p, const LogitPoint& q,
                   bool below_p) const {
    if (below_p) {
      if (!(q.value < p.value && p.value - lambda_ * q.value >= delta_)) {
        return kInf;
      }
    } else {
      const double e = std::max(p.value - lambda_ * q.value, 0.0) +
                       std::max(p.one_minus - lambda_ * q.one_minus, 0.0);
      if (!(e >= delta_)) return kInf;
    }
    return internal::LogRenyiMoment(p.log_value, p.log_one_minus,
                                    q.log_value, q.log_one_minus, alpha_) /
           (alpha_ - 1.0);
  }

  // Coarse q scan followed by a fine scan one coarse cell either side of the
  // row's best coarse q.
  double RowMinimum(const LogitPoint& p, bool below_p) const {
    int best = -1;
    double best_value = kInf;
    for (int j = 0; j <= grid_.n_coarse; ++j) {
      const double v = Objective(p, coarse_[j], below_p);
      if (v < best_value) {
        best_value = v;
        best = j;
      }
    }
    if (best < 0) return kInf;
    const double center = coarse_logit(best);
    const double lo = std::max(center - coarse_step_, -kLogitLimit);
    const double hi = std::min(center + coarse_step_, kLogitLimit);
    for (int j = 0; j <= grid_.n_refine; ++j) {
      const double v =
          Objective(p, FromLogit(Node(lo, hi, j, grid_.n_refine)), below_p);
      best_value = std::min(best_value, v);
    }
    return best_value;
  }

  double coarse_step() const { return coarse_step_; }

 private:
  double alpha_;
  double lambda_;
  double delta_;
  GridSpec grid_;
  double coarse_step_;
  std::vector<LogitPoint> coarse_;
};

}  // namespace

absl::Status GridSpec::Validate() const {
  if (n_coarse < 64 || n_refine < 64) {
    return absl::InvalidArgumentError(absl::StrFormat(
        "grid sizes must be >= 64, got n_coarse=%d n_refine=%d", n_coarse,
        n_refine));
  }
  if (!(refine_window > 0.0 && refine_window <= 1.0)) {
    return absl::InvalidArgumentError(absl::StrFormat(
        "refine_window must lie in (0, 1], got %g", refine_window));
  }
  return absl::OkStatus();
}

absl::StatusOr<double> BruteForceGamma(double alpha, double epsilon,
                                       double delta, const GridSpec& grid) {
  if (absl::Status s = CheckInputs(alpha, epsilon, delta); !s.ok()) return s;
  if (absl::Status s = grid.Validate(); !s.ok()) return s;
  const PairScanner scanner(alpha, epsilon, delta, grid);

  int best_row = -1;
  double best = kInf;
  for (int i = 0; i <= grid.n_coarse; ++i) {
    const double v = scanner.RowMinimum(scanner.coarse()[i], false);
    if (v < best) {
      best = v;
      best_row = i;
    }
  }
  if (best_row < 0) {
    return absl::FailedPreconditionError(absl::StrFormat(
        "no grid pair satisfies E_{e^%g} >= %g", epsilon, delta));
  }
  const double half_width = grid.refine_window * kLogitLimit;
  const double center = scanner.coarse_logit(best_row);
  const double lo = std::max(center - half_width, -kLogitLimit);
  const double hi = std::min(center + half_width, kLogitLimit);
  for (int i = 0; i <= grid.n_refine; ++i) {
    best = std::min(best, scanner.RowMinimum(
                              FromLogit(Node(lo, hi, i, grid.n_refine)), false));
  }
  // Rounding can leave p = q rows a hair below zero.
  return std::max(best, 0.0);
}

absl::StatusOr<QStarReport> VerifyQStar(double alpha, double epsilon,
                                        double delta, const GridSpec& grid) {
  if (absl::Status s = CheckInputs(alpha, epsilon, delta); !s.ok()) return s;
  if (absl::Status s = grid.Validate(); !s.ok()) return s;
  const PairScanner scanner(alpha, epsilon, delta, grid);
  const double lambda = std::exp(epsilon);

  QStarReport report;
  report.min_signed_gap = kInf;
  for (const LogitPoint& p : scanner.coarse()) {
    if (!(p.value > delta)) continue;
    // q* = (p - delta) / e^eps, written through logs.
    const double log_q_star = std::log(p.value - delta) - epsilon;
    if (log_q_star < -kLogitLimit) continue;  // below the grid
    const double log_1m_q_star =
        std::log1p(-(p.value - delta) / lambda);
    const double at_q_star =
        internal::LogRenyiMoment(p.log_value, p.log_one_minus, log_q_star,
                                 log_1m_q_star, alpha) /
        (alpha - 1.0);
    const double row_min = scanner.RowMinimum(p, true);
    if (!std::isfinite(row_min)) continue;
    const double gap = row_min - at_q_star;
    report.max_gap = std::max(report.max_gap, std::abs(gap));
    report.min_signed_gap = std::min(report.min_signed_gap, gap);
    ++report.rows_checked;

    const double q_star = std::exp(log_q_star);
    double previous = kInf;
    for (const LogitPoint& q : scanner.coarse()) {
      if (q.value > q_star) break;
      const double v =
          internal::LogRenyiMoment(p.log_value, p.log_one_minus,
                                   q.log_value, q.log_one_minus, alpha) /
          (alpha - 1.0);
      if (v > previous + 1e-12 * (1.0 + std::abs(previous))) {
        ++report.monotone_violations;
      }
      previous = v;
    }
  }
  if (report.rows_checked == 0) report.min_signed_gap = 0.0;
  return report;
}

absl::StatusOr<ContainmentReport> JointRangeContainment(double alpha,
                                                        double epsilon,
                                                        int64_t n_samples,
                                                        uint64_t seed) {
  if (absl::Status s = CheckInputs(alpha, epsilon, 0.0); !s.ok()) return s;
  if (n_samples < 1) {
    return absl::InvalidArgumentError(
        absl::StrFormat("n_samples must be >= 1, got %d", n_samples));
  }
  const double lambda = std::exp(epsilon);
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  auto draw = [&]() {
    double u = 0.0;
    while (!(u > 0.0 && u < 1.0)) u = unit(rng);
    return u;
  };

  ContainmentReport report;
  report.seed = seed;
  report.worst_excess = -kInf;
  for (int64_t k = 0; k < n_samples; ++k) {
    const double p = draw();
    const double q = draw();
    absl::StatusOr<BernoulliPair> pair = BernoulliPair::Create(p, q);
    if (!pair.ok()) return pair.status();
    absl::StatusOr<double> e = HockeyStickBinary(*pair, lambda);
    absl::StatusOr<double> chi = ChiAlphaBinary(*pair, alpha);
    if (!e.ok()) return e.status();
    if (!chi.ok()) return chi.status();
    absl::StatusOr<ConversionResult> gamma = GammaExact(alpha, epsilon, *e);
    if (!gamma.ok()) return gamma.status();
    absl::StatusOr<double> boundary = ChiOfGamma(gamma->value, alpha);
    if (!boundary.ok()) return boundary.status();
    const double excess = (*boundary - *chi) / std::max(1.0, *boundary);
    report.worst_excess = std::max(report.worst_excess, excess);
    if (excess > 1e-8) ++report.violations;
    ++report.samples;
  }
  return report;
}

absl::StatusOr<OracleReport> RunOracleCheck(double alpha, double epsilon,
                                            double delta, const GridSpec& grid,
                                            int64_t n_samples, uint64_t seed) {
  OracleReport report;
  report.alpha = alpha;
  report.epsilon = epsilon;
  report.delta = delta;
  report.grid = grid;

  absl::StatusOr<double> brute = BruteForceGamma(alpha, epsilon, delta, grid);
  if (!brute.ok()) return brute.status();
  absl::StatusOr<ConversionResult> exact = GammaExact(alpha, epsilon, delta);
  if (!exact.ok()) return exact.status();
  report.brute_force_gamma = *brute;
  report.gamma_exact = exact->value;
  report.gamma_gap = *brute - exact->value;
  if (!(std::abs(report.gamma_gap) <= kOracleGammaTolerance) ||
      report.gamma_gap < -1e-9) {
    report.failures.push_back("brute_force_gamma");
  }

  absl::StatusOr<QStarReport> q_star = VerifyQStar(alpha, epsilon, delta, grid);
  if (!q_star.ok()) return q_star.status();
  report.q_star = *q_star;
  if (!(q_star->max_gap <= kOracleQStarTolerance) ||
      q_star->monotone_violations > 0) {
    report.failures.push_back("q_star");
  }

  absl::StatusOr<ContainmentReport> containment =
      JointRangeContainment(alpha, epsilon, n_samples, seed);
  if (!containment.ok()) return containment.status();
  report.containment = *containment;
  if (containment->violations > 0) report.failures.push_back("containment");
  return report;
}

std::string OracleReportJson(const OracleReport& report) {
  nlohmann::ordered_json j;
  j["alpha"] = report.alpha;
  j["epsilon"] = report.epsilon;
  j["delta"] = report.delta;
  j["grid"] = {{"n_coarse", report.grid.n_coarse},
               {"n_refine", report.grid.n_refine},
               {"refine_window", report.grid.refine_window},
               {"logit_limit", kLogitLimit}};
  j["brute_force_gamma"] = {{"brute_force", report.brute_force_gamma},
                            {"gamma_exact", report.gamma_exact},
                            {"gap", report.gamma_gap},
                            {"tolerance", kOracleGammaTolerance}};
  j["q_star"] = {{"max_gap", report.q_star.max_gap},
                 {"min_signed_gap", report.q_star.min_signed_gap},
                 {"rows_checked", report.q_star.rows_checked},
                 {"monotone_violations", report.q_star.monotone_violations},
                 {"tolerance", kOracleQStarTolerance}};
  j["containment"] = {{"samples", report.containment.samples},
                      {"violations", report.containment.violations},
                      {"seed", report.containment.seed},
                      {"worst_excess", report.containment.worst_excess}};
  j["failures"] = report.failures;
  j["passed"] = report.passed();
  return j.dump(2);
}

}  // namespace rdpdp
