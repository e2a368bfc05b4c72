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

#include "rdpdp/cli.h"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <functional>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "CLI11.hpp"
#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "absl/strings/numbers.h"
#include "absl/strings/str_cat.h"
#include "absl/strings/str_join.h"
#include "absl/strings/strip.h"
#include "json.hpp"
#include "rdpdp/conversion.h"
#include "rdpdp/gaussian.h"
#include "rdpdp/oracle.h"
#include "rdpdp/optimizer.h"

namespace rdpdp::cli {
namespace {

using Json = nlohmann::ordered_json;

// Flags that take no value; in a config file they are written key=true.
const std::set<std::string>& BooleanFlags() {
  static const auto* flags = new std::set<std::string>{"exact", "timing"};
  return *flags;
}

// Thrown by command handlers to leave with a specific exit code.
struct CommandError {
  int code;
  std::string message;
};

[[noreturn]] void Fail(int code, std::string message) {
  throw CommandError{code, std::move(message)};
}

template <typename T>
T OrFail(absl::StatusOr<T> v) {
  if (!v.ok()) Fail(kExitInfeasible, std::string(v.status().message()));
  return *std::move(v);
}

// Doubles go through absl::SimpleAtod, which is locale independent and
// correctly rounded, so a value such as 1e-5 is stored exactly as written.
CLI::Option* AddReal(CLI::App* app, const std::string& name,
                     std::optional<double>* dst, const std::string& help) {
  return app->add_option_function<std::string>(
      name,
      [dst, name](const std::string& text) {
        double v = 0.0;
        if (!absl::SimpleAtod(text, &v) || !std::isfinite(v)) {
          throw CLI::ValidationError(name, "not a finite number: " + text);
        }
        *dst = v;
      },
      help);
}

CLI::Option* AddRealList(CLI::App* app, const std::string& name,
                         std::vector<double>* dst, const std::string& help) {
  return app->add_option_function<std::vector<std::string>>(
      name,
      [dst, name](const std::vector<std::string>& texts) {
        dst->clear();
        for (const std::string& text : texts) {
          double v = 0.0;
          if (!absl::SimpleAtod(text, &v) || !std::isfinite(v)) {
            throw CLI::ValidationError(name, "not a finite number: " + text);
          }
          dst->push_back(v);
        }
      },
      help);
}

struct SearchFlags {
  double tol = ScalarSearchConfig{}.abs_tol;
  int max_iters = ScalarSearchConfig{}.max_iters;
  int coarse_grid = ScalarSearchConfig{}.coarse_grid;
  bool timing = false;

  void Register(CLI::App* app) {
    app->add_option("--tol", tol, "Absolute tolerance of scalar searches")
        ->capture_default_str()
        ->check(CLI::PositiveNumber);
    app->add_option("--max-iters", max_iters,
                    "Iteration cap of scalar searches")
        ->capture_default_str()
        ->check(CLI::PositiveNumber);
    app->add_option("--coarse-grid", coarse_grid,
                    "Bracketing grid size of scalar searches")
        ->capture_default_str()
        ->check(CLI::Range(8, 1 << 20));
    app->add_flag("--timing", timing,
                  "Record wall time in the output metadata");
  }

  ScalarSearchConfig Config() const {
    ScalarSearchConfig cfg;
    cfg.abs_tol = tol;
    cfg.max_iters = max_iters;
    cfg.coarse_grid = coarse_grid;
    if (absl::Status s = cfg.Validate(); !s.ok()) {
      Fail(kExitUsage, std::string(s.message()));
    }
    return cfg;
  }

  Json Echo() const {
    return Json{{"abs_tol", tol},
                {"max_iters", max_iters},
                {"coarse_grid", coarse_grid}};
  }
};

Json Optional(const std::optional<double>& v) {
  return v.has_value() ? Json(*v) : Json(nullptr);
}

Json ToJson(const ConversionResult& r) {
  Json j{{"value", r.value}, {"method", std::string(ToString(r.method))}};
  if (r.argmin_p.has_value()) j["argmin_p"] = *r.argmin_p;
  if (r.active_branch.has_value()) {
    j["active_branch"] = std::string(ToString(*r.active_branch));
  }
  return j;
}

Json ToJson(const CompositionEpsilon& c) {
  return Json{{"epsilon", c.epsilon},
              {"branch", std::string(ToString(c.branch))},
              {"argmin_alpha", c.argmin_alpha},
              {"eps0", c.eps0},
              {"eps0_alpha", c.eps0_alpha},
              {"eps1", c.eps1},
              {"eps1_alpha", c.eps1_alpha},
              {"eps_third", c.eps_third}};
}

std::string FormatReal(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

// Tables are written as CSV or as the `results` member of a JSON record.
struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<Json>> rows;  // numbers, integers, or strings

  std::string Csv() const {
    std::string text = absl::StrJoin(columns, ",") + "\n";
    for (const auto& row : rows) {
      for (size_t i = 0; i < row.size(); ++i) {
        if (i > 0) text += ',';
        const Json& cell = row[i];
        if (cell.is_number_float()) {
          text += FormatReal(cell.get<double>());
        } else if (cell.is_number_integer()) {
          text += std::to_string(cell.get<int64_t>());
        } else if (cell.is_string()) {
          text += cell.get<std::string>();
        }
      }
      text += '\n';
    }
    return text;
  }

  Json ToJson() const {
    Json j{{"columns", columns}, {"rows", Json::array()}};
    for (const auto& row : rows) j["rows"].push_back(row);
    return j;
  }
};

GaussianConfig MakeGaussian(std::optional<double> sigma,
                            std::optional<double> sensitivity,
                            std::optional<double> q) {
  return OrFail(GaussianConfig::Create(*sigma, sensitivity.value_or(1.0), q));
}

Json GaussianEcho(const GaussianConfig& g) {
  Json j{{"sigma", g.sigma()}, {"sensitivity", g.sensitivity()}};
  j["q"] = Optional(g.subsampling_q());
  j["rho"] = g.rho();
  return j;
}

AccountingMode ParseMode(const std::string& mode) {
  return mode == "exact" ? AccountingMode::kExact
                         : AccountingMode::kClosedForm;
}

// ---- convert ---------------------------------------------------------------

struct ConvertFlags {
  std::optional<double> alpha, gamma, eps, delta;
  std::string method = "exact";
  SearchFlags search;
};

void SetupConvert(CLI::App* app, ConvertFlags* f) {
  AddReal(app, "--alpha", &f->alpha, "Renyi order alpha > 1")->required();
  AddReal(app, "--gamma", &f->gamma, "Renyi divergence bound gamma");
  AddReal(app, "--eps", &f->eps, "DP epsilon");
  AddReal(app, "--delta", &f->delta, "DP delta");
  app->add_option("--method", f->method, "Conversion to report")
      ->capture_default_str()
      ->check(CLI::IsMember({"exact", "bound", "baseline", "balle", "all"}));
  f->search.Register(app);
}

Json RunConvert(const ConvertFlags& f, Json* query) {
  const int given = f.gamma.has_value() + f.eps.has_value() +
                    f.delta.has_value();
  if (given != 2) {
    Fail(kExitUsage,
         "convert: exactly two of --gamma, --eps, --delta are required");
  }
  const ScalarSearchConfig cfg = f.search.Config();
  const double alpha = *f.alpha;
  std::string solve_for;
  using Solver = std::function<Json()>;
  std::vector<std::pair<std::string, Solver>> solvers;
  if (!f.delta.has_value()) {
    solve_for = "delta";
    const double gamma = *f.gamma, eps = *f.eps;
    solvers = {
        {"exact", [=] { return ToJson(OrFail(DeltaExact(alpha, gamma, eps, cfg))); }},
        {"bound", [=] { return ToJson(OrFail(DeltaBound(alpha, gamma, eps, cfg))); }},
        {"baseline",
         [=] {
           return Json{{"value", OrFail(BaselineDelta(alpha, gamma, eps))},
                       {"method", "baseline_thm1"}};
         }},
    };
  } else if (!f.eps.has_value()) {
    solve_for = "epsilon";
    const double gamma = *f.gamma, delta = *f.delta;
    solvers = {
        {"exact", [=] { return ToJson(OrFail(EpsilonExact(alpha, gamma, delta, cfg))); }},
        {"bound", [=] { return ToJson(OrFail(EpsilonBound(alpha, gamma, delta))); }},
        {"baseline",
         [=] {
           return Json{{"value", OrFail(BaselineEpsilon(alpha, gamma, delta))},
                       {"method", "baseline_thm1"}};
         }},
        {"balle",
         [=] {
           return Json{{"value", OrFail(BalleEpsilon(alpha, gamma, delta))},
                       {"method", "balle"}};
         }},
    };
  } else {
    solve_for = "gamma";
    const double eps = *f.eps, delta = *f.delta;
    solvers = {
        {"exact", [=] { return ToJson(OrFail(GammaExact(alpha, eps, delta, cfg))); }},
        {"bound", [=] { return ToJson(OrFail(GammaBound(alpha, eps, delta))); }},
    };
  }

  *query = Json{{"alpha", alpha}};
  (*query)["gamma"] = Optional(f.gamma);
  (*query)["eps"] = Optional(f.eps);
  (*query)["delta"] = Optional(f.delta);
  (*query)["solve_for"] = solve_for;
  (*query)["method"] = f.method;
  (*query)["tolerances"] = f.search.Echo();

  Json results = Json::object();
  bool matched = false;
  for (const auto& [name, solve] : solvers) {
    if (f.method == "all" || f.method == name) {
      results[name] = solve();
      matched = true;
    }
  }
  if (!matched) {
    Fail(kExitUsage, absl::StrCat("convert: method ", f.method,
                                  " does not produce ", solve_for));
  }
  return results;
}

// ---- compose ---------------------------------------------------------------

struct GaussianFlags {
  std::optional<double> sigma, sensitivity, q;

  void Register(CLI::App* app, bool required) {
    auto* s = AddReal(app, "--sigma", &sigma, "Gaussian noise scale");
    if (required) s->required();
    AddReal(app, "--sensitivity", &sensitivity,
            "L2 sensitivity (default 1; must be 1 with --q)");
    AddReal(app, "--q", &q, "Subsampling rate in (0, 1)");
  }
};

struct ComposeFlags {
  GaussianFlags gaussian;
  int64_t iterations = 0;
  std::optional<double> delta;
  std::string mode = "closed_form";
  SearchFlags search;
};

void SetupCompose(CLI::App* app, ComposeFlags* f) {
  f->gaussian.Register(app, true);
  app->add_option("--T", f->iterations, "Number of composed steps")
      ->required()
      ->check(CLI::PositiveNumber);
  AddReal(app, "--delta", &f->delta, "DP delta in (0, 1)")->required();
  app->add_option("--mode", f->mode, "Accounting for our bound")
      ->capture_default_str()
      ->check(CLI::IsMember({"closed_form", "exact"}));
  f->search.Register(app);
}

Json RunCompose(const ComposeFlags& f, Json* query) {
  const ScalarSearchConfig cfg = f.search.Config();
  const GaussianConfig g =
      MakeGaussian(f.gaussian.sigma, f.gaussian.sensitivity, f.gaussian.q);
  const double delta = *f.delta;
  const double t = static_cast<double>(f.iterations);
  *query = GaussianEcho(g);
  (*query)["T"] = f.iterations;
  (*query)["delta"] = delta;
  (*query)["mode"] = f.mode;
  (*query)["tolerances"] = f.search.Echo();

  const double ma = OrFail(MaEpsilon(g.rho(), t, delta));
  const CompositionEpsilon ours = OrFail(
      CompositionEpsilonFor(g.rho(), t, delta, ParseMode(f.mode), cfg));
  Json results{{"ma", {{"epsilon", ma}}}, {"ours", ToJson(ours)}};
  results["ours"]["mode"] = f.mode;
  results["gap"] = ma - ours.epsilon;
  if (g.subsampling_q().has_value()) {
    results["epochs"] = EpochsForIterations(*g.subsampling_q(), t);
  }
  return results;
}

// ---- max-t -----------------------------------------------------------------

struct MaxTFlags {
  GaussianFlags gaussian;
  std::optional<double> eps, delta;
  std::string mode = "closed_form";
  SearchFlags search;
};

void SetupMaxT(CLI::App* app, MaxTFlags* f) {
  f->gaussian.Register(app, true);
  AddReal(app, "--eps", &f->eps, "Privacy budget epsilon")->required();
  AddReal(app, "--delta", &f->delta, "DP delta in (0, 1)")->required();
  app->add_option("--mode", f->mode, "Accounting for our bound")
      ->capture_default_str()
      ->check(CLI::IsMember({"closed_form", "exact"}));
  f->search.Register(app);
}

Json RunMaxT(const MaxTFlags& f, Json* query) {
  const ScalarSearchConfig cfg = f.search.Config();
  const GaussianConfig g =
      MakeGaussian(f.gaussian.sigma, f.gaussian.sensitivity, f.gaussian.q);
  const double eps = *f.eps, delta = *f.delta;
  const AccountingMode mode = ParseMode(f.mode);
  *query = GaussianEcho(g);
  (*query)["eps"] = eps;
  (*query)["delta"] = delta;
  (*query)["mode"] = f.mode;
  (*query)["tolerances"] = f.search.Echo();

  const int64_t ours = OrFail(MaxIterations(g.rho(), eps, delta, mode, cfg));
  const int64_t ma = OrFail(MaMaxIterations(g.rho(), eps, delta));
  Json results{{"ours", {{"max_iterations", ours}}},
               {"ma", {{"max_iterations", ma}}},
               {"advantage", ours - ma}};
  // The accounted epsilon at the returned T, for a quick consistency check.
  if (ours > 0) {
    results["ours"]["epsilon_at_max"] =
        OrFail(CompositionEpsilonFor(g.rho(), static_cast<double>(ours),
                                     delta, mode, cfg))
            .epsilon;
  }
  if (ma > 0) {
    results["ma"]["epsilon_at_max"] =
        OrFail(MaEpsilon(g.rho(), static_cast<double>(ma), delta));
  }
  if (g.subsampling_q().has_value()) {
    const double q = *g.subsampling_q();
    results["ours"]["epochs"] = EpochsForIterations(q, ours);
    results["ma"]["epochs"] = EpochsForIterations(q, ma);
    results["advantage_epochs"] = EpochsForIterations(q, ours - ma);
  }
  return results;
}

// ---- variance --------------------------------------------------------------

struct VarianceFlags {
  int64_t iterations = 0;
  std::optional<double> eps, delta;
  SearchFlags search;
};

void SetupVariance(CLI::App* app, VarianceFlags* f) {
  app->add_option("--T", f->iterations, "Number of composed steps")
      ->required()
      ->check(CLI::PositiveNumber);
  AddReal(app, "--eps", &f->eps, "Target epsilon")->required();
  AddReal(app, "--delta", &f->delta, "Target delta in (0, 1)")->required();
  f->search.Register(app);
}

Json RunVariance(const VarianceFlags& f, Json* query) {
  const ScalarSearchConfig cfg = f.search.Config();
  const double t = static_cast<double>(f.iterations);
  const double eps = *f.eps, delta = *f.delta;
  *query = Json{{"T", f.iterations},
                {"eps", eps},
                {"delta", delta},
                {"tolerances", f.search.Echo()}};
  const RequiredVariance ours = OrFail(RequiredVarianceFor(t, eps, delta, cfg));
  const double ma = OrFail(MaRequiredVariance(t, eps, delta));
  Json results{{"ours",
                {{"variance", ours.variance},
                 {"alpha_opt", ours.alpha_opt},
                 {"alpha_star", ours.alpha_star},
                 {"plug_in_variance", Optional(ours.plug_in_variance)},
                 {"asymptotic_variance", ours.asymptotic_variance}}},
               {"ma", {{"variance", ma}}},
               {"reduction", ma - ours.variance},
               {"ratio", ours.variance / ma}};
  return results;
}

// ---- curve -----------------------------------------------------------------

struct CurveFlags {
  std::optional<int> fig;
  GaussianFlags gaussian;
  std::optional<double> delta;
  std::optional<int64_t> t_from, t_to;
  int64_t t_step = 1;
  std::vector<double> alphas, epsilons;
  double delta_from = 0.0;
  double delta_to = 0.5;
  int delta_points = 101;
  bool exact = false;
  std::string out;
  std::string format = "csv";
  SearchFlags search;
  std::vector<CLI::Option*> sweep_options;
};

void SetupCurve(CLI::App* app, CurveFlags* f) {
  app->add_option("--fig", f->fig, "Figure preset (1, 2, or 3)")
      ->check(CLI::IsMember({1, 2, 3}));
  f->gaussian.Register(app, false);
  f->sweep_options = {
      app->get_option("--sigma"), app->get_option("--sensitivity"),
      app->get_option("--q"),
      AddReal(app, "--delta", &f->delta, "DP delta in (0, 1)"),
      app->add_option("--t-from", f->t_from, "First T of the sweep")
          ->check(CLI::PositiveNumber),
      app->add_option("--t-to", f->t_to, "Last T of the sweep (inclusive)")
          ->check(CLI::PositiveNumber),
      app->add_option("--t-step", f->t_step, "Step between T values")
          ->capture_default_str()
          ->check(CLI::PositiveNumber),
  };
  AddRealList(app, "--alpha", &f->alphas,
              "Renyi orders for --fig 1 (paired with --eps)");
  AddRealList(app, "--eps", &f->epsilons, "Epsilons for --fig 1");
  app->add_option("--delta-from", f->delta_from, "First delta for --fig 1")
      ->capture_default_str();
  app->add_option("--delta-to", f->delta_to, "Last delta for --fig 1")
      ->capture_default_str();
  app->add_option("--delta-points", f->delta_points,
                  "Number of deltas for --fig 1")
      ->capture_default_str()
      ->check(CLI::Range(2, 1000000));
  app->add_flag("--exact", f->exact, "Add exact-accounting column(s)");
  app->add_option("--out", f->out, "Output file (default stdout)");
  app->add_option("--format", f->format, "csv or json")
      ->capture_default_str()
      ->check(CLI::IsMember({"csv", "json"}));
  f->search.Register(app);
}

constexpr int64_t kMaxCurveRows = 10'000'000;

Table GaussianTable(const GaussianConfig& g, double delta,
                    const std::vector<int64_t>& iterations, bool exact,
                    const ScalarSearchConfig& cfg) {
  const std::vector<CurveRow> rows =
      OrFail(PrivacyCurve(g, delta, iterations, exact, cfg));
  Table table;
  const bool epochs = g.subsampling_q().has_value();
  table.columns = {"T"};
  if (epochs) table.columns.push_back("epochs");
  for (const char* c : {"eps_ma", "eps_ours", "gap"}) table.columns.push_back(c);
  if (exact) table.columns.push_back("eps_ours_exact");
  for (const CurveRow& r : rows) {
    std::vector<Json> row{r.iterations};
    if (epochs) row.push_back(r.epochs.value_or(0.0));
    row.push_back(r.eps_ma);
    row.push_back(r.eps_ours);
    row.push_back(r.gap);
    if (exact) row.push_back(r.eps_ours_exact.value_or(NAN));
    table.rows.push_back(std::move(row));
  }
  return table;
}

Table DeltaSweepTable(const CurveFlags& f, const ScalarSearchConfig& cfg) {
  Table table;
  table.columns = {"alpha", "eps", "delta", "gamma_exact", "gamma_bound",
                   "bound_branch"};
  for (size_t k = 0; k < f.alphas.size(); ++k) {
    for (int i = 0; i < f.delta_points; ++i) {
      const double delta =
          f.delta_from + (f.delta_to - f.delta_from) *
                             (static_cast<double>(i) / (f.delta_points - 1));
      const ConversionResult exact =
          OrFail(GammaExact(f.alphas[k], f.epsilons[k], delta, cfg));
      const ConversionResult bound =
          OrFail(GammaBound(f.alphas[k], f.epsilons[k], delta));
      table.rows.push_back(
          {f.alphas[k], f.epsilons[k], delta, exact.value, bound.value,
           bound.active_branch.has_value()
               ? std::string(ToString(*bound.active_branch))
               : std::string("none")});
    }
  }
  return table;
}

Table RunCurveTable(const CurveFlags& f, Json* query) {
  const ScalarSearchConfig cfg = f.search.Config();
  *query = Json::object();
  if (f.fig == 1) {
    for (CLI::Option* o : f.sweep_options) {
      if (o->count() > 0) {
        Fail(kExitUsage, "curve: --fig 1 takes --alpha/--eps pairs and "
                         "--delta-from/--delta-to/--delta-points only");
      }
    }
    if (f.alphas.empty() || f.alphas.size() != f.epsilons.size()) {
      Fail(kExitUsage,
           "curve: --fig 1 needs matching, non-empty --alpha and --eps lists");
    }
    if (!(f.delta_from >= 0.0 && f.delta_from < f.delta_to &&
          f.delta_to < 1.0)) {
      Fail(kExitUsage, "curve: need 0 <= --delta-from < --delta-to < 1");
    }
    (*query)["fig"] = 1;
    (*query)["alpha"] = f.alphas;
    (*query)["eps"] = f.epsilons;
    (*query)["delta_from"] = f.delta_from;
    (*query)["delta_to"] = f.delta_to;
    (*query)["delta_points"] = f.delta_points;
    (*query)["tolerances"] = f.search.Echo();
    return DeltaSweepTable(f, cfg);
  }

  if (!f.alphas.empty() || !f.epsilons.empty()) {
    Fail(kExitUsage, "curve: --alpha/--eps apply to --fig 1 only");
  }
  std::optional<double> sigma, q, sensitivity;
  double delta = 0.0;
  int64_t from = 0, to = 0, step = 1;
  if (f.fig.has_value()) {
    for (CLI::Option* o : f.sweep_options) {
      if (o->count() > 0) {
        Fail(kExitUsage, "curve: figure presets fix sigma, q, delta, and T");
      }
    }
    delta = 1e-5;
    if (*f.fig == 2) {
      sigma = 20.0;
      from = 1, to = 1000, step = 1;
    } else {
      sigma = 4.0;
      q = 0.001;
      from = 1000, to = 400000, step = 1000;
    }
    (*query)["fig"] = *f.fig;
  } else {
    if (!f.gaussian.sigma || !f.delta || !f.t_from || !f.t_to) {
      Fail(kExitUsage,
           "curve: --sigma, --delta, --t-from, --t-to are required "
           "without --fig");
    }
    sigma = f.gaussian.sigma;
    q = f.gaussian.q;
    sensitivity = f.gaussian.sensitivity;
    delta = *f.delta;
    from = *f.t_from, to = *f.t_to, step = f.t_step;
    (*query)["fig"] = nullptr;
  }
  if (from > to) {
    Fail(kExitUsage, absl::StrCat("curve: empty sweep, --t-from ", from,
                                  " exceeds --t-to ", to));
  }
  if ((to - from) / step + 1 > kMaxCurveRows) {
    Fail(kExitUsage, absl::StrCat("curve: sweep exceeds ", kMaxCurveRows,
                                  " rows"));
  }
  const GaussianConfig g = MakeGaussian(sigma, sensitivity, q);
  std::vector<int64_t> iterations;
  for (int64_t t = from; t <= to; t += step) iterations.push_back(t);

  query->update(GaussianEcho(g));
  (*query)["delta"] = delta;
  (*query)["t_from"] = from;
  (*query)["t_to"] = to;
  (*query)["t_step"] = step;
  (*query)["exact"] = f.exact;
  (*query)["tolerances"] = f.search.Echo();
  return GaussianTable(g, delta, iterations, f.exact, cfg);
}

// ---- oracle-check ----------------------------------------------------------

struct OracleFlags {
  std::optional<double> alpha, eps, delta;
  int grid_n = GridSpec{}.n_coarse;
  double refine_window = GridSpec{}.refine_window;
  int64_t samples = 100000;
  uint64_t seed = kDefaultOracleSeed;
  bool timing = false;
};

void SetupOracle(CLI::App* app, OracleFlags* f) {
  AddReal(app, "--alpha", &f->alpha, "Renyi order alpha > 1")->required();
  AddReal(app, "--eps", &f->eps, "DP epsilon")->required();
  AddReal(app, "--delta", &f->delta, "DP delta in [0, 1)")->required();
  app->add_option("--grid-n", f->grid_n,
                  "Cells per axis of the coarse and refined scans")
      ->capture_default_str()
      ->check(CLI::Range(64, 1 << 16));
  app->add_option("--refine-window", f->refine_window,
                  "p refinement window as a fraction of the logit domain")
      ->capture_default_str();
  app->add_option("--samples", f->samples, "Containment samples")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);
  app->add_option("--seed", f->seed, "Containment sampling seed")
      ->capture_default_str();
  app->add_flag("--timing", f->timing,
                "Record wall time in the output metadata");
}

// ---- driver ----------------------------------------------------------------

bool FlagPresent(const std::vector<std::string>& args, const std::string& key) {
  const std::string flag = "--" + key;
  return std::any_of(args.begin(), args.end(), [&](const std::string& a) {
    return a == flag || a.rfind(flag + "=", 0) == 0;
  });
}

// Appends key=value lines from the --config file as flags, skipping keys that
// were given on the command line. Removes --config itself from `args`.
void ApplyConfig(std::vector<std::string>* args) {
  std::optional<std::string> path;
  for (size_t i = 1; i < args->size(); ++i) {
    std::string& a = (*args)[i];
    if (a == "--config") {
      if (i + 1 >= args->size()) Fail(kExitUsage, "--config needs a path");
      path = (*args)[i + 1];
      args->erase(args->begin() + i, args->begin() + i + 2);
      break;
    }
    if (a.rfind("--config=", 0) == 0) {
      path = a.substr(9);
      args->erase(args->begin() + i);
      break;
    }
  }
  if (!path.has_value()) return;

  std::ifstream in(*path);
  if (!in) Fail(kExitIo, "cannot read config file " + *path);
  const std::vector<std::string> given = *args;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    absl::string_view text = absl::StripAsciiWhitespace(line);
    if (text.empty() || text[0] == '#') continue;
    const size_t eq = text.find('=');
    if (eq == absl::string_view::npos) {
      Fail(kExitUsage, absl::StrCat(*path, ":", line_no,
                                    ": expected key=value"));
    }
    std::string key(absl::StripAsciiWhitespace(text.substr(0, eq)));
    std::string value(absl::StripAsciiWhitespace(text.substr(eq + 1)));
    if (key.rfind("--", 0) == 0) key.erase(0, 2);
    if (key.empty()) {
      Fail(kExitUsage, absl::StrCat(*path, ":", line_no, ": empty key"));
    }
    if (FlagPresent(given, key)) continue;
    if (BooleanFlags().count(key) > 0) {
      if (value == "true" || value == "1") {
        args->push_back("--" + key);
      } else if (value != "false" && value != "0") {
        Fail(kExitUsage, absl::StrCat(*path, ":", line_no, ": ", key,
                                      " takes true or false"));
      }
      continue;
    }
    args->push_back("--" + key);
    args->push_back(value);
  }
}

Json Record(const std::string& command, Json query, Json results,
            std::optional<uint64_t> seed, std::optional<double> wall_time) {
  Json metadata{{"tool_version", kToolVersion}};
  metadata["seed"] = seed.has_value() ? Json(*seed) : Json(nullptr);
  if (wall_time.has_value()) metadata["wall_time_s"] = *wall_time;
  return Json{{"command", command},
              {"query", std::move(query)},
              {"results", std::move(results)},
              {"metadata", std::move(metadata)}};
}

void WriteText(const std::string& path, const std::string& text,
               std::ostream& out) {
  if (path.empty() || path == "-") {
    out << text;
    return;
  }
  std::ofstream file(path, std::ios::binary | std::ios::trunc);
  if (!file) Fail(kExitIo, "cannot open output file " + path);
  file << text;
  file.close();
  if (!file) Fail(kExitIo, "failed writing output file " + path);
}

}  // namespace

int Run(const std::vector<std::string>& input_args, std::ostream& out,
        std::ostream& err) {
  std::vector<std::string> args = input_args;
  if (args.empty()) args.push_back("rdpdp");
  try {
    ApplyConfig(&args);
  } catch (const CommandError& e) {
    err << "error: " << e.message << "\n";
    return e.code;
  }

  CLI::App app{"Optimal RDP to DP conversion and Gaussian composition "
               "accounting",
               "rdpdp"};
  app.set_version_flag("--version", kToolVersion);
  app.require_subcommand(1);

  ConvertFlags convert;
  ComposeFlags compose;
  MaxTFlags max_t;
  VarianceFlags variance;
  CurveFlags curve;
  OracleFlags oracle;
  CLI::App* convert_cmd = app.add_subcommand(
      "convert", "Convert between (alpha, gamma)-RDP and (eps, delta)-DP");
  CLI::App* compose_cmd = app.add_subcommand(
      "compose", "Epsilon of T-fold Gaussian composition");
  CLI::App* max_t_cmd = app.add_subcommand(
      "max-t", "Largest T that fits an (eps, delta) budget");
  CLI::App* variance_cmd = app.add_subcommand(
      "variance", "Noise variance needed for (eps, delta)-DP after T steps");
  CLI::App* curve_cmd = app.add_subcommand(
      "curve", "Emit a sweep table (CSV or JSON)");
  CLI::App* oracle_cmd = app.add_subcommand(
      "oracle-check", "Validate the exact conversion by brute force");
  SetupConvert(convert_cmd, &convert);
  SetupCompose(compose_cmd, &compose);
  SetupMaxT(max_t_cmd, &max_t);
  SetupVariance(variance_cmd, &variance);
  SetupCurve(curve_cmd, &curve);
  SetupOracle(oracle_cmd, &oracle);

  std::vector<const char*> argv;
  argv.reserve(args.size());
  for (const std::string& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  const auto start = std::chrono::steady_clock::now();
  auto elapsed = [&start]() {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                         start)
        .count();
  };
  try {
    Json query;
    if (convert_cmd->parsed()) {
      Json results = RunConvert(convert, &query);
      out << Record("convert", std::move(query), std::move(results),
                    std::nullopt,
                    convert.search.timing ? std::optional(elapsed())
                                          : std::nullopt)
                 .dump(2)
          << "\n";
    } else if (compose_cmd->parsed()) {
      Json results = RunCompose(compose, &query);
      out << Record("compose", std::move(query), std::move(results),
                    std::nullopt,
                    compose.search.timing ? std::optional(elapsed())
                                          : std::nullopt)
                 .dump(2)
          << "\n";
    } else if (max_t_cmd->parsed()) {
      Json results = RunMaxT(max_t, &query);
      out << Record("max-t", std::move(query), std::move(results),
                    std::nullopt,
                    max_t.search.timing ? std::optional(elapsed())
                                        : std::nullopt)
                 .dump(2)
          << "\n";
    } else if (variance_cmd->parsed()) {
      Json results = RunVariance(variance, &query);
      out << Record("variance", std::move(query), std::move(results),
                    std::nullopt,
                    variance.search.timing ? std::optional(elapsed())
                                           : std::nullopt)
                 .dump(2)
          << "\n";
    } else if (curve_cmd->parsed()) {
      const Table table = RunCurveTable(curve, &query);
      query["format"] = curve.format;
      std::string text;
      if (curve.format == "csv") {
        text = table.Csv();
      } else {
        text = Record("curve", std::move(query), table.ToJson(), std::nullopt,
                      curve.search.timing ? std::optional(elapsed())
                                          : std::nullopt)
                   .dump(2) +
               "\n";
      }
      WriteText(curve.out, text, out);
    } else if (oracle_cmd->parsed()) {
      GridSpec grid;
      grid.n_coarse = oracle.grid_n;
      grid.n_refine = oracle.grid_n;
      grid.refine_window = oracle.refine_window;
      if (absl::Status s = grid.Validate(); !s.ok()) {
        Fail(kExitUsage, std::string(s.message()));
      }
      const OracleReport report =
          OrFail(RunOracleCheck(*oracle.alpha, *oracle.eps, *oracle.delta,
                                grid, oracle.samples, oracle.seed));
      query = Json{{"alpha", *oracle.alpha},
                   {"eps", *oracle.eps},
                   {"delta", *oracle.delta},
                   {"grid_n", oracle.grid_n},
                   {"refine_window", oracle.refine_window},
                   {"samples", oracle.samples},
                   {"tolerances",
                    {{"gamma", kOracleGammaTolerance},
                     {"q_star", kOracleQStarTolerance},
                     {"containment_relative", 1e-8}}}};
      out << Record("oracle-check", std::move(query),
                    Json::parse(OracleReportJson(report)), oracle.seed,
                    oracle.timing ? std::optional(elapsed()) : std::nullopt)
                 .dump(2)
          << "\n";
      if (!report.passed()) {
        err << "error: oracle-check failed: "
            << absl::StrJoin(report.failures, ", ") << "\n";
        return kExitValidation;
      }
    }
  } catch (const CommandError& e) {
    err << "error: " << e.message << "\n";
    return e.code;
  }
  return kExitOk;
}

}  // namespace rdpdp::cli
