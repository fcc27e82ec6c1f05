#pragma once

// Batch experiments: a JSON config describes a k-sweep of one error quantity,
// the runner produces a report (JSON tree + flat CSV).
//
// Config keys (strict, unknown keys are rejected):
//   experiment    product | intertwine | trace | riemann | norm_bound | torus_relations | star_table
//   n             dimension, default 1
//   k_min, k_max  sweep bounds, defaults 8 and 256 (k_min >= 2)
//   k_rule        "pow2" (default) or "linear"
//   k_step        increment for the linear rule, default 1
//   k             single level for `assemble`, default k_min
//   order         truncation order N, default 1, at most 16
//   f, g          function specs (see FunctionSpec)
//   seed          unsigned 64-bit, default 0
//   norms         list of norm kinds, default ["l2_operator"]
//   sign          sign of the Berezin exponent for intertwine, default -1
//   decay_power   r in the "error * k^r decreasing" check, default 4
//   polarization  "P_T" (default) or "P_Tcheck", used by `assemble`
//   orientation   "star" (default), "check_star" or "moyal", used by star_table
//   output        {"report": file, "csv": file}, defaults <experiment>_report.json / <experiment>.csv

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

#include "torusquant/analysis.hpp"
#include "torusquant/expr.hpp"
#include "torusquant/quantization.hpp"
#include "torusquant/star_products.hpp"
#include "torusquant/trig_poly.hpp"

namespace torusquant {

using Json = nlohmann::ordered_json;

/// Schema violation; the message starts with the offending field path.
class ConfigError : public std::invalid_argument {
 public:
  ConfigError(const std::string& path, const std::string& message)
      : std::invalid_argument(path + ": " + message), path_(path) {}
  const std::string& path() const { return path_; }

 private:
  std::string path_;
};

enum class ExperimentKind { kProduct, kIntertwine, kTrace, kRiemann, kNormBound, kTorusRelations, kStarTable };

std::string_view to_string(ExperimentKind kind);
ExperimentKind experiment_kind_from_string(std::string_view name);

// A function on the torus, in one of three forms:
//   {"coefficients": [{"p": [..], "q": [..], "re": x, "im": y}, ...]}
//   {"expr": "...", "imag": "...", "bandwidth": B, "grid": M}   (a bare string means {"expr": s})
//   {"random": {"bandwidth": B}}                                  (drawn from the experiment seed)
struct FunctionSpec {
  enum class Source { kCoefficients, kExpression, kRandom };

  Source source = Source::kCoefficients;
  TrigPoly::CoeffMap coefficients;
  std::string expr_text;
  std::string imag_text;  // empty when real-valued
  std::optional<ExprAst> real_part;
  std::optional<ExprAst> imag_part;
  ProjectionSpec projection{8, 36};
  int random_bandwidth = 1;

  /// The function as a trigonometric polynomial; random specs consume draws from rng.
  TrigPoly materialize(int n, RandomSource& rng) const;
  Json to_json() const;
};

struct ExperimentConfig {
  ExperimentKind kind = ExperimentKind::kProduct;
  int n = 1;
  int k_min = 8;
  int k_max = 256;
  bool k_pow2 = true;
  int k_step = 1;
  std::optional<int> k;
  int order = 1;
  std::optional<FunctionSpec> f;
  std::optional<FunctionSpec> g;
  std::uint64_t seed = 0;
  std::vector<NormKind> norms{NormKind::kL2};
  int sign = -1;
  double decay_power = 4.0;
  Polarization polarization = Polarization::kT;
  Orientation orientation = Orientation::kStar;
  std::string report_file;
  std::string csv_file;

  /// Levels visited by the sweep, strictly increasing.
  std::vector<int> levels() const;
  /// Normalized tree with every default filled in; the report echoes this.
  Json to_json() const;
};

ExperimentConfig parse_config(const Json& tree);
ExperimentConfig parse_config_text(std::string_view text);

/// FNV-1a 64 of the compact dump, as 16 hex digits.
std::string config_hash(const Json& config_echo);

/// norm_kind is a NormKind name, or "scalar" for trace and Riemann-sum errors.
struct ReportRow {
  int k = 0;
  double hbar = 0.0;
  double error = 0.0;
  std::string norm_kind;
};

struct FitSummary {
  std::string norm_kind;
  SlopeFit fit;
};

struct ConvergenceReport {
  ExperimentConfig config;
  std::vector<ReportRow> rows;  // sorted by (k, norm)
  std::vector<FitSummary> fits;
  std::optional<double> expected_slope;
  bool pass = false;
  std::string status;           // "pass", "fail" or "exact identity"
  std::vector<std::string> notes;
  Json extra = Json::object();  // experiment-specific summary fields
  Json table = Json::array();   // star_table only
  std::string started;          // ISO 8601 UTC
  double wall_time_s = 0.0;
};

/// Runs the sweep; cells are computed on up to `threads` workers and gathered in k order.
ConvergenceReport run_experiment(const ExperimentConfig& config, int threads = 1);

/// Report tree; everything but the "timestamp" member is deterministic given the config.
Json report_to_json(const ConvergenceReport& report);

/// Header "k,hbar,error,norm_kind", one line per row.
void write_report_csv(std::ostream& out, const ConvergenceReport& report);

/// Table of C_i(f, g) coefficients, one entry per (order, p, q).
Json star_table(const TrigPoly& f, const TrigPoly& g, int order, Orientation o);

/// Shared helpers for the CLI and checks.
std::string format_double(double v);
std::string utc_timestamp();

}  // namespace torusquant
