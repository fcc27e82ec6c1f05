#include "torusquant/experiment.hpp"

#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>

#include <gtest/gtest.h>

namespace torusquant {
namespace {

std::string read_golden(const std::string& name) {
  std::ifstream in(std::string(TORUSQUANT_GOLDEN_DIR) + "/" + name);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Json strip_timestamp(Json report) {
  report.erase("timestamp");
  return report;
}

std::string config_error_path(const std::string& text) {
  try {
    parse_config_text(text);
  } catch (const ConfigError& e) {
    return e.path();
  }
  return "<no error>";
}

const char* kExactProduct = R"j({
  "experiment": "product",
  "k_min": 2, "k_max": 8,
  "order": 2,
  "f": {"coefficients": [{"p": [0], "q": [0], "re": 1}]},
  "g": {"coefficients": [{"p": [1], "q": [-1], "re": 0.5, "im": -0.25}, {"p": [0], "q": [2], "re": 2}]},
  "norms": ["l2_operator", "l1_operator", "linf_operator"],
  "seed": 7
})j";

TEST(Config, MinimalProductGetsDefaults) {
  const ExperimentConfig c = parse_config_text(R"j({"experiment": "product", "f": "cos(2*pi*x1)", "g": "sin(2*pi*y1)"})j");
  EXPECT_EQ(c.kind, ExperimentKind::kProduct);
  EXPECT_EQ(c.n, 1);
  EXPECT_EQ(c.k_min, 8);
  EXPECT_EQ(c.k_max, 256);
  EXPECT_EQ(c.order, 1);
  EXPECT_EQ(c.seed, 0u);
  ASSERT_EQ(c.norms.size(), 1u);
  EXPECT_EQ(c.norms[0], NormKind::kL2);
  EXPECT_EQ(c.levels(), (std::vector<int>{8, 16, 32, 64, 128, 256}));
  EXPECT_EQ(c.report_file, "product_report.json");
  EXPECT_EQ(c.csv_file, "product.csv");
}

TEST(Config, ValidationNamesTheField) {
  EXPECT_EQ(config_error_path(R"j({"experiment": "trace", "f": "1", "k_min": 1})j"), "k_min");
  EXPECT_EQ(config_error_path(R"j({"experiment": "trace", "f": "1", "order": 17})j"), "order");
  EXPECT_EQ(config_error_path(R"j({"experiment": "trace", "f": "1", "bogus": 3})j"), "bogus");
  EXPECT_EQ(config_error_path(R"j({"experiment": "nope"})j"), "experiment");
  EXPECT_EQ(config_error_path(R"j({"n": 1})j"), "experiment");
  EXPECT_EQ(config_error_path(R"j({"experiment": "product", "f": "1"})j"), "g");
  EXPECT_EQ(config_error_path(R"j({"experiment": "trace", "f": "1", "g": "1"})j"), "g");
  EXPECT_EQ(config_error_path(R"j({"experiment": "trace", "f": "sin(2*pi*x2)"})j"), "f");
  EXPECT_EQ(config_error_path(R"j({"experiment": "trace", "f": {"expr": "1 + * 2"}})j"), "f.expr");
  EXPECT_EQ(config_error_path(R"j({"experiment": "trace", "f": {"coefficients": [{"p": [0, 1], "q": [0]}]}})j"),
            "f.coefficients[0].p");
  EXPECT_EQ(config_error_path(R"j({"experiment": "trace", "f": {"coefficients": [{"p": [0], "q": [0], "x": 1}]}})j"),
            "f.coefficients[0].x");
  EXPECT_EQ(config_error_path(R"j({"experiment": "trace", "f": {"random": {"bandwidth": 2, "size": 1}}})j"),
            "f.random.size");
  EXPECT_EQ(config_error_path(R"j({"experiment": "trace", "f": {"expr": "1", "bandwidth": 8, "grid": 10}})j"), "f.grid");
  EXPECT_EQ(config_error_path(R"j({"experiment": "product", "f": "1", "g": "1", "k_max": 8192})j"), "k_max");
  EXPECT_EQ(config_error_path(R"j({"experiment": "product", "f": "1", "g": "1", "norms": ["l3"]})j"), "norms[0]");
  EXPECT_EQ(config_error_path(R"j({"experiment": "trace", "f": "1", "output": {"pdf": "x"}})j"), "output.pdf");
  EXPECT_EQ(config_error_path("{not json"), "<root>");
}

TEST(Config, SineExpressionProjectsToThePlusMinusOnePair) {
  const ExperimentConfig c = parse_config_text(R"j({"experiment": "trace", "f": "sin(2*pi*x1)"})j");
  RandomSource rng(0);
  const TrigPoly f = c.f->materialize(1, rng);
  EXPECT_EQ(f.support_size(), 2u);
  EXPECT_NEAR(std::abs(f.coeff({{1}, {0}}) - Complex(0.0, -0.5)), 0.0, 1e-14);
  EXPECT_NEAR(std::abs(f.coeff({{-1}, {0}}) - Complex(0.0, 0.5)), 0.0, 1e-14);
}

TEST(Config, LinearLevelsAndEchoRoundTrip) {
  const ExperimentConfig c = parse_config_text(
      R"j({"experiment": "riemann", "f": {"expr": "exp(cos(2*pi*y1))", "bandwidth": 10}, "k_min": 3, "k_max": 11,
          "k_rule": "linear", "k_step": 4, "seed": 18446744073709551615})j");
  EXPECT_EQ(c.levels(), (std::vector<int>{3, 7, 11}));
  EXPECT_EQ(c.seed, 18446744073709551615ULL);
  EXPECT_EQ(c.f->projection.grid, 44);
  const Json echo = c.to_json();
  EXPECT_EQ(parse_config(echo).to_json(), echo);
  EXPECT_EQ(config_hash(echo), config_hash(parse_config(echo).to_json()));
}

TEST(Config, HashIsFnv1a) {
  EXPECT_EQ(config_hash(Json::object()), "08f44b07b5901a25");  // FNV-1a 64 of "{}"
}

TEST(Run, ProductWithConstantIsExactIdentity) {
  const ConvergenceReport r = run_experiment(parse_config_text(kExactProduct));
  EXPECT_TRUE(r.pass);
  EXPECT_EQ(r.status, "exact identity");
  ASSERT_EQ(r.rows.size(), 9u);
  for (const auto& row : r.rows) EXPECT_EQ(row.error, 0.0);
}

TEST(Run, ReportHashMatchesEchoedConfig) {
  const Json report = report_to_json(run_experiment(parse_config_text(kExactProduct)));
  EXPECT_EQ(report["config_hash"].get<std::string>(), config_hash(report["config"]));
  EXPECT_EQ(report["seed"].get<std::uint64_t>(), 7u);
}

TEST(Run, GoldenReportAndCsv) {
  const ConvergenceReport r = run_experiment(parse_config_text(kExactProduct));
  EXPECT_EQ(strip_timestamp(report_to_json(r)).dump(2) + "\n", read_golden("product_exact_report.json"));
  std::ostringstream csv;
  write_report_csv(csv, r);
  EXPECT_EQ(csv.str(), read_golden("product_exact.csv"));
  const Json full = report_to_json(r);
  ASSERT_TRUE(full.contains("timestamp"));
  EXPECT_TRUE(full["timestamp"].contains("started"));
  EXPECT_TRUE(full["timestamp"].contains("wall_time_s"));
}

TEST(Run, DeterministicAcrossRunsAndThreadCounts) {
  const ExperimentConfig c = parse_config_text(
      R"j({"experiment": "product", "f": {"random": {"bandwidth": 1}}, "g": {"random": {"bandwidth": 1}},
          "k_min": 4, "k_max": 64, "order": 1, "seed": 99, "norms": ["l2_operator", "l1_operator"]})j");
  const Json a = strip_timestamp(report_to_json(run_experiment(c, 1)));
  const Json b = strip_timestamp(report_to_json(run_experiment(c, 1)));
  const Json t = strip_timestamp(report_to_json(run_experiment(c, 3)));
  EXPECT_EQ(a.dump(), b.dump());
  EXPECT_EQ(a.dump(), t.dump());
  // Rows sorted by k.
  int previous = 0;
  for (const auto& row : a["rows"]) {
    EXPECT_GE(row["k"].get<int>(), previous);
    previous = row["k"].get<int>();
  }
}

TEST(Run, TorusRelationsPass) {
  const ConvergenceReport r = run_experiment(
      parse_config_text(R"j({"experiment": "torus_relations", "k_min": 2, "k_max": 64, "k_rule": "linear"})j"));
  EXPECT_TRUE(r.pass);
  EXPECT_EQ(r.rows.size(), 63u);
  for (const auto& row : r.rows) EXPECT_LE(row.error, 1e-12);
  EXPECT_EQ(r.extra["sign"].get<int>(), -1);
}

TEST(Run, TraceOnBandLimitedInputIsZeroBeyondBandwidth) {
  const ConvergenceReport r = run_experiment(parse_config_text(
      R"j({"experiment": "trace", "n": 2, "f": {"random": {"bandwidth": 2}}, "k_min": 3, "k_max": 12, "k_rule": "linear", "seed": 5})j"));
  EXPECT_TRUE(r.pass) << report_to_json(r).dump(2);
  for (const auto& row : r.rows) EXPECT_LE(row.error, 1e-12);
  EXPECT_TRUE(r.extra["exact_beyond_bandwidth"].get<bool>());
}

TEST(Run, RiemannOnSmoothProfileDecays) {
  const ConvergenceReport r = run_experiment(parse_config_text(
      R"j({"experiment": "riemann", "f": {"expr": "exp(cos(2*pi*y1))", "bandwidth": 24}, "k_min": 2, "k_max": 128})j"));
  EXPECT_TRUE(r.pass) << report_to_json(r).dump(2);
  // At k = 2 every even harmonic aliases onto the mean.
  double aliased = 0.0;
  for (int j = 1; j <= 12; ++j) aliased += 2.0 * std::cyl_bessel_i(2.0 * j, 1.0);
  EXPECT_NEAR(r.rows[0].error, aliased, 1e-12);
  EXPECT_THROW(run_experiment(parse_config_text(R"j({"experiment": "riemann", "f": "cos(2*pi*x1)"})j")),
               std::invalid_argument);
}

TEST(Run, NormBoundHolds) {
  const ConvergenceReport r = run_experiment(parse_config_text(
      R"j({"experiment": "norm_bound", "f": {"random": {"bandwidth": 2}}, "k_min": 2, "k_max": 128, "seed": 3})j"));
  EXPECT_TRUE(r.pass);
  EXPECT_LE(r.extra["max_norm"].get<double>(), r.extra["bound"].get<double>());
}

TEST(Run, IntertwineSignMatters) {
  const std::string base =
      R"j({"experiment": "intertwine", "f": {"random": {"bandwidth": 1}}, "order": 1, "k_min": 8, "k_max": 256, "seed": 11, "sign": )j";
  const ConvergenceReport good = run_experiment(parse_config_text(base + "-1}"));
  const ConvergenceReport bad = run_experiment(parse_config_text(base + "1}"));
  EXPECT_TRUE(good.pass);
  EXPECT_FALSE(bad.pass);
  EXPECT_EQ(report_to_json(good)["summary"]["berezin_exponent"], "-hbar*Delta");
}

TEST(StarTable, MonomialCoefficients) {
  const Json table = star_table(TrigPoly::monomial({0}, {1}), TrigPoly::monomial({1}, {0}), 3, Orientation::kStar);
  ASSERT_EQ(table.size(), 4u);
  double factorial = 1.0;
  for (int i = 0; i <= 3; ++i) {
    if (i > 0) factorial *= i;
    const Complex expected = std::pow(Complex(0.0, 2.0 * std::numbers::pi), i) / factorial;
    const Json& row = table[i];
    EXPECT_EQ(row["order"].get<int>(), i);
    EXPECT_NEAR(row["re"].get<double>(), expected.real(), 1e-9);
    EXPECT_NEAR(row["im"].get<double>(), expected.imag(), 1e-9);
  }
  const ConvergenceReport r = run_experiment(parse_config_text(
      R"j({"experiment": "star_table", "f": "cos(2*pi*y1)", "g": "cos(2*pi*x1)", "order": 2, "orientation": "moyal"})j"));
  EXPECT_TRUE(r.pass);
  EXPECT_FALSE(r.table.empty());
  EXPECT_TRUE(report_to_json(r).contains("table"));
}

}  // namespace
}  // namespace torusquant
