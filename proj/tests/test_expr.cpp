#include "torusquant/expr.hpp"

#include <cmath>
#include <cstdio>
#include <numbers>
#include <string>

#include <gtest/gtest.h>

#include "torusquant/analysis.hpp"

namespace torusquant {
namespace {

using Kind = ExprAst::Kind;

ExprAst node(Kind kind, std::vector<ExprAst> children = {}, double value = 0.0, int index = 0) {
  return ExprAst{kind, value, index, std::move(children)};
}

TEST(Parse, SineOfScaledVariable) {
  const ExprAst expected = node(
      Kind::kSin, {node(Kind::kMul, {node(Kind::kMul, {node(Kind::kConstant, {}, 2.0), node(Kind::kPi)}),
                                     node(Kind::kVarX, {}, 0.0, 1)})});
  EXPECT_EQ(parse("sin(2*pi*x1)"), expected);
  EXPECT_EQ(parse("  sin ( 2 * pi * x1 ) "), expected);
}

TEST(Parse, ProductOfFunctions) {
  const ExprAst a = parse("exp(cos(2*pi*x1))*cos(2*pi*y1)");
  ASSERT_EQ(a.kind, Kind::kMul);
  EXPECT_EQ(a.children[0].kind, Kind::kExp);
  EXPECT_EQ(a.children[0].children[0].kind, Kind::kCos);
  EXPECT_EQ(a.children[1].kind, Kind::kCos);
  EXPECT_EQ(a.max_variable_index(), 1);
}

TEST(Parse, PowerBindsTighterThanUnaryMinus) {
  const ExprAst a = parse("-x1^2");
  ASSERT_EQ(a.kind, Kind::kNeg);
  EXPECT_EQ(a.children[0].kind, Kind::kPow);
  EXPECT_EQ(a.children[0].index, 2);
  EXPECT_DOUBLE_EQ(evaluate_ast(a, std::vector{3.0}, std::vector{0.0}).real(), -9.0);
  EXPECT_DOUBLE_EQ(evaluate_ast(parse("2^3^2"), {}, {}).real(), 512.0);
  EXPECT_DOUBLE_EQ(evaluate_ast(parse("2^-1"), {}, {}).real(), 0.5);
  EXPECT_DOUBLE_EQ(evaluate_ast(parse("1 - 2 - 3"), {}, {}).real(), -4.0);
  EXPECT_DOUBLE_EQ(evaluate_ast(parse("8 / 4 / 2"), {}, {}).real(), 1.0);
  EXPECT_DOUBLE_EQ(evaluate_ast(parse("1 + 2 * 3"), {}, {}).real(), 7.0);
  EXPECT_DOUBLE_EQ(evaluate_ast(parse("1.5e1"), {}, {}).real(), 15.0);
}

TEST(Parse, UnknownIdentifierReportsPosition) {
  try {
    parse("sin(2*pi*z1)");
    FAIL() << "expected ParseError";
  } catch (const ParseError& e) {
    EXPECT_EQ(e.position(), 10u);
    EXPECT_NE(std::string(e.what()).find("unknown identifier 'z1'"), std::string::npos);
  }
}

TEST(Parse, SyntaxErrorsCarryOneBasedPosition) {
  try {
    parse("1 + * 2");
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_EQ(e.position(), 5u);
  }
  EXPECT_THROW(parse("(1 + 2"), ParseError);
  EXPECT_THROW(parse("1 2"), ParseError);
  EXPECT_THROW(parse(""), ParseError);
  EXPECT_THROW(parse("x1^y1"), ParseError);
  EXPECT_THROW(parse("x1^0.5"), ParseError);
  EXPECT_THROW(parse("x0"), ParseError);
}

TEST(Parse, ArityErrors) {
  EXPECT_THROW(parse("sin(x1, y1)"), ParseError);
  EXPECT_THROW(parse("sin()"), ParseError);
  EXPECT_THROW(parse("sin x1"), ParseError);
  EXPECT_THROW(parse("pi(2)"), ParseError);
  try {
    parse("cos(1,2)");
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_NE(std::string(e.what()).find("expects 1 argument"), std::string::npos);
  }
}

// Random expression generator for the print/parse round trip.
ExprAst random_ast(RandomSource& rng, int depth) {
  const int choice = depth <= 0 ? rng.uniform_int(0, 3) : rng.uniform_int(0, 12);
  switch (choice) {
    case 0:
      return node(Kind::kConstant, {}, std::round(rng.uniform01() * 1000.0) / 64.0);
    case 1:
      return node(Kind::kPi);
    case 2:
      return node(Kind::kVarX, {}, 0.0, rng.uniform_int(1, 3));
    case 3:
      return node(Kind::kVarY, {}, 0.0, rng.uniform_int(1, 3));
    case 4:
      return node(Kind::kNeg, {random_ast(rng, depth - 1)});
    case 5:
      return node(Kind::kSin, {random_ast(rng, depth - 1)});
    case 6:
      return node(Kind::kCos, {random_ast(rng, depth - 1)});
    case 7:
      return node(Kind::kExp, {random_ast(rng, depth - 1)});
    case 8:
      return node(Kind::kPow, {random_ast(rng, depth - 1)}, 0.0, rng.uniform_int(-3, 4));
    default: {
      const Kind ops[] = {Kind::kAdd, Kind::kSub, Kind::kMul, Kind::kDiv};
      return node(ops[choice - 9 < 4 ? choice - 9 : 0], {random_ast(rng, depth - 1), random_ast(rng, depth - 1)});
    }
  }
}

TEST(Parse, PrintParseRoundTrip) {
  RandomSource rng(2024);
  for (int trial = 0; trial < 300; ++trial) {
    const ExprAst a = random_ast(rng, 4);
    const std::string text = to_string(a);
    EXPECT_EQ(parse(text), a) << text;
  }
  for (const char* s : {"sin(2*pi*x1)", "-x1^2 + 3/y2", "exp(cos(2*pi*x1))*cos(2*pi*y1)", "((x1))^-2"}) {
    const ExprAst a = parse(s);
    EXPECT_EQ(parse(to_string(a)), a) << s;
  }
}

TEST(EvaluateAst, Examples) {
  EXPECT_NEAR(evaluate_ast(parse("sin(2*pi*x1)"), std::vector{0.25}, std::vector{0.0}).real(), 1.0, 1e-15);
  EXPECT_NEAR(evaluate_ast(parse("exp(cos(2*pi*x1))"), std::vector{0.0}, std::vector{0.0}).real(), std::numbers::e, 1e-15);
  EXPECT_EQ(evaluate_ast(parse("pi"), {}, {}), Complex(std::numbers::pi));
}

TEST(EvaluateAst, DivisionByZeroIsReported) {
  EXPECT_THROW(evaluate_ast(parse("1/x1"), std::vector{0.0}, std::vector{0.0}), EvalError);
  EXPECT_THROW(evaluate_ast(parse("x1^-1"), std::vector{0.0}, std::vector{0.0}), EvalError);
  EXPECT_THROW(project(parse("1/sin(2*pi*x1)"), 1, ProjectionSpec::with_default_grid(2)), EvalError);
}

TEST(Project, SineIsExactlyTheTwoCharacters) {
  const TrigPoly p = project(parse("sin(2*pi*x1)"), 1, {1, 8});
  EXPECT_EQ(p.support_size(), 2u);
  const Complex half_over_i = 1.0 / Complex(0.0, 2.0);
  EXPECT_NEAR(std::abs(p.coeff({{1}, {0}}) - half_over_i), 0.0, 1e-15);
  EXPECT_NEAR(std::abs(p.coeff({{-1}, {0}}) + half_over_i), 0.0, 1e-15);
}

TEST(Project, ConstantProjectsToConstant) {
  for (const ProjectionSpec spec : {ProjectionSpec{0, 2}, ProjectionSpec{3, 16}}) {
    const TrigPoly p = project(parse("1"), 2, spec);
    EXPECT_EQ(p.support_size(), 1u);
    EXPECT_NEAR(std::abs(p.constant_term() - 1.0), 0.0, 1e-15);
  }
}

// Composite Simpson rule on a fine grid; independent of the DFT path.
double simpson(const std::function<double(double)>& f, int intervals) {
  const double h = 1.0 / intervals;
  double s = f(0.0) + f(1.0);
  for (int i = 1; i < intervals; ++i) s += (i % 2 ? 4.0 : 2.0) * f(i * h);
  return s * h / 3.0;
}

TEST(Project, ExpCosMeanMatchesQuadrature) {
  const TrigPoly p = project(parse("exp(cos(2*pi*x1))"), 1, {8, 64});
  const double oracle = simpson([](double x) { return std::exp(std::cos(2.0 * std::numbers::pi * x)); }, 20000);
  EXPECT_NEAR(p.constant_term().real(), oracle, 1e-12);
  EXPECT_NEAR(oracle, std::cyl_bessel_i(0.0, 1.0), 1e-12);
  // Higher modes: the Fourier cosine coefficient of e^{cos} is the Bessel value I_p(1).
  for (int m = 1; m <= 4; ++m) {
    const double cm = simpson([m](double x) {
      return std::exp(std::cos(2.0 * std::numbers::pi * x)) * std::cos(2.0 * std::numbers::pi * m * x);
    }, 20000);
    EXPECT_NEAR(p.coeff({{m}, {0}}).real(), cm, 1e-12);
  }
}

// Renders Re and Im of a trigonometric polynomial as expression strings.
std::pair<std::string, std::string> render(const TrigPoly& g) {
  std::string re = "0", im = "0";
  char buf[256];
  for (const auto& [mode, c] : g.coeffs()) {
    std::string arg = "2*pi*(0";
    for (std::size_t i = 0; i < mode.p.size(); ++i) {
      arg += " + " + std::to_string(mode.p[i]) + "*x" + std::to_string(i + 1);
      arg += " + " + std::to_string(mode.q[i]) + "*y" + std::to_string(i + 1);
    }
    arg += ")";
    // c e^{i t} = (a cos t - b sin t) + i (a sin t + b cos t)
    std::snprintf(buf, sizeof buf, " + %.17g*cos(%s) - %.17g*sin(%s)", c.real(), arg.c_str(), c.imag(), arg.c_str());
    re += buf;
    std::snprintf(buf, sizeof buf, " + %.17g*sin(%s) + %.17g*cos(%s)", c.real(), arg.c_str(), c.imag(), arg.c_str());
    im += buf;
  }
  return {re, im};
}

TEST(Project, ExactOnBandLimitedInput) {
  RandomSource rng(31);
  for (int trial = 0; trial < 4; ++trial) {
    const int n = 1 + trial % 2;
    const int bandwidth = n == 1 ? 3 : 1;
    const TrigPoly g = random_trig_poly(n, bandwidth, rng);
    const auto [re, im] = render(g);
    const TrigPoly p = project(parse(re), parse(im), n, ProjectionSpec::with_default_grid(bandwidth));
    EXPECT_LE(distance_l1(p, g), 1e-12 * g.support_size());
    for (const auto& [mode, c] : g.coeffs()) EXPECT_NEAR(std::abs(p.coeff(mode) - c), 0.0, 1e-12);
  }
}

TEST(Project, SpectralDecayIsSuperPolynomial) {
  const int bandwidth = 10;
  const TrigPoly p = project(parse("exp(cos(2*pi*x1))"), 1, {bandwidth, 64});
  double previous = std::numeric_limits<double>::infinity();
  for (int m = 4; m <= bandwidth; ++m) {
    const double scaled = std::abs(p.coeff({{m}, {0}})) * std::pow(m, 6);
    EXPECT_LT(scaled, previous) << "p = " << m;
    previous = scaled;
  }
}

TEST(Project, DoublingGridChangesLittle) {
  for (const char* s : {"exp(cos(2*pi*x1))", "exp(cos(2*pi*x1))*cos(2*pi*y1)", "exp(sin(2*pi*(x1+y1)))/2"}) {
    const ExprAst a = parse(s);
    const TrigPoly coarse = project(a, 1, {8, 40});
    const TrigPoly fine = project(a, 1, {8, 80});
    for (const auto& [mode, c] : fine.coeffs()) EXPECT_LT(std::abs(coarse.coeff(mode) - c), 1e-8) << s;
  }
}

TEST(Project, ValidatesSpecAndVariables) {
  EXPECT_THROW(project(parse("x1"), 1, {4, 9}), std::invalid_argument);
  EXPECT_THROW(project(parse("x1"), 1, {4, 8}), std::invalid_argument);
  EXPECT_THROW(project(parse("x2"), 1, {1, 8}), std::invalid_argument);
  EXPECT_EQ(ProjectionSpec::with_default_grid(2).grid, 16);
  EXPECT_EQ(ProjectionSpec::with_default_grid(12).grid, 52);
}

}  // namespace
}  // namespace torusquant
