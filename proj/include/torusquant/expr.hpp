#pragma once

// Closed-form test functions on the torus: a small real-valued expression
// language and its projection onto trigonometric polynomials.
//
// Grammar (whitespace-insensitive):
//
//   expr    := term (('+' | '-') term)*
//   term    := unary (('*' | '/') unary)*
//   unary   := '-' unary | power
//   power   := primary ('^' unary)?          exponent must be an integer constant
//   primary := number | 'pi' | xK | yK | name '(' expr ')' | '(' expr ')'
//
// with name in {sin, cos, exp}. '^' binds tighter than unary minus, so
// "-x1^2" is -(x1^2), and is right-associative.

#include <complex>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "torusquant/trig_poly.hpp"

namespace torusquant {

class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& message, std::size_t position);
  /// 1-based character offset into the source.
  std::size_t position() const { return position_; }

 private:
  std::size_t position_;
};

class EvalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct ExprAst {
  enum class Kind { kConstant, kPi, kVarX, kVarY, kNeg, kSin, kCos, kExp, kAdd, kSub, kMul, kDiv, kPow };

  Kind kind = Kind::kConstant;
  double value = 0.0;  // kConstant
  int index = 0;       // kVarX/kVarY: 1-based axis; kPow: integer exponent
  std::vector<ExprAst> children;

  bool operator==(const ExprAst&) const = default;

  /// Largest variable index used (0 when the expression is constant).
  int max_variable_index() const;
};

ExprAst parse(std::string_view source);

/// Fully parenthesized rendering; parse(to_string(a)) == a.
std::string to_string(const ExprAst& ast);

Complex evaluate_ast(const ExprAst& ast, std::span<const double> x, std::span<const double> y);

struct ProjectionSpec {
  int bandwidth = 0;  // retained |p_i|, |q_i| <= bandwidth
  int grid = 16;      // samples per axis

  /// M = max(4(B+1), 16).
  static ProjectionSpec with_default_grid(int bandwidth);
  void validate() const;
};

/// Sample on the M^{2n} grid {(j/M, l/M)} and keep the discrete Fourier
/// coefficients with |p_i|, |q_i| <= B (alias-folded band-limited approximation).
TrigPoly project(const ExprAst& ast, int n, const ProjectionSpec& spec);

/// Complex-valued function given as a pair of real expressions re + i im.
TrigPoly project(const ExprAst& re, const ExprAst& im, int n, const ProjectionSpec& spec);

}  // namespace torusquant
