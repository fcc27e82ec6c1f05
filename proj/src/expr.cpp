#include "torusquant/expr.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <numbers>

namespace torusquant {

ParseError::ParseError(const std::string& message, std::size_t position)
    : std::runtime_error("parse error at position " + std::to_string(position) + ": " + message),
      position_(position) {}

int ExprAst::max_variable_index() const {
  int m = (kind == Kind::kVarX || kind == Kind::kVarY) ? index : 0;
  for (const auto& c : children) m = std::max(m, c.max_variable_index());
  return m;
}

namespace {

using Kind = ExprAst::Kind;

ExprAst leaf(Kind kind, double value = 0.0, int index = 0) { return ExprAst{kind, value, index, {}}; }

ExprAst unary(Kind kind, ExprAst child) {
  ExprAst a{kind, 0.0, 0, {}};
  a.children.push_back(std::move(child));
  return a;
}

ExprAst binary(Kind kind, ExprAst lhs, ExprAst rhs) {
  ExprAst a{kind, 0.0, 0, {}};
  a.children.push_back(std::move(lhs));
  a.children.push_back(std::move(rhs));
  return a;
}

bool is_constant(const ExprAst& a) { return a.max_variable_index() == 0 && a.kind != Kind::kVarX && a.kind != Kind::kVarY; }

class Parser {
 public:
  explicit Parser(std::string_view src) : src_(src) {}

  ExprAst parse_all() {
    ExprAst e = parse_expr();
    skip_ws();
    if (pos_ != src_.size()) fail("unexpected character '" + std::string(1, src_[pos_]) + "'");
    return e;
  }

 private:
  [[noreturn]] void fail(const std::string& msg) const { throw ParseError(msg, pos_ + 1); }
  [[noreturn]] void fail_at(const std::string& msg, std::size_t at) const { throw ParseError(msg, at + 1); }

  void skip_ws() {
    while (pos_ < src_.size() && std::isspace(static_cast<unsigned char>(src_[pos_]))) ++pos_;
  }

  bool accept(char c) {
    skip_ws();
    if (pos_ < src_.size() && src_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  void expect(char c) {
    if (!accept(c)) {
      if (pos_ >= src_.size()) fail(std::string("expected '") + c + "' but reached end of input");
      fail(std::string("expected '") + c + "'");
    }
  }

  ExprAst parse_expr() {
    ExprAst lhs = parse_term();
    for (;;) {
      if (accept('+')) {
        lhs = binary(Kind::kAdd, std::move(lhs), parse_term());
      } else if (accept('-')) {
        lhs = binary(Kind::kSub, std::move(lhs), parse_term());
      } else {
        return lhs;
      }
    }
  }

  ExprAst parse_term() {
    ExprAst lhs = parse_unary();
    for (;;) {
      if (accept('*')) {
        lhs = binary(Kind::kMul, std::move(lhs), parse_unary());
      } else if (accept('/')) {
        lhs = binary(Kind::kDiv, std::move(lhs), parse_unary());
      } else {
        return lhs;
      }
    }
  }

  ExprAst parse_unary() {
    if (accept('-')) return unary(Kind::kNeg, parse_unary());
    return parse_power();
  }

  ExprAst parse_power() {
    ExprAst base = parse_primary();
    if (!accept('^')) return base;
    skip_ws();
    const std::size_t at = pos_;
    ExprAst exponent = parse_unary();
    if (!is_constant(exponent)) fail_at("exponent must be an integer constant", at);
    const double e = evaluate_ast(exponent, {}, {}).real();
    if (e != std::round(e) || std::abs(e) > 1024) fail_at("exponent must be an integer constant", at);
    ExprAst a = unary(Kind::kPow, std::move(base));
    a.index = static_cast<int>(e);
    return a;
  }

  ExprAst parse_primary() {
    skip_ws();
    if (pos_ >= src_.size()) fail("unexpected end of input");
    const char c = src_[pos_];
    if (c == '(') {
      ++pos_;
      ExprAst e = parse_expr();
      expect(')');
      return e;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return parse_number();
    if (std::isalpha(static_cast<unsigned char>(c))) return parse_identifier();
    fail("unexpected character '" + std::string(1, c) + "'");
  }

  ExprAst parse_number() {
    const std::size_t start = pos_;
    while (pos_ < src_.size() && (std::isdigit(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '.')) ++pos_;
    if (pos_ < src_.size() && (src_[pos_] == 'e' || src_[pos_] == 'E')) {
      std::size_t look = pos_ + 1;
      if (look < src_.size() && (src_[look] == '+' || src_[look] == '-')) ++look;
      if (look < src_.size() && std::isdigit(static_cast<unsigned char>(src_[look]))) {
        pos_ = look;
        while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) ++pos_;
      }
    }
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(src_.data() + start, src_.data() + pos_, v);
    if (ec != std::errc() || ptr != src_.data() + pos_) fail_at("malformed number", start);
    return leaf(Kind::kConstant, v);
  }

  ExprAst parse_identifier() {
    const std::size_t start = pos_;
    while (pos_ < src_.size() && std::isalnum(static_cast<unsigned char>(src_[pos_]))) ++pos_;
    const std::string name(src_.substr(start, pos_ - start));

    if (name == "sin" || name == "cos" || name == "exp") {
      const Kind kind = name == "sin" ? Kind::kSin : name == "cos" ? Kind::kCos : Kind::kExp;
      skip_ws();
      if (pos_ >= src_.size() || src_[pos_] != '(') fail_at("'" + name + "' expects 1 argument", start);
      ++pos_;
      skip_ws();
      if (pos_ < src_.size() && src_[pos_] == ')') fail_at("'" + name + "' expects 1 argument, got 0", start);
      ExprAst arg = parse_expr();
      skip_ws();
      if (pos_ < src_.size() && src_[pos_] == ',') fail_at("'" + name + "' expects 1 argument", start);
      expect(')');
      return unary(kind, std::move(arg));
    }

    ExprAst atom;
    if (name == "pi") {
      atom = leaf(Kind::kPi);
    } else if ((name[0] == 'x' || name[0] == 'y') && name.size() > 1 &&
               std::all_of(name.begin() + 1, name.end(), [](char ch) { return std::isdigit(static_cast<unsigned char>(ch)); })) {
      int idx = 0;
      const auto [ptr, ec] = std::from_chars(name.data() + 1, name.data() + name.size(), idx);
      if (ec != std::errc() || idx < 1) fail_at("invalid variable index in '" + name + "'", start);
      atom = leaf(name[0] == 'x' ? Kind::kVarX : Kind::kVarY, 0.0, idx);
    } else {
      fail_at("unknown identifier '" + name + "'", start);
    }
    skip_ws();
    if (pos_ < src_.size() && src_[pos_] == '(') fail_at("'" + name + "' takes no arguments", start);
    return atom;
  }

  std::string_view src_;
  std::size_t pos_ = 0;
};

std::string format_number(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

ExprAst parse(std::string_view source) { return Parser(source).parse_all(); }

std::string to_string(const ExprAst& a) {
  switch (a.kind) {
    case Kind::kConstant:
      return format_number(a.value);
    case Kind::kPi:
      return "pi";
    case Kind::kVarX:
      return "x" + std::to_string(a.index);
    case Kind::kVarY:
      return "y" + std::to_string(a.index);
    case Kind::kNeg:
      return "(-" + to_string(a.children[0]) + ")";
    case Kind::kSin:
      return "sin(" + to_string(a.children[0]) + ")";
    case Kind::kCos:
      return "cos(" + to_string(a.children[0]) + ")";
    case Kind::kExp:
      return "exp(" + to_string(a.children[0]) + ")";
    case Kind::kAdd:
      return "(" + to_string(a.children[0]) + " + " + to_string(a.children[1]) + ")";
    case Kind::kSub:
      return "(" + to_string(a.children[0]) + " - " + to_string(a.children[1]) + ")";
    case Kind::kMul:
      return "(" + to_string(a.children[0]) + " * " + to_string(a.children[1]) + ")";
    case Kind::kDiv:
      return "(" + to_string(a.children[0]) + " / " + to_string(a.children[1]) + ")";
    case Kind::kPow:
      return "(" + to_string(a.children[0]) + "^" + std::to_string(a.index) + ")";
  }
  return {};
}

namespace {

double eval_real(const ExprAst& a, std::span<const double> x, std::span<const double> y) {
  switch (a.kind) {
    case Kind::kConstant:
      return a.value;
    case Kind::kPi:
      return std::numbers::pi;
    case Kind::kVarX:
      if (a.index > static_cast<int>(x.size())) throw EvalError("variable x" + std::to_string(a.index) + " out of range");
      return x[a.index - 1];
    case Kind::kVarY:
      if (a.index > static_cast<int>(y.size())) throw EvalError("variable y" + std::to_string(a.index) + " out of range");
      return y[a.index - 1];
    case Kind::kNeg:
      return -eval_real(a.children[0], x, y);
    case Kind::kSin:
      return std::sin(eval_real(a.children[0], x, y));
    case Kind::kCos:
      return std::cos(eval_real(a.children[0], x, y));
    case Kind::kExp:
      return std::exp(eval_real(a.children[0], x, y));
    case Kind::kAdd:
      return eval_real(a.children[0], x, y) + eval_real(a.children[1], x, y);
    case Kind::kSub:
      return eval_real(a.children[0], x, y) - eval_real(a.children[1], x, y);
    case Kind::kMul:
      return eval_real(a.children[0], x, y) * eval_real(a.children[1], x, y);
    case Kind::kDiv: {
      const double d = eval_real(a.children[1], x, y);
      if (d == 0.0) throw EvalError("division by zero");
      return eval_real(a.children[0], x, y) / d;
    }
    case Kind::kPow: {
      const double b = eval_real(a.children[0], x, y);
      if (b == 0.0 && a.index < 0) throw EvalError("division by zero in negative power");
      return std::pow(b, a.index);
    }
  }
  return 0.0;
}

constexpr long long kMaxGridSamples = 1LL << 26;

// Partial DFT along one axis of a row-major array, keeping frequencies -B..B.
std::vector<Complex> transform_axis(const std::vector<Complex>& in, std::vector<int>& dims, int axis,
                                    int bandwidth, int grid) {
  long long outer = 1, inner = 1;
  for (int a = 0; a < axis; ++a) outer *= dims[a];
  for (std::size_t a = axis + 1; a < dims.size(); ++a) inner *= dims[a];
  const int width = 2 * bandwidth + 1;

  std::vector<Complex> twiddle(static_cast<std::size_t>(width) * grid);
  for (int f = 0; f < width; ++f) {
    for (int j = 0; j < grid; ++j) {
      const long long r = (((static_cast<long long>(f - bandwidth) * j) % grid) + grid) % grid;
      twiddle[static_cast<std::size_t>(f) * grid + j] =
          std::polar(1.0 / grid, -2.0 * std::numbers::pi * static_cast<double>(r) / grid);
    }
  }

  std::vector<Complex> out(static_cast<std::size_t>(outer * width * inner));
  for (long long o = 0; o < outer; ++o) {
    for (int f = 0; f < width; ++f) {
      const Complex* w = &twiddle[static_cast<std::size_t>(f) * grid];
      for (long long i = 0; i < inner; ++i) {
        Complex s = 0.0;
        for (int j = 0; j < grid; ++j) s += w[j] * in[static_cast<std::size_t>((o * grid + j) * inner + i)];
        out[static_cast<std::size_t>((o * width + f) * inner + i)] = s;
      }
    }
  }
  dims[axis] = width;
  return out;
}

template <typename Sampler>
TrigPoly project_samples(int n, const ProjectionSpec& spec, Sampler&& sample) {
  spec.validate();
  const int axes = 2 * n;
  const int grid = spec.grid;
  long long total = 1;
  for (int a = 0; a < axes; ++a) {
    total *= grid;
    if (total > kMaxGridSamples) throw std::invalid_argument("project: sample grid too large");
  }

  std::vector<Complex> data(static_cast<std::size_t>(total));
  std::vector<int> idx(axes, 0);
  std::vector<double> x(n), y(n);
  for (long long s = 0; s < total; ++s) {
    long long rem = s;
    for (int a = axes - 1; a >= 0; --a) {
      idx[a] = static_cast<int>(rem % grid);
      rem /= grid;
    }
    for (int i = 0; i < n; ++i) {
      x[i] = static_cast<double>(idx[i]) / grid;
      y[i] = static_cast<double>(idx[n + i]) / grid;
    }
    data[static_cast<std::size_t>(s)] = sample(x, y);
  }

  std::vector<int> dims(axes, grid);
  for (int a = 0; a < axes; ++a) data = transform_axis(data, dims, a, spec.bandwidth, grid);

  const int width = 2 * spec.bandwidth + 1;
  TrigPoly::CoeffMap coeffs;
  for (std::size_t s = 0; s < data.size(); ++s) {
    std::size_t rem = s;
    Mode mode{FreqVector(n), FreqVector(n)};
    for (int a = axes - 1; a >= 0; --a) {
      const int f = static_cast<int>(rem % width) - spec.bandwidth;
      rem /= width;
      (a < n ? mode.p[a] : mode.q[a - n]) = f;
    }
    coeffs.emplace(std::move(mode), data[s]);
  }
  return TrigPoly(n, std::move(coeffs));
}

void check_variables(const ExprAst& ast, int n) {
  if (ast.max_variable_index() > n) {
    throw std::invalid_argument("project: expression uses variable index " +
                                std::to_string(ast.max_variable_index()) + " but n = " + std::to_string(n));
  }
}

}  // namespace

Complex evaluate_ast(const ExprAst& ast, std::span<const double> x, std::span<const double> y) {
  return {eval_real(ast, x, y), 0.0};
}

ProjectionSpec ProjectionSpec::with_default_grid(int bandwidth) {
  return {bandwidth, std::max(4 * (bandwidth + 1), 16)};
}

void ProjectionSpec::validate() const {
  if (bandwidth < 0) throw std::invalid_argument("ProjectionSpec: bandwidth must be >= 0");
  if (grid < 2 * bandwidth + 2) throw std::invalid_argument("ProjectionSpec: grid must be >= 2*bandwidth + 2");
  if (grid % 2 != 0) throw std::invalid_argument("ProjectionSpec: grid must be even");
}

TrigPoly project(const ExprAst& ast, int n, const ProjectionSpec& spec) {
  check_variables(ast, n);
  return project_samples(n, spec, [&](std::span<const double> x, std::span<const double> y) {
    return Complex(eval_real(ast, x, y), 0.0);
  });
}

TrigPoly project(const ExprAst& re, const ExprAst& im, int n, const ProjectionSpec& spec) {
  check_variables(re, n);
  check_variables(im, n);
  return project_samples(n, spec, [&](std::span<const double> x, std::span<const double> y) {
    return Complex(eval_real(re, x, y), eval_real(im, x, y));
  });
}

}  // namespace torusquant
