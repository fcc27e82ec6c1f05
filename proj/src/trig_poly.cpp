#include "torusquant/trig_poly.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

namespace torusquant {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

// e^{2 pi i t} with t reduced mod 1 first so large integer parts cost nothing.
Complex unit_phase(double t) {
  const double frac = t - std::floor(t);
  return std::polar(1.0, kTwoPi * frac);
}

double dot(std::span<const int> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

FreqVector add(const FreqVector& a, const FreqVector& b) {
  FreqVector r(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) r[i] = a[i] + b[i];
  return r;
}

}  // namespace

void require_same_dimension(int a, int b, const char* what) {
  if (a != b) {
    throw DimensionMismatch(std::string(what) + ": dimension mismatch (" + std::to_string(a) +
                            " vs " + std::to_string(b) + ")");
  }
}

Complex FibrewiseCoefficient::evaluate(std::span<const double> y) const {
  Complex s = 0.0;
  for (const auto& [q, c] : profile) {
    require_same_dimension(static_cast<int>(q.size()), static_cast<int>(y.size()),
                           "FibrewiseCoefficient::evaluate");
    s += c * unit_phase(dot(q, y));
  }
  return s;
}

TrigPoly::TrigPoly(int n) : n_(n) {
  if (n < 1) throw std::invalid_argument("TrigPoly: dimension must be >= 1");
}

TrigPoly::TrigPoly(int n, CoeffMap coeffs) : TrigPoly(n) {
  for (const auto& [mode, c] : coeffs) check_mode(mode);
  coeffs_ = std::move(coeffs);
  prune();
}

TrigPoly TrigPoly::constant(int n, Complex c) {
  return TrigPoly(n, {{Mode{FreqVector(n, 0), FreqVector(n, 0)}, c}});
}

TrigPoly TrigPoly::monomial(FreqVector p, FreqVector q, Complex c) {
  const int n = static_cast<int>(p.size());
  return TrigPoly(n, {{Mode{std::move(p), std::move(q)}, c}});
}

void TrigPoly::check_mode(const Mode& mode) const {
  if (static_cast<int>(mode.p.size()) != n_ || static_cast<int>(mode.q.size()) != n_) {
    throw DimensionMismatch("TrigPoly: key of wrong length for n = " + std::to_string(n_));
  }
}

void TrigPoly::prune() {
  double max_abs = 0.0;
  for (const auto& [mode, c] : coeffs_) max_abs = std::max(max_abs, std::abs(c));
  const double cutoff = kPruneRatio * max_abs;
  std::erase_if(coeffs_, [&](const auto& kv) {
    const double a = std::abs(kv.second);
    return a == 0.0 || a < cutoff;
  });
}

Complex TrigPoly::coeff(const Mode& mode) const {
  auto it = coeffs_.find(mode);
  return it == coeffs_.end() ? Complex{} : it->second;
}

Complex TrigPoly::constant_term() const {
  return coeff(Mode{FreqVector(n_, 0), FreqVector(n_, 0)});
}

int TrigPoly::x_bandwidth() const {
  int b = 0;
  for (const auto& [mode, c] : coeffs_)
    for (int v : mode.p) b = std::max(b, std::abs(v));
  return b;
}

int TrigPoly::y_bandwidth() const {
  int b = 0;
  for (const auto& [mode, c] : coeffs_)
    for (int v : mode.q) b = std::max(b, std::abs(v));
  return b;
}

int TrigPoly::bandwidth() const { return std::max(x_bandwidth(), y_bandwidth()); }

double TrigPoly::l1_norm() const {
  double s = 0.0;
  for (const auto& [mode, c] : coeffs_) s += std::abs(c);
  return s;
}

Complex TrigPoly::evaluate(std::span<const double> x, std::span<const double> y) const {
  require_same_dimension(static_cast<int>(x.size()), n_, "TrigPoly::evaluate(x)");
  require_same_dimension(static_cast<int>(y.size()), n_, "TrigPoly::evaluate(y)");
  Complex s = 0.0;
  for (const auto& [mode, c] : coeffs_) s += c * unit_phase(dot(mode.p, x) + dot(mode.q, y));
  return s;
}

TrigPoly& TrigPoly::operator+=(const TrigPoly& other) {
  require_same_dimension(n_, other.n_, "TrigPoly::operator+");
  for (const auto& [mode, c] : other.coeffs_) coeffs_[mode] += c;
  prune();
  return *this;
}

TrigPoly& TrigPoly::operator-=(const TrigPoly& other) {
  require_same_dimension(n_, other.n_, "TrigPoly::operator-");
  for (const auto& [mode, c] : other.coeffs_) coeffs_[mode] -= c;
  prune();
  return *this;
}

TrigPoly& TrigPoly::operator*=(Complex scale) {
  for (auto& [mode, c] : coeffs_) c *= scale;
  prune();
  return *this;
}

TrigPoly TrigPoly::conj() const {
  CoeffMap out;
  for (const auto& [mode, c] : coeffs_) {
    FreqVector p = mode.p, q = mode.q;
    for (int& v : p) v = -v;
    for (int& v : q) v = -v;
    out.emplace(Mode{std::move(p), std::move(q)}, std::conj(c));
  }
  return TrigPoly(n_, std::move(out));
}

TrigPoly multiply(const TrigPoly& f, const TrigPoly& g) {
  require_same_dimension(f.n(), g.n(), "multiply");
  TrigPoly::CoeffMap out;
  for (const auto& [a, ca] : f.coeffs())
    for (const auto& [b, cb] : g.coeffs()) out[Mode{add(a.p, b.p), add(a.q, b.q)}] += ca * cb;
  return TrigPoly(f.n(), std::move(out));
}

TrigPoly differentiate(const TrigPoly& f, std::span<const int> order_x,
                       std::span<const int> order_y) {
  require_same_dimension(static_cast<int>(order_x.size()), f.n(), "differentiate(I_x)");
  require_same_dimension(static_cast<int>(order_y.size()), f.n(), "differentiate(I_y)");
  const Complex two_pi_i(0.0, kTwoPi);
  TrigPoly::CoeffMap out;
  for (const auto& [mode, c] : f.coeffs()) {
    Complex factor = 1.0;
    for (int i = 0; i < f.n(); ++i) {
      for (int j = 0; j < order_x[i]; ++j) factor *= two_pi_i * static_cast<double>(mode.p[i]);
      for (int j = 0; j < order_y[i]; ++j) factor *= two_pi_i * static_cast<double>(mode.q[i]);
    }
    if (factor != Complex{}) out.emplace(mode, c * factor);
  }
  return TrigPoly(f.n(), std::move(out));
}

FibrewiseCoefficient fibrewise_coefficient(const TrigPoly& f, const FreqVector& m) {
  require_same_dimension(static_cast<int>(m.size()), f.n(), "fibrewise_coefficient");
  FibrewiseCoefficient out{m, {}};
  // Keys are ordered on p first, so the m-slice is a contiguous range.
  auto it = f.coeffs().lower_bound(Mode{m, FreqVector(f.n(), std::numeric_limits<int>::min())});
  for (; it != f.coeffs().end() && it->first.p == m; ++it) out.profile.emplace(it->first.q, it->second);
  return out;
}

TrigPoly poisson_bracket(const TrigPoly& f, const TrigPoly& g) {
  require_same_dimension(f.n(), g.n(), "poisson_bracket");
  const int n = f.n();
  TrigPoly out(n);
  std::vector<int> zero(n, 0);
  for (int i = 0; i < n; ++i) {
    std::vector<int> e(n, 0);
    e[i] = 1;
    out += multiply(differentiate(f, e, zero), differentiate(g, zero, e));
    out -= multiply(differentiate(f, zero, e), differentiate(g, e, zero));
  }
  return out;
}

double distance_l1(const TrigPoly& f, const TrigPoly& g) {
  require_same_dimension(f.n(), g.n(), "distance_l1");
  double s = 0.0;
  auto a = f.coeffs().begin(), b = g.coeffs().begin();
  while (a != f.coeffs().end() || b != g.coeffs().end()) {
    if (b == g.coeffs().end() || (a != f.coeffs().end() && a->first < b->first)) {
      s += std::abs(a->second);
      ++a;
    } else if (a == f.coeffs().end() || b->first < a->first) {
      s += std::abs(b->second);
      ++b;
    } else {
      s += std::abs(a->second - b->second);
      ++a;
      ++b;
    }
  }
  return s;
}

}  // namespace torusquant
