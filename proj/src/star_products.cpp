#include "torusquant/star_products.hpp"

#include <cmath>
#include <functional>
#include <numbers>
#include <stdexcept>
#include <string>

namespace torusquant {

namespace {

constexpr double kPi = std::numbers::pi;
const Complex kI(0.0, 1.0);

void check_order(int order) {
  if (order < 0 || order > kMaxOrder) {
    throw std::invalid_argument("order must be in [0, " + std::to_string(kMaxOrder) + "], got " +
                                std::to_string(order));
  }
}

// Calls visit(I) for every multi-index I in N^n with |I| = total.
void for_each_multi_index(int n, int total, const std::function<void(const std::vector<int>&)>& visit) {
  std::vector<int> idx(n, 0);
  std::function<void(int, int)> rec = [&](int axis, int remaining) {
    if (axis == n - 1) {
      idx[axis] = remaining;
      visit(idx);
      return;
    }
    for (int v = remaining; v >= 0; --v) {
      idx[axis] = v;
      rec(axis + 1, remaining - v);
    }
  };
  rec(0, total);
}

double multi_factorial(const std::vector<int>& idx) {
  double r = 1.0;
  for (int v : idx)
    for (int j = 2; j <= v; ++j) r *= j;
  return r;
}

long long dot(const FreqVector& a, const FreqVector& b) {
  long long s = 0;
  for (std::size_t i = 0; i < a.size(); ++i) s += static_cast<long long>(a[i]) * b[i];
  return s;
}

// e^{2 pi i num/den} with the numerator reduced exactly.
Complex rational_phase(long long num, long long den) {
  const long long r = ((num % den) + den) % den;
  return std::polar(1.0, 2.0 * kPi * static_cast<double>(r) / static_cast<double>(den));
}

Complex ipow(Complex base, int e) {
  Complex r = 1.0;
  for (int i = 0; i < e; ++i) r *= base;
  return r;
}

}  // namespace

std::string_view to_string(Orientation o) {
  switch (o) {
    case Orientation::kStar:
      return "star";
    case Orientation::kCheckStar:
      return "check_star";
    case Orientation::kMoyal:
      return "moyal";
  }
  return "?";
}

Orientation orientation_from_string(std::string_view name) {
  if (name == "star") return Orientation::kStar;
  if (name == "check_star") return Orientation::kCheckStar;
  if (name == "moyal") return Orientation::kMoyal;
  throw std::invalid_argument("unknown orientation '" + std::string(name) + "'");
}

HbarValue::HbarValue(int k) : level_(k) {
  if (k < 1) throw std::invalid_argument("HbarValue: level k must be >= 1");
}

HbarSeries::HbarSeries(int n, int order) : n_(n) {
  check_order(order);
  coeffs_.assign(order + 1, TrigPoly(n));
}

HbarSeries::HbarSeries(std::vector<TrigPoly> coeffs) : n_(coeffs.empty() ? 0 : coeffs.front().n()) {
  if (coeffs.empty()) throw std::invalid_argument("HbarSeries: need at least one coefficient");
  check_order(static_cast<int>(coeffs.size()) - 1);
  for (const auto& c : coeffs) require_same_dimension(c.n(), n_, "HbarSeries");
  coeffs_ = std::move(coeffs);
}

TrigPoly HbarSeries::evaluate_at(double hbar) const {
  TrigPoly out(n_);
  double power = 1.0;
  for (const auto& c : coeffs_) {
    out += c * Complex(power);
    power *= hbar;
  }
  return out;
}

TrigPoly bidiff(int order, const TrigPoly& f, const TrigPoly& g, Orientation o) {
  require_same_dimension(f.n(), g.n(), "bidiff");
  check_order(order);
  const int n = f.n();
  const std::vector<int> zero(n, 0);
  TrigPoly out(n);

  switch (o) {
    case Orientation::kStar: {
      const Complex scale = 1.0 / ipow(2.0 * kPi * kI, order);
      for_each_multi_index(n, order, [&](const std::vector<int>& idx) {
        out += multiply(differentiate(f, zero, idx), differentiate(g, idx, zero)) *
               Complex(scale / multi_factorial(idx));
      });
      break;
    }
    case Orientation::kCheckStar: {
      const Complex scale = ipow(kI / (2.0 * kPi), order);
      for_each_multi_index(n, order, [&](const std::vector<int>& idx) {
        out += multiply(differentiate(f, idx, zero), differentiate(g, zero, idx)) *
               Complex(scale / multi_factorial(idx));
      });
      break;
    }
    case Orientation::kMoyal: {
      // alpha^k / k! expanded binomially in A = sum d_x (x) d_y and B = sum d_y (x) d_x.
      const Complex scale = ipow(kI / (4.0 * kPi), order);
      for (int j = 0; j <= order; ++j) {
        const double sign = (order - j) % 2 == 0 ? 1.0 : -1.0;
        for_each_multi_index(n, j, [&](const std::vector<int>& a_idx) {
          for_each_multi_index(n, order - j, [&](const std::vector<int>& b_idx) {
            const double weight = sign / (multi_factorial(a_idx) * multi_factorial(b_idx));
            out += multiply(differentiate(f, a_idx, b_idx), differentiate(g, b_idx, a_idx)) *
                   (scale * weight);
          });
        });
      }
      break;
    }
  }
  return out;
}

HbarSeries star_truncated(const TrigPoly& f, const TrigPoly& g, int order, Orientation o) {
  require_same_dimension(f.n(), g.n(), "star_truncated");
  check_order(order);
  std::vector<TrigPoly> coeffs;
  coeffs.reserve(order + 1);
  for (int i = 0; i <= order; ++i) coeffs.push_back(bidiff(i, f, g, o));
  return HbarSeries(std::move(coeffs));
}

TrigPoly star_exact(const TrigPoly& f, const TrigPoly& g, HbarValue h, Orientation o) {
  require_same_dimension(f.n(), g.n(), "star_exact");
  const long long k = h.level();
  TrigPoly::CoeffMap out;
  for (const auto& [fm, fc] : f.coeffs()) {
    for (const auto& [gm, gc] : g.coeffs()) {
      Complex phase;
      switch (o) {
        case Orientation::kStar:
          phase = rational_phase(dot(fm.q, gm.p), k);
          break;
        case Orientation::kCheckStar:
          phase = rational_phase(-dot(gm.q, fm.p), k);
          break;
        case Orientation::kMoyal:
          phase = rational_phase(dot(fm.q, gm.p) - dot(gm.q, fm.p), 2 * k);
          break;
      }
      Mode sum{fm.p, fm.q};
      for (int i = 0; i < f.n(); ++i) {
        sum.p[i] += gm.p[i];
        sum.q[i] += gm.q[i];
      }
      out[std::move(sum)] += phase * fc * gc;
    }
  }
  return TrigPoly(f.n(), std::move(out));
}

TrigPoly laplacian(const TrigPoly& f) {
  const int n = f.n();
  TrigPoly out(n);
  for (int i = 0; i < n; ++i) {
    std::vector<int> e(n, 0);
    e[i] = 1;
    out += differentiate(f, e, e);
  }
  return out * (kI / (2.0 * kPi));
}

HbarSeries berezin_transform(const TrigPoly& f, int order, int sign) {
  check_order(order);
  if (sign != 1 && sign != -1) throw std::invalid_argument("berezin_transform: sign must be +1 or -1");
  std::vector<TrigPoly> coeffs{f};
  for (int i = 1; i <= order; ++i) coeffs.push_back(laplacian(coeffs.back()) * Complex(sign / static_cast<double>(i)));
  return HbarSeries(std::move(coeffs));
}

TrigPoly berezin_transform_exact(const TrigPoly& f, HbarValue h, int sign) {
  if (sign != 1 && sign != -1) throw std::invalid_argument("berezin_transform_exact: sign must be +1 or -1");
  TrigPoly::CoeffMap out;
  for (const auto& [mode, c] : f.coeffs()) out.emplace(mode, c * rational_phase(-sign * dot(mode.p, mode.q), h.level()));
  return TrigPoly(f.n(), std::move(out));
}

Tensor2 orientation_tensor(Orientation o, int n) {
  Tensor2 t = Tensor2::Zero(2 * n, 2 * n);
  for (int i = 0; i < n; ++i) {
    switch (o) {
      case Orientation::kStar:
        t(n + i, i) = 1.0 / (2.0 * kPi * kI);
        break;
      case Orientation::kCheckStar:
        t(i, n + i) = kI / (2.0 * kPi);
        break;
      case Orientation::kMoyal:
        t(i, n + i) = kI / (4.0 * kPi);
        t(n + i, i) = -kI / (4.0 * kPi);
        break;
    }
  }
  return t;
}

Tensor2 equivalence_gamma(Orientation from, Orientation to, int n) {
  return orientation_tensor(to, n) - orientation_tensor(from, n);
}

HbarSeries equivalence_map(const Tensor2& gamma, int order, const TrigPoly& f) {
  check_order(order);
  const int n = f.n();
  if (gamma.rows() != 2 * n || gamma.cols() != 2 * n) {
    throw DimensionMismatch("equivalence_map: gamma must be " + std::to_string(2 * n) + "x" + std::to_string(2 * n));
  }
  const double scale = gamma.cwiseAbs().maxCoeff();
  if ((gamma - gamma.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale) {
    throw std::invalid_argument("equivalence_map: gamma must be symmetric");
  }

  auto d_gamma = [&](const TrigPoly& u) {
    TrigPoly out(n);
    for (int a = 0; a < 2 * n; ++a) {
      for (int b = 0; b < 2 * n; ++b) {
        if (gamma(a, b) == Complex{}) continue;
        std::vector<int> ox(n, 0), oy(n, 0);
        (a < n ? ox[a] : oy[a - n]) += 1;
        (b < n ? ox[b] : oy[b - n]) += 1;
        out += differentiate(u, ox, oy) * gamma(a, b);
      }
    }
    return out;
  };

  std::vector<TrigPoly> coeffs{f};
  for (int i = 1; i <= order; ++i) coeffs.push_back(d_gamma(coeffs.back()) * Complex(0.5 / i));
  return HbarSeries(std::move(coeffs));
}

Complex trace_dq(const TrigPoly& f, HbarValue h) {
  return std::pow(static_cast<double>(h.level()), f.n()) * f.constant_term();
}

}  // namespace torusquant
