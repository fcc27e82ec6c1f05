#pragma once

// Deformation quantization on the standard torus: the bidifferential
// operators C_k (separation of variables, x-fibres on the right), their
// opposite Cc_k, the Moyal product, equivalences between them and the trace.

#include <complex>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "torusquant/trig_poly.hpp"

namespace torusquant {

enum class Orientation {
  kStar,       // C_k(f,g) = (2 pi i)^{-k} sum_{|I|=k} (1/I!) d_y^I f d_x^I g
  kCheckStar,  // Cc_k(f,g) = (i / 2 pi)^k sum_{|I|=k} (1/I!) d_x^I f d_y^I g
  kMoyal,      // Mult o exp(hbar * (i/4pi) sum_i (d_{x_i} (x) d_{y_i} - d_{y_i} (x) d_{x_i}))
};

std::string_view to_string(Orientation o);
Orientation orientation_from_string(std::string_view name);

constexpr int kMaxOrder = 16;

/// hbar = 1/k at quantization level k >= 1.
class HbarValue {
 public:
  explicit HbarValue(int k);
  int level() const { return level_; }
  double value() const { return 1.0 / level_; }

 private:
  int level_;
};

/// Truncated formal power series sum_{i=0}^{N} hbar^i c_i with TrigPoly coefficients.
class HbarSeries {
 public:
  HbarSeries(int n, int order);
  explicit HbarSeries(std::vector<TrigPoly> coeffs);

  int n() const { return n_; }
  int order() const { return static_cast<int>(coeffs_.size()) - 1; }
  const TrigPoly& operator[](int i) const { return coeffs_.at(i); }
  TrigPoly& operator[](int i) { return coeffs_.at(i); }
  const std::vector<TrigPoly>& coeffs() const { return coeffs_; }

  /// sum_i hbar^i c_i as a single TrigPoly.
  TrigPoly evaluate_at(double hbar) const;

 private:
  int n_;
  std::vector<TrigPoly> coeffs_;
};

TrigPoly bidiff(int order, const TrigPoly& f, const TrigPoly& g, Orientation o);

/// Coefficients bidiff(i, f, g, o) for 0 <= i <= N.
HbarSeries star_truncated(const TrigPoly& f, const TrigPoly& g, int order, Orientation o);

/// The full star product at a fixed hbar, summed in closed form per monomial
/// pair. For f = e(p, a), g = e(q, b):
///   star:       e^{2 pi i hbar a.q} fg
///   check_star: e^{-2 pi i hbar b.p} fg
///   moyal:      e^{pi i hbar (a.q - b.p)} fg
TrigPoly star_exact(const TrigPoly& f, const TrigPoly& g, HbarValue h, Orientation o);

/// Delta = (i / 2pi) sum_i d^2 / dx_i dy_i.
TrigPoly laplacian(const TrigPoly& f);

/// Truncated formal Berezin transform sum_{i<=N} (sign * hbar * Delta)^i / i!.
/// sign = -1 is the map from the opposite product to the star product.
HbarSeries berezin_transform(const TrigPoly& f, int order, int sign = -1);

/// exp(sign * hbar * Delta) f; on e(p, a) this is the phase e^{-sign 2 pi i hbar p.a}.
TrigPoly berezin_transform_exact(const TrigPoly& f, HbarValue h, int sign = -1);

/// Constant 2-tensor over the 2n coordinates (x_1..x_n, y_1..y_n).
using Tensor2 = Eigen::MatrixXcd;

/// Tensor alpha defining the orientation's product as Mult o exp(hbar alpha).
Tensor2 orientation_tensor(Orientation o, int n);

/// beta - alpha, symmetric, for which exp(hbar/2 d_gamma) maps (from) to (to).
Tensor2 equivalence_gamma(Orientation from, Orientation to, int n);

/// sum_{i<=N} hbar^i (1/2)^i d_gamma^i f / i!, d_gamma = sum gamma^{uv} d_u d_v.
HbarSeries equivalence_map(const Tensor2& gamma, int order, const TrigPoly& f);

/// hbar^{-n} * integral of f = k^n c_{0,0}(f).
Complex trace_dq(const TrigPoly& f, HbarValue h);

}  // namespace torusquant
