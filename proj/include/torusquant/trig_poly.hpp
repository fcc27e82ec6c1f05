#pragma once

#include <compare>
#include <complex>
#include <map>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace torusquant {

using Complex = std::complex<double>;

/// Frequency multi-index m in Z^n.
using FreqVector = std::vector<int>;

class DimensionMismatch : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Key (p, q) of the character e^{2 pi i (p.x + q.y)}. Ordered lexicographically on (p, q).
struct Mode {
  FreqVector p;
  FreqVector q;

  auto operator<=>(const Mode&) const = default;
  bool operator==(const Mode&) const = default;
};

/// The m-th fibrewise Fourier coefficient of a trigonometric polynomial:
/// a trigonometric polynomial in y alone, y -> sum_q c_{m,q} e^{2 pi i q.y}.
struct FibrewiseCoefficient {
  FreqVector m;
  std::map<FreqVector, Complex> profile;

  Complex evaluate(std::span<const double> y) const;
};

/// Finitely supported Fourier series on the torus R^{2n}/Z^{2n}:
///
///   f(x, y) = sum_{(p,q)} c_{p,q} e^{2 pi i (p.x + q.y)}
///
/// Amplitudes below `kPruneRatio` times the largest amplitude are dropped
/// after every operation.
class TrigPoly {
 public:
  static constexpr double kPruneRatio = 1e-14;
  using CoeffMap = std::map<Mode, Complex>;

  explicit TrigPoly(int n);
  TrigPoly(int n, CoeffMap coeffs);

  static TrigPoly constant(int n, Complex c);
  static TrigPoly monomial(FreqVector p, FreqVector q, Complex c = 1.0);

  int n() const { return n_; }
  const CoeffMap& coeffs() const { return coeffs_; }
  bool is_zero() const { return coeffs_.empty(); }
  std::size_t support_size() const { return coeffs_.size(); }

  /// Coefficient c_{p,q}; zero when absent.
  Complex coeff(const Mode& mode) const;
  Complex constant_term() const;

  /// max over stored keys of max_i(|p_i|, |q_i|); 0 for the zero polynomial.
  int bandwidth() const;
  int x_bandwidth() const;
  int y_bandwidth() const;

  /// Sum of |c_{p,q}|. Bounds sup |f| and the Toeplitz operator norm.
  double l1_norm() const;

  Complex evaluate(std::span<const double> x, std::span<const double> y) const;

  TrigPoly& operator+=(const TrigPoly& other);
  TrigPoly& operator-=(const TrigPoly& other);
  TrigPoly& operator*=(Complex scale);

  friend TrigPoly operator+(TrigPoly a, const TrigPoly& b) { return a += b; }
  friend TrigPoly operator-(TrigPoly a, const TrigPoly& b) { return a -= b; }
  friend TrigPoly operator*(TrigPoly a, Complex s) { return a *= s; }
  friend TrigPoly operator*(Complex s, TrigPoly a) { return a *= s; }

  /// Complex conjugate function.
  TrigPoly conj() const;

 private:
  void check_mode(const Mode& mode) const;
  void prune();

  int n_;
  CoeffMap coeffs_;
};

/// Pointwise product, realized as convolution of coefficient maps.
TrigPoly multiply(const TrigPoly& f, const TrigPoly& g);

/// Partial derivative d^{I_x}/dx d^{I_y}/dy; multi-indices have length n.
TrigPoly differentiate(const TrigPoly& f, std::span<const int> order_x,
                       std::span<const int> order_y);

FibrewiseCoefficient fibrewise_coefficient(const TrigPoly& f, const FreqVector& m);

/// {f, g} = sum_i (df/dx_i dg/dy_i - df/dy_i dg/dx_i).
TrigPoly poisson_bracket(const TrigPoly& f, const TrigPoly& g);

/// Coefficientwise l1 distance.
double distance_l1(const TrigPoly& f, const TrigPoly& g);

inline bool approx_equal(const TrigPoly& f, const TrigPoly& g, double tol) {
  return distance_l1(f, g) <= tol;
}

void require_same_dimension(int a, int b, const char* what);

}  // namespace torusquant
