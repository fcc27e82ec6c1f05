#pragma once

#include <cstdint>
#include <functional>
#include <random>
#include <stdexcept>
#include <string_view>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "torusquant/expr.hpp"
#include "torusquant/quantization.hpp"
#include "torusquant/star_products.hpp"
#include "torusquant/trig_poly.hpp"

namespace torusquant {

enum class NormKind {
  kL1,    // max column absolute sum
  kLinf,  // max row absolute sum
  kL2,    // largest singular value
};

std::string_view to_string(NormKind kind);
NormKind norm_kind_from_string(std::string_view name);

class ConvergenceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct SpectralNormOptions {
  double tolerance = 1e-10;      // relative change of the estimate between two steps
  long long max_iterations = 0;  // 0 means 10 * dimension
  std::uint64_t seed = 0x5eed5eedULL;
};

double operator_norm(const Eigen::MatrixXcd& a, NormKind kind, const SpectralNormOptions& options = {});
double operator_norm(const QuantumOperator& a, NormKind kind, const SpectralNormOptions& options = {});

/// Largest singular value of a linear map given only by its action and its adjoint's action.
/// Krylov-accelerated power iteration on A^*A (Golub-Kahan-Lanczos with full
/// reorthogonalization); the estimate is the top Ritz value, which increases to
/// ||A||_2 and is exact once the Krylov space is the whole domain.
double spectral_norm(long long dimension,
                     const std::function<Eigen::VectorXcd(const Eigen::VectorXcd&)>& apply,
                     const std::function<Eigen::VectorXcd(const Eigen::VectorXcd&)>& apply_adjoint,
                     const SpectralNormOptions& options = {});

/// ||Q_f||_2 without forming the matrix; usable beyond the dense cap.
double toeplitz_spectral_norm(const TrigPoly& f, const HilbertSpec& spec, const SpectralNormOptions& options = {});

/// E = Q_f Q_g - Q_{f *_N g}, the truncated star product evaluated at hbar = 1/k.
QuantumOperator error_product(const TrigPoly& f, const TrigPoly& g, int order, int k);

/// (F^GQ o Qc)(f) - Q(F_N f), with F_N = sum_{i<=N} (sign hbar Delta)^i / i!.
QuantumOperator error_intertwine(const TrigPoly& f, int order, int k, int sign = -1);

/// |hbar^n tr Q_f - c_{0,0}(f)|.
double trace_error(const TrigPoly& f, int k);
double trace_error(const ExprAst& ast, int n, const ProjectionSpec& spec, int k);

/// |g_0 - k^{-n} sum_{[m] in Z_k^n} g(m/k)| for a function of y only.
double riemann_sum_error(const TrigPoly& g, int k);
double riemann_sum_error(const ExprAst& g, int n, Complex mean, int k);

/// Below this, errors are treated as exact zeros.
constexpr double kErrorFloor = 1e-13;

struct SlopeFit {
  enum class Outcome { kFitted, kExactIdentity, kTooFewPoints };

  Outcome outcome = Outcome::kTooFewPoints;
  double slope = 0.0;
  double residual = 0.0;  // RMS of the log-log fit
  int used = 0;
  int excluded = 0;       // points at or below the floor
};

std::string_view to_string(SlopeFit::Outcome outcome);

/// Least-squares slope of log(error) against log(hbar) over points above the floor.
SlopeFit fit_slope(const std::vector<std::pair<double, double>>& points);

/// Passes when the fit lies in [expected - 0.2, expected + 1.2], or the errors are an exact identity.
bool slope_acceptable(const SlopeFit& fit, double expected);

/// Checks that error(k) * k^power strictly decreases along the sweep. A step
/// between two values both at the error floor counts as exact, not as a violation.
struct DecayCheck {
  bool pass = false;
  bool exact_beyond_floor = false;  // some tail of the sweep sits at the floor
  std::vector<double> scaled;       // error * k^power, floor values set to 0
};

DecayCheck check_scaled_decay(const std::vector<int>& ks, const std::vector<double>& errors, double power);

/// Deterministic uniform draws built directly on mt19937_64, independent of
/// the standard library's distribution implementations.
class RandomSource {
 public:
  explicit RandomSource(std::uint64_t seed) : engine_(seed) {}

  double uniform01();
  /// Uniform on the closed unit disc.
  Complex unit_disc();
  int uniform_int(int lo, int hi);

 private:
  std::mt19937_64 engine_;
};

/// Coefficients uniform on the unit disc on the full support |p_i|, |q_i| <= bandwidth.
TrigPoly random_trig_poly(int n, int bandwidth, RandomSource& rng);

Eigen::MatrixXcd random_matrix(int rows, int cols, RandomSource& rng);

}  // namespace torusquant
