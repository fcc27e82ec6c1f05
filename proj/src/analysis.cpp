#include "torusquant/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include <Eigen/Eigenvalues>

namespace torusquant {

std::string_view to_string(NormKind kind) {
  switch (kind) {
    case NormKind::kL1:
      return "l1_operator";
    case NormKind::kLinf:
      return "linf_operator";
    case NormKind::kL2:
      return "l2_operator";
  }
  return "?";
}

NormKind norm_kind_from_string(std::string_view name) {
  if (name == "l1_operator") return NormKind::kL1;
  if (name == "linf_operator") return NormKind::kLinf;
  if (name == "l2_operator") return NormKind::kL2;
  throw std::invalid_argument("unknown norm kind '" + std::string(name) + "'");
}

std::string_view to_string(SlopeFit::Outcome outcome) {
  switch (outcome) {
    case SlopeFit::Outcome::kFitted:
      return "fitted";
    case SlopeFit::Outcome::kExactIdentity:
      return "exact identity";
    case SlopeFit::Outcome::kTooFewPoints:
      return "too few points";
  }
  return "?";
}

double RandomSource::uniform01() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

Complex RandomSource::unit_disc() {
  const double r = std::sqrt(uniform01());
  return std::polar(r, 2.0 * std::numbers::pi * uniform01());
}

int RandomSource::uniform_int(int lo, int hi) {
  const auto span = static_cast<std::uint64_t>(hi - lo + 1);
  return lo + static_cast<int>(engine_() % span);
}

TrigPoly random_trig_poly(int n, int bandwidth, RandomSource& rng) {
  const int width = 2 * bandwidth + 1;
  long long count = 1;
  for (int i = 0; i < 2 * n; ++i) count *= width;
  TrigPoly::CoeffMap coeffs;
  for (long long s = 0; s < count; ++s) {
    long long rem = s;
    Mode mode{FreqVector(n), FreqVector(n)};
    for (int a = 2 * n - 1; a >= 0; --a) {
      (a < n ? mode.p[a] : mode.q[a - n]) = static_cast<int>(rem % width) - bandwidth;
      rem /= width;
    }
    coeffs.emplace(std::move(mode), rng.unit_disc());
  }
  return TrigPoly(n, std::move(coeffs));
}

Eigen::MatrixXcd random_matrix(int rows, int cols, RandomSource& rng) {
  Eigen::MatrixXcd a(rows, cols);
  for (int c = 0; c < cols; ++c)
    for (int r = 0; r < rows; ++r) a(r, c) = rng.unit_disc();
  return a;
}

double spectral_norm(long long dimension, const std::function<Eigen::VectorXcd(const Eigen::VectorXcd&)>& apply,
                     const std::function<Eigen::VectorXcd(const Eigen::VectorXcd&)>& apply_adjoint,
                     const SpectralNormOptions& options) {
  if (dimension == 0) return 0.0;
  RandomSource rng(options.seed);
  Eigen::VectorXcd v(dimension);
  for (long long i = 0; i < dimension; ++i) v(i) = rng.unit_disc();
  v.normalize();

  // A V_j = U_j B_j with B_j upper bidiagonal (alpha on the diagonal, beta above it);
  // the Ritz values are the singular values of B_j, i.e. sqrt(eig(B_j^T B_j)).
  std::vector<Eigen::VectorXcd> us, vs{v};
  std::vector<double> alpha, beta;
  auto orthogonalize = [](Eigen::VectorXcd& w, const std::vector<Eigen::VectorXcd>& basis) {
    for (int pass = 0; pass < 2; ++pass)
      for (const auto& b : basis) w -= b.dot(w) * b;
  };
  auto top_ritz_value = [&] {
    const auto j = static_cast<Eigen::Index>(alpha.size());
    Eigen::VectorXd diag(j), sub(std::max<Eigen::Index>(j - 1, 0));
    for (Eigen::Index i = 0; i < j; ++i) {
      diag(i) = alpha[i] * alpha[i] + (i > 0 ? beta[i - 1] * beta[i - 1] : 0.0);
      if (i + 1 < j) sub(i) = alpha[i] * beta[i];
    }
    if (j == 1) return alpha[0];
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig;
    eig.computeFromTridiagonal(diag, sub, Eigen::EigenvaluesOnly);
    return std::sqrt(std::max(eig.eigenvalues().maxCoeff(), 0.0));
  };

  const long long max_iterations = options.max_iterations > 0 ? options.max_iterations : 10 * dimension;
  double sigma = 0.0;
  for (long long it = 0; it < max_iterations; ++it) {
    Eigen::VectorXcd u = apply(vs.back());
    if (!us.empty()) u -= beta.back() * us.back();
    orthogonalize(u, us);
    const double a = u.norm();
    if (a == 0.0) return sigma;  // the Krylov space is invariant
    alpha.push_back(a);
    us.push_back(u / a);

    const double next = top_ritz_value();
    const bool exhausted = static_cast<long long>(alpha.size()) == dimension;
    if (exhausted || (it > 0 && std::abs(next - sigma) <= options.tolerance * next)) return next;
    sigma = next;

    Eigen::VectorXcd w = apply_adjoint(us.back()) - a * vs.back();
    orthogonalize(w, vs);
    const double b = w.norm();
    if (b <= 1e-14 * sigma) return sigma;
    beta.push_back(b);
    vs.push_back(w / b);
  }
  throw ConvergenceError("spectral norm iteration did not converge within " + std::to_string(max_iterations) +
                         " steps (dimension " + std::to_string(dimension) + ", last estimate " +
                         std::to_string(sigma) + ")");
}

double operator_norm(const Eigen::MatrixXcd& a, NormKind kind, const SpectralNormOptions& options) {
  if (a.size() == 0) return 0.0;
  switch (kind) {
    case NormKind::kL1:
      return a.cwiseAbs().colwise().sum().maxCoeff();
    case NormKind::kLinf:
      return a.cwiseAbs().rowwise().sum().maxCoeff();
    case NormKind::kL2:
      return spectral_norm(
          a.cols(), [&](const Eigen::VectorXcd& v) -> Eigen::VectorXcd { return a * v; },
          [&](const Eigen::VectorXcd& v) -> Eigen::VectorXcd { return a.adjoint() * v; }, options);
  }
  return 0.0;
}

double operator_norm(const QuantumOperator& a, NormKind kind, const SpectralNormOptions& options) {
  return operator_norm(a.entries, kind, options);
}

double toeplitz_spectral_norm(const TrigPoly& f, const HilbertSpec& spec, const SpectralNormOptions& options) {
  return spectral_norm(
      spec.dimension(),
      [&](const Eigen::VectorXcd& v) { return apply_toeplitz(f, QuantumState(spec, v)).amplitudes; },
      [&](const Eigen::VectorXcd& v) { return apply_toeplitz_adjoint(f, QuantumState(spec, v)).amplitudes; },
      options);
}

QuantumOperator error_product(const TrigPoly& f, const TrigPoly& g, int order, int k) {
  require_same_dimension(f.n(), g.n(), "error_product");
  const HilbertSpec spec(f.n(), k);
  const TrigPoly truncated = star_truncated(f, g, order, Orientation::kStar).evaluate_at(spec.hbar());
  return assemble_toeplitz(f, spec) * assemble_toeplitz(g, spec) - assemble_toeplitz(truncated, spec);
}

QuantumOperator error_intertwine(const TrigPoly& f, int order, int k, int sign) {
  const HilbertSpec check_spec(f.n(), k, Polarization::kTCheck);
  const HilbertSpec spec(f.n(), k, Polarization::kT);
  const TrigPoly transformed = berezin_transform(f, order, sign).evaluate_at(spec.hbar());
  return intertwine_fgq(assemble_toeplitz(f, check_spec)) - assemble_toeplitz(transformed, spec);
}

namespace {

// tr Q_f from the diagonal of the P_T matrix: entries with p = 0 mod k.
Complex toeplitz_trace_direct(const TrigPoly& f, const HilbertSpec& spec) {
  const int k = spec.k();
  Complex total = 0.0;
  for (const auto& [mode, c] : f.coeffs()) {
    bool diagonal = true;
    for (int v : mode.p) diagonal = diagonal && (v % k == 0);
    if (!diagonal) continue;
    // sum_{m in Z_k^n} e^{2 pi i q.m / k} = k^n if k | q, else 0.
    bool resonant = true;
    for (int v : mode.q) resonant = resonant && (v % k == 0);
    if (resonant) total += c * static_cast<double>(spec.dimension());
  }
  return total;
}

}  // namespace

double trace_error(const TrigPoly& f, int k) {
  const HilbertSpec spec(f.n(), k);
  const Complex tr = spec.dimension() <= kMaxDenseDimension ? operator_trace(assemble_toeplitz(f, spec))
                                                             : toeplitz_trace_direct(f, spec);
  return std::abs(tr / static_cast<double>(spec.dimension()) - f.constant_term());
}

double trace_error(const ExprAst& ast, int n, const ProjectionSpec& spec, int k) {
  return trace_error(project(ast, n, spec), k);
}

double riemann_sum_error(const TrigPoly& g, int k) {
  if (g.x_bandwidth() != 0) throw std::invalid_argument("riemann_sum_error: profile must depend on y only");
  const HilbertSpec spec(g.n(), k);
  const std::vector<double> x(g.n(), 0.0);
  std::vector<double> y(g.n());
  Complex sum = 0.0;
  for (long long i = 0; i < spec.dimension(); ++i) {
    const auto m = spec.unflatten(i);
    for (int a = 0; a < g.n(); ++a) y[a] = static_cast<double>(m[a]) / k;
    sum += g.evaluate(x, y);
  }
  return std::abs(g.constant_term() - sum / static_cast<double>(spec.dimension()));
}

double riemann_sum_error(const ExprAst& g, int n, Complex mean, int k) {
  const HilbertSpec spec(n, k);
  const std::vector<double> x(n, 0.0);
  std::vector<double> y(n);
  Complex sum = 0.0;
  for (long long i = 0; i < spec.dimension(); ++i) {
    const auto m = spec.unflatten(i);
    for (int a = 0; a < n; ++a) y[a] = static_cast<double>(m[a]) / k;
    sum += evaluate_ast(g, x, y);
  }
  return std::abs(mean - sum / static_cast<double>(spec.dimension()));
}

SlopeFit fit_slope(const std::vector<std::pair<double, double>>& points) {
  SlopeFit fit;
  std::vector<double> lx, ly;
  for (const auto& [hbar, error] : points) {
    if (!(hbar > 0.0)) throw std::invalid_argument("fit_slope: hbar must be positive");
    if (error < 0.0 || std::isnan(error)) throw std::invalid_argument("fit_slope: errors must be non-negative");
    if (error <= kErrorFloor) {
      ++fit.excluded;
      continue;
    }
    lx.push_back(std::log(hbar));
    ly.push_back(std::log(error));
  }
  fit.used = static_cast<int>(lx.size());
  if (fit.used == 0 && fit.excluded > 0) {
    fit.outcome = SlopeFit::Outcome::kExactIdentity;
    return fit;
  }
  if (fit.used < 3) {
    fit.outcome = SlopeFit::Outcome::kTooFewPoints;
    return fit;
  }
  const double count = fit.used;
  double mx = 0.0, my = 0.0;
  for (int i = 0; i < fit.used; ++i) {
    mx += lx[i];
    my += ly[i];
  }
  mx /= count;
  my /= count;
  double sxx = 0.0, sxy = 0.0;
  for (int i = 0; i < fit.used; ++i) {
    sxx += (lx[i] - mx) * (lx[i] - mx);
    sxy += (lx[i] - mx) * (ly[i] - my);
  }
  if (sxx == 0.0) throw std::invalid_argument("fit_slope: needs at least two distinct hbar values");
  fit.slope = sxy / sxx;
  double ss = 0.0;
  for (int i = 0; i < fit.used; ++i) {
    const double r = ly[i] - (my + fit.slope * (lx[i] - mx));
    ss += r * r;
  }
  fit.residual = std::sqrt(ss / count);
  fit.outcome = SlopeFit::Outcome::kFitted;
  return fit;
}

bool slope_acceptable(const SlopeFit& fit, double expected) {
  if (fit.outcome == SlopeFit::Outcome::kExactIdentity) return true;
  if (fit.outcome != SlopeFit::Outcome::kFitted) return false;
  return fit.slope >= expected - 0.2 && fit.slope <= expected + 1.2;
}

DecayCheck check_scaled_decay(const std::vector<int>& ks, const std::vector<double>& errors, double power) {
  if (ks.size() != errors.size()) throw std::invalid_argument("check_scaled_decay: length mismatch");
  DecayCheck out;
  for (std::size_t i = 0; i < ks.size(); ++i) {
    const double v = errors[i] <= kErrorFloor ? 0.0 : errors[i] * std::pow(static_cast<double>(ks[i]), power);
    if (v == 0.0) out.exact_beyond_floor = true;
    out.scaled.push_back(v);
  }
  out.pass = ks.size() >= 2;
  for (std::size_t i = 1; i < out.scaled.size(); ++i) {
    const bool both_exact = out.scaled[i] == 0.0 && out.scaled[i - 1] == 0.0;
    if (!(out.scaled[i] < out.scaled[i - 1] || both_exact)) out.pass = false;
  }
  return out;
}

}  // namespace torusquant
