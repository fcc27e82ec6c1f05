#include "torusquant/quantization.hpp"

#include <cstdio>
#include <numbers>
#include <ostream>
#include <stdexcept>
#include <string>

namespace torusquant {

namespace {

// e^{2 pi i r / k} for r = 0..k-1.
std::vector<Complex> roots_of_unity(int k) {
  std::vector<Complex> w(k);
  for (int r = 0; r < k; ++r) w[r] = std::polar(1.0, 2.0 * std::numbers::pi * r / k);
  return w;
}

int mod(long long a, int k) { return static_cast<int>(((a % k) + k) % k); }

// Visits every nonzero (row, col, value) of Q_f; the column loop is outermost.
template <typename Visit>
void for_each_toeplitz_entry(const TrigPoly& f, const HilbertSpec& spec, Visit&& visit) {
  require_same_dimension(f.n(), spec.n(), "toeplitz");
  const int n = spec.n(), k = spec.k();
  const auto roots = roots_of_unity(k);
  std::vector<int> row(n);
  for (long long col = 0; col < spec.dimension(); ++col) {
    const std::vector<int> m_col = spec.unflatten(col);
    for (const auto& [mode, c] : f.coeffs()) {
      long long phase_arg = 0;
      for (int i = 0; i < n; ++i) row[i] = mod(static_cast<long long>(m_col[i]) + mode.p[i], k);
      const std::vector<int>& y_label = spec.polarization() == Polarization::kT ? m_col : row;
      for (int i = 0; i < n; ++i) phase_arg += static_cast<long long>(mode.q[i]) * y_label[i];
      visit(spec.flatten(row), col, c * roots[mod(phase_arg, k)]);
    }
  }
}

void require_dense(const HilbertSpec& spec) {
  if (spec.dimension() > kMaxDenseDimension) {
    throw std::invalid_argument("dense operator of dimension " + std::to_string(spec.dimension()) +
                                " exceeds the cap " + std::to_string(kMaxDenseDimension) +
                                "; use apply_toeplitz");
  }
}

void require_compatible(const HilbertSpec& a, const HilbertSpec& b, const char* what) {
  if (!(a == b)) throw DimensionMismatch(std::string(what) + ": incompatible Hilbert spaces");
}

}  // namespace

std::string_view to_string(Polarization p) { return p == Polarization::kT ? "P_T" : "P_Tcheck"; }

HilbertSpec::HilbertSpec(int n, int k, Polarization pol) : n_(n), k_(k), polarization_(pol), dimension_(1) {
  if (n < 1) throw std::invalid_argument("HilbertSpec: n must be >= 1");
  if (k < 1) throw std::invalid_argument("HilbertSpec: k must be >= 1");
  for (int i = 0; i < n; ++i) {
    dimension_ *= k;
    if (dimension_ > (1LL << 40)) throw std::invalid_argument("HilbertSpec: dimension k^n too large");
  }
}

long long HilbertSpec::flatten(std::span<const int> m) const {
  require_same_dimension(static_cast<int>(m.size()), n_, "HilbertSpec::flatten");
  long long index = 0;
  for (int i = 0; i < n_; ++i) index = index * k_ + mod(m[i], k_);
  return index;
}

std::vector<int> HilbertSpec::unflatten(long long index) const {
  std::vector<int> m(n_);
  for (int i = n_ - 1; i >= 0; --i) {
    m[i] = static_cast<int>(index % k_);
    index /= k_;
  }
  return m;
}

QuantumState::QuantumState(HilbertSpec s) : spec(s), amplitudes(Eigen::VectorXcd::Zero(s.dimension())) {}

QuantumState::QuantumState(HilbertSpec s, Eigen::VectorXcd a) : spec(s), amplitudes(std::move(a)) {
  if (amplitudes.size() != spec.dimension()) throw DimensionMismatch("QuantumState: amplitude length must be k^n");
}

QuantumState QuantumState::basis(HilbertSpec spec, std::span<const int> m) {
  QuantumState s(spec);
  s.amplitudes(spec.flatten(m)) = 1.0;
  return s;
}

QuantumOperator::QuantumOperator(HilbertSpec s, Eigen::MatrixXcd e) : spec(s), entries(std::move(e)) {
  if (entries.rows() != spec.dimension() || entries.cols() != spec.dimension()) {
    throw DimensionMismatch("QuantumOperator: matrix must be k^n x k^n");
  }
}

QuantumOperator QuantumOperator::identity(HilbertSpec spec) {
  require_dense(spec);
  return {spec, Eigen::MatrixXcd::Identity(spec.dimension(), spec.dimension())};
}

QuantumOperator QuantumOperator::zero(HilbertSpec spec) {
  require_dense(spec);
  return {spec, Eigen::MatrixXcd::Zero(spec.dimension(), spec.dimension())};
}

QuantumOperator operator*(const QuantumOperator& a, const QuantumOperator& b) {
  require_compatible(a.spec, b.spec, "operator*");
  return {a.spec, a.entries * b.entries};
}

QuantumOperator operator-(const QuantumOperator& a, const QuantumOperator& b) {
  require_compatible(a.spec, b.spec, "operator-");
  return {a.spec, a.entries - b.entries};
}

QuantumOperator operator+(const QuantumOperator& a, const QuantumOperator& b) {
  require_compatible(a.spec, b.spec, "operator+");
  return {a.spec, a.entries + b.entries};
}

QuantumOperator operator*(Complex s, const QuantumOperator& a) { return {a.spec, s * a.entries}; }

QuantumOperator assemble_toeplitz(const TrigPoly& f, const HilbertSpec& spec) {
  require_same_dimension(f.n(), spec.n(), "assemble_toeplitz");
  QuantumOperator out = QuantumOperator::zero(spec);
  for_each_toeplitz_entry(f, spec, [&](long long row, long long col, Complex v) { out.entries(row, col) += v; });
  return out;
}

QuantumState apply_toeplitz(const TrigPoly& f, const QuantumState& s) {
  QuantumState out(s.spec);
  for_each_toeplitz_entry(f, s.spec, [&](long long row, long long col, Complex v) {
    out.amplitudes(row) += v * s.amplitudes(col);
  });
  return out;
}

QuantumState apply_toeplitz_adjoint(const TrigPoly& f, const QuantumState& s) {
  QuantumState out(s.spec);
  for_each_toeplitz_entry(f, s.spec, [&](long long row, long long col, Complex v) {
    out.amplitudes(col) += std::conj(v) * s.amplitudes(row);
  });
  return out;
}

QuantumOperator intertwine_fgq(const QuantumOperator& a) {
  if (a.spec.polarization() != Polarization::kTCheck) {
    throw std::invalid_argument("intertwine_fgq: operator must act on the P_Tcheck space");
  }
  HilbertSpec target(a.spec.n(), a.spec.k(), Polarization::kT);
  return {target, a.entries};
}

std::pair<QuantumOperator, QuantumOperator> quantum_torus_generators(const HilbertSpec& spec, int axis) {
  if (axis < 1 || axis > spec.n()) {
    throw std::out_of_range("quantum_torus_generators: axis " + std::to_string(axis) + " not in [1, " +
                            std::to_string(spec.n()) + "]");
  }
  FreqVector e(spec.n(), 0), zero(spec.n(), 0);
  e[axis - 1] = 1;
  return {assemble_toeplitz(TrigPoly::monomial(e, zero), spec),
          assemble_toeplitz(TrigPoly::monomial(zero, e), spec)};
}

Complex operator_trace(const QuantumOperator& a) { return a.entries.trace(); }

void write_operator_csv(std::ostream& out, const QuantumOperator& a) {
  out << "row,col,re,im\n";
  char buf[96];
  for (Eigen::Index r = 0; r < a.entries.rows(); ++r) {
    for (Eigen::Index c = 0; c < a.entries.cols(); ++c) {
      const Complex v = a.entries(r, c);
      if (v == Complex{}) continue;
      std::snprintf(buf, sizeof buf, "%lld,%lld,%.17g,%.17g\n", static_cast<long long>(r),
                    static_cast<long long>(c), v.real(), v.imag());
      out << buf;
    }
  }
}

}  // namespace torusquant
