#pragma once

// Toeplitz quantization on the Bohr-Sommerfeld bases {sigma^m} (polarization
// P_T) and {sigma-check^m} (P_Tcheck), m in Z_k^n.
//
// With f = sum_r fhat_r(y) e^{2 pi i r.x}, the matrix entries are
//
//   P_T:      Q_f[m][m']  = sum_{r = m - m' mod k} fhat_r(hbar m')
//   P_Tcheck: Qc_f[m][m'] = sum_{r = m - m' mod k} fhat_r(hbar m)
//
// Basis labels use the canonical residues 0..k-1 and are flattened row-major,
// index(m) = sum_i m_i k^{n-i}.

#include <complex>
#include <iosfwd>
#include <string_view>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "torusquant/trig_poly.hpp"

namespace torusquant {

enum class Polarization { kT, kTCheck };

std::string_view to_string(Polarization p);

/// Largest dimension k^n for which dense matrices are built.
constexpr long long kMaxDenseDimension = 4096;

class HilbertSpec {
 public:
  HilbertSpec(int n, int k, Polarization polarization = Polarization::kT);

  int n() const { return n_; }
  int k() const { return k_; }
  Polarization polarization() const { return polarization_; }
  long long dimension() const { return dimension_; }
  double hbar() const { return 1.0 / k_; }

  long long flatten(std::span<const int> m) const;
  std::vector<int> unflatten(long long index) const;

  bool operator==(const HilbertSpec&) const = default;

 private:
  int n_;
  int k_;
  Polarization polarization_;
  long long dimension_;
};

struct QuantumState {
  HilbertSpec spec;
  Eigen::VectorXcd amplitudes;

  explicit QuantumState(HilbertSpec spec);
  QuantumState(HilbertSpec spec, Eigen::VectorXcd amplitudes);
  static QuantumState basis(HilbertSpec spec, std::span<const int> m);
};

struct QuantumOperator {
  HilbertSpec spec;
  Eigen::MatrixXcd entries;

  QuantumOperator(HilbertSpec spec, Eigen::MatrixXcd entries);
  static QuantumOperator identity(HilbertSpec spec);
  static QuantumOperator zero(HilbertSpec spec);

  long long dimension() const { return spec.dimension(); }
};

QuantumOperator operator*(const QuantumOperator& a, const QuantumOperator& b);
QuantumOperator operator-(const QuantumOperator& a, const QuantumOperator& b);
QuantumOperator operator+(const QuantumOperator& a, const QuantumOperator& b);
QuantumOperator operator*(Complex s, const QuantumOperator& a);

QuantumOperator assemble_toeplitz(const TrigPoly& f, const HilbertSpec& spec);

/// Matrix-free Q_f s, O(k^n supp f).
QuantumState apply_toeplitz(const TrigPoly& f, const QuantumState& s);

/// Matrix-free (Q_f)^* s.
QuantumState apply_toeplitz_adjoint(const TrigPoly& f, const QuantumState& s);

/// Conjugation by the pairing map sigma-check^m -> sigma^m. Matrix unchanged, tag flipped.
QuantumOperator intertwine_fgq(const QuantumOperator& a);

/// (U_i, V_i) = (Q of e^{2 pi i x_i}, Q of e^{2 pi i y_i}); axis is 1-based.
std::pair<QuantumOperator, QuantumOperator> quantum_torus_generators(const HilbertSpec& spec, int axis);

Complex operator_trace(const QuantumOperator& a);

/// Nonzero entries as CSV rows "row,col,re,im" in lexicographic (row, col) order.
void write_operator_csv(std::ostream& out, const QuantumOperator& a);

}  // namespace torusquant
