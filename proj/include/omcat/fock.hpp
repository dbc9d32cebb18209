#pragma once

#include <complex>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include "omcat/errors.hpp"

namespace omcat {

using Complex = std::complex<double>;
using MatrixXcd = Eigen::MatrixXcd;
using VectorXcd = Eigen::VectorXcd;
using VectorXd = Eigen::VectorXd;
using SpMat = Eigen::SparseMatrix<Complex>;

/// Per-mode truncation dimensions of a tensor product of Fock spaces.
/// Mode order is fixed: mode 0 = optical/output, mode 1 = mechanical,
/// mode 2 = filter when present. Flat indices are mode-0-major
/// (row-major over modes): flat = n0*d1*d2*... + n1*d2*... + ...
class FockDims {
 public:
  FockDims() = default;
  explicit FockDims(std::vector<int> dims);

  int n_modes() const { return static_cast<int>(dims_.size()); }
  int dim(int mode) const { return dims_.at(mode); }
  long total() const { return total_; }
  const std::vector<int>& dims() const { return dims_; }

  long flat_index(const std::vector<int>& occ) const;
  std::vector<int> unflatten(long flat) const;
  // Stride of one step in mode m's occupation number within the flat index.
  long stride(int mode) const;

  bool operator==(const FockDims& o) const { return dims_ == o.dims_; }
  bool operator!=(const FockDims& o) const { return !(*this == o); }
  std::string to_string() const;

 private:
  std::vector<int> dims_;
  long total_ = 0;
};

/// Density operator over truncated Fock spaces. The stored matrix is kept
/// normalized to unit trace; `norm` records the trace prior to the last
/// renormalization and is used as the heralding weight of conditional
/// operations (1 for directly prepared states).
class DensityOperator {
 public:
  DensityOperator() = default;
  // Validates Hermiticity (1e-10 on max |rho - rho^dag| element) and positive
  // trace, then stores matrix/trace separately.
  DensityOperator(FockDims dims, MatrixXcd matrix);
  DensityOperator(FockDims dims, MatrixXcd matrix, double norm);

  static DensityOperator vacuum(const FockDims& dims);
  static DensityOperator fock(const FockDims& dims, const std::vector<int>& occ);
  // Product of single-mode thermal states with the given mean occupations.
  static DensityOperator thermal(const FockDims& dims, const std::vector<double>& nbar);
  static DensityOperator from_ket(const FockDims& dims, const VectorXcd& amplitudes);

  const FockDims& dims() const { return dims_; }
  const MatrixXcd& matrix() const { return m_; }
  double norm() const { return norm_; }

  double purity() const { return (m_ * m_).trace().real(); }
  // Smallest eigenvalue; the positivity invariant (>= -1e-8) is checked on
  // demand, not per-operation.
  double min_eigenvalue() const;
  void check_positivity(double tol = 1e-8) const;

  Complex expectation(const SpMat& op) const;
  // Population of the top Fock level of one mode.
  double top_level_population(int mode) const;

 private:
  FockDims dims_;
  MatrixXcd m_;
  double norm_ = 1.0;
};

/// Normalized pure state over truncated Fock spaces (unit 2-norm to 1e-10).
struct Ket {
  FockDims dims;
  VectorXcd amplitudes;

  Ket() = default;
  Ket(FockDims d, VectorXcd amps);
  DensityOperator to_density() const;
};

// ---- single-mode operators (dim x dim sparse) ----

// Matrix element (n-1, n) = sqrt(n). Requires dim >= 2.
SpMat annihilation(int dim);
SpMat creation(int dim);
SpMat number_operator(int dim);
SpMat identity_op(int dim);
// q = (a + a^dag)/sqrt(2), p = i(a^dag - a)/sqrt(2); [q, p] = i, vacuum
// variance 1/2.
SpMat quadrature_q(int dim);
SpMat quadrature_p(int dim);

// Kronecker product with mode-0-major index convention.
SpMat tensor(const SpMat& a, const SpMat& b);
MatrixXcd tensor_dense(const MatrixXcd& a, const MatrixXcd& b);
// Lift a single-mode operator to the full space (identity on other modes).
SpMat embed(const FockDims& dims, int mode, const SpMat& op);

// ---- multimode reshuffling ----

DensityOperator partial_trace(const DensityOperator& rho, const std::vector<int>& keep);
// Element-wise index swap on the chosen mode of a two-mode state.
MatrixXcd partial_transpose(const DensityOperator& rho, int mode);
// Reorder tensor factors; `order[k]` names the input mode placed at slot k.
DensityOperator permute_modes(const DensityOperator& rho, const std::vector<int>& order);

// Sum of singular values; for Hermitian input computed as sum |eigenvalues|.
double trace_norm(const MatrixXcd& m);

// ---- Hermite-Gauss position wavefunctions ----

// <x|n> = pi^(-1/4) (2^n n!)^(-1/2) exp(-x^2/2) H_n(x), by the stable
// three-term recurrence (never via raw factorials).
double hermite_wavefunction(int n, double x);
// psi_n'(x) = sqrt(2n) psi_{n-1}(x) - x psi_n(x)
double hermite_wavefunction_derivative(int n, double x);
// psi_0..psi_{nmax-1} at x in one recurrence pass.
VectorXd hermite_wavefunctions_upto(int nmax, double x);
VectorXd hermite_wavefunction_derivatives_upto(int nmax, double x);

// ---- two-mode squeezing flow ----

// rho -> S(r) rho S^dag(r), S(r) = exp{r(a^dag b^dag - a b)}, integrated as a
// flow d(rho)/ds = K rho - rho K with adaptive step-doubling control.
// The population of the top Fock level of either mode must stay below
// `leakage_tol` (default 1e-4) throughout, else truncation-overflow naming
// the offending mode.
DensityOperator two_mode_squeeze_apply(const DensityOperator& rho, double r,
                                       double leakage_tol = 1e-4);
// Same flow acting on a pure state.
Ket two_mode_squeeze_apply(const Ket& psi, double r, double leakage_tol = 1e-4);

}  // namespace omcat
