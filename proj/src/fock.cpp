#include "omcat/fock.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

namespace omcat {

FockDims::FockDims(std::vector<int> dims) : dims_(std::move(dims)) {
  if (dims_.empty()) throw InvalidDimensionError("FockDims: need at least one mode");
  total_ = 1;
  for (int d : dims_) {
    if (d < 1) throw InvalidDimensionError("FockDims: every mode dimension must be >= 1");
    total_ *= d;
  }
}

long FockDims::flat_index(const std::vector<int>& occ) const {
  if (static_cast<int>(occ.size()) != n_modes())
    throw InvalidArgumentError("flat_index: occupation list has wrong length");
  long idx = 0;
  for (int m = 0; m < n_modes(); ++m) {
    if (occ[m] < 0 || occ[m] >= dims_[m])
      throw InvalidArgumentError("flat_index: occupation out of range");
    idx = idx * dims_[m] + occ[m];
  }
  return idx;
}

std::vector<int> FockDims::unflatten(long flat) const {
  std::vector<int> occ(n_modes());
  for (int m = n_modes() - 1; m >= 0; --m) {
    occ[m] = static_cast<int>(flat % dims_[m]);
    flat /= dims_[m];
  }
  return occ;
}

long FockDims::stride(int mode) const {
  long s = 1;
  for (int m = n_modes() - 1; m > mode; --m) s *= dims_[m];
  return s;
}

std::string FockDims::to_string() const {
  std::ostringstream os;
  for (int m = 0; m < n_modes(); ++m) os << (m ? "x" : "") << dims_[m];
  return os.str();
}

DensityOperator::DensityOperator(FockDims dims, MatrixXcd matrix)
    : DensityOperator(std::move(dims), std::move(matrix), 0.0) {}

DensityOperator::DensityOperator(FockDims dims, MatrixXcd matrix, double norm)
    : dims_(std::move(dims)), m_(std::move(matrix)), norm_(norm) {
  if (m_.rows() != dims_.total() || m_.cols() != dims_.total())
    throw InvalidDimensionError("DensityOperator: matrix size does not match dims " +
                                dims_.to_string());
  double herm = (m_ - m_.adjoint()).cwiseAbs().maxCoeff();
  double scale = std::max(1.0, m_.cwiseAbs().maxCoeff());
  if (herm > 1e-10 * scale)
    throw NumericalConsistencyError("DensityOperator: Hermiticity violation " +
                                    std::to_string(herm));
  m_ = 0.5 * (m_ + m_.adjoint().eval());
  double tr = m_.trace().real();
  if (!(tr > 0.0))
    throw NumericalConsistencyError("DensityOperator: non-positive trace " + std::to_string(tr));
  if (norm_ == 0.0) norm_ = tr;
  m_ /= tr;
}

DensityOperator DensityOperator::vacuum(const FockDims& dims) {
  return fock(dims, std::vector<int>(dims.n_modes(), 0));
}

DensityOperator DensityOperator::fock(const FockDims& dims, const std::vector<int>& occ) {
  MatrixXcd m = MatrixXcd::Zero(dims.total(), dims.total());
  long i = dims.flat_index(occ);
  m(i, i) = 1.0;
  return DensityOperator(dims, std::move(m), 1.0);
}

DensityOperator DensityOperator::thermal(const FockDims& dims, const std::vector<double>& nbar) {
  if (static_cast<int>(nbar.size()) != dims.n_modes())
    throw InvalidArgumentError("thermal: need one nbar per mode");
  VectorXd diag = VectorXd::Ones(dims.total());
  for (long i = 0; i < dims.total(); ++i) {
    auto occ = dims.unflatten(i);
    double w = 1.0;
    for (int m = 0; m < dims.n_modes(); ++m) {
      double nb = nbar[m];
      if (nb < 0) throw InvalidArgumentError("thermal: nbar must be >= 0");
      w *= (nb == 0.0) ? (occ[m] == 0 ? 1.0 : 0.0)
                       : std::pow(nb / (1.0 + nb), occ[m]) / (1.0 + nb);
    }
    diag(i) = w;
  }
  MatrixXcd m = diag.cast<Complex>().asDiagonal();
  return DensityOperator(dims, std::move(m), 1.0);
}

DensityOperator DensityOperator::from_ket(const FockDims& dims, const VectorXcd& amplitudes) {
  if (amplitudes.size() != dims.total())
    throw InvalidDimensionError("from_ket: amplitude vector size mismatch");
  MatrixXcd m = amplitudes * amplitudes.adjoint();
  return DensityOperator(dims, std::move(m), 1.0);
}

double DensityOperator::min_eigenvalue() const {
  Eigen::SelfAdjointEigenSolver<MatrixXcd> es(m_, Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff();
}

void DensityOperator::check_positivity(double tol) const {
  double lam = min_eigenvalue();
  if (lam < -tol)
    throw NumericalConsistencyError("DensityOperator: negative eigenvalue " + std::to_string(lam));
}

Complex DensityOperator::expectation(const SpMat& op) const {
  if (op.rows() != m_.rows()) throw InvalidDimensionError("expectation: operator size mismatch");
  Complex tr = 0;
  for (int k = 0; k < op.outerSize(); ++k)
    for (SpMat::InnerIterator it(op, k); it; ++it) tr += it.value() * m_(it.col(), it.row());
  return tr;
}

double DensityOperator::top_level_population(int mode) const {
  const int d = dims_.dim(mode);
  const long str = dims_.stride(mode);
  double pop = 0.0;
  for (long i = 0; i < dims_.total(); ++i)
    if ((i / str) % d == d - 1) pop += m_(i, i).real();
  return pop;
}

Ket::Ket(FockDims d, VectorXcd amps) : dims(std::move(d)), amplitudes(std::move(amps)) {
  if (amplitudes.size() != dims.total()) throw InvalidDimensionError("Ket: size mismatch");
  double n = amplitudes.norm();
  if (std::abs(n - 1.0) > 1e-10) throw NumericalConsistencyError("Ket: norm deviates from 1");
}

DensityOperator Ket::to_density() const { return DensityOperator::from_ket(dims, amplitudes); }

SpMat annihilation(int dim) {
  if (dim < 2) throw InvalidDimensionError("annihilation: dim must be >= 2");
  SpMat a(dim, dim);
  a.reserve(Eigen::VectorXi::Constant(dim, 1));
  for (int n = 1; n < dim; ++n) a.insert(n - 1, n) = std::sqrt(static_cast<double>(n));
  a.makeCompressed();
  return a;
}

SpMat creation(int dim) { return SpMat(annihilation(dim).adjoint()); }

SpMat number_operator(int dim) {
  SpMat n(dim, dim);
  for (int k = 1; k < dim; ++k) n.insert(k, k) = static_cast<double>(k);
  n.makeCompressed();
  return n;
}

SpMat identity_op(int dim) {
  SpMat i(dim, dim);
  i.setIdentity();
  return i;
}

SpMat quadrature_q(int dim) {
  SpMat a = annihilation(dim);
  return SpMat((a + SpMat(a.adjoint())) / std::sqrt(2.0));
}

SpMat quadrature_p(int dim) {
  SpMat a = annihilation(dim);
  return SpMat((SpMat(a.adjoint()) - a) * Complex(0, 1) / std::sqrt(2.0));
}

SpMat tensor(const SpMat& a, const SpMat& b) {
  SpMat out(a.rows() * b.rows(), a.cols() * b.cols());
  std::vector<Eigen::Triplet<Complex>> trips;
  trips.reserve(static_cast<size_t>(a.nonZeros()) * b.nonZeros());
  for (int ka = 0; ka < a.outerSize(); ++ka)
    for (SpMat::InnerIterator ia(a, ka); ia; ++ia)
      for (int kb = 0; kb < b.outerSize(); ++kb)
        for (SpMat::InnerIterator ib(b, kb); ib; ++ib)
          trips.emplace_back(ia.row() * b.rows() + ib.row(), ia.col() * b.cols() + ib.col(),
                             ia.value() * ib.value());
  out.setFromTriplets(trips.begin(), trips.end());
  return out;
}

MatrixXcd tensor_dense(const MatrixXcd& a, const MatrixXcd& b) {
  MatrixXcd out(a.rows() * b.rows(), a.cols() * b.cols());
  for (long i = 0; i < a.rows(); ++i)
    for (long j = 0; j < a.cols(); ++j) out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

SpMat embed(const FockDims& dims, int mode, const SpMat& op) {
  if (mode < 0 || mode >= dims.n_modes()) throw InvalidArgumentError("embed: mode out of range");
  if (op.rows() != dims.dim(mode)) throw InvalidDimensionError("embed: operator size mismatch");
  SpMat out = (mode == 0) ? op : identity_op(dims.dim(0));
  if (mode == 0 && dims.n_modes() == 1) return out;
  for (int m = 1; m < dims.n_modes(); ++m)
    out = tensor(out, (m == mode) ? op : identity_op(dims.dim(m)));
  return out;
}

DensityOperator partial_trace(const DensityOperator& rho, const std::vector<int>& keep) {
  const FockDims& dims = rho.dims();
  if (keep.empty()) throw InvalidArgumentError("partial_trace: keep set must be nonempty");
  std::vector<int> keep_sorted = keep;
  std::sort(keep_sorted.begin(), keep_sorted.end());
  for (int m : keep_sorted)
    if (m < 0 || m >= dims.n_modes()) throw InvalidArgumentError("partial_trace: mode out of range");

  std::vector<int> traced;
  for (int m = 0; m < dims.n_modes(); ++m)
    if (!std::binary_search(keep_sorted.begin(), keep_sorted.end(), m)) traced.push_back(m);

  std::vector<int> kept_dims;
  for (int m : keep_sorted) kept_dims.push_back(dims.dim(m));
  FockDims out_dims(kept_dims);

  long traced_total = 1;
  for (int m : traced) traced_total *= dims.dim(m);

  MatrixXcd out = MatrixXcd::Zero(out_dims.total(), out_dims.total());
  std::vector<int> occ_i(dims.n_modes()), occ_j(dims.n_modes());
  for (long ik = 0; ik < out_dims.total(); ++ik) {
    auto keep_i = out_dims.unflatten(ik);
    for (long jk = 0; jk < out_dims.total(); ++jk) {
      auto keep_j = out_dims.unflatten(jk);
      Complex sum = 0;
      for (long t = 0; t < traced_total; ++t) {
        long rem = t;
        for (size_t u = traced.size(); u-- > 0;) {
          occ_i[traced[u]] = occ_j[traced[u]] = static_cast<int>(rem % dims.dim(traced[u]));
          rem /= dims.dim(traced[u]);
        }
        for (size_t u = 0; u < keep_sorted.size(); ++u) {
          occ_i[keep_sorted[u]] = keep_i[u];
          occ_j[keep_sorted[u]] = keep_j[u];
        }
        sum += rho.matrix()(dims.flat_index(occ_i), dims.flat_index(occ_j));
      }
      out(ik, jk) = sum;
    }
  }
  return DensityOperator(out_dims, std::move(out), rho.norm());
}

MatrixXcd partial_transpose(const DensityOperator& rho, int mode) {
  const FockDims& dims = rho.dims();
  if (dims.n_modes() != 2) throw InvalidArgumentError("partial_transpose: need a two-mode state");
  if (mode < 0 || mode > 1) throw InvalidArgumentError("partial_transpose: mode out of range");
  const int d0 = dims.dim(0), d1 = dims.dim(1);
  MatrixXcd out(dims.total(), dims.total());
  for (int i0 = 0; i0 < d0; ++i0)
    for (int i1 = 0; i1 < d1; ++i1)
      for (int j0 = 0; j0 < d0; ++j0)
        for (int j1 = 0; j1 < d1; ++j1) {
          long r = static_cast<long>(i0) * d1 + i1, c = static_cast<long>(j0) * d1 + j1;
          long rs = (mode == 0) ? static_cast<long>(j0) * d1 + i1 : static_cast<long>(i0) * d1 + j1;
          long cs = (mode == 0) ? static_cast<long>(i0) * d1 + j1 : static_cast<long>(j0) * d1 + i1;
          out(r, c) = rho.matrix()(rs, cs);
        }
  return out;
}

DensityOperator permute_modes(const DensityOperator& rho, const std::vector<int>& order) {
  const FockDims& dims = rho.dims();
  if (static_cast<int>(order.size()) != dims.n_modes())
    throw InvalidArgumentError("permute_modes: order length mismatch");
  std::vector<int> new_dims(order.size());
  for (size_t k = 0; k < order.size(); ++k) new_dims[k] = dims.dim(order[k]);
  FockDims out_dims(new_dims);

  std::vector<long> map(dims.total());
  std::vector<int> occ(order.size());
  for (long i = 0; i < dims.total(); ++i) {
    auto o = dims.unflatten(i);
    for (size_t k = 0; k < order.size(); ++k) occ[k] = o[order[k]];
    map[i] = out_dims.flat_index(occ);
  }
  MatrixXcd out(dims.total(), dims.total());
  for (long i = 0; i < dims.total(); ++i)
    for (long j = 0; j < dims.total(); ++j) out(map[i], map[j]) = rho.matrix()(i, j);
  return DensityOperator(out_dims, std::move(out), rho.norm());
}

double trace_norm(const MatrixXcd& m) {
  if (m.rows() != m.cols()) throw InvalidArgumentError("trace_norm: matrix must be square");
  double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
  if ((m - m.adjoint()).cwiseAbs().maxCoeff() < 1e-12 * scale) {
    Eigen::SelfAdjointEigenSolver<MatrixXcd> es(m, Eigen::EigenvaluesOnly);
    return es.eigenvalues().cwiseAbs().sum();
  }
  Eigen::BDCSVD<MatrixXcd> svd(m);
  return svd.singularValues().sum();
}

double hermite_wavefunction(int n, double x) {
  if (n < 0) throw InvalidArgumentError("hermite_wavefunction: n must be >= 0");
  const double psi0 = std::pow(M_PI, -0.25) * std::exp(-0.5 * x * x);
  if (n == 0) return psi0;
  double pm2 = psi0, pm1 = x * std::sqrt(2.0) * psi0;
  for (int k = 2; k <= n; ++k) {
    double p = x * std::sqrt(2.0 / k) * pm1 - std::sqrt((k - 1.0) / k) * pm2;
    pm2 = pm1;
    pm1 = p;
  }
  return pm1;
}

double hermite_wavefunction_derivative(int n, double x) {
  if (n < 0) throw InvalidArgumentError("hermite_wavefunction_derivative: n must be >= 0");
  if (n == 0) return -x * hermite_wavefunction(0, x);
  return std::sqrt(2.0 * n) * hermite_wavefunction(n - 1, x) - x * hermite_wavefunction(n, x);
}

VectorXd hermite_wavefunctions_upto(int nmax, double x) {
  if (nmax < 1) throw InvalidArgumentError("hermite_wavefunctions_upto: nmax must be >= 1");
  VectorXd psi(nmax);
  psi(0) = std::pow(M_PI, -0.25) * std::exp(-0.5 * x * x);
  if (nmax > 1) psi(1) = x * std::sqrt(2.0) * psi(0);
  for (int k = 2; k < nmax; ++k)
    psi(k) = x * std::sqrt(2.0 / k) * psi(k - 1) - std::sqrt((k - 1.0) / k) * psi(k - 2);
  return psi;
}

VectorXd hermite_wavefunction_derivatives_upto(int nmax, double x) {
  VectorXd psi = hermite_wavefunctions_upto(nmax, x);
  VectorXd dpsi(nmax);
  dpsi(0) = -x * psi(0);
  for (int k = 1; k < nmax; ++k) dpsi(k) = std::sqrt(2.0 * k) * psi(k - 1) - x * psi(k);
  return dpsi;
}

namespace {

// Generator K = a^dag b^dag - a b on a two-mode space, as a sparse matrix.
SpMat squeeze_generator(const FockDims& dims) {
  SpMat a = embed(dims, 0, annihilation(dims.dim(0)));
  SpMat b = embed(dims, 1, annihilation(dims.dim(1)));
  SpMat ab = SpMat(a * b);
  return SpMat(SpMat(ab.adjoint()) - ab);
}

void check_leakage(const DensityOperator& rho, double tol, const char* where) {
  for (int m = 0; m < rho.dims().n_modes(); ++m) {
    double pop = rho.top_level_population(m);
    if (pop > tol)
      throw TruncationOverflowError(std::string(where) + ": top-level population " +
                                    std::to_string(pop) + " in mode " + std::to_string(m) +
                                    " (dim " + std::to_string(rho.dims().dim(m)) + ")");
  }
}

double top_population_ket(const FockDims& dims, const VectorXcd& v, int mode) {
  const int d = dims.dim(mode);
  const long str = dims.stride(mode);
  double pop = 0.0;
  for (long i = 0; i < dims.total(); ++i)
    if ((i / str) % d == d - 1) pop += std::norm(v(i));
  return pop;
}

// One RK4 step of y' = f(y).
template <typename Vec, typename F>
Vec rk4_step(const Vec& y, double h, F&& f) {
  Vec k1 = f(y);
  Vec k2 = f(Vec(y + 0.5 * h * k1));
  Vec k3 = f(Vec(y + 0.5 * h * k2));
  Vec k4 = f(Vec(y + h * k3));
  return y + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

// Integrate y' = f(y) over [0, r] with step-doubling error control.
template <typename Vec, typename F, typename LeakCheck>
Vec integrate_flow(Vec y, double r, F&& f, LeakCheck&& leak, double tol) {
  const double dir = (r >= 0) ? 1.0 : -1.0;
  double remaining = std::abs(r);
  double h = std::min(0.05, remaining);
  while (remaining > 0) {
    h = std::min(h, remaining);
    Vec full = rk4_step(y, dir * h, f);
    Vec half = rk4_step(y, dir * h / 2, f);
    half = rk4_step(half, dir * h / 2, f);
    double err = (full - half).cwiseAbs().maxCoeff();
    if (err > tol && h > 1e-6) {
      h *= 0.5;
      continue;
    }
    y = std::move(half);
    remaining -= h;
    leak(y);
    if (err < tol / 32 && h < 0.25) h *= 2;
  }
  return y;
}

}  // namespace

Ket two_mode_squeeze_apply(const Ket& psi, double r, double leakage_tol) {
  if (psi.dims.n_modes() != 2)
    throw InvalidArgumentError("two_mode_squeeze_apply: need a two-mode state");
  if (r == 0.0) return psi;
  SpMat K = squeeze_generator(psi.dims);
  auto f = [&](const VectorXcd& v) { return VectorXcd(K * v); };
  auto leak = [&](const VectorXcd& v) {
    for (int m = 0; m < 2; ++m) {
      double pop = top_population_ket(psi.dims, v, m);
      if (pop > leakage_tol)
        throw TruncationOverflowError("two_mode_squeeze_apply: top-level population " +
                                      std::to_string(pop) + " in mode " + std::to_string(m) +
                                      " (dim " + std::to_string(psi.dims.dim(m)) + ")");
    }
  };
  VectorXcd v = integrate_flow(psi.amplitudes, r, f, leak, 1e-12);
  v /= v.norm();
  return Ket(psi.dims, v);
}

DensityOperator two_mode_squeeze_apply(const DensityOperator& rho, double r, double leakage_tol) {
  if (rho.dims().n_modes() != 2)
    throw InvalidArgumentError("two_mode_squeeze_apply: need a two-mode state");
  if (r == 0.0) return rho;
  const FockDims& dims = rho.dims();
  const long N = dims.total();

  // Diagonal input (vacuum/thermal/Fock products): evolve each occupied basis
  // ket under the same generator flow and reassemble. Exact same map at a
  // fraction of the density-flow cost.
  double offdiag = 0.0;
  for (long i = 0; i < N; ++i)
    for (long j = 0; j < N; ++j)
      if (i != j) offdiag = std::max(offdiag, std::abs(rho.matrix()(i, j)));
  if (offdiag < 1e-15) {
    SpMat K = squeeze_generator(dims);
    auto f = [&](const VectorXcd& v) { return VectorXcd(K * v); };
    MatrixXcd out = MatrixXcd::Zero(N, N);
    double kept = 0.0;
    for (long i = 0; i < N; ++i) {
      double w = rho.matrix()(i, i).real();
      if (w < 1e-14) continue;
      VectorXcd v0 = VectorXcd::Zero(N);
      v0(i) = 1.0;
      auto leak = [&](const VectorXcd& v) {
        for (int m = 0; m < 2; ++m) {
          double pop = w * top_population_ket(dims, v, m);
          if (pop > leakage_tol)
            throw TruncationOverflowError("two_mode_squeeze_apply: top-level population " +
                                          std::to_string(pop) + " in mode " + std::to_string(m) +
                                          " (dim " + std::to_string(dims.dim(m)) + ")");
        }
      };
      VectorXcd v = integrate_flow(v0, r, f, leak, 1e-12);
      out.noalias() += w * (v * v.adjoint());
      kept += w;
    }
    DensityOperator result(dims, std::move(out), rho.norm());
    check_leakage(result, leakage_tol, "two_mode_squeeze_apply");
    return result;
  }

  SpMat K = squeeze_generator(dims);
  auto f = [&](const MatrixXcd& m) { return MatrixXcd(K * m - m * K); };
  auto leak = [&](const MatrixXcd& m) {
    DensityOperator tmp(dims, m, 1.0);
    check_leakage(tmp, leakage_tol, "two_mode_squeeze_apply");
  };
  MatrixXcd out = integrate_flow(MatrixXcd(rho.matrix()), r, f, leak, 1e-11);
  return DensityOperator(dims, std::move(out), rho.norm());
}

}  // namespace omcat
