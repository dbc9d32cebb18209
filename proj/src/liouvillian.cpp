#include <cmath>

#include "omcat/omstate.hpp"

namespace omcat {

namespace {

double inf_norm(const SpMat& m) {
  VectorXd rowsum = VectorXd::Zero(m.rows());
  for (int k = 0; k < m.outerSize(); ++k)
    for (SpMat::InnerIterator it(m, k); it; ++it) rowsum(it.row()) += std::abs(it.value());
  return rowsum.size() ? rowsum.maxCoeff() : 0.0;
}

double one_norm(const SpMat& m) {
  VectorXd colsum = VectorXd::Zero(m.cols());
  for (int k = 0; k < m.outerSize(); ++k)
    for (SpMat::InnerIterator it(m, k); it; ++it) colsum(it.col()) += std::abs(it.value());
  return colsum.size() ? colsum.maxCoeff() : 0.0;
}

double two_norm_bound(const SpMat& m) { return std::sqrt(inf_norm(m) * one_norm(m)); }

}  // namespace

Liouvillian::Liouvillian(const ContinuousParams& p) : dims_(p.dims) {
  p.validate();
  SpMat a = embed(dims_, 0, annihilation(dims_.dim(0)));
  SpMat b = embed(dims_, 1, annihilation(dims_.dim(1)));
  SpMat amu = embed(dims_, 2, annihilation(dims_.dim(2)));
  SpMat adag(a.adjoint()), bdag(b.adjoint()), amudag(amu.adjoint());

  SpMat h = SpMat(p.delta * SpMat(adag * a)) + SpMat(bdag * b) +
            SpMat(p.g * SpMat(SpMat(adag + a) * SpMat(bdag + b)));
  // Unidirectional-coupling exchange term (i/2)(sqrt(kc kmu) a^dag a_mu - h.c.)
  double ex = 0.5 * std::sqrt(p.kappa_c * p.kappa_mu);
  h += SpMat(Complex(0, ex) * SpMat(adag * amu)) - SpMat(Complex(0, ex) * SpMat(amudag * a));

  jump_ = SpMat(std::sqrt(p.kappa_c) * a) + SpMat(std::sqrt(p.kappa_mu) * amu);
  gamma_down_ = p.gamma_m * (p.nbar_th + 1.0);
  gamma_up_ = p.gamma_m * p.nbar_th;
  b_ = SpMat(std::sqrt(gamma_down_) * b);
  bdag_ = SpMat(std::sqrt(gamma_up_) * bdag);

  SpMat jdagj(SpMat(jump_.adjoint()) * jump_);
  SpMat anticomm = jdagj + SpMat(SpMat(b_.adjoint()) * b_) + SpMat(SpMat(bdag_.adjoint()) * bdag_);
  h_eff_ = h - SpMat(Complex(0, 0.5) * anticomm);
  h_eff_.makeCompressed();
  jump_.makeCompressed();
  b_.makeCompressed();
  bdag_.makeCompressed();

  bound_ = 2.0 * two_norm_bound(h_eff_) + two_norm_bound(jump_) * two_norm_bound(jump_) +
           two_norm_bound(b_) * two_norm_bound(b_) + two_norm_bound(bdag_) * two_norm_bound(bdag_);
}

MatrixXcd Liouvillian::apply(const MatrixXcd& rho) const {
  // Valid for Hermitian rho: rho H_eff^dag = (H_eff rho)^dag.
  MatrixXcd B = Complex(0, -1) * (h_eff_ * rho);
  MatrixXcd out = B + B.adjoint();
  {
    MatrixXcd C = jump_ * rho;
    out.noalias() += C * SpMat(jump_.adjoint());
  }
  if (gamma_down_ > 0) {
    MatrixXcd C = b_ * rho;
    out.noalias() += C * SpMat(b_.adjoint());
  }
  if (gamma_up_ > 0) {
    MatrixXcd C = bdag_ * rho;
    out.noalias() += C * SpMat(bdag_.adjoint());
  }
  return out;
}

SpMat Liouvillian::assemble() const {
  const long n = dims_.total();
  SpMat id = identity_op(static_cast<int>(n));
  SpMat heff_t = SpMat(h_eff_.transpose());
  SpMat heff_conj = SpMat(h_eff_.conjugate());
  SpMat super = SpMat(Complex(0, -1) * tensor(id, h_eff_)) +
                SpMat(Complex(0, 1) * tensor(heff_conj, id));
  auto add_recycle = [&](const SpMat& j) {
    if (j.nonZeros() == 0) return;
    super += tensor(SpMat(j.conjugate()), j);
  };
  add_recycle(jump_);
  add_recycle(b_);
  add_recycle(bdag_);
  return super;
}

Liouvillian build_liouvillian(const ContinuousParams& p) { return Liouvillian(p); }

namespace {

// Reduced-rank extrapolation over a trailing window of snapshots: minimizes
// ||sum c_k (x_{k+1}-x_k)|| subject to sum c_k = 1 and returns sum c_k x_k.
bool rre_extrapolate(const std::vector<MatrixXcd>& snaps, MatrixXcd& out) {
  const int m = static_cast<int>(snaps.size()) - 1;
  if (m < 2) return false;
  const long n = snaps[0].size();
  Eigen::MatrixXcd U(n, m);
  for (int k = 0; k < m; ++k)
    U.col(k) = Eigen::Map<const VectorXcd>(snaps[k + 1].data(), n) -
               Eigen::Map<const VectorXcd>(snaps[k].data(), n);
  Eigen::MatrixXcd G = U.adjoint() * U;
  // Solve G c = lambda 1 with sum c = 1.
  Eigen::VectorXcd ones = Eigen::VectorXcd::Ones(m);
  Eigen::LDLT<Eigen::MatrixXcd> ldlt(G);
  if (ldlt.info() != Eigen::Success) return false;
  Eigen::VectorXcd y = ldlt.solve(ones);
  Complex denom = ones.dot(y);
  if (std::abs(denom) < 1e-300) return false;
  Eigen::VectorXcd c = y / denom;
  Eigen::VectorXcd acc = Eigen::VectorXcd::Zero(n);
  for (int k = 0; k < m; ++k) acc += c(k) * Eigen::Map<const VectorXcd>(snaps[k].data(), n);
  out = Eigen::Map<const MatrixXcd>(acc.data(), snaps[0].rows(), snaps[0].cols());
  return true;
}

void hermitize_unit_trace(MatrixXcd& rho) {
  rho = 0.5 * (rho + rho.adjoint().eval());
  rho /= rho.trace().real();
}

}  // namespace

DensityOperator steady_state(const Liouvillian& L, const FockDims& dims,
                             const SteadyStateOptions& opts) {
  if (dims != L.dims()) throw InvalidArgumentError("steady_state: dims mismatch");
  const long n = dims.total();
  MatrixXcd rho = MatrixXcd::Zero(n, n);
  rho(0, 0) = 1.0;

  const double h_stab = 2.5 / L.spectral_bound();
  auto rk4 = [&](MatrixXcd& y, double h, int steps) {
    for (int s = 0; s < steps; ++s) {
      MatrixXcd k1 = L.apply(y);
      MatrixXcd k2 = L.apply(y + (0.5 * h) * k1);
      MatrixXcd k3 = L.apply(y + (0.5 * h) * k2);
      MatrixXcd k4 = L.apply(y + h * k3);
      y += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    }
  };
  auto residual_of = [&](const MatrixXcd& y) { return L.apply(y).cwiseAbs().maxCoeff(); };

  double t = 0.0, window = std::max(1.0, 20 * h_stab);
  const double window_max = 16.0;
  std::vector<MatrixXcd> snaps;
  double best_residual = residual_of(rho);

  while (t < opts.horizon) {
    MatrixXcd prev = rho;
    int steps = static_cast<int>(std::ceil(window / h_stab));
    rk4(rho, window / steps, steps);
    t += window;
    hermitize_unit_trace(rho);

    double diff_rate = (rho - prev).cwiseAbs().maxCoeff() / window;
    if (opts.progress) opts.progress(t, diff_rate);
    snaps.push_back(rho);
    if (snaps.size() > 6) snaps.erase(snaps.begin());

    if (diff_rate < opts.conv_per_time) {
      if (residual_of(rho) < opts.residual_tol) return DensityOperator(dims, rho, 1.0);
    }

    if (snaps.size() >= 4) {
      MatrixXcd extrap;
      if (rre_extrapolate(snaps, extrap)) {
        hermitize_unit_trace(extrap);
        double res = residual_of(extrap);
        if (res < best_residual) {
          best_residual = res;
          rho = std::move(extrap);
          snaps.clear();
          snaps.push_back(rho);
          // Fixed-point acceptance: residual certificate plus an idempotence
          // window at the declared per-time threshold.
          if (res < opts.conv_per_time * 10) {
            MatrixXcd verify = rho;
            double vwin = std::max(1.0, 20 * h_stab);
            int vsteps = static_cast<int>(std::ceil(vwin / h_stab));
            rk4(verify, vwin / vsteps, vsteps);
            double vrate = (verify - rho).cwiseAbs().maxCoeff() / vwin;
            if (vrate < opts.conv_per_time && res < opts.residual_tol) {
              hermitize_unit_trace(verify);
              return DensityOperator(dims, verify, 1.0);
            }
            rho = std::move(verify);
            hermitize_unit_trace(rho);
            snaps.clear();
            snaps.push_back(rho);
          }
        }
      }
    }
    window = std::min(2.0 * window, window_max);
  }
  throw NoSteadyStateError("steady_state: no convergence within horizon t = " +
                           std::to_string(opts.horizon));
}

DensityOperator steady_state(const ContinuousParams& p, const SteadyStateOptions& opts) {
  ContinuousParams params = p;
  for (int attempt = 0;; ++attempt) {
    Liouvillian L(params);
    DensityOperator rho = steady_state(L, params.dims, opts);
    int bad_mode = -1;
    double bad_pop = 0.0;
    for (int m = 0; m < 3; ++m) {
      double pop = rho.top_level_population(m);
      if (pop > opts.leakage_tol && pop > bad_pop) {
        bad_mode = m;
        bad_pop = pop;
      }
    }
    if (bad_mode < 0) return rho;
    if (attempt >= 1 || !opts.allow_retry)
      throw TruncationOverflowError("steady_state: top-level population " +
                                    std::to_string(bad_pop) + " in mode " +
                                    std::to_string(bad_mode) + " (dim " +
                                    std::to_string(params.dims.dim(bad_mode)) + ")");
    std::vector<int> grown = params.dims.dims();
    for (int& d : grown) d += 2;
    params.dims = FockDims(grown);
  }
}

}  // namespace omcat
