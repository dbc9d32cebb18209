#include "omcat/catmetrics.hpp"

#include <cmath>

namespace omcat {

namespace {

// Tr[rho D(gamma) Pi] via normalized Laguerre recurrences along the
// diagonals of rho: sum_j sum_k (-1)^k b_k^{(j)}(x) c_{jk}, with
// b_k^{(j)} = sqrt(k!/(k+j)!) L_k^{(j)}(x), x = |gamma|^2,
// c_{0k} = rho_kk and c_{jk} = 2 Re(rho_{k,k+j} gamma^j) for j >= 1.
double displaced_parity_trace(const MatrixXcd& rho, Complex gamma) {
  const int d = static_cast<int>(rho.rows());
  const double x = std::norm(gamma);
  double total = 0.0;

  // j = 0: b_k = L_k(x)
  {
    double bkm2 = 0.0, bkm1 = 1.0;  // b_0
    double sum = rho(0, 0).real();
    for (int k = 1; k < d; ++k) {
      double bk = ((2.0 * k - 1.0 - x) * bkm1 - (k - 1.0) * bkm2) / k;
      sum += (k % 2 ? -1.0 : 1.0) * rho(k, k).real() * bk;
      bkm2 = bkm1;
      bkm1 = bk;
    }
    total += sum;
  }

  Complex gamma_j = 1.0;
  double inv_sqrt_fact = 1.0;  // 1/sqrt(j!)
  for (int j = 1; j < d; ++j) {
    gamma_j *= gamma;
    inv_sqrt_fact /= std::sqrt(static_cast<double>(j));
    if (std::abs(gamma_j) * inv_sqrt_fact == 0.0) break;
    double bkm2 = 0.0;
    double bkm1 = inv_sqrt_fact;                                  // b_0^{(j)}
    double sum = 2.0 * (rho(0, j) * gamma_j).real() * bkm1;
    for (int k = 1; k + j < d; ++k) {
      double bk = ((2.0 * k + j - 1.0 - x) * bkm1 -
                   std::sqrt((k - 1.0) * (k - 1.0 + j)) * bkm2) /
                  std::sqrt(static_cast<double>(k) * (k + j));
      sum += (k % 2 ? -1.0 : 1.0) * 2.0 * (rho(k, k + j) * gamma_j).real() * bk;
      bkm2 = bkm1;
      bkm1 = bk;
    }
    total += sum;
  }
  return std::exp(-0.5 * x) * total;
}

void check_single_mode(const DensityOperator& rho, const char* what) {
  if (rho.dims().n_modes() != 1)
    throw InvalidArgumentError(std::string(what) + ": need a single-mode state");
}

}  // namespace

WignerMap wigner(const DensityOperator& rho, const VectorXd& qgrid, const VectorXd& pgrid) {
  check_single_mode(rho, "wigner");
  if (qgrid.size() < 2 || pgrid.size() < 2)
    throw InvalidArgumentError("wigner: grids need at least two points");
  WignerMap map;
  map.q = qgrid;
  map.p = pgrid;
  map.dq = qgrid(1) - qgrid(0);
  map.dp = pgrid(1) - pgrid(0);
  map.w.resize(qgrid.size(), pgrid.size());
  const MatrixXcd& m = rho.matrix();
  for (long i = 0; i < qgrid.size(); ++i)
    for (long j = 0; j < pgrid.size(); ++j) {
      Complex gamma(2.0 * qgrid(i), 2.0 * pgrid(j));
      map.w(i, j) = (2.0 / M_PI) * displaced_parity_trace(m, gamma);
    }
  map.boundary_max = std::max({map.w.row(0).cwiseAbs().maxCoeff(),
                               map.w.row(map.w.rows() - 1).cwiseAbs().maxCoeff(),
                               map.w.col(0).cwiseAbs().maxCoeff(),
                               map.w.col(map.w.cols() - 1).cwiseAbs().maxCoeff()});
  map.coverage_ok = map.boundary_max <= 1e-6;
  return map;
}

WignerMap wigner(const DensityOperator& rho, double half, int n) {
  VectorXd grid = VectorXd::LinSpaced(n, -half, half);
  return wigner(rho, grid, grid);
}

WignerMap wigner_auto(const DensityOperator& rho) {
  double half = 6.0;
  int n = 241;
  for (int round = 0; round < 4; ++round) {
    WignerMap map = wigner(rho, half, n);
    if (map.coverage_ok) return map;
    half += 2.0;
    n += 80;
  }
  return wigner(rho, half, n);
}

double wigner_negativity(const WignerMap& map) {
  double neg = 0.0;
  for (long i = 0; i < map.w.rows(); ++i)
    for (long j = 0; j < map.w.cols(); ++j) neg += std::abs(map.w(i, j)) - map.w(i, j);
  return neg * map.dq * map.dp;
}

double negativity_entanglement(const DensityOperator& rho_ab) {
  return 0.5 * (trace_norm(partial_transpose(rho_ab, 1)) - 1.0);
}

Ket cat_state(const CatSpec& spec, int dim) {
  if (dim < 2) throw InvalidDimensionError("cat_state: dim must be >= 2");
  const double a2 = std::norm(spec.alpha);
  const bool even = spec.parity == CatSpec::Parity::even;
  // alpha -> 0 limits: vacuum (even), |1> (odd).
  VectorXcd coh(dim);
  coh(0) = std::exp(-0.5 * a2);
  for (int k = 1; k < dim; ++k) coh(k) = coh(k - 1) * spec.alpha / std::sqrt(static_cast<double>(k));
  VectorXcd amps = VectorXcd::Zero(dim);
  for (int k = even ? 0 : 1; k < dim; k += 2) amps(k) = coh(k);
  // Exact infinite-dim normalization: |||a> +- |-a>||^2 = 2(1 +- e^{-2a^2}),
  // kept amplitudes are 2 coh_k on matching parity, so the exact norm^2 of
  // the untruncated vector is (2(1 +- e^{-2a^2}))/4 per amplitude scaling.
  double exact_sq = 0.5 * (1.0 + (even ? 1.0 : -1.0) * std::exp(-2.0 * a2));
  double have_sq = amps.squaredNorm();
  if (exact_sq <= 0.0) throw InvalidArgumentError("cat_state: degenerate normalization");
  double leak = 1.0 - have_sq / exact_sq;
  if (leak > 1e-8)
    throw TruncationOverflowError("cat_state: coherent tail leakage " + std::to_string(leak) +
                                  " at dim " + std::to_string(dim));
  amps /= amps.norm();
  return Ket(FockDims({dim}), amps);
}

double cat_fidelity(const DensityOperator& rho, const CatSpec& spec) {
  check_single_mode(rho, "cat_fidelity");
  Ket cat = cat_state(spec, rho.dims().dim(0));
  double overlap = (cat.amplitudes.adjoint() * rho.matrix() * cat.amplitudes)(0, 0).real();
  return std::sqrt(std::max(overlap, 0.0));
}

std::pair<double, double> cat_fidelity_max(const DensityOperator& rho, CatSpec::Parity parity) {
  check_single_mode(rho, "cat_fidelity_max");
  const int dim = rho.dims().dim(0);
  auto f = [&](double alpha) {
    CatSpec s{Complex(alpha, 0.0), parity};
    try {
      return cat_fidelity(rho, s);
    } catch (const TruncationOverflowError&) {
      return -1.0;  // outside the representable range
    }
  };
  const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
  double a = 0.0, b = std::sqrt(2.0 * dim);
  double x1 = b - gr * (b - a), x2 = a + gr * (b - a);
  double f1 = f(x1), f2 = f(x2);
  // Coarse scan first: the fidelity landscape is multimodal in alpha.
  double best_a = 0.0, best_f = f(0.0);
  for (int k = 1; k <= 64; ++k) {
    double alpha = b * k / 64.0;
    double v = f(alpha);
    if (v > best_f) {
      best_f = v;
      best_a = alpha;
    }
  }
  a = std::max(0.0, best_a - b / 64.0);
  double hi = std::min(b, best_a + b / 64.0);
  x1 = hi - gr * (hi - a);
  x2 = a + gr * (hi - a);
  f1 = f(x1);
  f2 = f(x2);
  while (hi - a > 1e-6) {
    if (f1 < f2) {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + gr * (hi - a);
      f2 = f(x2);
    } else {
      hi = x2;
      x2 = x1;
      f2 = f1;
      x1 = hi - gr * (hi - a);
      f1 = f(x1);
    }
  }
  double alpha = 0.5 * (a + hi);
  return {std::max({f(alpha), best_f}), f(alpha) >= best_f ? alpha : best_a};
}

double macroscopicity(const WignerMap& map) {
  if (map.boundary_max > 1e-8)
    throw GridCoverageError("macroscopicity: boundary |W| = " + std::to_string(map.boundary_max) +
                            " exceeds 1e-8");
  auto evaluate = [](const Eigen::MatrixXd& w, double dq, double dp) {
    const long nq = w.rows(), np = w.cols();
    double acc = 0.0;
    for (long i = 1; i + 1 < nq; ++i)
      for (long j = 1; j + 1 < np; ++j) {
        double lap = (w(i + 1, j) - 2.0 * w(i, j) + w(i - 1, j)) / (dq * dq) +
                     (w(i, j + 1) - 2.0 * w(i, j) + w(i, j - 1)) / (dp * dp);
        acc += w(i, j) * (-0.25 * lap - w(i, j));
      }
    return 0.5 * M_PI * acc * dq * dp;
  };
  double fine = evaluate(map.w, map.dq, map.dp);
  // Richardson check on the coarsened (every other point) grid.
  const long nq2 = (map.w.rows() + 1) / 2, np2 = (map.w.cols() + 1) / 2;
  Eigen::MatrixXd w2(nq2, np2);
  for (long i = 0; i < nq2; ++i)
    for (long j = 0; j < np2; ++j) w2(i, j) = map.w(2 * i, 2 * j);
  double coarse = evaluate(w2, 2.0 * map.dq, 2.0 * map.dp);
  double tol = 1e-3 * std::max(1.0, std::abs(fine));
  if (std::abs(fine - coarse) > 16.0 * tol)
    throw NumericalConsistencyError("macroscopicity: grid-halving check " + std::to_string(fine) +
                                    " vs " + std::to_string(coarse));
  return fine;
}

}  // namespace omcat
