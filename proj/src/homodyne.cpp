#include "omcat/homodyne.hpp"

#include <cmath>

namespace omcat {

QuadratureGrid QuadratureGrid::standard(int dim, double theta, int n_points) {
  if (dim < 1 || n_points < 3) throw InvalidArgumentError("QuadratureGrid: bad parameters");
  double range = std::sqrt(2.0 * dim) + 3.0;
  QuadratureGrid g;
  g.theta = theta;
  g.points = VectorXd::LinSpaced(n_points, -range, range);
  double dx = g.points(1) - g.points(0);
  g.weights = VectorXd::Constant(n_points, dx);
  g.weights(0) = g.weights(n_points - 1) = 0.5 * dx;
  return g;
}

DensityOperator rotated_state(const DensityOperator& rho, int mode, double theta) {
  if (theta == 0.0) return rho;
  const FockDims& dims = rho.dims();
  const int d = dims.dim(mode);
  const long str = dims.stride(mode);
  MatrixXcd m = rho.matrix();
  // rho -> e^{-i theta n} rho e^{+i theta n}: phase e^{-i theta (n_i - n_j)}.
  VectorXcd phase(d);
  for (int k = 0; k < d; ++k) phase(k) = std::polar(1.0, -theta * k);
  for (long i = 0; i < dims.total(); ++i) {
    int ni = static_cast<int>((i / str) % d);
    for (long j = 0; j < dims.total(); ++j) {
      int nj = static_cast<int>((j / str) % d);
      m(i, j) *= phase(ni) * std::conj(phase(nj));
    }
  }
  return DensityOperator(dims, std::move(m), rho.norm());
}

namespace {

// Single-mode reduced matrix of `rho` on `mode`, rotated by theta.
MatrixXcd reduced_rotated(const DensityOperator& rho, int mode, double theta) {
  DensityOperator red = (rho.dims().n_modes() == 1) ? rho : partial_trace(rho, {mode});
  if (theta != 0.0) red = rotated_state(red, 0, theta);
  return red.matrix();
}

void clamp_density(VectorXd& p) {
  for (long i = 0; i < p.size(); ++i) {
    if (p(i) < 0) {
      if (p(i) < -1e-12)
        throw NumericalConsistencyError("marginal: negative density " + std::to_string(p(i)));
      p(i) = 0.0;
    }
  }
}

}  // namespace

void marginal_with_derivative(const DensityOperator& rho, int mode, const QuadratureGrid& grid,
                              VectorXd& density, VectorXd& derivative) {
  MatrixXcd red = reduced_rotated(rho, mode, grid.theta);
  const int d = static_cast<int>(red.rows());
  const long n = grid.points.size();
  density.resize(n);
  derivative.resize(n);
  for (long k = 0; k < n; ++k) {
    VectorXd psi = hermite_wavefunctions_upto(d, grid.points(k));
    VectorXd dpsi(d);
    dpsi(0) = -grid.points(k) * psi(0);
    for (int m = 1; m < d; ++m)
      dpsi(m) = std::sqrt(2.0 * m) * psi(m - 1) - grid.points(k) * psi(m);
    VectorXcd rp = red * psi.cast<Complex>();
    density(k) = psi.cast<Complex>().dot(rp).real();
    derivative(k) = 2.0 * dpsi.cast<Complex>().dot(rp).real();
  }
  clamp_density(density);
}

VectorXd marginal(const DensityOperator& rho, int mode, const QuadratureGrid& grid) {
  MatrixXcd red = reduced_rotated(rho, mode, grid.theta);
  const int d = static_cast<int>(red.rows());
  const long n = grid.points.size();
  VectorXd density(n);
  for (long k = 0; k < n; ++k) {
    VectorXd psi = hermite_wavefunctions_upto(d, grid.points(k));
    density(k) = psi.cast<Complex>().dot(red * psi.cast<Complex>()).real();
  }
  clamp_density(density);
  return density;
}

VectorXd marginal_derivative(const DensityOperator& rho, int mode, const QuadratureGrid& grid) {
  VectorXd p, dp;
  marginal_with_derivative(rho, mode, grid, p, dp);
  return dp;
}

Conditional condition_on_quadrature(const DensityOperator& rho_ab, double theta_a, double x_a) {
  const FockDims& dims = rho_ab.dims();
  if (dims.n_modes() != 2)
    throw InvalidArgumentError("condition_on_quadrature: need a two-mode state");
  const int da = dims.dim(0), db = dims.dim(1);
  VectorXd psi = hermite_wavefunctions_upto(da, x_a);
  VectorXcd v(da);
  for (int m = 0; m < da; ++m) v(m) = std::polar(psi(m), theta_a * m);  // conj(e^{-i theta m}) psi

  // rho_B(x)_{ij} = sum_{m,n} v_m^* rho[(m,i),(n,j)] v_n, rank-1 contraction:
  // first contract rows (mode A bra), then columns.
  const MatrixXcd& rho = rho_ab.matrix();
  MatrixXcd t = MatrixXcd::Zero(db, static_cast<long>(da) * db);
  for (int m = 0; m < da; ++m)
    t.noalias() += std::conj(v(m)) * rho.middleRows(static_cast<long>(m) * db, db);
  MatrixXcd cond = MatrixXcd::Zero(db, db);
  for (int n = 0; n < da; ++n) cond.noalias() += v(n) * t.middleCols(static_cast<long>(n) * db, db);

  double density = cond.trace().real();
  if (density < 1e-14)
    throw NegligibleOutcomeError("condition_on_quadrature: outcome density " +
                                 std::to_string(density) + " at x = " + std::to_string(x_a));
  return Conditional{x_a, density,
                     DensityOperator(FockDims({db}), std::move(cond), density)};
}

double ConditionalEnsemble::total_mass() const {
  double s = 0.0;
  for (size_t i = 0; i < outcomes.size(); ++i) s += weights(i) * outcomes[i].density;
  return s;
}

ConditionalEnsemble assemblage(const DensityOperator& rho_ab, double theta_a,
                               const QuadratureGrid& grid) {
  const FockDims& dims = rho_ab.dims();
  if (dims.n_modes() != 2) throw InvalidArgumentError("assemblage: need a two-mode state");
  const long n = grid.points.size();

  VectorXd densities(n);
  std::vector<MatrixXcd> conds(n);
  const int da = dims.dim(0), db = dims.dim(1);
  const MatrixXcd& rho = rho_ab.matrix();
  for (long k = 0; k < n; ++k) {
    VectorXd psi = hermite_wavefunctions_upto(da, grid.points(k));
    VectorXcd v(da);
    for (int m = 0; m < da; ++m) v(m) = std::polar(psi(m), theta_a * m);
    MatrixXcd t = MatrixXcd::Zero(db, static_cast<long>(da) * db);
    for (int m = 0; m < da; ++m)
      t.noalias() += std::conj(v(m)) * rho.middleRows(static_cast<long>(m) * db, db);
    MatrixXcd cond = MatrixXcd::Zero(db, db);
    for (int m = 0; m < da; ++m)
      cond.noalias() += v(m) * t.middleCols(static_cast<long>(m) * db, db);
    densities(k) = cond.trace().real();
    conds[k] = std::move(cond);
  }

  double floor = 1e-12 * densities.maxCoeff();
  ConditionalEnsemble ens;
  ens.theta_a = theta_a;
  std::vector<double> w;
  double mass = 0.0;
  for (long k = 0; k < n; ++k) {
    if (densities(k) <= floor) continue;
    ens.outcomes.push_back(Conditional{
        grid.points(k), densities(k),
        DensityOperator(FockDims({db}), std::move(conds[k]), densities(k))});
    w.push_back(grid.weights(k));
    mass += grid.weights(k) * densities(k);
  }
  if (ens.outcomes.empty()) throw NegligibleOutcomeError("assemblage: no retained outcomes");
  ens.weights = Eigen::Map<VectorXd>(w.data(), w.size());
  for (auto& o : ens.outcomes) o.density /= mass;
  return ens;
}

DensityOperator analytic_conditional(OpKind kind, double r, int n, double q_a, double theta,
                                     int dim) {
  if (n < 0 || dim < 1) throw InvalidArgumentError("analytic_conditional: bad n or dim");
  if (r < 0) throw InvalidArgumentError("analytic_conditional: r must be >= 0");
  const double th = std::tanh(r);
  VectorXd psi = hermite_wavefunctions_upto(dim + n + 1, q_a);

  // The TMSV conditional is pure; build its (unnormalized) Fock amplitudes.
  // Printed closed forms carry typos in the combinatorial factors; these are
  // the exact falling-factorial coefficients from the projection route, which
  // reproduce the quoted conditional amplitudes.
  VectorXd amp = VectorXd::Zero(dim);
  auto log_ff = [](int l, int k) {  // log( l!/(l-k)! )
    return std::lgamma(l + 1.0) - std::lgamma(l - k + 1.0);
  };
  switch (kind) {
    case OpKind::MPS:
      for (int l = n; l < dim; ++l)
        amp(l) = std::pow(th, l) * std::exp(0.5 * log_ff(l, n)) * psi(l - n);
      break;
    case OpKind::MPA:
      for (int l = 0; l + n < dim + n + 1 && l < dim; ++l)
        amp(l) = std::pow(th, l) * std::exp(0.5 * log_ff(l + n, n)) * psi(l + n);
      break;
    case OpKind::MPC:
      for (int l = 0; l < dim; ++l)
        amp(l) = std::pow(th, l) * catalysis_coeff(n, theta, l) * psi(l);
      break;
  }
  double norm = amp.norm();
  if (norm < 1e-150)
    throw NegligibleOutcomeError("analytic_conditional: vanishing amplitude vector");
  VectorXcd a = (amp / norm).cast<Complex>();
  return DensityOperator::from_ket(FockDims({dim}), a);
}

}  // namespace omcat
