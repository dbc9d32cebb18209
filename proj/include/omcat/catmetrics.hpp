#pragma once

#include "omcat/fock.hpp"

namespace omcat {

/// Wigner function on a rectangular phase-space grid, coherent-amplitude
/// coordinates beta = q + i p (vacuum peak 2/pi, integral 1 over dq dp).
struct WignerMap {
  VectorXd q, p;
  Eigen::MatrixXd w;  // w(i, j) = W(q(i), p(j))
  double dq = 0.0, dp = 0.0;
  bool coverage_ok = true;     // boundary |W| <= 1e-6
  double boundary_max = 0.0;

  double integral() const { return w.sum() * dq * dp; }
};

struct CatSpec {
  Complex alpha;
  enum class Parity { even, odd } parity = Parity::even;
};

// W(beta) = (2/pi) Tr[D(-beta) rho D(beta) Pi] evaluated through the
// Laguerre-series closed form of Tr[rho D(2 beta) Pi]. Sets coverage_ok
// false when |W| exceeds 1e-6 on the grid boundary.
WignerMap wigner(const DensityOperator& rho, const VectorXd& qgrid, const VectorXd& pgrid);
// Uniform n x n grid on [-half, half]^2.
WignerMap wigner(const DensityOperator& rho, double half, int n);
// Starts at [-6, 6]^2, 241 points per axis, and expands until the boundary
// decays below 1e-6 (keeping comparable spacing).
WignerMap wigner_auto(const DensityOperator& rho);

// N = sum (|W| - W) dq dp.
double wigner_negativity(const WignerMap& w);

// E = (||rho^{T_b}|| - 1)/2, partial transpose over the mechanical mode (1).
double negativity_entanglement(const DensityOperator& rho_ab);

// Normalized (|alpha> +- |-alpha>) with even/odd Fock support; requires the
// truncated coherent tail to hold less than 1e-8 weight.
Ket cat_state(const CatSpec& spec, int dim);

// sqrt(<psi_cat| rho |psi_cat>) for the pure target.
double cat_fidelity(const DensityOperator& rho, const CatSpec& spec);
// Maximized over real alpha in [0, sqrt(2 dim)] by golden section;
// returns (fidelity, alpha*).
std::pair<double, double> cat_fidelity_max(const DensityOperator& rho, CatSpec::Parity parity);

// I = (pi/2) int W (-d^2/d beta d beta* - 1) W d^2 beta, Laplacian by 5-point
// central differences; an internal grid-halving Richardson check must agree
// to 1e-3 and the boundary must decay below 1e-8, else errors.
double macroscopicity(const WignerMap& w);

}  // namespace omcat
