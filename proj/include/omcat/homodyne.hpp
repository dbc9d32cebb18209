#pragma once

#include <vector>

#include "omcat/fock.hpp"
#include "omcat/nongauss.hpp"

namespace omcat {

/// Uniform symmetric quadrature grid with trapezoidal weights.
struct QuadratureGrid {
  double theta = 0.0;
  VectorXd points;
  VectorXd weights;

  double spacing() const { return points.size() > 1 ? points(1) - points(0) : 0.0; }
  // Default: 1601 uniform points on +-(sqrt(2 dim) + 3).
  static QuadratureGrid standard(int dim, double theta = 0.0, int n_points = 1601);
};

// Applies exp(-i theta n) on the chosen mode, so that measuring q on the
// output equals measuring X_theta = cos(theta) q + sin(theta) p on the input.
DensityOperator rotated_state(const DensityOperator& rho, int mode, double theta);

// P(x) over the rotated reduced state of the chosen mode. Nonnegative
// (clamped at 0 when |negative| < 1e-12, else numerical-consistency error);
// integrates to 1 +- 1e-6 on a standard grid.
VectorXd marginal(const DensityOperator& rho, int mode, const QuadratureGrid& grid);
// dP/dx through the analytic wavefunction derivative.
VectorXd marginal_derivative(const DensityOperator& rho, int mode, const QuadratureGrid& grid);
// Both in one pass over the grid.
void marginal_with_derivative(const DensityOperator& rho, int mode, const QuadratureGrid& grid,
                              VectorXd& density, VectorXd& derivative);

struct Conditional {
  double x;
  double density;           // outcome probability density at x
  DensityOperator state_b;  // normalized conditional state of the other mode
};

// Projects mode A (index 0) of a two-mode state onto the X_theta eigenstate
// with outcome x, returning the outcome density and the conditional B state.
// Density below 1e-14 raises a negligible-outcome error.
Conditional condition_on_quadrature(const DensityOperator& rho_ab, double theta_a, double x_a);

/// Discretized assemblage over a quadrature grid on mode A.
struct ConditionalEnsemble {
  double theta_a = 0.0;
  std::vector<Conditional> outcomes;  // retained grid points, ascending x
  VectorXd weights;                   // trapezoid weights of retained points

  // sum_i w_i density_i (1 after renormalization over retained points)
  double total_mass() const;
};

// Conditions at every grid point with density above 1e-12 * max density;
// densities renormalized over the retained points.
ConditionalEnsemble assemblage(const DensityOperator& rho_ab, double theta_a,
                               const QuadratureGrid& grid);

// Closed-form pulse-case conditional states for the pure two-mode squeezed
// vacuum at nbar0 = 0 followed by MPS/MPA/MPC and homodyne at q_a.
// theta is the MPC beam-splitter angle (ignored otherwise).
DensityOperator analytic_conditional(OpKind kind, double r, int n, double q_a, double theta,
                                     int dim);

}  // namespace omcat
