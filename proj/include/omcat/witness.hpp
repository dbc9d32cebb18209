#pragma once

#include "omcat/homodyne.hpp"

namespace omcat {

/// Measurement-angle strategy. Fixed mode pins both angles; optimized mode
/// runs a coarse grid over [0, pi) plus golden-section refinement.
struct AngleStrategy {
  enum class Mode { fixed, optimized } mode = Mode::fixed;
  double theta_a = 0.0;
  double theta_b = M_PI / 2;
  int coarse = 24;          // >= 8
  double refine_tol = 1e-4; // rad, <= 1e-3

  static AngleStrategy fixed(double ta, double tb) {
    return AngleStrategy{Mode::fixed, ta, tb, 24, 1e-4};
  }
  static AngleStrategy optimized(int coarse = 24, double tol = 1e-4) {
    AngleStrategy s;
    s.mode = Mode::optimized;
    s.coarse = coarse;
    s.refine_tol = tol;
    s.validate();
    return s;
  }
  void validate() const;
};

struct SteeringResult {
  double value = 0.0;  // max(F - 4V, 0) at the reported angles
  double theta_a_star = 0.0;
  double theta_b_star = 0.0;
  double F = 0.0;  // conditional Fisher information
  double V = 0.0;  // conditional variance
};

// F = int (dP/dx)^2 / P dx over points with P > 1e-12 max(P); for a shift
// family this is the Fisher information about the shift at 0.
// Requires P >= 0 and sum P dx = 1 +- 1e-6.
double classical_fisher(const VectorXd& P, const VectorXd& dP, double dx);

// F_hom^{B|A}(theta_b) = max over theta_a (or fixed) of
//   int P(x_a) F[P_{x_a}^B at angle theta_b] dx_a.
std::pair<double, double> conditional_fisher(const DensityOperator& rho_ab, double theta_b,
                                             const AngleStrategy& strategy);

// V_hom^{B|A}(theta_b) = min over theta_a (or fixed) of
//   int P(x_a) V(rho_B(x_a), X_theta_b) dx_a.
std::pair<double, double> conditional_variance(const DensityOperator& rho_ab, double theta_b,
                                               const AngleStrategy& strategy);

// S_FI^{A->B} = max over theta_b of [F_hom - 4 V_hom]^+ (A = optical/filter
// mode 0 steering, B = mechanical mode 1 steered).
SteeringResult steering_fi(const DensityOperator& rho_ab, const AngleStrategy& strategy);

// Reid: S_R = 1 - 2 sqrt(Var^{b|a}(q_b) Var^{b|a}(p_b)), inferred variances
// from the assemblages conditioned on q_a (for q_b) and p_a (for p_b).
double steering_reid(const DensityOperator& rho_ab);

}  // namespace omcat
