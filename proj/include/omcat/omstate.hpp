#pragma once

#include <functional>
#include <optional>
#include <vector>

#include "omcat/fock.hpp"

namespace omcat {

// All rates and frequencies are in units of the mechanical frequency omega_m;
// omega_m itself never appears as a free parameter in continuous-case inputs.

/// Pulsed-drive parameters.
struct PulseParams {
  double g = 0.0;        // collective coupling [omega_m]
  double kappa_c = 0.0;  // cavity loss [omega_m]
  double tau_w = 0.0;    // pulse duration [1/omega_m]
  double nbar0 = 0.0;    // initial mechanical thermal occupation

  void validate() const;
  // The adiabatic elimination assumes g << kappa_c; flags g/kappa_c > 0.2.
  bool adiabatic_warning() const { return kappa_c > 0 && g / kappa_c > 0.2; }
};

/// Continuous-drive parameters for the cascaded master equation.
struct ContinuousParams {
  double delta = 1.0;     // detuning [omega_m]
  double g = 1.0;         // coupling [omega_m]
  double kappa_c = 4.0;   // cavity loss [omega_m]
  double kappa_mu = 64.0; // filter coupling [omega_m]
  double gamma_m = 0.0;   // mechanical damping [omega_m]
  double nbar_th = 0.0;   // environment occupation
  FockDims dims{std::vector<int>{10, 10, 10}};  // (cavity, mechanical, filter)

  void validate() const;
};

/// Classical steady state of the mean-value equations.
struct ClassicalSteadyState {
  Complex alpha_s;   // cavity amplitude
  Complex beta_s;    // mechanical amplitude
  double delta_eff;  // effective detuning Delta = delta + 2 g0 Re(beta_s)
};

// Self-consistent fixed point of
//   alpha_s = eps/(kappa_c + i Delta), beta_s = -i g0 |alpha_s|^2/(gamma_m + i omega_m),
//   Delta = delta + 2 g0 Re(beta_s).
// Throws a bistability error (with all iterates' residuals) if the iteration
// does not converge within 1e4 steps.
ClassicalSteadyState steady_amplitudes(double g0, Complex eps, double delta, double kappa_c,
                                       double gamma_m, double omega_m);

// r = arccosh(exp(G tau_w)), G = g^2/kappa_c.
double pulse_squeezing(const PulseParams& p);

// S(r) (|vac><vac| x thermal(nbar0)) S^dag(r); mode 0 = optical output,
// mode 1 = mechanical.
DensityOperator pulsed_om_state(double r, double nbar0, const FockDims& dims);

/// Complex function sampled on a time grid; entries with valid=false are the
/// masked leading segment where the cumulative norm is below threshold.
struct SampledComplexFunction {
  VectorXd times;
  VectorXcd values;
  std::vector<bool> valid;
};

// Cascaded coupling g_mu(t) = -mu*(t)/sqrt(int_0^t |mu|^2 dt') by cumulative
// trapezoidal quadrature. Requires int |mu|^2 dt = 1 +- 1e-6 on the grid.
SampledComplexFunction filter_coupling(const VectorXcd& mu, const VectorXd& times);

/// Generator of the cascaded master equation
///   d rho/dt = -i[H_lin + H_ex, rho] + L[J] rho
///              + L[sqrt(gamma_m(nbar+1)) b] rho + L[sqrt(gamma_m nbar) b^dag] rho
/// with H_lin = Delta a^dag a + b^dag b + g(a^dag + a)(b^dag + b),
/// H_ex = (i/2)(sqrt(kappa_c kappa_mu) a^dag a_mu - h.c.),
/// J = sqrt(kappa_c) a + sqrt(kappa_mu) a_mu, and
/// L[o]rho = o rho o^dag - (o^dag o rho + rho o^dag o)/2.
/// Application is matrix-free over sparse mode operators.
class Liouvillian {
 public:
  Liouvillian(const ContinuousParams& p);

  const FockDims& dims() const { return dims_; }
  // L(rho) for Hermitian rho (uses A - A^dag folding).
  MatrixXcd apply(const MatrixXcd& rho) const;
  // Upper bound on the spectral radius (sets the explicit stability step).
  double spectral_bound() const { return bound_; }
  // Assembled sparse superoperator on vec(rho), column-major vec convention.
  SpMat assemble() const;

 private:
  FockDims dims_;
  SpMat h_eff_;       // H - (i/2) J^dag J and mechanical anticommutator parts
  SpMat jump_;        // J
  SpMat b_, bdag_;    // weighted mechanical jumps
  double gamma_down_ = 0.0, gamma_up_ = 0.0;
  double bound_ = 0.0;
};

Liouvillian build_liouvillian(const ContinuousParams& p);

struct SteadyStateOptions {
  double conv_per_time = 1e-11;   // ||rho(t+d)-rho(t)||_max per unit time
  double residual_tol = 1e-9;     // ||L(rho_ss)||_max certificate
  double leakage_tol = 1e-4;      // per-mode top-level population
  double horizon = 4000.0;        // give up (no-steady-state) beyond this time
  bool allow_retry = true;        // enlarge dims by +2 and retry once on leakage
  std::function<void(double, double)> progress;  // (t, diff_per_time)
};

// Steady state by adaptive time-stepping from the three-mode vacuum with
// window doubling and residual extrapolation; certified by
// ||L(rho_ss)||_max < residual_tol and the per-time convergence criterion.
DensityOperator steady_state(const Liouvillian& L, const FockDims& dims,
                             const SteadyStateOptions& opts = {});

// Convenience: build + solve, with the retry-on-leakage policy.
DensityOperator steady_state(const ContinuousParams& p, const SteadyStateOptions& opts = {});

// Tr_a of the three-mode state; returns the two-mode state over
// (filter mode a_mu^out, mechanical mode b), in that order.
DensityOperator reduced_om_state(const DensityOperator& rho3);

}  // namespace omcat
