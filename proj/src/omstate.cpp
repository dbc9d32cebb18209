#include "omcat/omstate.hpp"

#include <cmath>

namespace omcat {

void PulseParams::validate() const {
  if (g < 0 || kappa_c < 0 || tau_w < 0)
    throw InvalidArgumentError("PulseParams: g, kappa_c, tau_w must be >= 0");
  if (nbar0 < 0) throw InvalidArgumentError("PulseParams: nbar0 must be >= 0");
}

void ContinuousParams::validate() const {
  if (delta < 0 || g < 0 || kappa_c < 0 || kappa_mu < 0 || gamma_m < 0 || nbar_th < 0)
    throw InvalidArgumentError("ContinuousParams: rates must be >= 0");
  if (dims.n_modes() != 3) throw InvalidArgumentError("ContinuousParams: dims must list 3 modes");
}

ClassicalSteadyState steady_amplitudes(double g0, Complex eps, double delta, double kappa_c,
                                       double gamma_m, double omega_m) {
  if (!(kappa_c > 0)) throw InvalidArgumentError("steady_amplitudes: kappa_c must be > 0");
  auto residual = [&](const ClassicalSteadyState& s) {
    Complex ra = -(kappa_c + Complex(0, 1) * delta) * s.alpha_s -
                 Complex(0, 1) * g0 * s.alpha_s * (s.beta_s + std::conj(s.beta_s)) + eps;
    Complex rb = -(gamma_m + Complex(0, 1) * omega_m) * s.beta_s -
                 Complex(0, 1) * g0 * std::norm(s.alpha_s);
    return std::max(std::abs(ra), std::abs(rb));
  };

  ClassicalSteadyState s{0.0, 0.0, delta};
  std::vector<double> history;
  const int max_iter = 10000;
  for (int it = 0; it < max_iter; ++it) {
    s.alpha_s = eps / (kappa_c + Complex(0, 1) * s.delta_eff);
    s.beta_s = -Complex(0, 1) * g0 * std::norm(s.alpha_s) / (gamma_m + Complex(0, 1) * omega_m);
    s.delta_eff = delta + 2.0 * g0 * s.beta_s.real();
    double res = residual(s);
    history.push_back(res);
    double scale = std::max(1.0, std::abs(eps));
    if (res < 1e-10 * scale && it > 0) return s;
  }
  throw BistabilityError(
      "steady_amplitudes: no convergence in 10^4 iterations (first residual " +
          std::to_string(history.front()) + ", last " + std::to_string(history.back()) + ")",
      std::move(history));
}

double pulse_squeezing(const PulseParams& p) {
  p.validate();
  if (p.kappa_c == 0.0) {
    if (p.g > 0) throw InvalidArgumentError("pulse_squeezing: kappa_c = 0 with g > 0");
    return 0.0;
  }
  double G = p.g * p.g / p.kappa_c;
  return std::acosh(std::exp(G * p.tau_w));
}

DensityOperator pulsed_om_state(double r, double nbar0, const FockDims& dims) {
  if (dims.n_modes() != 2) throw InvalidArgumentError("pulsed_om_state: need two-mode dims");
  if (r < 0 || nbar0 < 0) throw InvalidArgumentError("pulsed_om_state: r, nbar0 must be >= 0");
  DensityOperator init = DensityOperator::thermal(dims, {0.0, nbar0});
  return two_mode_squeeze_apply(init, r);
}

SampledComplexFunction filter_coupling(const VectorXcd& mu, const VectorXd& times) {
  const long n = times.size();
  if (mu.size() != n || n < 2) throw InvalidArgumentError("filter_coupling: grid size mismatch");

  VectorXd abs2 = mu.cwiseAbs2();
  VectorXd cum(n);
  cum(0) = 0.0;
  for (long i = 1; i < n; ++i)
    cum(i) = cum(i - 1) + 0.5 * (abs2(i) + abs2(i - 1)) * (times(i) - times(i - 1));
  if (std::abs(cum(n - 1) - 1.0) > 1e-6)
    throw InvalidArgumentError("filter_coupling: mu is not normalized on the grid, int |mu|^2 = " +
                               std::to_string(cum(n - 1)));

  SampledComplexFunction out;
  out.times = times;
  out.values = VectorXcd::Zero(n);
  out.valid.assign(n, false);
  for (long i = 0; i < n; ++i) {
    if (cum(i) < 1e-12) continue;  // leading segment masked
    out.values(i) = -std::conj(mu(i)) / std::sqrt(cum(i));
    out.valid[i] = true;
  }
  return out;
}

DensityOperator reduced_om_state(const DensityOperator& rho3) {
  if (rho3.dims().n_modes() != 3)
    throw InvalidArgumentError("reduced_om_state: need a three-mode state");
  // Trace out the cavity (mode 0) leaving (b, a_mu); swap to (a_mu, b).
  DensityOperator kept = partial_trace(rho3, {1, 2});
  return permute_modes(kept, {1, 0});
}

}  // namespace omcat
