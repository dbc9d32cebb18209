#pragma once

#include <string>
#include <utility>

#include "omcat/fock.hpp"

namespace omcat {

enum class OpKind { MPS, MPA, MPC };

/// Heralded multiphoton operation descriptor. For MPC the beam splitter has
/// reflectivity R = sin^2(theta), transmissivity T = 1 - R.
struct MultiphotonOp {
  OpKind kind = OpKind::MPS;
  int n = 0;
  double theta = 0.0;  // MPC only, in [0, pi/2]

  void validate() const;
  // Parses "mps:n=3", "mpa:n=2", "mpc:n=3,T=0.1" (T converted to
  // theta = arccos(sqrt(T))). "none" or "" gives n = 0 subtraction.
  static MultiphotonOp parse(const std::string& descriptor);
  std::string to_string() const;
};

struct HeraldedState {
  DensityOperator state;
  double herald_weight;  // Tr of the unnormalized output (not confined to [0,1])
};

// rho' ~ a^n rho a^dag n on the chosen mode; herald weight Tr[a^n rho a^dag n].
HeraldedState subtract_photons(const DensityOperator& rho, int mode, int n);
// rho' ~ a^dag n rho a^n. Requires the top n Fock levels of the mode to hold
// less than 1e-6 population, else truncation-overflow.
HeraldedState add_photons(const DensityOperator& rho, int mode, int n);

// B_{n,l} = sum_i (-1)^{n-i} C(n,i) C(l,n-i) cos^{l+2i-n} sin^{2n-2i},
// evaluated through log-gamma binomials.
double catalysis_coeff(int n, double theta, int l);

// rho' ~ B^n rho B^dag n with B^n diagonal in the mode's Fock basis.
HeraldedState catalyze_photons(const DensityOperator& rho, int mode, int n, double theta);

// Dispatch on op.kind.
HeraldedState apply_multiphoton(const DensityOperator& rho, int mode, const MultiphotonOp& op);

}  // namespace omcat
