#include "omcat/nongauss.hpp"

#include <cmath>
#include <sstream>

namespace omcat {

void MultiphotonOp::validate() const {
  if (n < 0) throw InvalidArgumentError("MultiphotonOp: n must be >= 0");
  if (kind == OpKind::MPC && (theta < 0 || theta > M_PI / 2))
    throw InvalidArgumentError("MultiphotonOp: theta must lie in [0, pi/2]");
}

MultiphotonOp MultiphotonOp::parse(const std::string& descriptor) {
  MultiphotonOp op;
  if (descriptor.empty() || descriptor == "none") return op;
  auto colon = descriptor.find(':');
  std::string kind = descriptor.substr(0, colon);
  if (kind == "mps")
    op.kind = OpKind::MPS;
  else if (kind == "mpa")
    op.kind = OpKind::MPA;
  else if (kind == "mpc")
    op.kind = OpKind::MPC;
  else
    throw ConfigError("unknown multiphoton op '" + kind + "' (want mps|mpa|mpc|none)");

  bool have_t = false;
  if (colon != std::string::npos) {
    std::istringstream rest(descriptor.substr(colon + 1));
    std::string item;
    while (std::getline(rest, item, ',')) {
      auto eq = item.find('=');
      if (eq == std::string::npos) throw ConfigError("bad op parameter '" + item + "'");
      std::string key = item.substr(0, eq), val = item.substr(eq + 1);
      if (key == "n")
        op.n = std::stoi(val);
      else if (key == "T" && op.kind == OpKind::MPC) {
        double T = std::stod(val);
        if (T < 0 || T > 1) throw ConfigError("op transmissivity T must lie in [0,1]");
        op.theta = std::acos(std::sqrt(T));
        have_t = true;
      } else
        throw ConfigError("unknown op parameter '" + key + "'");
    }
  }
  if (op.kind == OpKind::MPC && !have_t) throw ConfigError("mpc op needs T=<transmissivity>");
  op.validate();
  return op;
}

std::string MultiphotonOp::to_string() const {
  std::ostringstream os;
  switch (kind) {
    case OpKind::MPS: os << "mps:n=" << n; break;
    case OpKind::MPA: os << "mpa:n=" << n; break;
    case OpKind::MPC: {
      double T = std::cos(theta) * std::cos(theta);
      os << "mpc:n=" << n << ",T=" << T;
      break;
    }
  }
  return os.str();
}

namespace {

HeraldedState heralded_from(const FockDims& dims, MatrixXcd m, const char* what) {
  double w = m.trace().real();
  if (w < 1e-14)
    throw VanishingHeraldError(std::string(what) + ": herald weight " + std::to_string(w));
  return HeraldedState{DensityOperator(dims, std::move(m), w), w};
}

}  // namespace

HeraldedState subtract_photons(const DensityOperator& rho, int mode, int n) {
  if (n < 0) throw InvalidArgumentError("subtract_photons: n must be >= 0");
  if (n == 0) return {rho, 1.0};
  const FockDims& dims = rho.dims();
  SpMat a = embed(dims, mode, annihilation(dims.dim(mode)));
  MatrixXcd m = rho.matrix();
  for (int k = 0; k < n; ++k) m = MatrixXcd(a * m * SpMat(a.adjoint()));
  return heralded_from(dims, std::move(m), "subtract_photons");
}

HeraldedState add_photons(const DensityOperator& rho, int mode, int n) {
  if (n < 0) throw InvalidArgumentError("add_photons: n must be >= 0");
  if (n == 0) return {rho, 1.0};
  const FockDims& dims = rho.dims();
  const int d = dims.dim(mode);
  const long str = dims.stride(mode);
  double top = 0.0;
  for (long i = 0; i < dims.total(); ++i) {
    int occ = static_cast<int>((i / str) % d);
    if (occ >= d - n) top += rho.matrix()(i, i).real();
  }
  if (top > 1e-6)
    throw TruncationOverflowError("add_photons: top-" + std::to_string(n) +
                                  " Fock levels of mode " + std::to_string(mode) + " hold " +
                                  std::to_string(top) + " population (dim " + std::to_string(d) +
                                  ")");
  SpMat adag = embed(dims, mode, creation(dims.dim(mode)));
  MatrixXcd m = rho.matrix();
  for (int k = 0; k < n; ++k) m = MatrixXcd(adag * m * SpMat(adag.adjoint()));
  return heralded_from(dims, std::move(m), "add_photons");
}

double catalysis_coeff(int n, double theta, int l) {
  if (n < 0 || l < 0) throw InvalidArgumentError("catalysis_coeff: n, l must be >= 0");
  auto log_binom = [](int a, int b) {
    return std::lgamma(a + 1.0) - std::lgamma(b + 1.0) - std::lgamma(a - b + 1.0);
  };
  const double c = std::cos(theta), s = std::sin(theta);
  double sum = 0.0;
  for (int i = 0; i <= n; ++i) {
    if (n - i > l) continue;  // C(l, n-i) = 0
    int pc = l + 2 * i - n, ps = 2 * n - 2 * i;
    double logmag = log_binom(n, i) + log_binom(l, n - i);
    double term = ((n - i) % 2 ? -1.0 : 1.0) * std::exp(logmag) * std::pow(c, pc) * std::pow(s, ps);
    sum += term;
  }
  return sum;
}

HeraldedState catalyze_photons(const DensityOperator& rho, int mode, int n, double theta) {
  if (n < 0) throw InvalidArgumentError("catalyze_photons: n must be >= 0");
  const FockDims& dims = rho.dims();
  const int d = dims.dim(mode);
  SpMat bn(d, d);
  for (int l = 0; l < d; ++l) bn.insert(l, l) = catalysis_coeff(n, theta, l);
  bn.makeCompressed();
  SpMat big = embed(dims, mode, bn);
  MatrixXcd m = MatrixXcd(big * rho.matrix() * SpMat(big.adjoint()));
  return heralded_from(dims, std::move(m), "catalyze_photons");
}

HeraldedState apply_multiphoton(const DensityOperator& rho, int mode, const MultiphotonOp& op) {
  op.validate();
  switch (op.kind) {
    case OpKind::MPS: return subtract_photons(rho, mode, op.n);
    case OpKind::MPA: return add_photons(rho, mode, op.n);
    case OpKind::MPC: return catalyze_photons(rho, mode, op.n, op.theta);
  }
  throw InvalidArgumentError("apply_multiphoton: bad kind");
}

}  // namespace omcat
