#include "omcat/witness.hpp"

#include <cmath>
#include <map>

namespace omcat {

void AngleStrategy::validate() const {
  if (coarse < 8) throw InvalidArgumentError("AngleStrategy: coarse count must be >= 8");
  if (refine_tol > 1e-3 || refine_tol <= 0)
    throw InvalidArgumentError("AngleStrategy: refine tolerance must lie in (0, 1e-3]");
}

double classical_fisher(const VectorXd& P, const VectorXd& dP, double dx) {
  if (P.size() != dP.size() || P.size() < 2)
    throw InvalidArgumentError("classical_fisher: size mismatch");
  if (P.minCoeff() < 0) throw InvalidArgumentError("classical_fisher: P must be nonnegative");
  double mass = P.sum() * dx;
  if (std::abs(mass - 1.0) > 1e-6)
    throw InvalidArgumentError("classical_fisher: P integrates to " + std::to_string(mass));
  double floor = 1e-12 * P.maxCoeff();
  double f = 0.0;
  for (long i = 0; i < P.size(); ++i)
    if (P(i) > floor) f += dP(i) * dP(i) / P(i);
  return f * dx;
}

namespace {

// Trim outcomes whose cumulative mass from either side is below 1e-10.
void tail_trim(ConditionalEnsemble& ens) {
  const double tail = 1e-10;
  size_t lo = 0, hi = ens.outcomes.size();
  double acc = 0.0;
  while (lo + 1 < hi && acc + ens.weights(lo) * ens.outcomes[lo].density < tail)
    acc += ens.weights(lo) * ens.outcomes[lo].density, ++lo;
  acc = 0.0;
  while (hi > lo + 1 && acc + ens.weights(hi - 1) * ens.outcomes[hi - 1].density < tail)
    acc += ens.weights(hi - 1) * ens.outcomes[hi - 1].density, --hi;
  if (lo == 0 && hi == ens.outcomes.size()) return;
  std::vector<Conditional> kept(ens.outcomes.begin() + lo, ens.outcomes.begin() + hi);
  VectorXd w = ens.weights.segment(lo, hi - lo);
  ens.outcomes = std::move(kept);
  ens.weights = w;
}

struct ConditionalMoments {
  double q, p, q2, p2, qp_sym;  // <q>, <p>, <q^2>, <p^2>, <qp+pq>/2
  double variance(double theta) const {
    double c = std::cos(theta), s = std::sin(theta);
    double m1 = c * q + s * p;
    double m2 = c * c * q2 + s * s * p2 + 2.0 * c * s * qp_sym;
    return m2 - m1 * m1;
  }
};

struct MomentOps {
  SpMat q, p, q2, p2, qp_sym;
  explicit MomentOps(int d) {
    q = quadrature_q(d);
    p = quadrature_p(d);
    q2 = SpMat(q * q);
    p2 = SpMat(p * p);
    qp_sym = SpMat(0.5 * (SpMat(q * p) + SpMat(p * q)));
  }
};

ConditionalMoments moments_of(const DensityOperator& rho, const MomentOps& ops) {
  return ConditionalMoments{rho.expectation(ops.q).real(), rho.expectation(ops.p).real(),
                            rho.expectation(ops.q2).real(), rho.expectation(ops.p2).real(),
                            rho.expectation(ops.qp_sym).real()};
}

// Assemblage on mode A's standard grid, tail-trimmed, densities renormalized.
ConditionalEnsemble build_ensemble(const DensityOperator& rho_ab, double theta_a) {
  QuadratureGrid grid = QuadratureGrid::standard(rho_ab.dims().dim(0), theta_a);
  ConditionalEnsemble ens = assemblage(rho_ab, theta_a, grid);
  tail_trim(ens);
  double mass = ens.total_mass();
  for (auto& o : ens.outcomes) o.density /= mass;
  return ens;
}

double fisher_of_ensemble(const ConditionalEnsemble& ens, double theta_b,
                          const QuadratureGrid& grid_b) {
  double dx = grid_b.spacing();
  QuadratureGrid gb = grid_b;
  gb.theta = theta_b;
  double f = 0.0;
  VectorXd P, dP;
  for (size_t i = 0; i < ens.outcomes.size(); ++i) {
    marginal_with_derivative(ens.outcomes[i].state_b, 0, gb, P, dP);
    double mass = P.sum() * dx;
    P /= mass;  // per-conditional quadrature normalization
    dP /= mass;
    f += ens.weights(i) * ens.outcomes[i].density * classical_fisher(P, dP, dx);
  }
  return f;
}

double variance_of_ensemble(const ConditionalEnsemble& ens, double theta_b,
                            const std::vector<ConditionalMoments>& moments) {
  double v = 0.0;
  for (size_t i = 0; i < ens.outcomes.size(); ++i)
    v += ens.weights(i) * ens.outcomes[i].density * moments[i].variance(theta_b);
  return v;
}

// Golden-section search for the maximum of f on [lo, hi].
template <typename F>
std::pair<double, double> golden_max(F&& f, double lo, double hi, double tol) {
  const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
  double a = lo, b = hi;
  double x1 = b - gr * (b - a), x2 = a + gr * (b - a);
  double f1 = f(x1), f2 = f(x2);
  while (b - a > tol) {
    if (f1 < f2) {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + gr * (b - a);
      f2 = f(x2);
    } else {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - gr * (b - a);
      f1 = f(x1);
    }
  }
  return (f1 > f2) ? std::make_pair(x1, f1) : std::make_pair(x2, f2);
}

// Coarse grid over [0, pi) then golden refinement around the best point.
template <typename F>
std::pair<double, double> maximize_angle(F&& f, int coarse, double tol) {
  double best_t = 0.0, best_v = -std::numeric_limits<double>::infinity();
  double step = M_PI / coarse;
  std::vector<double> vals(coarse);
  for (int k = 0; k < coarse; ++k) {
    vals[k] = f(k * step);
    if (vals[k] > best_v) {
      best_v = vals[k];
      best_t = k * step;
    }
  }
  auto [t, v] = golden_max(f, best_t - step, best_t + step, tol);
  if (v >= best_v) return {t, v};
  return {best_t, best_v};
}

struct EnsembleData {
  ConditionalEnsemble ens;
  std::vector<ConditionalMoments> moments;
};

class EnsembleCache {
 public:
  explicit EnsembleCache(const DensityOperator& rho) : rho_(rho), ops_(rho.dims().dim(1)) {}

  const EnsembleData& at(double theta_a) {
    auto it = cache_.find(theta_a);
    if (it != cache_.end()) return it->second;
    if (cache_.size() > 96) cache_.clear();
    EnsembleData data;
    data.ens = build_ensemble(rho_, theta_a);
    data.moments.reserve(data.ens.outcomes.size());
    for (const auto& o : data.ens.outcomes) data.moments.push_back(moments_of(o.state_b, ops_));
    return cache_.emplace(theta_a, std::move(data)).first->second;
  }

  const QuadratureGrid& grid_b() {
    if (grid_b_.points.size() == 0) grid_b_ = QuadratureGrid::standard(rho_.dims().dim(1));
    return grid_b_;
  }

 private:
  const DensityOperator& rho_;
  MomentOps ops_;
  std::map<double, EnsembleData> cache_;
  QuadratureGrid grid_b_;
};

double fisher_at(EnsembleCache& cache, double theta_a, double theta_b) {
  return fisher_of_ensemble(cache.at(theta_a).ens, theta_b, cache.grid_b());
}

double variance_at(EnsembleCache& cache, double theta_a, double theta_b) {
  const EnsembleData& d = cache.at(theta_a);
  return variance_of_ensemble(d.ens, theta_b, d.moments);
}

}  // namespace

std::pair<double, double> conditional_fisher(const DensityOperator& rho_ab, double theta_b,
                                             const AngleStrategy& strategy) {
  strategy.validate();
  EnsembleCache cache(rho_ab);
  if (strategy.mode == AngleStrategy::Mode::fixed)
    return {fisher_at(cache, strategy.theta_a, theta_b), strategy.theta_a};
  auto [t, v] = maximize_angle([&](double ta) { return fisher_at(cache, ta, theta_b); },
                               strategy.coarse, strategy.refine_tol);
  return {v, t};
}

std::pair<double, double> conditional_variance(const DensityOperator& rho_ab, double theta_b,
                                               const AngleStrategy& strategy) {
  strategy.validate();
  EnsembleCache cache(rho_ab);
  if (strategy.mode == AngleStrategy::Mode::fixed)
    return {variance_at(cache, strategy.theta_a, theta_b), strategy.theta_a};
  auto [t, v] = maximize_angle([&](double ta) { return -variance_at(cache, ta, theta_b); },
                               strategy.coarse, strategy.refine_tol);
  return {-v, t};
}

SteeringResult steering_fi(const DensityOperator& rho_ab, const AngleStrategy& strategy) {
  strategy.validate();
  if (rho_ab.dims().n_modes() != 2)
    throw InvalidArgumentError("steering_fi: need a two-mode state");
  EnsembleCache cache(rho_ab);

  if (strategy.mode == AngleStrategy::Mode::fixed) {
    double f = fisher_at(cache, strategy.theta_a, strategy.theta_b);
    double v = variance_at(cache, strategy.theta_a, strategy.theta_b);
    return SteeringResult{std::max(f - 4.0 * v, 0.0), strategy.theta_a, strategy.theta_b, f, v};
  }

  double best_ta_f = 0.0, best_ta_v = 0.0;
  auto objective = [&](double tb) {
    auto [ta_f, f] = maximize_angle([&](double ta) { return fisher_at(cache, ta, tb); },
                                    strategy.coarse, strategy.refine_tol);
    auto [ta_v, nv] = maximize_angle([&](double ta) { return -variance_at(cache, ta, tb); },
                                     strategy.coarse, strategy.refine_tol);
    best_ta_f = ta_f;
    best_ta_v = ta_v;
    return f - 4.0 * (-nv);
  };
  auto [tb, s] = maximize_angle(objective, strategy.coarse, strategy.refine_tol);

  // Recompute the components at the optimum for the result record.
  auto [ta_f, f] = maximize_angle([&](double ta) { return fisher_at(cache, ta, tb); },
                                  strategy.coarse, strategy.refine_tol);
  auto [ta_v, nv] = maximize_angle([&](double ta) { return -variance_at(cache, ta, tb); },
                                   strategy.coarse, strategy.refine_tol);
  double v = -nv;
  return SteeringResult{std::max(f - 4.0 * v, 0.0), ta_f, tb, f, v};
}

double steering_reid(const DensityOperator& rho_ab) {
  if (rho_ab.dims().n_modes() != 2)
    throw InvalidArgumentError("steering_reid: need a two-mode state");
  MomentOps ops(rho_ab.dims().dim(1));
  auto inferred = [&](double theta_a, double theta_b) {
    ConditionalEnsemble ens = build_ensemble(rho_ab, theta_a);
    double v = 0.0;
    for (size_t i = 0; i < ens.outcomes.size(); ++i)
      v += ens.weights(i) * ens.outcomes[i].density *
           moments_of(ens.outcomes[i].state_b, ops).variance(theta_b);
    return v;
  };
  double var_q = inferred(0.0, 0.0);          // condition on q_a, infer q_b
  double var_p = inferred(M_PI / 2, M_PI / 2);  // condition on p_a, infer p_b
  // |[q, p]| = 1 under the [q, p] = i convention.
  return 1.0 - 2.0 * std::sqrt(var_q * var_p);
}

}  // namespace omcat
