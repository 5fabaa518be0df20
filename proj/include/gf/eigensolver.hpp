#pragma once

// Perron eigentriple (lambda, G, phi) by inverse power iteration on the
// explicit resolvent of the transport-loss part. The resolvent is a single
// upwind sweep with exact per-cell exponents taken from the primitives of
// 1/tau and B/tau, so the discrete generator action (mu - R^{-1}) is
// available in closed form for residual certificates.

#include "gf/characteristics.hpp"
#include "gf/coefficients.hpp"
#include "gf/grid.hpp"
#include "gf/operators.hpp"

namespace gf {

struct PerronTriple {
  double lambda = 0.0;  // direct Perron eigenvalue (1/time)
  DiscreteField G;      // stable size distribution, integral 1
  DiscreteField phi;    // dual eigenfunction, <G,phi> = 1
  double direct_residual = kInf;
  double dual_residual = kInf;
  double lambda_dual = 0.0;
  double sandwich_constant = kInf;  // max of phi/(1+x) and (1+x)/phi
  Mode mode = Mode::standard;
};

// (mu - A0)^{-1} h with A0 f = -(tau f)' - lambda f - B f, zero inflow at x_min
DiscreteField apply_resolvent(const CoefficientSet& coeffs, std::shared_ptr<const Grid> grid,
                              double mu, double lambda, const DiscreteField& h);

PerronTriple solve_perron(const CoefficientSet& coeffs, std::shared_ptr<const Grid> grid,
                          double tol = 1e-9, int max_iter = 200000);

double check_sandwich(const PerronTriple& triple);

// Internal machinery shared with the evolution cross-checks; exposed for the
// solver and tests.
namespace detail {

class ResolventSweep {
 public:
  ResolventSweep(const CoefficientSet& coeffs, std::shared_ptr<const Grid> grid);

  void set_shift(double mu_plus_lambda);  // must be > 0
  double shift() const { return shift_; }

  Eigen::ArrayXd apply(const Eigen::ArrayXd& h) const;          // (mu - A0)^{-1} h
  Eigen::ArrayXd apply_inverse(const Eigen::ArrayXd& f) const;  // (mu - A0) f
  Eigen::ArrayXd apply_dual(const Eigen::ArrayXd& h) const;
  Eigen::ArrayXd apply_dual_inverse(const Eigen::ArrayXd& f) const;

  const Grid& grid() const { return *grid_; }

 private:
  std::shared_ptr<const Grid> grid_;
  Eigen::ArrayXd dF_, dPhi_, width_;
  double shift_ = 0.0;
  // per-cell exponent data at the current shift: a = shift*dF + dPhi,
  // E = exp(-a), omE = 1-E, beta = (1-E)/a, omb = 1-beta, emb = E-beta
  Eigen::ArrayXd a_, q_, E_, omE_, beta_, omb_, emb_;
};

}  // namespace detail

}  // namespace gf
