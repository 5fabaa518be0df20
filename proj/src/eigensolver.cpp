#include "gf/eigensolver.hpp"

#include <algorithm>
#include <cmath>

namespace gf {

namespace detail {

ResolventSweep::ResolventSweep(const CoefficientSet& coeffs, std::shared_ptr<const Grid> grid)
    : grid_(std::move(grid)) {
  const int n = grid_->size();
  const auto& e = grid_->edges();
  Flow flow(coeffs.tau, grid_->x_min(), grid_->x_max());
  DampingPrimitive phi(coeffs.tau, coeffs.b, grid_->x_min(), grid_->x_max());
  dF_.resize(n);
  dPhi_.resize(n);
  width_ = grid_->widths();
  for (int i = 0; i < n; ++i) {
    dF_[i] = flow.F(e[i + 1]) - flow.F(e[i]);
    dPhi_[i] = std::max(0.0, phi(e[i + 1]) - phi(e[i]));
  }
}

void ResolventSweep::set_shift(double s) {
  if (!(s > 0.0)) throw DomainError("resolvent: shift mu + lambda must be positive");
  shift_ = s;
  const int n = static_cast<int>(dF_.size());
  a_.resize(n);
  q_.resize(n);
  E_.resize(n);
  omE_.resize(n);
  beta_.resize(n);
  omb_.resize(n);
  emb_.resize(n);
  for (int i = 0; i < n; ++i) {
    double a = s * dF_[i] + dPhi_[i];
    a_[i] = a;
    q_[i] = s + dPhi_[i] / dF_[i];
    E_[i] = std::exp(-a);
    omE_[i] = -std::expm1(-a);
    beta_[i] = omE_[i] / a;
    if (a < 1e-3) {
      // series: cancellation-free small-exponent forms
      omb_[i] = a * (0.5 - a / 6.0 + a * a / 24.0 - a * a * a / 120.0);
      emb_[i] = a * (-0.5 + a / 3.0 - a * a / 8.0 + a * a * a / 30.0);
    } else {
      omb_[i] = 1.0 - beta_[i];
      emb_[i] = E_[i] - beta_[i];
    }
  }
}

Eigen::ArrayXd ResolventSweep::apply(const Eigen::ArrayXd& h) const {
  const int n = static_cast<int>(dF_.size());
  Eigen::ArrayXd f(n);
  double u = 0.0;  // tau*f at the left edge; zero inflow at x_min
  for (int i = 0; i < n; ++i) {
    f[i] = (h[i] * omb_[i] + u * omE_[i] / width_[i]) / q_[i];
    u = u * E_[i] + h[i] * width_[i] * beta_[i];
  }
  return f;
}

Eigen::ArrayXd ResolventSweep::apply_inverse(const Eigen::ArrayXd& f) const {
  const int n = static_cast<int>(dF_.size());
  Eigen::ArrayXd h(n);
  double u = 0.0;
  for (int i = 0; i < n; ++i) {
    double unew = (u * emb_[i] + q_[i] * f[i] * width_[i] * beta_[i]) / omb_[i];
    h[i] = q_[i] * f[i] + (unew - u) / width_[i];
    u = unew;
  }
  return h;
}

Eigen::ArrayXd ResolventSweep::apply_dual(const Eigen::ArrayXd& h) const {
  const int n = static_cast<int>(dF_.size());
  Eigen::ArrayXd f(n);
  double v = 0.0;  // phi at the right edge; zero inflow at x_max
  for (int i = n - 1; i >= 0; --i) {
    f[i] = v * beta_[i] + (h[i] / q_[i]) * omb_[i];
    v = v * E_[i] + (h[i] / q_[i]) * omE_[i];
  }
  return f;
}

Eigen::ArrayXd ResolventSweep::apply_dual_inverse(const Eigen::ArrayXd& f) const {
  const int n = static_cast<int>(dF_.size());
  Eigen::ArrayXd h(n);
  double v = 0.0;
  for (int i = n - 1; i >= 0; --i) {
    h[i] = q_[i] * (f[i] - v * beta_[i]) / omb_[i];
    v = v * E_[i] + (h[i] / q_[i]) * omE_[i];
  }
  return h;
}

}  // namespace detail

// ---------------------------------------------------------------------------

DiscreteField apply_resolvent(const CoefficientSet& coeffs, std::shared_ptr<const Grid> grid,
                              double mu, double lambda, const DiscreteField& h) {
  if (!(mu > 0.0)) throw DomainError("apply_resolvent: mu must be positive");
  require_same_grid(h, DiscreteField(grid));
  detail::ResolventSweep sweep(coeffs, grid);
  sweep.set_shift(mu + lambda);
  return DiscreteField(grid, sweep.apply(h.values));
}

namespace {

struct EigenResult {
  double lambda_total = 0.0;
  Eigen::ArrayXd vec;  // normalized to unit integral
  double residual = kInf;
  int iterations = 0;
};

// Power iteration on g <- R_{mu,lambda}(mu g + F g), with lambda refreshed by
// the Rayleigh estimate of the spectral offset of A0 + F until it vanishes.
// Returns the absolute L1_1 residual of (A0 + F - s) on the final iterate.
EigenResult solve_side(detail::ResolventSweep& sweep, const Eigen::SparseMatrix<double>& gainM,
                       bool dual, double mu, double lambda0, double tol, int max_iter) {
  const auto& grid = sweep.grid();
  const int n = grid.size();

  auto resolve = [&](const Eigen::ArrayXd& h) {
    return dual ? sweep.apply_dual(h) : sweep.apply(h);
  };
  auto generator = [&](const Eigen::ArrayXd& g) -> Eigen::ArrayXd {
    Eigen::ArrayXd rinv = dual ? sweep.apply_dual_inverse(g) : sweep.apply_inverse(g);
    return mu * g - rinv + ((gainM * g.matrix()).array());
  };
  Eigen::ArrayXd w = (1.0 + grid.centers()) * grid.widths();
  auto l11 = [&](const Eigen::ArrayXd& r) { return (r.abs() * w).sum(); };

  double lambda = lambda0;
  sweep.set_shift(mu + lambda);
  Eigen::ArrayXd g = Eigen::ArrayXd::Ones(n);
  g /= (g * grid.widths()).sum();

  double s_prev = kInf;
  int since_check = 0;
  for (int iter = 1; iter <= max_iter; ++iter) {
    Eigen::ArrayXd gn = resolve(mu * g + ((gainM * g.matrix()).array()));
    double total = (gn * grid.widths()).sum();
    if (!(total > 0.0) || !gn.allFinite())
      throw NoConvergence("perron: iteration left the positive cone");
    g = gn / total;

    if (++since_check < 6) continue;
    since_check = 0;

    Eigen::ArrayXd ag = generator(g);
    double s = (ag * w).sum() / (g * w).sum();
    double res = l11(ag - s * g);
    if (res <= tol) {
      EigenResult out;
      out.lambda_total = lambda + s;
      out.vec = std::move(g);
      out.residual = res;
      out.iterations = iter;
      return out;
    }
    // move the shift once the offset estimate has settled
    if (std::abs(s) > 1e-13 * (1.0 + std::abs(lambda)) && std::isfinite(s_prev) &&
        std::abs(s - s_prev) < 0.25 * std::abs(s)) {
      lambda += s;
      if (mu + lambda < 0.1) lambda = 0.1 - mu;
      sweep.set_shift(mu + lambda);
      s_prev = kInf;
    } else {
      s_prev = s;
    }
  }
  throw NoConvergence("perron: no convergence within max_iter");
}

}  // namespace

PerronTriple solve_perron(const CoefficientSet& coeffs, std::shared_ptr<const Grid> grid,
                          double tol, int max_iter) {
  if (!(tol > 0.0)) throw DomainError("solve_perron: tol must be positive");
  const double mu = coeffs.resolvent_shift();

  auto gain = assemble_gain(coeffs, grid);
  auto adjoint = assemble_adjoint_gain(coeffs, grid);
  detail::ResolventSweep sweep(coeffs, grid);

  EigenResult direct = solve_side(sweep, gain.m, false, mu, 0.0, tol, max_iter);
  EigenResult dual =
      solve_side(sweep, adjoint.m, true, mu, direct.lambda_total, tol, max_iter);

  PerronTriple triple;
  triple.mode = coeffs.mode();
  triple.lambda = direct.lambda_total;
  triple.lambda_dual = dual.lambda_total;
  triple.direct_residual = direct.residual;

  // normalization: integral of G is 1 (already true from the iteration),
  // then phi scaled so that <G, phi> = 1
  Eigen::ArrayXd Gv = direct.vec;
  Gv /= (Gv * grid->widths()).sum();
  Eigen::ArrayXd Pv = dual.vec;
  double gp = (Gv * Pv * grid->widths()).sum();
  if (!(gp > 0.0)) throw NoConvergence("perron: degenerate duality product");
  Pv /= gp;
  triple.dual_residual = dual.residual / gp;

  triple.G = DiscreteField(grid, std::move(Gv));
  triple.phi = DiscreteField(grid, std::move(Pv));
  for (int i = 0; i < triple.phi.size(); ++i)
    if (!(triple.phi.values[i] > 0.0))
      throw NoConvergence("perron: dual eigenfunction not strictly positive");
  triple.sandwich_constant = check_sandwich(triple);
  return triple;
}

double check_sandwich(const PerronTriple& triple) {
  const auto& x = triple.phi.grid->centers();
  double c = 0.0;
  for (int i = 0; i < triple.phi.size(); ++i) {
    double ratio = triple.phi.values[i] / (1.0 + x[i]);
    c = std::max(c, std::max(ratio, 1.0 / ratio));
  }
  return c;
}

}  // namespace gf
