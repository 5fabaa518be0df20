#include "gf/evolution.hpp"

#include <algorithm>
#include <cmath>

namespace gf {

namespace {

// 3-point Gauss-Legendre nodes/weights on [0,1]
constexpr double kG3x[3] = {0.1127016653792583, 0.5, 0.8872983346207417};
constexpr double kG3w[3] = {5.0 / 18.0, 8.0 / 18.0, 5.0 / 18.0};

double minmod(double a, double b) {
  if (a * b <= 0.0) return 0.0;
  return std::abs(a) < std::abs(b) ? a : b;
}

}  // namespace

TransportOperator::TransportOperator(const CoefficientSet& coeffs,
                                     std::shared_ptr<const Grid> grid)
    : grid_(grid),
      flow_(coeffs.tau, grid->x_min(), grid->x_max()),
      damping_(coeffs.tau, coeffs.b, grid->x_min(), grid->x_max()) {}

DiscreteField TransportOperator::apply(const DiscreteField& f, double lambda, double t,
                                       Loss* loss, const DiscreteField* phi_weight) const {
  require_same_grid(f, DiscreteField(grid_));
  if (!(t >= 0.0)) throw DomainError("transport: t must be nonnegative");
  const int n = grid_->size();
  const auto& e = grid_->edges();
  const auto& c = grid_->centers();
  const auto& w = grid_->widths();

  DiscreteField out(grid_);
  if (t == 0.0) {
    out.values = f.values;
    return out;
  }

  // source positions feeding each target edge: yb_j = X(-t, e_j), clipped to
  // the grid (sources below x_min contribute nothing: zero inflow)
  const double Fmin = flow_.F(e[0]);
  Eigen::ArrayXd yb(n + 1);
  for (int j = 0; j <= n; ++j) {
    double u = flow_.F(e[j]) - t;
    yb[j] = (u <= Fmin) ? e[0] : flow_.Finv(u);
  }

  // limited linear reconstruction per source cell
  Eigen::ArrayXd slope(n);
  for (int i = 0; i < n; ++i) {
    double sl = (i > 0) ? (f.values[i] - f.values[i - 1]) / (c[i] - c[i - 1]) : 0.0;
    double sr = (i + 1 < n) ? (f.values[i + 1] - f.values[i]) / (c[i + 1] - c[i]) : 0.0;
    double s = (i == 0 || i + 1 == n) ? 0.0 : minmod(sl, sr);
    if (f.values[i] >= 0.0) {
      double cap = 2.0 * f.values[i] / w[i];
      s = std::clamp(s, -cap, cap);
    }
    slope[i] = s;
  }

  const double lam_t = lambda * t;
  auto packet = [&](int i, double a, double b) {
    // damped mass of the reconstruction on [a,b] inside source cell i
    double m = 0.0;
    for (int k = 0; k < 3; ++k) {
      double y = a + (b - a) * kG3x[k];
      double img = flow_.Finv(flow_.F(y) + t);
      double damp = std::exp(-(damping_(img) - damping_(y)) - lam_t);
      double val = f.values[i] + slope[i] * (y - c[i]);
      m += kG3w[k] * val * damp;
    }
    return m * (b - a);
  };

  double lost_mass = 0.0, lost_bracket = 0.0;
  // price of mass leaving past x_max: phi extended linearly from the last
  // two centers
  double phi_top = 0.0, phi_slope = 0.0;
  if (phi_weight) {
    phi_top = phi_weight->values[n - 1];
    phi_slope = (phi_weight->values[n - 1] - phi_weight->values[n - 2]) / (c[n - 1] - c[n - 2]);
  }

  int j = 0;  // target pointer
  for (int i = 0; i < n; ++i) {
    double lo = e[i], hi = e[i + 1];
    if (f.values[i] == 0.0 && slope[i] == 0.0) continue;
    while (j < n && yb[j + 1] <= lo) ++j;
    double a = lo;
    int jj = j;
    while (a < hi) {
      double b = (jj < n) ? std::min(hi, yb[jj + 1]) : hi;
      if (b <= a) {
        ++jj;
        continue;
      }
      double m = packet(i, a, b);
      if (jj >= n) {
        lost_mass += m;
        if (phi_weight) {
          double mid = flow_.Finv(flow_.F(0.5 * (a + b)) + t);
          lost_bracket += m * std::max(0.0, phi_top + phi_slope * (mid - c[n - 1]));
        }
      } else {
        out.values[jj] += m / w[jj];
      }
      a = b;
      if (jj < n && b >= yb[jj + 1]) ++jj;
    }
  }

  if (loss) {
    loss->mass = lost_mass;
    loss->bracket = lost_bracket;
  }
  return out;
}

DiscreteField transport_step(const Flow& flow, const CoefficientSet& coeffs, double lambda,
                             double t, const DiscreteField& f) {
  TransportOperator op(coeffs, f.grid);
  return op.apply(f, lambda, t);
}

// ---------------------------------------------------------------------------
// evolve

SimulationTrace evolve(const CoefficientSet& coeffs, std::shared_ptr<const Grid> grid,
                       const PerronTriple& triple, const DiscreteField& f_in,
                       const EvolutionConfig& cfg) {
  require_same_grid(f_in, DiscreteField(grid));
  if (!(cfg.dt > 0.0)) throw DomainError("evolve: dt must be positive");

  const int n = grid->size();
  const double lambda = cfg.rescale_by_lambda ? triple.lambda : 0.0;
  TransportOperator transport(coeffs, grid);
  auto gain = assemble_gain(coeffs, grid);

  // loss-step accuracy guard
  double bmax = 0.0;
  for (int i = 0; i < n; ++i) bmax = std::max(bmax, coeffs.b(grid->centers()[i]));
  if (cfg.dt * bmax > 0.5 + 1e-12)
    throw DomainError("evolve: dt*max(B) exceeds 0.5; shrink the step");

  if (cfg.method != EvolveMethod::splitting) {
    // Duhamel-Picard / Dyson-Phillips integrators produce snapshots only
    SimulationTrace trace;
    trace.dt = cfg.dt;
    trace.rescaled = cfg.rescale_by_lambda;
    trace.alphas = cfg.alphas;
    int m = std::max(1, static_cast<int>(std::lround(cfg.t_end / cfg.dt)));
    int order = cfg.method == EvolveMethod::dyson_phillips ? cfg.dyson_order : 24;
    DiscreteField ft = dyson_phillips_partial(coeffs, grid, lambda, f_in, cfg.t_end, order);
    trace.times = {0.0, m * cfg.dt};
    trace.snapshot_times = trace.times;
    trace.snapshots = {f_in, ft};
    for (double a : cfg.alphas)
      trace.norms.push_back({weighted_norm(f_in, a), weighted_norm(ft, a)});
    trace.bracket_phi = {bracket(f_in, triple.phi), bracket(ft, triple.phi)};
    trace.number = {total_number(f_in), total_number(ft)};
    trace.mass = {total_mass(f_in), total_mass(ft)};
    trace.tail_loss = {0.0, 0.0};
    return trace;
  }

  const int steps = std::max(1, static_cast<int>(std::lround(cfg.t_end / cfg.dt)));

  // snapshot schedule: log-spaced in t plus mandatory times, snapped to steps
  std::vector<char> want(steps + 1, 0);
  {
    int budget = std::max(2, cfg.max_snapshots);
    double t0 = cfg.dt, t1 = steps * cfg.dt;
    for (int k = 0; k < budget; ++k) {
      double tt = t0 * std::pow(t1 / t0, budget == 1 ? 1.0 : double(k) / (budget - 1));
      int s = std::clamp(static_cast<int>(std::lround(tt / cfg.dt)), 1, steps);
      want[s] = 1;
    }
    for (double tt : cfg.mandatory_snapshot_times) {
      int s = std::clamp(static_cast<int>(std::lround(tt / cfg.dt)), 0, steps);
      want[s] = 1;
    }
    want[0] = 1;
    want[steps] = 1;
  }

  SimulationTrace trace;
  trace.dt = cfg.dt;
  trace.rescaled = cfg.rescale_by_lambda;
  trace.alphas = cfg.alphas;
  trace.norms.assign(cfg.alphas.size(), {});

  DiscreteField f = f_in;
  const DiscreteField& phi = triple.phi;
  double tail_cum = 0.0;
  const double bracket0 = std::abs(bracket(f, phi));
  const bool fix = cfg.conserve_bracket && cfg.rescale_by_lambda;

  auto record = [&](int step) {
    double t = step * cfg.dt;
    trace.times.push_back(t);
    trace.bracket_phi.push_back(bracket(f, phi));
    trace.number.push_back(total_number(f));
    trace.mass.push_back(total_mass(f));
    trace.tail_loss.push_back(tail_cum);
    for (size_t k = 0; k < cfg.alphas.size(); ++k)
      trace.norms[k].push_back(weighted_norm(f, cfg.alphas[k]));
    if (want[step]) {
      trace.snapshot_times.push_back(t);
      trace.snapshots.push_back(f);
    }
  };
  record(0);

  const double half = 0.5 * cfg.dt;
  for (int step = 1; step <= steps; ++step) {
    double br_before = fix ? bracket(f, phi) : 0.0;

    Eigen::ArrayXd g1 = half * (gain.m * f.values.matrix()).array();
    DiscreteField fa(grid, f.values + g1);
    TransportOperator::Loss loss;
    DiscreteField fb = transport.apply(fa, lambda, cfg.dt, &loss, &phi);
    Eigen::ArrayXd g2 = half * (gain.m * fb.values.matrix()).array();

    double sigma = 1.0;
    if (fix) {
      double g2br = (g2 * phi.values * grid->widths()).sum();
      double need = br_before - loss.bracket - bracket(fb, phi);
      if (g2br > 0.0) {
        sigma = need / g2br;
        if (!(sigma > 0.0) || !(sigma < 4.0))
          throw BlowUp("evolve: conservation rebalance left (0,4); lambda likely mis-set");
      }
      trace.max_gain_rebalance = std::max(trace.max_gain_rebalance, std::abs(sigma - 1.0));
    }
    f = DiscreteField(grid, fb.values + sigma * g2);
    tail_cum += loss.bracket;

    record(step);
    double n1 = trace.norms.empty() ? total_number(f) : trace.norms[0].back();
    if (!(n1 < cfg.blowup_threshold))
      throw BlowUp("evolve: norm exceeded the blow-up threshold; lambda mis-set or unstable");
    if (bracket0 > 0.0 && tail_cum > cfg.tail_tolerance * bracket0)
      throw TailOverflow("evolve: cumulative tail loss exceeds tolerance; raise x_max");
  }
  return trace;
}

// ---------------------------------------------------------------------------
// Duhamel residual

double duhamel_residual(const CoefficientSet& coeffs, std::shared_ptr<const Grid> grid,
                        const PerronTriple& triple, const DiscreteField& f_in, double t,
                        int quad_points) {
  if (!(t > 0.0)) throw DomainError("duhamel_residual: t must be positive");
  const int m = std::max(4, quad_points);
  const double dt = t / 1000.0;

  // nodes graded toward s = 0, snapped to the step grid of the T_t run so
  // the stored snapshots match the propagation times exactly; coincident
  // nodes get zero trapezoid weight
  std::vector<double> s(m + 1);
  for (int k = 0; k <= m; ++k) {
    double raw = t * (double(k) / m) * (double(k) / m);
    s[k] = dt * std::lround(raw / dt);
  }

  EvolutionConfig cfg;
  cfg.dt = dt;
  cfg.t_end = t;
  cfg.rescale_by_lambda = true;
  cfg.mandatory_snapshot_times = s;
  cfg.max_snapshots = 4 * m + 16;
  cfg.alphas = {1.0};
  SimulationTrace trace = evolve(coeffs, grid, triple, f_in, cfg);

  auto snapshot_at = [&](double tt) -> const DiscreteField& {
    size_t best = 0;
    double bd = kInf;
    for (size_t i = 0; i < trace.snapshot_times.size(); ++i) {
      double d = std::abs(trace.snapshot_times[i] - tt);
      if (d < bd) {
        bd = d;
        best = i;
      }
    }
    return trace.snapshots[best];
  };

  TransportOperator transport(coeffs, grid);
  auto gain = assemble_gain(coeffs, grid);
  const double lambda = triple.lambda;

  Eigen::ArrayXd acc = Eigen::ArrayXd::Zero(grid->size());
  for (int k = 0; k <= m; ++k) {
    double wk = 0.0;  // trapezoid weight on the graded mesh
    if (k > 0) wk += 0.5 * (s[k] - s[k - 1]);
    if (k < m) wk += 0.5 * (s[k + 1] - s[k]);
    if (wk <= 0.0) continue;
    const DiscreteField& fs = snapshot_at(s[k]);
    DiscreteField gs(grid, (gain.m * fs.values.matrix()).array());
    DiscreteField propagated = transport.apply(gs, lambda, t - s[k]);
    acc += wk * propagated.values;
  }

  DiscreteField st = transport.apply(f_in, lambda, t);
  DiscreteField residual(grid, snapshot_at(t).values - st.values - acc);
  return weighted_norm(residual, 1.0);
}

// ---------------------------------------------------------------------------
// Dyson-Phillips partial sums

DiscreteField dyson_phillips_partial(const CoefficientSet& coeffs,
                                     std::shared_ptr<const Grid> grid, double lambda,
                                     const DiscreteField& f_in, double t, int n) {
  require_same_grid(f_in, DiscreteField(grid));
  if (n < 0) throw DomainError("dyson_phillips_partial: n must be >= 0");
  if (!(t >= 0.0)) throw DomainError("dyson_phillips_partial: t must be >= 0");

  TransportOperator transport(coeffs, grid);
  if (n == 0 || t == 0.0) return transport.apply(f_in, lambda, t);

  auto gain = assemble_gain(coeffs, grid);
  const int m = std::max(8, static_cast<int>(std::ceil(t / 1e-3)));
  const double dt = t / m;

  // V_k(t_j) = T^{(k)}_{t_j} f on the uniform grid; the recursion
  // T^{(k+1)}_t = int_0^t S_{t-s} F+ T^{(k)}_s ds advances incrementally:
  // W_{j+1} = S_dt (W_j + dt/2 F V_k(t_j)) + dt/2 F V_k(t_{j+1})
  std::vector<Eigen::ArrayXd> prev(m + 1), sum(m + 1);
  for (int j = 0; j <= m; ++j) {
    prev[j] = transport.apply(f_in, lambda, j * dt).values;
    sum[j] = prev[j];
  }

  for (int k = 1; k <= n; ++k) {
    std::vector<Eigen::ArrayXd> cur(m + 1);
    cur[0] = Eigen::ArrayXd::Zero(grid->size());
    for (int j = 0; j < m; ++j) {
      Eigen::ArrayXd inner =
          cur[j] + 0.5 * dt * ((gain.m * prev[j].matrix()).array());
      DiscreteField shifted =
          transport.apply(DiscreteField(grid, std::move(inner)), lambda, dt);
      cur[j + 1] =
          shifted.values + 0.5 * dt * ((gain.m * prev[j + 1].matrix()).array());
    }
    for (int j = 0; j <= m; ++j) sum[j] += cur[j];
    prev = std::move(cur);
  }
  return DiscreteField(grid, std::move(sum[m]));
}

}  // namespace gf
