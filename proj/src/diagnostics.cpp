#include "gf/diagnostics.hpp"

#include <algorithm>
#include <cmath>

namespace gf {

TimeSeries aeg_distance(const SimulationTrace& trace, const PerronTriple& triple,
                        const DiscreteField& f_in, double alpha) {
  if (!trace.rescaled)
    throw DomainError("aeg_distance: trace must be produced with rescale_by_lambda");
  double proj = bracket(f_in, triple.phi);
  TimeSeries out;
  out.t.reserve(trace.snapshots.size());
  out.v.reserve(trace.snapshots.size());
  for (size_t i = 0; i < trace.snapshots.size(); ++i) {
    require_same_grid(trace.snapshots[i], triple.G);
    DiscreteField diff(triple.G.grid, trace.snapshots[i].values - proj * triple.G.values);
    out.t.push_back(trace.snapshot_times[i]);
    out.v.push_back(weighted_norm(diff, alpha));
  }
  return out;
}

RateFit fit_rate(const TimeSeries& d, double t_lo, double t_hi) {
  double sx = 0, sy = 0, sxx = 0, sxy = 0, syy = 0;
  int n = 0;
  for (size_t i = 0; i < d.t.size(); ++i) {
    if (d.t[i] < t_lo || d.t[i] > t_hi) continue;
    if (!(d.v[i] > 0.0)) throw NonPositiveData("fit_rate: nonpositive sample in the window");
    double x = d.t[i], y = std::log(d.v[i]);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
    syy += y * y;
    ++n;
  }
  if (n < 3) throw NonPositiveData("fit_rate: window holds fewer than 3 samples");
  double det = n * sxx - sx * sx;
  double slope = (n * sxy - sx * sy) / det;
  double intercept = (sy - slope * sx) / n;
  RateFit fit;
  fit.sigma = -slope;
  fit.M = std::exp(intercept);
  fit.t_lo = t_lo;
  fit.t_hi = t_hi;
  double ss_tot = syy - sy * sy / n;
  double ss_res = 0.0;
  for (size_t i = 0; i < d.t.size(); ++i) {
    if (d.t[i] < t_lo || d.t[i] > t_hi) continue;
    double r = std::log(d.v[i]) - (intercept + slope * d.t[i]);
    ss_res += r * r;
  }
  fit.goodness = ss_tot > 0.0 ? std::max(0.0, 1.0 - ss_res / ss_tot) : 1.0;
  return fit;
}

OscillationReport detect_oscillation(const std::vector<double>& values, double dt) {
  OscillationReport rep;
  const int n = static_cast<int>(values.size());
  if (n < 32) return rep;

  // tail = last half, detrended by its least-squares line
  const int m = n / 2;
  std::vector<double> tail(values.end() - m, values.end());
  {
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (int i = 0; i < m; ++i) {
      sx += i;
      sy += tail[i];
      sxx += double(i) * i;
      sxy += double(i) * tail[i];
    }
    double det = double(m) * sxx - sx * sx;
    double b = (m * sxy - sx * sy) / det;
    double a = (sy - b * sx) / m;
    for (int i = 0; i < m; ++i) tail[i] -= a + b * i;
  }
  double var = 0.0;
  for (double v : tail) var += v * v;
  if (!(var > 0.0)) return rep;

  auto ac = [&](int lag) {
    double s = 0.0;
    for (int i = 0; i + lag < m; ++i) s += tail[i] * tail[i + lag];
    int cnt = m - lag;
    return (s / cnt) / (var / m);
  };

  // first local autocorrelation maximum above the threshold
  const int max_lag = m / 2;
  int best = 0;
  for (int lag = 2; lag + 1 < max_lag; ++lag) {
    double c = ac(lag);
    if (c >= 0.9 && c >= ac(lag - 1) && c >= ac(lag + 1)) {
      best = lag;
      break;
    }
  }
  if (best == 0) return rep;
  // the candidate must recur at twice the lag and fit 8 periods in the series
  if (2 * best >= max_lag || ac(2 * best) < 0.8) return rep;
  if (n < 8 * best) return rep;

  // parabolic refinement of the peak position
  double c0 = ac(best - 1), c1 = ac(best), c2 = ac(best + 1);
  double denom = c0 - 2 * c1 + c2;
  double shift = (denom < 0.0) ? 0.5 * (c0 - c2) / denom : 0.0;
  rep.periodic = true;
  rep.period = (best + shift) * dt;
  rep.correlation = c1;
  rep.amplitude = std::sqrt(2.0 * var / m);
  return rep;
}

std::vector<double> osgood_demo(const CoefficientSet& coeffs, std::shared_ptr<const Grid> grid,
                                const PerronTriple& triple, const std::vector<double>& eta_list,
                                double t, const EvolutionConfig& cfg) {
  if (coeffs.mode() != Mode::osgood)
    throw DomainError("osgood_demo: coefficients are not in Osgood mode");
  for (double eta : eta_list)
    if (eta < 2.0 * grid->x_min())
      throw DomainError("osgood_demo: eta below twice x_min");

  EvolutionConfig run = cfg;
  run.t_end = t;

  std::vector<double> out;
  out.reserve(eta_list.size());
  const auto& e = grid->edges();
  for (double eta : eta_list) {
    // f_eta = c / phi on the cells inside (0, eta); c makes <f_eta,phi> = 1
    DiscreteField f(grid);
    double covered = 0.0;
    int cells = 0;
    for (int i = 0; i < grid->size() && e[i + 1] <= eta; ++i) {
      f.values[i] = 1.0 / triple.phi.values[i];
      covered += grid->widths()[i];
      ++cells;
    }
    if (cells < 8) throw DomainError("osgood_demo: eta under-resolved (needs 8 cells)");
    f.values /= covered;

    SimulationTrace trace = evolve(coeffs, grid, triple, f, run);
    const DiscreteField& ft = trace.snapshots.back();
    double dist = 0.0;
    for (int i = 0; i < grid->size(); ++i)
      dist += std::abs(ft.values[i] - triple.G.values[i]) * triple.phi.values[i] *
              grid->widths()[i];
    out.push_back(dist);
  }
  return out;
}

}  // namespace gf
