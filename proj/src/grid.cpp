#include "gf/grid.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

namespace gf {

Grid::Grid(Eigen::ArrayXd edges, Spacing spacing) : edges_(std::move(edges)), spacing_(spacing) {
  const int n = static_cast<int>(edges_.size()) - 1;
  if (n < 16) throw InvalidCoefficient("grid: need at least 16 cells");
  centers_.resize(n);
  widths_.resize(n);
  for (int i = 0; i < n; ++i) {
    widths_[i] = edges_[i + 1] - edges_[i];
    centers_[i] = 0.5 * (edges_[i] + edges_[i + 1]);
    if (!(widths_[i] > 0)) throw InvalidCoefficient("grid: edges must increase");
  }
  if (spacing_ == Spacing::geometric) ratio_ = edges_[1] / edges_[0];
}

std::shared_ptr<const Grid> Grid::uniform(double x_min, double x_max, int n) {
  if (!(x_min > 0) || !(x_max > x_min)) throw InvalidCoefficient("grid: need 0 < x_min < x_max");
  Eigen::ArrayXd e(n + 1);
  for (int i = 0; i <= n; ++i) e[i] = x_min + (x_max - x_min) * i / n;
  return std::shared_ptr<const Grid>(new Grid(std::move(e), Spacing::uniform));
}

std::shared_ptr<const Grid> Grid::geometric(double x_min, double x_max, int n, bool snap_half) {
  if (!(x_min > 0) || !(x_max > x_min)) throw InvalidCoefficient("grid: need 0 < x_min < x_max");
  double span = std::log(x_max / x_min);
  int half_shift = 0;
  int nn = n;
  if (snap_half) {
    // make log 2 an integer multiple of the log-spacing
    double h = span / n;
    half_shift = std::max(1, static_cast<int>(std::lround(std::log(2.0) / h)));
    double hs = std::log(2.0) / half_shift;
    nn = static_cast<int>(std::ceil(span / hs - 1e-9));
    span = nn * hs;  // x_max grows slightly
  }
  Eigen::ArrayXd e(nn + 1);
  for (int i = 0; i <= nn; ++i) e[i] = x_min * std::exp(span * i / nn);
  e[0] = x_min;
  auto g = std::shared_ptr<Grid>(new Grid(std::move(e), Spacing::geometric));
  g->half_shift_ = half_shift;
  return g;
}

int Grid::locate(double x) const {
  if (x < edges_[0]) return -1;
  if (x >= edges_[size()]) return size();
  const double* b = edges_.data();
  const double* e = b + edges_.size();
  int i = static_cast<int>(std::upper_bound(b, e, x) - b) - 1;
  return std::min(i, size() - 1);
}

void require_same_grid(const DiscreteField& a, const DiscreteField& b) {
  if (a.grid == b.grid) return;
  if (!a.grid || !b.grid || a.grid->size() != b.grid->size())
    throw GridMismatch("fields live on different grids");
  const auto& ea = a.grid->edges();
  const auto& eb = b.grid->edges();
  for (int i = 0; i < ea.size(); ++i)
    if (std::abs(ea[i] - eb[i]) > 1e-14 * (std::abs(ea[i]) + 1e-300))
      throw GridMismatch("fields live on different grids");
}

double weighted_norm(const DiscreteField& f, double alpha) {
  const auto& x = f.grid->centers();
  const auto& w = f.grid->widths();
  double sum = 0.0;
  for (int i = 0; i < f.size(); ++i)
    sum += std::abs(f.values[i]) * std::pow(1.0 + x[i], alpha) * w[i];
  return sum;
}

double bracket(const DiscreteField& f, const DiscreteField& phi) {
  require_same_grid(f, phi);
  return (f.values * phi.values * f.grid->widths()).sum();
}

double total_number(const DiscreteField& f) { return (f.values * f.grid->widths()).sum(); }

double total_mass(const DiscreteField& f) {
  return (f.values * f.grid->centers() * f.grid->widths()).sum();
}

DiscreteField indicator_field(std::shared_ptr<const Grid> grid, double a, double b) {
  DiscreteField f(grid);
  const auto& e = grid->edges();
  for (int i = 0; i < grid->size(); ++i) {
    double lo = std::max(a, e[i]), hi = std::min(b, e[i + 1]);
    if (hi > lo) f.values[i] = (hi - lo) / (e[i + 1] - e[i]);
  }
  return f;
}

DiscreteField sampled_field(std::shared_ptr<const Grid> grid,
                            const std::function<double(double)>& fn) {
  static const double gx[5] = {-0.9061798459386640, -0.5384693101056831, 0.0,
                               0.5384693101056831, 0.9061798459386640};
  static const double gw[5] = {0.2369268850561891, 0.4786286704993665, 0.5688888888888889,
                               0.4786286704993665, 0.2369268850561891};
  DiscreteField f(grid);
  const auto& e = grid->edges();
  for (int i = 0; i < grid->size(); ++i) {
    double mid = 0.5 * (e[i] + e[i + 1]), half = 0.5 * (e[i + 1] - e[i]);
    double s = 0.0;
    for (int k = 0; k < 5; ++k) s += gw[k] * fn(mid + half * gx[k]);
    f.values[i] = 0.5 * s;
  }
  return f;
}

DiscreteField gaussian_bump_field(std::shared_ptr<const Grid> grid, double center, double width) {
  const double norm = 1.0 / (width * std::sqrt(2.0 * M_PI));
  return sampled_field(std::move(grid), [=](double x) {
    double u = (x - center) / width;
    return norm * std::exp(-0.5 * u * u);
  });
}

DiscreteField power_weight_field(std::shared_ptr<const Grid> grid, double expo) {
  DiscreteField f(grid);
  const auto& e = grid->edges();
  for (int i = 0; i < grid->size(); ++i) {
    double a = e[i], b = e[i + 1];
    if (expo == -1.0)
      f.values[i] = (std::log1p(b) - std::log1p(a)) / (b - a);
    else
      f.values[i] =
          (std::pow(1.0 + b, expo + 1) - std::pow(1.0 + a, expo + 1)) / ((expo + 1) * (b - a));
  }
  return f;
}

double interp_field(const DiscreteField& f, double x) {
  const auto& c = f.grid->centers();
  const int n = f.size();
  if (x <= c[0]) return f.values[0];
  if (x >= c[n - 1]) return f.values[n - 1];
  const double* b = c.data();
  int i = static_cast<int>(std::upper_bound(b, b + n, x) - b) - 1;
  double t = (x - c[i]) / (c[i + 1] - c[i]);
  return f.values[i] + t * (f.values[i + 1] - f.values[i]);
}

}  // namespace gf
