#include "gf/characteristics.hpp"

#include <algorithm>
#include <cmath>

namespace gf {

namespace {

constexpr int kTableNodes = 4096;

// 5-point Gauss-Legendre on [a,b]
template <typename F>
double gauss5(F&& f, double a, double b) {
  static const double gx[5] = {-0.9061798459386640, -0.5384693101056831, 0.0,
                               0.5384693101056831, 0.9061798459386640};
  static const double gw[5] = {0.2369268850561891, 0.4786286704993665, 0.5688888888888889,
                               0.4786286704993665, 0.2369268850561891};
  double mid = 0.5 * (a + b), half = 0.5 * (b - a), sum = 0.0;
  for (int i = 0; i < 5; ++i) sum += gw[i] * f(mid + half * gx[i]);
  return half * sum;
}

std::vector<double> log_nodes(double lo, double hi, int n) {
  std::vector<double> xs(n + 1);
  double llo = std::log(lo), lhi = std::log(hi);
  for (int i = 0; i <= n; ++i) xs[i] = std::exp(llo + (lhi - llo) * i / n);
  xs.front() = lo;
  xs.back() = hi;
  return xs;
}

template <typename F>
MonotoneTable cumulative_table(F&& integrand, double lo, double hi, double v0) {
  auto xs = log_nodes(lo, hi, kTableNodes);
  std::vector<double> vs(xs.size());
  vs[0] = v0;
  for (size_t i = 1; i < xs.size(); ++i)
    vs[i] = vs[i - 1] + gauss5(integrand, xs[i - 1], xs[i]);
  return MonotoneTable(std::move(xs), std::move(vs));
}

}  // namespace

// ---------------------------------------------------------------------------
// MonotoneTable

MonotoneTable::MonotoneTable(std::vector<double> nodes, std::vector<double> values)
    : x_(std::move(nodes)), v_(std::move(values)) {
  const size_t n = x_.size();
  d_.assign(n, 0.0);
  if (n < 2) return;
  // Fritsch-Carlson monotone slopes
  std::vector<double> delta(n - 1);
  for (size_t i = 0; i + 1 < n; ++i) delta[i] = (v_[i + 1] - v_[i]) / (x_[i + 1] - x_[i]);
  d_[0] = delta[0];
  d_[n - 1] = delta[n - 2];
  for (size_t i = 1; i + 1 < n; ++i) {
    if (delta[i - 1] * delta[i] <= 0.0) {
      d_[i] = 0.0;
    } else {
      double w1 = 2.0 * (x_[i + 1] - x_[i]) + (x_[i] - x_[i - 1]);
      double w2 = (x_[i + 1] - x_[i]) + 2.0 * (x_[i] - x_[i - 1]);
      d_[i] = (w1 + w2) / (w1 / delta[i - 1] + w2 / delta[i]);
    }
  }
}

size_t MonotoneTable::find_segment(double x) const {
  auto it = std::upper_bound(x_.begin(), x_.end(), x);
  size_t i = static_cast<size_t>(it - x_.begin());
  if (i == 0) return 0;
  if (i >= x_.size()) return x_.size() - 2;
  return i - 1;
}

double MonotoneTable::operator()(double x) const {
  const size_t n = x_.size();
  if (x <= x_.front()) return v_.front() + d_.front() * (x - x_.front());
  if (x >= x_.back()) return v_.back() + d_.back() * (x - x_.back());
  size_t i = find_segment(x);
  double h = x_[i + 1] - x_[i];
  double t = (x - x_[i]) / h;
  double h00 = (1 + 2 * t) * (1 - t) * (1 - t);
  double h10 = t * (1 - t) * (1 - t);
  double h01 = t * t * (3 - 2 * t);
  double h11 = t * t * (t - 1);
  return h00 * v_[i] + h10 * h * d_[i] + h01 * v_[i + 1] + h11 * h * d_[i + 1];
}

double MonotoneTable::inverse(double u) const {
  if (u <= v_.front()) {
    double d = std::max(d_.front(), 1e-300);
    return x_.front() + (u - v_.front()) / d;
  }
  if (u >= v_.back()) {
    double d = std::max(d_.back(), 1e-300);
    return x_.back() + (u - v_.back()) / d;
  }
  // locate the bracketing segment in v, then guarded Newton on the cubic
  auto it = std::upper_bound(v_.begin(), v_.end(), u);
  size_t i = static_cast<size_t>(it - v_.begin());
  i = (i == 0) ? 0 : i - 1;
  if (i + 1 >= x_.size()) i = x_.size() - 2;
  double a = x_[i], b = x_[i + 1];
  double x = a + (b - a) * (u - v_[i]) / std::max(v_[i + 1] - v_[i], 1e-300);
  for (int iter = 0; iter < 60; ++iter) {
    double fx = (*this)(x) - u;
    if (fx > 0)
      b = x;
    else
      a = x;
    double h = x_[i + 1] - x_[i];
    double t = (x - x_[i]) / h;
    double dv = (6 * t * t - 6 * t) * (v_[i] - v_[i + 1]) / h +
                (3 * t * t - 4 * t + 1) * d_[i] + (3 * t * t - 2 * t) * d_[i + 1];
    double step = dv > 0 ? fx / dv : 0.0;
    double xn = x - step;
    if (!(xn > a) || !(xn < b)) xn = 0.5 * (a + b);
    if (std::abs(xn - x) <= 1e-15 * (std::abs(x) + 1e-300)) return xn;
    x = xn;
  }
  return x;
}

// ---------------------------------------------------------------------------
// Flow

Flow::Flow(GrowthRate tau, double x_lo_hint, double x_hi_hint) : tau_(std::move(tau)) {
  if (tau_.family == GrowthFamily::tabulated) {
    double lo = x_lo_hint / 10.0, hi = 10.0 * x_hi_hint;
    auto inv_tau = [this](double y) { return 1.0 / tau_(y); };
    if (osgood()) {
      table_ = cumulative_table(inv_tau, lo, hi, 0.0);
    } else {
      // anchor at 0: integrate the head [0, lo] once (graded toward 0)
      double head = 0.0;
      double a = 0.0;
      auto seg = log_nodes(lo * 1e-6, lo, 256);
      head += gauss5(inv_tau, a + 1e-300, seg.front());
      for (size_t i = 1; i < seg.size(); ++i) head += gauss5(inv_tau, seg[i - 1], seg[i]);
      table_ = cumulative_table(inv_tau, lo, hi, head);
    }
  }
}

double Flow::F(double x) const {
  switch (tau_.family) {
    case GrowthFamily::constant:
      return x / tau_.c;
    case GrowthFamily::power: {
      if (tau_.p == 1.0) return std::log(x) / tau_.c;  // Osgood, anchored at 1
      double e = 1.0 - tau_.p;
      return std::pow(x, e) / (tau_.c * e);
    }
    case GrowthFamily::affine_capped:
      return x <= 1.0 ? x / tau_.c : (1.0 + std::log(x)) / tau_.c;
    case GrowthFamily::tabulated:
      return (*table_)(x);
  }
  return x;
}

double Flow::Finv(double u) const {
  switch (tau_.family) {
    case GrowthFamily::constant:
      return tau_.c * u;
    case GrowthFamily::power: {
      if (tau_.p == 1.0) return std::exp(tau_.c * u);
      double e = 1.0 - tau_.p;
      double y = tau_.c * e * u;
      return y <= 0.0 ? 0.0 : std::pow(y, 1.0 / e);
    }
    case GrowthFamily::affine_capped:
      return u <= 1.0 / tau_.c ? tau_.c * u : std::exp(tau_.c * u - 1.0);
    case GrowthFamily::tabulated:
      return table_->inverse(u);
  }
  return u;
}

double Flow::flow(double t, double x) const {
  double u = F(x) + t;
  if (!osgood() && u < 0.0) {
    if (u < -1e-12 * (std::abs(F(x)) + std::abs(t)))
      throw DomainError("flow: t below the exit time t_*(x)");
    u = 0.0;
  }
  return Finv(u);
}

double Flow::exit_time(double x) const {
  if (osgood()) return -kInf;
  return -F(x);
}

double Flow::jacobian(double t, double x) const {
  double back = flow(-t, x);
  return tau_(back) / tau_(x);
}

// ---------------------------------------------------------------------------
// DampingPrimitive

DampingPrimitive::DampingPrimitive(const GrowthRate& tau, const FragmentationRate& b,
                                   double x_lo_hint, double x_hi_hint) {
  bool tau_powerlike = tau.family == GrowthFamily::constant ||
                       (tau.family == GrowthFamily::power);
  double tp = tau.family == GrowthFamily::constant ? 0.0 : tau.p;
  if (tau_powerlike && b.family == FragFamily::power) {
    double e = b.gamma - tp + 1.0;
    if (e != 0.0) {
      kind_ = Kind::closed_power;
      scale_ = b.b / (tau.c * e);
      expo_ = e;
      shift_ = 0.0;
    } else {
      kind_ = Kind::closed_log;
      scale_ = b.b / tau.c;
    }
    return;
  }
  if (tau.family == GrowthFamily::constant && b.family == FragFamily::capped_power) {
    kind_ = Kind::closed_power;
    double e = b.gamma + 1.0;
    scale_ = b.b / (tau.c * e);
    expo_ = e;
    shift_ = b.xc;
    return;
  }
  kind_ = Kind::table;
  auto integrand = [&tau, &b](double y) { return b(y) / tau(y); };
  table_ = cumulative_table(integrand, x_lo_hint / 10.0, 10.0 * x_hi_hint, 0.0);
  invertible_ = table_->back_v() > table_->front_v();
}

double DampingPrimitive::operator()(double x) const {
  switch (kind_) {
    case Kind::closed_power: {
      double y = x - shift_;
      if (y <= 0.0) return expo_ > 0 ? 0.0 : -kInf;
      return scale_ * std::pow(y, expo_);
    }
    case Kind::closed_log:
      return scale_ * std::log(x);
    case Kind::table:
      return (*table_)(x);
  }
  return 0.0;
}

double DampingPrimitive::inverse(double u) const {
  switch (kind_) {
    case Kind::closed_power:
      if (!(scale_ > 0.0) || !(expo_ > 0.0))
        throw DomainError("damping primitive not invertible");
      if (u <= 0.0) return shift_;
      return shift_ + std::pow(u / scale_, 1.0 / expo_);
    case Kind::closed_log:
      return std::exp(u / scale_);
    case Kind::table:
      if (!invertible_) throw DomainError("damping primitive not invertible");
      return table_->inverse(u);
  }
  return u;
}

double DampingPrimitive::max_value() const {
  switch (kind_) {
    case Kind::closed_power: return expo_ > 0 ? kInf : 0.0;
    case Kind::closed_log: return kInf;
    case Kind::table: return table_->back_v();
  }
  return kInf;
}

// ---------------------------------------------------------------------------

double damping_integral(const Flow& flow, const DampingPrimitive& phi, double lambda, double t,
                        double x) {
  double back = flow.flow(-t, x);
  return lambda * t + (phi(x) - phi(back));
}

double damping_integral(const Flow& flow, const FragmentationRate& b, double lambda, double t,
                        double x) {
  double lo = std::min(x, flow.flow(-t, x));
  DampingPrimitive phi(flow.tau(), b, std::max(lo, 1e-8), std::max(x, 1.0) * 10.0);
  return damping_integral(flow, phi, lambda, t, x);
}

}  // namespace gf
