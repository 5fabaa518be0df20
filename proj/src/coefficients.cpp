#include "gf/coefficients.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace gf {

namespace {

double interp_loglog(const std::vector<double>& xs, const std::vector<double>& vs, double x) {
  if (x <= xs.front()) {
    // extend with the slope of the first segment
    double s = std::log(vs[1] / vs[0]) / std::log(xs[1] / xs[0]);
    return vs[0] * std::pow(x / xs[0], s);
  }
  if (x >= xs.back()) {
    size_t n = xs.size();
    double s = std::log(vs[n - 1] / vs[n - 2]) / std::log(xs[n - 1] / xs[n - 2]);
    return vs[n - 1] * std::pow(x / xs[n - 1], s);
  }
  auto it = std::upper_bound(xs.begin(), xs.end(), x);
  size_t i = static_cast<size_t>(it - xs.begin()) - 1;
  double t = std::log(x / xs[i]) / std::log(xs[i + 1] / xs[i]);
  return vs[i] * std::pow(vs[i + 1] / vs[i], t);
}

void require_table(const std::vector<double>& x, const std::vector<double>& v, const char* who) {
  if (x.size() < 2 || x.size() != v.size())
    throw InvalidCoefficient(std::string(who) + ": tabulated family needs matching nodes");
  for (size_t i = 0; i + 1 < x.size(); ++i)
    if (!(x[i] < x[i + 1]))
      throw InvalidCoefficient(std::string(who) + ": tabulation nodes must increase");
}

}  // namespace

// ---------------------------------------------------------------------------
// GrowthRate

double GrowthRate::operator()(double x) const {
  switch (family) {
    case GrowthFamily::constant: return c;
    case GrowthFamily::power: return c * std::pow(x, p);
    case GrowthFamily::affine_capped: return c * std::max(1.0, x);
    case GrowthFamily::tabulated: return interp_loglog(tab_x, tab_v, x);
  }
  return c;
}

GrowthRate GrowthRate::constant(double c) {
  if (!(c > 0)) throw InvalidCoefficient("tau: constant must be positive");
  GrowthRate g;
  g.family = GrowthFamily::constant;
  g.c = c;
  g.nu0 = 0.0;
  g.tau0 = c;
  g.tau1 = c;
  g.integrable_at_zero = true;
  return g;
}

GrowthRate GrowthRate::power(double c, double p) {
  if (!(c > 0)) throw InvalidCoefficient("tau: power scale must be positive");
  if (p > 1.0) throw InvalidCoefficient("tau: power exponent must be <= 1");
  GrowthRate g;
  g.family = GrowthFamily::power;
  g.c = c;
  g.p = p;
  g.nu0 = p;
  g.tau0 = c;
  g.tau1 = c;
  // 1/tau ~ x^{-p} integrable at 0 iff p < 1
  g.integrable_at_zero = (p < 1.0);
  return g;
}

GrowthRate GrowthRate::affine_capped(double c) {
  if (!(c > 0)) throw InvalidCoefficient("tau: affine scale must be positive");
  GrowthRate g;
  g.family = GrowthFamily::affine_capped;
  g.c = c;
  g.nu0 = 1.0;
  g.tau0 = c;
  g.tau1 = c;
  g.integrable_at_zero = true;
  return g;
}

GrowthRate GrowthRate::tabulated(std::vector<double> x, std::vector<double> v) {
  require_table(x, v, "tau");
  for (double vi : v)
    if (!(vi > 0)) throw InvalidCoefficient("tau: tabulated values must be positive");
  GrowthRate g;
  g.family = GrowthFamily::tabulated;
  g.tab_x = std::move(x);
  g.tab_v = std::move(v);
  // numeric probe of the integrability of 1/tau near 0: compare dyadic tails
  double prev = 0.0;
  bool converged = false;
  for (int k = 0; k < 40; ++k) {
    double eps = std::ldexp(1.0, -k - 1);
    // trapezoid of 1/tau on [eps, 1] with 256 log-spaced nodes
    int m = 256;
    double sum = 0.0;
    double lx0 = std::log(eps), lx1 = 0.0;
    for (int i = 0; i < m; ++i) {
      double xa = std::exp(lx0 + (lx1 - lx0) * i / m);
      double xb = std::exp(lx0 + (lx1 - lx0) * (i + 1) / m);
      sum += 0.5 * (1.0 / g(xa) + 1.0 / g(xb)) * (xb - xa);
    }
    if (k > 4 && std::abs(sum - prev) < 1e-6 * (1.0 + std::abs(sum))) {
      converged = true;
      break;
    }
    prev = sum;
  }
  g.integrable_at_zero = converged;
  double v0 = g(1.0);
  g.tau0 = *std::min_element(g.tab_v.begin(), g.tab_v.end());
  g.tau1 = std::max(v0, *std::max_element(g.tab_v.begin(), g.tab_v.end()));
  g.nu0 = 0.0;
  return g;
}

// ---------------------------------------------------------------------------
// FragmentationRate

double FragmentationRate::operator()(double x) const {
  switch (family) {
    case FragFamily::power: return b * std::pow(x, gamma);
    case FragFamily::capped_power: {
      double y = x - xc;
      return y > 0 ? b * std::pow(y, gamma) : 0.0;
    }
    case FragFamily::tabulated: return std::max(0.0, interp_loglog(tab_x, tab_v, x));
  }
  return 0.0;
}

double FragmentationRate::cell_average(double a, double bnd) const {
  if (!(bnd > a)) return (*this)(a);
  switch (family) {
    case FragFamily::power: {
      double g1 = gamma + 1.0;
      return b * (std::pow(bnd, g1) - std::pow(a, g1)) / (g1 * (bnd - a));
    }
    case FragFamily::capped_power: {
      double lo = std::max(a, xc);
      if (lo >= bnd) return 0.0;
      double g1 = gamma + 1.0;
      double integral = b * (std::pow(bnd - xc, g1) - std::pow(lo - xc, g1)) / g1;
      return integral / (bnd - a);
    }
    case FragFamily::tabulated: {
      // 5-point Gauss-Legendre of the interpolant
      static const double gx[5] = {-0.9061798459386640, -0.5384693101056831, 0.0,
                                   0.5384693101056831, 0.9061798459386640};
      static const double gw[5] = {0.2369268850561891, 0.4786286704993665, 0.5688888888888889,
                                   0.4786286704993665, 0.2369268850561891};
      double mid = 0.5 * (a + bnd), half = 0.5 * (bnd - a), sum = 0.0;
      for (int i = 0; i < 5; ++i) sum += gw[i] * (*this)(mid + half * gx[i]);
      return 0.5 * sum;
    }
  }
  return 0.0;
}

FragmentationRate FragmentationRate::power(double b, double gamma) {
  if (!(b > 0) || !(gamma > 0))
    throw InvalidCoefficient("B: power family needs b > 0 and gamma > 0");
  FragmentationRate f;
  f.family = FragFamily::power;
  f.b = b;
  f.gamma = gamma;
  f.gamma0 = f.gamma1 = gamma;
  f.B0 = f.B1 = b;
  f.x0 = 1.0;
  return f;
}

FragmentationRate FragmentationRate::capped_power(double b, double gamma, double xc) {
  if (!(b > 0) || !(gamma > 0) || !(xc >= 0))
    throw InvalidCoefficient("B: capped_power needs b > 0, gamma > 0, xc >= 0");
  FragmentationRate f;
  f.family = FragFamily::capped_power;
  f.b = b;
  f.gamma = gamma;
  f.xc = xc;
  f.gamma0 = f.gamma1 = gamma;
  // b*(x-xc)^g >= b*(x/2)^g for x >= 2*xc
  f.B0 = b * std::pow(0.5, gamma);
  f.B1 = b;
  f.x0 = std::max(1.0, 2.0 * xc);
  return f;
}

FragmentationRate FragmentationRate::tabulated(std::vector<double> x, std::vector<double> v) {
  require_table(x, v, "B");
  for (double vi : v)
    if (vi < 0) throw InvalidCoefficient("B: tabulated values must be nonnegative");
  FragmentationRate f;
  f.family = FragFamily::tabulated;
  f.tab_x = std::move(x);
  f.tab_v = std::move(v);
  f.gamma0 = f.gamma1 = 1.0;
  f.B0 = *std::max_element(f.tab_v.begin(), f.tab_v.end()) * 1e-3;
  f.B1 = *std::max_element(f.tab_v.begin(), f.tab_v.end());
  f.x0 = f.tab_x.front();
  return f;
}

// ---------------------------------------------------------------------------
// FragmentationKernel

double FragmentationKernel::density_value(double z) const {
  switch (density) {
    case KernelDensityFamily::none: return 0.0;
    case KernelDensityFamily::power_law: return (nu + 2.0) * std::pow(z, nu);
    case KernelDensityFamily::tabulated: {
      if (z <= tab_z.front() || z >= tab_z.back()) return 0.0;
      auto it = std::upper_bound(tab_z.begin(), tab_z.end(), z);
      size_t i = static_cast<size_t>(it - tab_z.begin()) - 1;
      double t = (z - tab_z[i]) / (tab_z[i + 1] - tab_z[i]);
      return tab_rho[i] + t * (tab_rho[i + 1] - tab_rho[i]);
    }
  }
  return 0.0;
}

namespace {

// adaptive Simpson with absolute/relative control
double adaptive_simpson(const std::function<double(double)>& f, double a, double b, double fa,
                        double fm, double fb, double whole, double tol, int depth) {
  double m = 0.5 * (a + b);
  double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
  double flm = f(lm), frm = f(rm);
  double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  if (depth <= 0 || std::abs(left + right - whole) < 15.0 * tol)
    return left + right + (left + right - whole) / 15.0;
  return adaptive_simpson(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
         adaptive_simpson(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

double integrate(const std::function<double(double)>& f, double a, double b, double tol) {
  double fa = f(a), fb = f(b), fm = f(0.5 * (a + b));
  double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
  return adaptive_simpson(f, a, b, fa, fm, fb, whole, tol, 40);
}

// integral of z^alpha * rho(z) over (0,1) for a tabulated density, with
// divergence detection near z = 0: the dyadic tails must shrink under
// four successive refinements toward 0.
double tabulated_moment(const FragmentationKernel& k, double alpha) {
  auto f = [&](double z) { return std::pow(z, alpha) * k.density_value(z); };
  double total = integrate(f, 0.125, 1.0, 1e-12);
  double prev_piece = kInf;
  double lo = 0.125;
  int shrinking = 0;
  for (int r = 0; r < 48; ++r) {
    double next = 0.5 * lo;
    double piece = integrate(f, next, lo, 1e-13);
    total += piece;
    if (piece < prev_piece) {
      if (++shrinking >= 4 && piece < 1e-12 * (1.0 + std::abs(total))) return total;
    } else {
      shrinking = 0;
    }
    prev_piece = piece;
    lo = next;
  }
  return kInf;  // failed to converge near 0
}

}  // namespace

double FragmentationKernel::density_mass(double za, double zb) const {
  za = std::max(za, 0.0);
  zb = std::min(zb, 1.0);
  if (zb <= za) return 0.0;
  switch (density) {
    case KernelDensityFamily::none: return 0.0;
    case KernelDensityFamily::power_law: {
      double n1 = nu + 1.0;
      return (nu + 2.0) * (std::pow(zb, n1) - std::pow(za, n1)) / n1;
    }
    case KernelDensityFamily::tabulated: {
      auto f = [&](double z) { return density_value(z); };
      return integrate(f, za, zb, 1e-12);
    }
  }
  return 0.0;
}

double FragmentationKernel::density_zmean(double za, double zb) const {
  za = std::max(za, 0.0);
  zb = std::min(zb, 1.0);
  if (zb <= za) return 0.0;
  switch (density) {
    case KernelDensityFamily::none: return 0.0;
    case KernelDensityFamily::power_law: {
      double n2 = nu + 2.0;
      return n2 * (std::pow(zb, n2) - std::pow(za, n2)) / n2;  // = zb^{nu+2} - za^{nu+2}
    }
    case KernelDensityFamily::tabulated: {
      auto f = [&](double z) { return z * density_value(z); };
      return integrate(f, za, zb, 1e-12);
    }
  }
  return 0.0;
}

FragmentationKernel FragmentationKernel::mitosis() {
  FragmentationKernel k;
  k.atoms = {{0.5, 2.0}};
  return k;
}

FragmentationKernel FragmentationKernel::asymmetric(double theta) {
  if (!(theta > 0) || !(theta < 0.5))
    throw InvalidCoefficient("kernel: asymmetric division needs theta in (0, 1/2)");
  FragmentationKernel k;
  k.atoms = {{theta, 1.0}, {1.0 - theta, 1.0}};
  return k;
}

FragmentationKernel FragmentationKernel::uniform() { return power_law(0.0); }

FragmentationKernel FragmentationKernel::power_law(double nu) {
  if (!(nu > -1.0)) throw InvalidCoefficient("kernel: power-law density needs nu > -1");
  FragmentationKernel k;
  k.density = KernelDensityFamily::power_law;
  k.nu = nu;
  return k;
}

FragmentationKernel FragmentationKernel::tabulated(std::vector<double> z,
                                                   std::vector<double> rho) {
  require_table(z, rho, "kernel");
  if (z.front() < 0.0 || z.back() > 1.0)
    throw InvalidCoefficient("kernel: tabulated density nodes must lie in [0,1]");
  for (double r : rho)
    if (r < 0) throw InvalidCoefficient("kernel: density values must be nonnegative");
  FragmentationKernel k;
  k.density = KernelDensityFamily::tabulated;
  k.tab_z = std::move(z);
  k.tab_rho = std::move(rho);
  return k;
}

double kernel_moment(const FragmentationKernel& kernel, double alpha) {
  double sum = 0.0;
  for (const auto& a : kernel.atoms) sum += a.w * std::pow(a.z, alpha);
  switch (kernel.density) {
    case KernelDensityFamily::none: break;
    case KernelDensityFamily::power_law: {
      double e = kernel.nu + alpha + 1.0;
      if (e <= 0.0) return kInf;
      sum += (kernel.nu + 2.0) / e;
      break;
    }
    case KernelDensityFamily::tabulated: {
      double m = tabulated_moment(kernel, alpha);
      if (!std::isfinite(m)) return kInf;
      sum += m;
      break;
    }
  }
  return sum;
}

double critical_alpha(const FragmentationKernel& kernel) {
  switch (kernel.density) {
    case KernelDensityFamily::none: return -kInf;
    case KernelDensityFamily::power_law: return -(kernel.nu + 1.0);
    case KernelDensityFamily::tabulated: {
      // if the density vanishes near 0 every moment is finite
      if (kernel.tab_z.front() > 0.0 && kernel.tab_rho.front() == 0.0) {
        size_t i = 0;
        while (i + 1 < kernel.tab_rho.size() && kernel.tab_rho[i] == 0.0) ++i;
        if (kernel.tab_z[i] > 0.0) return -kInf;
      }
      // bisection on divergence of the moment integral
      double lo = -8.0, hi = 0.5;
      if (std::isfinite(tabulated_moment(kernel, lo))) return -kInf;
      for (int it = 0; it < 60; ++it) {
        double mid = 0.5 * (lo + hi);
        if (std::isfinite(tabulated_moment(kernel, mid)))
          hi = mid;
        else
          lo = mid;
      }
      return hi;
    }
  }
  return -kInf;
}

// ---------------------------------------------------------------------------
// CoefficientSet

double threshold_alpha(const CoefficientSet& coeffs) {
  double al = critical_alpha(coeffs.kernel);
  double t = al + 2.0 * coeffs.b.gamma1 - 2.0 * coeffs.b.gamma0;
  if (!std::isfinite(t)) return 1.0;
  return std::max(1.0, t);
}

// ---------------------------------------------------------------------------
// validate_hypotheses

ValidationReport validate_hypotheses(const CoefficientSet& coeffs,
                                     const std::vector<double>& sample_points) {
  if (sample_points.empty())
    throw InvalidCoefficient("validate_hypotheses: empty sample set");

  // structural checks first
  const auto& k = coeffs.kernel;
  for (const auto& a : k.atoms) {
    if (!(a.z > 0.0) || !(a.z < 1.0))
      throw InvalidCoefficient("kernel: atom positions must lie in (0,1)");
    if (!(a.w > 0.0)) throw InvalidCoefficient("kernel: atom weights must be positive");
  }
  double p1 = kernel_moment(k, 1.0);
  if (!(std::abs(p1 - 1.0) <= 1e-10)) {
    std::ostringstream os;
    os << "kernel: (Hp) violated, first moment p1 = " << p1 << " != 1";
    throw InvalidCoefficient(os.str());
  }

  // probe set: user samples plus log-spaced points spanning them
  std::vector<double> probes = sample_points;
  double xmin = *std::min_element(probes.begin(), probes.end());
  double xmax = *std::max_element(probes.begin(), probes.end());
  if (!(xmin > 0.0)) throw InvalidCoefficient("validate_hypotheses: samples must be positive");
  for (int i = 0; i <= 64; ++i)
    probes.push_back(xmin * std::pow(xmax / xmin, i / 64.0));
  std::sort(probes.begin(), probes.end());

  ValidationReport report;
  report.mode = coeffs.mode();

  auto check = [&](const std::string& name, auto&& pred) {
    ValidationItem item;
    item.name = name;
    for (double x : probes) {
      if (!pred(x)) {
        item.passed = false;
        item.witness = x;
        break;
      }
    }
    report.items.push_back(std::move(item));
  };

  const auto& tau = coeffs.tau;
  for (double x : probes)
    if (!(tau(x) > 0.0)) throw InvalidCoefficient("tau: must be positive on the working range");

  check("(Htau) tau0*1_{x>=1}*x^nu0 <= tau(x)", [&](double x) {
    double lower = x >= 1.0 ? tau.tau0 * std::pow(x, tau.nu0) : 0.0;
    return tau(x) >= lower * (1.0 - 1e-12);
  });
  check("(Htau) tau(x) <= tau1*max(1,x)", [&](double x) {
    return tau(x) <= tau.tau1 * std::max(1.0, x) * (1.0 + 1e-12);
  });

  {
    ValidationItem item;
    item.name = "(Htau) 1/tau integrable at 0";
    item.passed = tau.integrable_at_zero;
    if (!item.passed) item.detail = "Osgood regime: characteristics never reach x = 0";
    report.items.push_back(std::move(item));
  }

  const auto& B = coeffs.b;
  check("(HB) B nonnegative", [&](double x) { return B(x) >= 0.0; });
  check("(HB) B0*1_{x>=x0}*x^gamma0 <= B(x)", [&](double x) {
    double lower = x >= B.x0 ? B.B0 * std::pow(x, B.gamma0) : 0.0;
    return B(x) >= lower * (1.0 - 1e-12);
  });
  check("(HB) B(x) <= B1*max(1,x^gamma1)", [&](double x) {
    return B(x) <= B.B1 * std::max(1.0, std::pow(x, B.gamma1)) * (1.0 + 1e-12);
  });

  {
    // connected support, samplewise: no interior zero between positive samples
    ValidationItem item;
    item.name = "(HB) connected support";
    size_t first = probes.size(), last = 0;
    for (size_t i = 0; i < probes.size(); ++i) {
      if (B(probes[i]) > 0.0) {
        first = std::min(first, i);
        last = std::max(last, i);
      }
    }
    for (size_t i = first; i <= last && first < probes.size(); ++i) {
      if (!(B(probes[i]) > 0.0)) {
        item.passed = false;
        item.witness = probes[i];
        break;
      }
    }
    report.items.push_back(std::move(item));
  }

  {
    ValidationItem item;
    item.name = "(Hp) p1 = 1";
    item.passed = true;  // enforced above
    report.items.push_back(std::move(item));
  }
  {
    ValidationItem item;
    item.name = "(Hp) p0 > 1 (several fragments on average)";
    double p0 = kernel_moment(k, 0.0);
    item.passed = p0 > 1.0;
    if (!item.passed) item.detail = "kernel produces a single fragment on average";
    report.items.push_back(std::move(item));
  }

  return report;
}

}  // namespace gf
