#pragma once

// Model data for the growth-fragmentation equation: growth rate tau(x),
// total fragmentation rate B(x), and the fragmentation kernel (a finite
// positive measure on (0,1) with unit first moment). Each carries the
// bound parameters used to check the structural hypotheses samplewise.

#include <cmath>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "gf/errors.hpp"

namespace gf {

constexpr double kInf = std::numeric_limits<double>::infinity();

// ---------------------------------------------------------------------------
// Growth rate tau

enum class GrowthFamily { constant, power, affine_capped, tabulated };

struct GrowthRate {
  GrowthFamily family = GrowthFamily::constant;
  double c = 1.0;  // scale factor
  double p = 0.0;  // exponent (power family)
  std::vector<double> tab_x, tab_v;  // tabulated nodes (log-log interpolated)

  // bound parameters: tau0*1_{x>=1}*x^nu0 <= tau(x) <= tau1*max(1,x)
  double nu0 = 0.0;
  double tau0 = 1.0;
  double tau1 = 1.0;
  bool integrable_at_zero = true;  // 1/tau in L1(0,1)

  double operator()(double x) const;

  static GrowthRate constant(double c);
  static GrowthRate power(double c, double p);        // tau(x) = c*x^p, p <= 1
  static GrowthRate affine_capped(double c);          // tau(x) = c*max(1,x)
  static GrowthRate tabulated(std::vector<double> x, std::vector<double> v);
};

// ---------------------------------------------------------------------------
// Fragmentation rate B

enum class FragFamily { power, capped_power, tabulated };

struct FragmentationRate {
  FragFamily family = FragFamily::power;
  double b = 1.0;
  double gamma = 1.0;
  double xc = 0.0;  // hinge position for capped_power: B(x) = b*max(x-xc,0)^gamma
  std::vector<double> tab_x, tab_v;

  // bound parameters: B0*1_{x>=x0}*x^gamma0 <= B(x) <= B1*max(1,x^gamma1)
  double gamma0 = 1.0;
  double gamma1 = 1.0;
  double B0 = 1.0;
  double B1 = 1.0;
  double x0 = 1.0;

  double operator()(double x) const;
  // exact mean of B over [a,b] (closed form for power families)
  double cell_average(double a, double b) const;

  static FragmentationRate power(double b, double gamma);
  static FragmentationRate capped_power(double b, double gamma, double xc);
  static FragmentationRate tabulated(std::vector<double> x, std::vector<double> v);
};

// ---------------------------------------------------------------------------
// Fragmentation kernel

struct KernelAtom {
  double z = 0.5;  // fragment relative size, in (0,1)
  double w = 2.0;  // weight (number of fragments at z for atomic kernels)
};

enum class KernelDensityFamily { none, power_law, tabulated };

struct FragmentationKernel {
  std::vector<KernelAtom> atoms;
  KernelDensityFamily density = KernelDensityFamily::none;
  double nu = 0.0;  // density (nu+2)*z^nu on (0,1); nu = 0 is the uniform kernel
  std::vector<double> tab_z, tab_rho;  // tabulated density nodes

  bool has_density() const { return density != KernelDensityFamily::none; }
  double density_value(double z) const;
  // partial integrals of the density over [za,zb] (closed form for power_law)
  double density_mass(double za, double zb) const;
  double density_zmean(double za, double zb) const;  // integral of z*rho

  static FragmentationKernel mitosis();                 // 2*delta_{1/2}
  static FragmentationKernel asymmetric(double theta);  // delta_theta + delta_{1-theta}
  static FragmentationKernel uniform();                 // 2 dz
  static FragmentationKernel power_law(double nu);      // (nu+2) z^nu dz
  static FragmentationKernel tabulated(std::vector<double> z, std::vector<double> rho);
};

// alpha-moment of the kernel; +inf when alpha <= critical_alpha for density parts.
double kernel_moment(const FragmentationKernel& kernel, double alpha);

// infimum of the alphas with finite moment: -inf for purely atomic kernels,
// -(nu+1) for power-law densities, numeric probe for tabulated densities.
double critical_alpha(const FragmentationKernel& kernel);

// ---------------------------------------------------------------------------
// Coefficient set

enum class Mode { standard, osgood };

struct CoefficientSet {
  GrowthRate tau;
  FragmentationRate b;
  FragmentationKernel kernel;

  Mode mode() const { return tau.integrable_at_zero ? Mode::standard : Mode::osgood; }
  // k_B and the resolvent shift used by the constructive eigensolver scheme
  int k_b() const { return static_cast<int>(std::floor(b.gamma1)) + 2; }
  double resolvent_shift() const { return 1.0 + 2.0 * k_b() * tau.tau1; }
};

// convergence threshold: alpha > max(1, alpha_lower + 2*gamma1 - 2*gamma0)
double threshold_alpha(const CoefficientSet& coeffs);

// ---------------------------------------------------------------------------
// Hypothesis validation

struct ValidationItem {
  std::string name;
  bool passed = true;
  double witness = std::numeric_limits<double>::quiet_NaN();  // failing x, if any
  std::string detail;
};

struct ValidationReport {
  std::vector<ValidationItem> items;
  Mode mode = Mode::standard;
  bool all_passed() const {
    for (const auto& it : items)
      if (!it.passed) return false;
    return true;
  }
};

// Samplewise check of (Htau), (HB), (Hp) on the given sizes plus an internal
// log-spaced probe set. Throws InvalidCoefficient on structural violations
// (nonpositive tau, |p1 - 1| > 1e-10, malformed atoms). The integrability
// condition 1/tau in L1(0,1) sets the mode instead of invalidating.
ValidationReport validate_hypotheses(const CoefficientSet& coeffs,
                                     const std::vector<double>& sample_points);

}  // namespace gf
