#pragma once

// Asynchronous-exponential-growth metrics: distance to the Perron projection,
// log-linear rate fits, autocorrelation-based periodicity detection, and the
// Osgood non-uniformity demonstration.

#include <vector>

#include "gf/eigensolver.hpp"
#include "gf/evolution.hpp"

namespace gf {

struct RateFit {
  double M = 0.0;      // amplitude
  double sigma = 0.0;  // decay rate (1/time)
  double t_lo = 0.0, t_hi = 0.0;
  double goodness = 0.0;  // R^2 of the log-linear fit
};

struct OscillationReport {
  bool periodic = false;
  double period = 0.0;
  double amplitude = 0.0;     // of the detrended tail
  double correlation = 0.0;   // autocorrelation at the detected lag
};

struct TimeSeries {
  std::vector<double> t;
  std::vector<double> v;
};

// d(t) = ||f(t) - <f_in,phi> G||_{L1_alpha} over the stored snapshots;
// requires a trace produced with rescale_by_lambda = true
TimeSeries aeg_distance(const SimulationTrace& trace, const PerronTriple& triple,
                        const DiscreteField& f_in, double alpha);

// least squares of log d on [t_lo, t_hi]; throws NonPositiveData when the
// window touches nonpositive samples
RateFit fit_rate(const TimeSeries& d, double t_lo, double t_hi);

// autocorrelation peak detection on the tail of a uniformly sampled series
OscillationReport detect_oscillation(const std::vector<double>& values, double dt);

// ||T_t f_eta - G||_{L1(phi)} for each eta, with f_eta = 1_{(0,eta)}/(eta phi)
// normalized on the grid so that <f_eta, phi> = 1 exactly
std::vector<double> osgood_demo(const CoefficientSet& coeffs, std::shared_ptr<const Grid> grid,
                                const PerronTriple& triple, const std::vector<double>& eta_list,
                                double t, const EvolutionConfig& cfg);

}  // namespace gf
