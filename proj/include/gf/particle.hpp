#pragma once

// Branching-particle oracle: deterministic growth along the characteristics,
// exponential splitting clocks inverted through the damping primitive, and
// atomic fragment replacement. Restricted to atomic kernels whose grouped
// weights are integers, the only regime with an unambiguous particle law.

#include <cstdint>
#include <functional>
#include <vector>

#include "gf/characteristics.hpp"
#include "gf/coefficients.hpp"
#include "gf/grid.hpp"

namespace gf {

struct Particle {
  double size = 0.0;
  double weight = 1.0;
};

struct ParticleEnsemble {
  std::vector<Particle> particles;
  std::uint64_t rng_seed = 0;
  double time = 0.0;
};

struct OracleMoments {
  std::vector<double> times;
  // per output time: lineage-averaged totals and standard errors over the
  // n0 independent initial lineages
  std::vector<double> number, number_se;
  std::vector<double> mass, mass_se;
  std::vector<double> bracket, bracket_se;  // filled when phi is provided
};

using SizeSampler = std::function<double(std::uint64_t bits)>;

// common initial laws for the oracle
SizeSampler uniform_sampler(double a, double b);
SizeSampler point_sampler(double x);

struct OracleResult {
  OracleMoments moments;
  ParticleEnsemble final_state;
};

// throws UnsupportedKernel for kernels with a density part or non-integer
// grouped atomic weights
OracleResult simulate(const CoefficientSet& coeffs, int n0, const SizeSampler& f_in,
                      const std::vector<double>& output_times, std::uint64_t seed,
                      const DiscreteField* phi = nullptr);

// sum of weight * phi(size), phi linearly interpolated; also its standard
// error over the particles
std::pair<double, double> empirical_bracket(const ParticleEnsemble& ensemble,
                                            const DiscreteField& phi);

}  // namespace gf
