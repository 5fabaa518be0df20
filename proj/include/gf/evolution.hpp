#pragma once

// Time evolution of the rescaled equation: the transport-loss semigroup S_t
// is applied exactly along characteristics (conservative semi-Lagrangian
// remap with limited linear reconstruction), the fragmentation gain by
// explicit half-steps in a Strang arrangement. A per-step rescaling of the
// second half-gain keeps <f, phi> conserved to round-off, with the mass
// leaving through x_max accounted separately.

#include <vector>

#include "gf/characteristics.hpp"
#include "gf/coefficients.hpp"
#include "gf/eigensolver.hpp"
#include "gf/grid.hpp"
#include "gf/operators.hpp"

namespace gf {

enum class EvolveMethod { splitting, duhamel_picard, dyson_phillips };

struct EvolutionConfig {
  double dt = 1e-3;
  double t_end = 1.0;
  EvolveMethod method = EvolveMethod::splitting;
  int dyson_order = 6;
  bool rescale_by_lambda = true;
  bool conserve_bracket = true;
  std::vector<double> alphas = {1.0, 2.0};  // weighted norms recorded per step
  int max_snapshots = 512;
  std::vector<double> mandatory_snapshot_times;
  double blowup_threshold = 1e12;
  double tail_tolerance = 1e-6;  // cumulative phi-weighted loss, relative
};

struct SimulationTrace {
  double dt = 0.0;
  bool rescaled = true;
  std::vector<double> times;        // per step
  std::vector<double> bracket_phi;  // <f, phi>
  std::vector<double> number;       // integral of f
  std::vector<double> mass;         // integral of x f
  std::vector<double> tail_loss;    // cumulative phi-weighted outflow
  std::vector<double> alphas;
  std::vector<std::vector<double>> norms;  // norms[k][step] for alphas[k]

  std::vector<double> snapshot_times;
  std::vector<DiscreteField> snapshots;
  double max_gain_rebalance = 0.0;  // max |sigma - 1| of the conservation fixer
};

// Exact transport-decay semigroup on a fixed grid; reusable across steps.
class TransportOperator {
 public:
  TransportOperator(const CoefficientSet& coeffs, std::shared_ptr<const Grid> grid);

  struct Loss {
    double mass = 0.0;     // plain mass past x_max
    double bracket = 0.0;  // phi-weighted, when a weight field is given
  };

  // S_t f with damping exp(-int B along the characteristic) * exp(-lambda t);
  // zero inflow below X(t, x_min). phi_weight, when given, prices lost mass.
  DiscreteField apply(const DiscreteField& f, double lambda, double t, Loss* loss = nullptr,
                      const DiscreteField* phi_weight = nullptr) const;

  const Flow& flow() const { return flow_; }
  const DampingPrimitive& damping() const { return damping_; }

 private:
  std::shared_ptr<const Grid> grid_;
  Flow flow_;
  DampingPrimitive damping_;
};

// Prop. 2.2 semigroup as a one-shot operation
DiscreteField transport_step(const Flow& flow, const CoefficientSet& coeffs, double lambda,
                             double t, const DiscreteField& f);

SimulationTrace evolve(const CoefficientSet& coeffs, std::shared_ptr<const Grid> grid,
                       const PerronTriple& triple, const DiscreteField& f_in,
                       const EvolutionConfig& cfg);

// ||T_t f - S_t f - sum_k w_k S_{t-s_k} F+ T_{s_k} f||_{L1_1} with quadrature
// nodes graded toward s = 0
double duhamel_residual(const CoefficientSet& coeffs, std::shared_ptr<const Grid> grid,
                        const PerronTriple& triple, const DiscreteField& f_in, double t,
                        int quad_points);

// partial Dyson-Phillips sum up to generation n of the rescaled semigroup
DiscreteField dyson_phillips_partial(const CoefficientSet& coeffs,
                                     std::shared_ptr<const Grid> grid, double lambda,
                                     const DiscreteField& f_in, double t, int n);

}  // namespace gf
