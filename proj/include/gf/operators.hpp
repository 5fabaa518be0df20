#pragma once

// Matrix assembly of the fragmentation gain, its adjoint, and the loss term.
// The gain deposits each fragment packet with its exact centroid split over
// the two nearest cell centers, which keeps the discrete number and size
// balances of a split exact (p0 and p1 enter to round-off).

#include <Eigen/Core>
#include <Eigen/SparseCore>

#include "gf/coefficients.hpp"
#include "gf/grid.hpp"

namespace gf {

enum class OperatorKind { gain, loss, adjoint_gain };

struct OperatorMatrix {
  OperatorKind kind = OperatorKind::gain;
  std::shared_ptr<const Grid> grid;
  Eigen::SparseMatrix<double> m;  // acts on the values array
  // gain only: per-source-cell number and size leaking below x_min (per unit f_i)
  Eigen::ArrayXd drop_number, drop_size;

  DiscreteField apply(const DiscreteField& f) const {
    require_same_grid(f, DiscreteField(grid));
    return DiscreteField(grid, (m * f.values.matrix()).array());
  }
};

OperatorMatrix assemble_gain(const CoefficientSet& coeffs, std::shared_ptr<const Grid> grid);
OperatorMatrix assemble_adjoint_gain(const CoefficientSet& coeffs,
                                     std::shared_ptr<const Grid> grid);
OperatorMatrix assemble_loss(const CoefficientSet& coeffs, std::shared_ptr<const Grid> grid);

}  // namespace gf
