#pragma once

// Truncated size mesh and cell-averaged densities. Geometric grids are the
// default; when the kernel carries the mitosis atom z = 1/2 the builder
// snaps the ratio to a power of 2 so that halving maps cells onto cells.

#include <Eigen/Core>
#include <memory>
#include <vector>

#include "gf/errors.hpp"

namespace gf {

enum class Spacing { uniform, geometric };

class Grid {
 public:
  static std::shared_ptr<const Grid> uniform(double x_min, double x_max, int n);
  static std::shared_ptr<const Grid> geometric(double x_min, double x_max, int n,
                                               bool snap_half = false);

  int size() const { return static_cast<int>(widths_.size()); }
  double x_min() const { return edges_[0]; }
  double x_max() const { return edges_[size()]; }
  Spacing spacing() const { return spacing_; }
  double ratio() const { return ratio_; }  // geometric only
  // number of cells one halving spans on a snapped grid, 0 if not snapped
  int half_shift_cells() const { return half_shift_; }

  const Eigen::ArrayXd& edges() const { return edges_; }
  const Eigen::ArrayXd& centers() const { return centers_; }
  const Eigen::ArrayXd& widths() const { return widths_; }

  // index of the cell containing x, -1 below the grid, size() above
  int locate(double x) const;

 private:
  Grid(Eigen::ArrayXd edges, Spacing spacing);
  Eigen::ArrayXd edges_, centers_, widths_;
  Spacing spacing_;
  double ratio_ = 0.0;
  int half_shift_ = 0;
};

struct DiscreteField {
  std::shared_ptr<const Grid> grid;
  Eigen::ArrayXd values;  // per-cell averages

  DiscreteField() = default;
  explicit DiscreteField(std::shared_ptr<const Grid> g)
      : grid(std::move(g)), values(Eigen::ArrayXd::Zero(grid->size())) {}
  DiscreteField(std::shared_ptr<const Grid> g, Eigen::ArrayXd v)
      : grid(std::move(g)), values(std::move(v)) {}

  int size() const { return static_cast<int>(values.size()); }
};

// throws GridMismatch unless both fields live on the same mesh
void require_same_grid(const DiscreteField& a, const DiscreteField& b);

// sum of |f_i| (1+x_i)^alpha dx_i
double weighted_norm(const DiscreteField& f, double alpha);
// sum of f_i phi_i dx_i
double bracket(const DiscreteField& f, const DiscreteField& phi);
double total_number(const DiscreteField& f);  // integral of f
double total_mass(const DiscreteField& f);    // integral of x f

// cell-averaged initial conditions
DiscreteField indicator_field(std::shared_ptr<const Grid> grid, double a, double b);
DiscreteField gaussian_bump_field(std::shared_ptr<const Grid> grid, double center, double width);
// (1+x)^expo, cell-averaged exactly
DiscreteField power_weight_field(std::shared_ptr<const Grid> grid, double expo);
// evaluate a callable at 5 Gauss points per cell
DiscreteField sampled_field(std::shared_ptr<const Grid> grid,
                            const std::function<double(double)>& f);

// linear interpolation of cell values between centers (constant beyond)
double interp_field(const DiscreteField& f, double x);

}  // namespace gf
