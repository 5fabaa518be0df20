#include "gf/operators.hpp"

#include <cmath>
#include <vector>

namespace gf {

namespace {

struct Deposit {
  std::vector<Eigen::Triplet<double>> trips;
  Eigen::ArrayXd drop_number, drop_size;
  const Grid* grid;

  explicit Deposit(const Grid& g)
      : drop_number(Eigen::ArrayXd::Zero(g.size())),
        drop_size(Eigen::ArrayXd::Zero(g.size())),
        grid(&g) {}

  // deposit packet of mass per unit f_src with centroid xi, split over the
  // two neighboring cell centers so that mass and first moment are exact
  void add(int src, double mass, double xi) {
    if (mass <= 0.0) return;
    const auto& c = grid->centers();
    const auto& w = grid->widths();
    const int n = grid->size();
    if (xi < grid->x_min()) {
      drop_number[src] += mass;
      drop_size[src] += mass * xi;
      return;
    }
    int j = grid->locate(xi);
    if (j >= n) j = n - 1;  // fragments always land at or below the source
    int jl, jr;
    if (xi >= c[j])
      jl = j, jr = j + 1;
    else
      jl = j - 1, jr = j;
    if (jl < 0) {
      trips.emplace_back(0, src, mass / w[0]);
      return;
    }
    if (jr >= n) {
      trips.emplace_back(n - 1, src, mass / w[n - 1]);
      return;
    }
    double t = (xi - c[jl]) / (c[jr] - c[jl]);
    trips.emplace_back(jl, src, mass * (1.0 - t) / w[jl]);
    trips.emplace_back(jr, src, mass * t / w[jr]);
  }
};

}  // namespace

OperatorMatrix assemble_gain(const CoefficientSet& coeffs, std::shared_ptr<const Grid> grid) {
  const auto& k = coeffs.kernel;
  const auto& e = grid->edges();
  const auto& c = grid->centers();
  const int n = grid->size();

  Deposit dep(*grid);
  dep.trips.reserve(static_cast<size_t>(n) * (k.has_density() ? 8 : 4 * k.atoms.size() + 2));

  for (int i = 0; i < n; ++i) {
    double btot = coeffs.b.cell_average(e[i], e[i + 1]) * (e[i + 1] - e[i]);
    if (btot <= 0.0) continue;
    for (const auto& a : k.atoms) dep.add(i, a.w * btot, a.z * c[i]);
    if (k.has_density()) {
      // slice z by the images of the cell edges under z -> z * x_i, using the
      // exact partial mass and z-mean of the density on each slice
      double zhi = 1.0;
      int j = grid->locate(c[i]);  // first target at z just below 1
      if (j >= n) j = n - 1;
      while (zhi > 0.0) {
        double zlo = (j >= 0) ? e[j] / c[i] : 0.0;
        zlo = std::max(0.0, std::min(zlo, zhi));
        double mass = k.density_mass(zlo, zhi);
        if (mass > 0.0) {
          double zbar = k.density_zmean(zlo, zhi) / mass;
          dep.add(i, mass * btot, zbar * c[i]);
        }
        if (j < 0) break;
        zhi = zlo;
        --j;
      }
    }
  }

  OperatorMatrix op;
  op.kind = OperatorKind::gain;
  op.grid = grid;
  op.m.resize(n, n);
  op.m.setFromTriplets(dep.trips.begin(), dep.trips.end());
  op.drop_number = std::move(dep.drop_number);
  op.drop_size = std::move(dep.drop_size);
  return op;
}

OperatorMatrix assemble_adjoint_gain(const CoefficientSet& coeffs,
                                     std::shared_ptr<const Grid> grid) {
  const auto& k = coeffs.kernel;
  const auto& c = grid->centers();
  const int n = grid->size();

  std::vector<Eigen::Triplet<double>> trips;
  trips.reserve(static_cast<size_t>(n) * 8);

  // linear interpolation weights of phi between centers; constant extension
  // beyond the first/last center keeps the matrix entrywise nonnegative
  auto add_interp = [&](int row, double coeff, double x) {
    if (coeff <= 0.0) return;
    if (x <= c[0]) {
      trips.emplace_back(row, 0, coeff);
      return;
    }
    if (x >= c[n - 1]) {
      trips.emplace_back(row, n - 1, coeff);
      return;
    }
    int j = grid->locate(x);
    if (x < c[j]) --j;
    double t = (x - c[j]) / (c[j + 1] - c[j]);
    trips.emplace_back(row, j, coeff * (1.0 - t));
    trips.emplace_back(row, j + 1, coeff * t);
  };

  for (int i = 0; i < n; ++i) {
    double bx = coeffs.b(c[i]);
    if (bx <= 0.0) continue;
    for (const auto& a : k.atoms) add_interp(i, bx * a.w, a.z * c[i]);
    if (k.has_density()) {
      // slice z where z*x_i crosses the interpolation breakpoints (centers):
      // phi-hat is linear on each slice, so the z-mean makes the slice exact
      double zhi = 1.0;
      int j = grid->locate(c[i]);
      if (j >= n) j = n - 1;
      while (zhi > 0.0) {
        double zlo = (j >= 0) ? c[j] / c[i] : 0.0;
        zlo = std::max(0.0, std::min(zlo, zhi));
        double mass = k.density_mass(zlo, zhi);
        if (mass > 0.0) {
          double zbar = k.density_zmean(zlo, zhi) / mass;
          add_interp(i, bx * mass, zbar * c[i]);
        }
        if (j < 0) break;
        zhi = zlo;
        --j;
      }
    }
  }

  OperatorMatrix op;
  op.kind = OperatorKind::adjoint_gain;
  op.grid = grid;
  op.m.resize(n, n);
  op.m.setFromTriplets(trips.begin(), trips.end());
  return op;
}

OperatorMatrix assemble_loss(const CoefficientSet& coeffs, std::shared_ptr<const Grid> grid) {
  const auto& e = grid->edges();
  const int n = grid->size();
  std::vector<Eigen::Triplet<double>> trips;
  trips.reserve(n);
  for (int i = 0; i < n; ++i) {
    double bbar = coeffs.b.cell_average(e[i], e[i + 1]);
    if (bbar > 0.0) trips.emplace_back(i, i, bbar);
  }
  OperatorMatrix op;
  op.kind = OperatorKind::loss;
  op.grid = grid;
  op.m.resize(n, n);
  op.m.setFromTriplets(trips.begin(), trips.end());
  return op;
}

}  // namespace gf
