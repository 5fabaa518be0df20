#pragma once

// Exact characteristic flow of the transport part. Everything is built on
// two monotone primitives: F(x), the primitive of 1/tau (so that
// X(t,x) = F^{-1}(F(x)+t)), and Phi(x), the primitive of B/tau (so that the
// accumulated fragmentation damping along a characteristic is a difference
// of Phi values). Closed forms are used whenever the coefficient family
// permits; otherwise a monotone cubic tabulation on a log grid.

#include <memory>
#include <optional>
#include <vector>

#include "gf/coefficients.hpp"
#include "gf/errors.hpp"

namespace gf {

// monotone increasing tabulated function with a monotone cubic (Fritsch-
// Carlson) interpolant and a guarded-Newton inverse
class MonotoneTable {
 public:
  MonotoneTable() = default;
  // nodes must be strictly increasing; values nondecreasing
  MonotoneTable(std::vector<double> nodes, std::vector<double> values);

  double operator()(double x) const;
  double inverse(double u) const;
  double front_x() const { return x_.front(); }
  double back_x() const { return x_.back(); }
  double front_v() const { return v_.front(); }
  double back_v() const { return v_.back(); }

 private:
  std::vector<double> x_, v_, d_;  // nodes, values, endpoint derivatives
  size_t find_segment(double x) const;
};

class Flow {
 public:
  // Range hints bound the tabulation window for families without closed
  // forms; analytic families ignore them. Standard mode anchors F at 0,
  // Osgood mode at x = 1.
  Flow(GrowthRate tau, double x_lo_hint, double x_hi_hint);

  const GrowthRate& tau() const { return tau_; }
  bool osgood() const { return !tau_.integrable_at_zero; }

  double F(double x) const;
  double Finv(double u) const;

  // X(t,x); throws DomainError when t < t_*(x) in standard mode
  double flow(double t, double x) const;
  // t_*(x) = -F(x) in standard mode, -inf in Osgood mode
  double exit_time(double x) const;
  // J(t,x) = tau(X(-t,x)) / tau(x)
  double jacobian(double t, double x) const;

 private:
  GrowthRate tau_;
  std::optional<MonotoneTable> table_;
};

// Primitive of B/tau with the same closed-form-or-table strategy. Only
// differences Phi(x) - Phi(y) are meaningful (the anchor is arbitrary).
class DampingPrimitive {
 public:
  DampingPrimitive(const GrowthRate& tau, const FragmentationRate& b, double x_lo_hint,
                   double x_hi_hint);

  double operator()(double x) const;
  // inverse on the strictly increasing part; used for splitting-time sampling
  double inverse(double u) const;
  bool invertible() const { return invertible_; }
  double max_value() const;

 private:
  enum class Kind { closed_power, closed_log, table };
  Kind kind_ = Kind::table;
  double scale_ = 0.0, expo_ = 1.0, shift_ = 0.0;  // scale * (x - shift)^expo
  std::optional<MonotoneTable> table_;
  bool invertible_ = true;
};

// lambda*t + integral of B/tau between X(-t,x) and x
double damping_integral(const Flow& flow, const DampingPrimitive& phi, double lambda, double t,
                        double x);

// convenience overload building the primitive on the fly (test/one-shot use)
double damping_integral(const Flow& flow, const FragmentationRate& b, double lambda, double t,
                        double x);

}  // namespace gf
