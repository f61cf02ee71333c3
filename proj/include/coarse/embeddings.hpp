#pragma once

#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "coarse/kernels.hpp"
#include "coarse/spaces.hpp"

namespace coarse {

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

/// Monotone piecewise-constant function on [x_0, inf). With left_continuous
/// the value on (x_{i-1}, x_i] is v_i; otherwise the value on [x_i, x_{i+1})
/// is v_i. Either way v_0 holds at x_0 and v_last beyond the last breakpoint.
struct StepFunction {
  std::vector<double> x;
  std::vector<double> v;
  bool left_continuous = true;

  double operator()(double t) const;
  bool non_decreasing() const;
  bool non_increasing() const;
};

/// D(L) = slope * L.
struct LinearType {
  double slope = 1.0;
};

using TypeCurve = std::variant<LinearType, StepFunction>;

/// For non-decreasing g: inf g^{-1}([t, inf)) on the domain of g, +inf when
/// g never reaches t. For non-increasing g: inf g^{-1}((0, t]), the first
/// point where g has dropped to t, +inf when it never does.
double generalized_inverse(const TypeCurve& g, double t);
double generalized_inverse(const StepFunction& g, double t);

/// Step table L -> D upper bound turned into a left-continuous step curve.
StepFunction type_curve_from_table(const std::vector<std::pair<double, double>>& L_to_D);

/// u(t) = t, u(t) = t (log t)^{-(1+a)/p}, or a constant.
struct UFamily {
  enum class Kind { kIdentity, kOverlog, kConstant };
  Kind kind = Kind::kIdentity;
  double a = 1.0;
  double p = 2.0;
  double constant = 1.0;

  double operator()(double t) const;
  /// log u(t), evaluated without overflow for huge t given log t.
  double log_value_from_log(double log_t) const;
  std::string describe() const;
};

/// Non-decreasing left-continuous step function with breakpoints
/// c = S_0 < S_1 < ... < S_J and values f(S_j).
struct WeightFunction {
  std::vector<double> breakpoints;
  std::vector<double> values;

  double c() const { return breakpoints.front(); }
  double operator()(double s) const;
  void validate() const;
};

/// f(S_j) = u(D^{-1}(S_j)). Where D^{-1} is infinite the last finite value
/// is kept, so f stays constant beyond the range of the curve.
WeightFunction weight_from_type(const UFamily& u, const TypeCurve& D, const std::vector<double>& breakpoints);

/// Kernels xi^{S_j} for the levels j = 0..J-1 of a weight function, with
/// their measured Lipschitz constants.
struct KernelField {
  std::vector<double> levels;
  std::vector<Kernel> kernels;
  std::vector<double> eps;
};

struct EmbeddedDifference {
  std::vector<double> level_norms;
  std::vector<double> weights;
  double total = 0;
};

/// theta(x) = xi(x) - xi(x0) in the direct sum over levels weighted by
/// w_j = f(S_{j+1})^p - f(S_j)^p.
class Embedding {
 public:
  Embedding(KernelField field, WeightFunction f, PointId x0);

  EmbeddedDifference difference(PointId x, PointId y) const;
  double distance(PointId x, PointId y) const { return difference(x, y).total; }
  /// ||theta(x)||, i.e. the distance to the reference point.
  double norm(PointId x) const { return distance(x, x0_); }

  /// (sum_j eps_j^p w_j)^{1/p}.
  double theoretical_C() const;
  /// 2 f(d/2) - 2 f(c).
  double compression_floor(double d) const;

  bool defined_at(PointId x) const;
  const SpacePtr& space() const { return field_.kernels.front().space; }
  PointId reference() const { return x0_; }
  const WeightFunction& weight() const { return f_; }
  const std::vector<double>& weights() const { return weights_; }
  double p() const { return p_; }

 private:
  KernelField field_;
  WeightFunction f_;
  PointId x0_;
  double p_;
  std::vector<double> weights_;
};

Embedding build_embedding(KernelField field, WeightFunction f, PointId x0);

struct CompressionRow {
  double d = 0;
  double rho_minus = 0;
  double rho_plus = 0;
  double floor_2f = 0;
};

struct CompressionReport {
  std::size_t pairs = 0;
  std::vector<CompressionRow> rows;  // one per realized source distance, increasing
  double lipschitz_estimate = 0;
  double theoretical_C = 0;
};

/// (source distance, embedded distance) pairs -> rho_minus / rho_plus by a
/// sorted sweep. The floor column is filled when a floor function is given.
CompressionReport compression_report(const std::vector<std::pair<double, double>>& pairs,
                                     const std::function<double(double)>& floor = nullptr);

enum class CpVerdict { kConverging, kDiverging, kUndecided };
std::string to_string(CpVerdict v);

struct CpRow {
  double log_T = 0;
  double partial = 0;
  CpVerdict verdict = CpVerdict::kUndecided;
};

struct CpOptions {
  double grid_step = 0.01;   // step of the geometric grid in log t
  double tolerance = 1e-3;   // Cauchy tail for convergence
  double threshold = 10.0;   // partial integral beyond which we call divergence
};

/// Lower Stieltjes sums of int_c^T du(t)^p / t^p on the grid t_i = c e^{i h},
/// one row per truncation log T. Throws if u decreases on the grid.
std::vector<CpRow> cp_condition(const UFamily& u, double p, double c, const std::vector<double>& log_T_list,
                                const CpOptions& options = {});

}  // namespace coarse
