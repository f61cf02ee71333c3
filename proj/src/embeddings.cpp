#include "coarse/embeddings.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>

namespace coarse {

double StepFunction::operator()(double t) const {
  if (x.empty()) throw std::invalid_argument("step function without breakpoints");
  if (t <= x.front()) return v.front();
  if (left_continuous) {
    auto it = std::lower_bound(x.begin(), x.end(), t);  // first x_i >= t
    return it == x.end() ? v.back() : v[it - x.begin()];
  }
  auto it = std::upper_bound(x.begin(), x.end(), t);  // first x_i > t
  return v[(it - x.begin()) - 1];
}

bool StepFunction::non_decreasing() const { return std::is_sorted(v.begin(), v.end()); }

bool StepFunction::non_increasing() const { return std::is_sorted(v.rbegin(), v.rend()); }

namespace {

void check_step(const StepFunction& g) {
  if (g.x.empty() || g.x.size() != g.v.size()) throw std::invalid_argument("step function: breakpoints and values differ in length");
  for (std::size_t i = 1; i < g.x.size(); ++i) {
    if (!(g.x[i - 1] < g.x[i])) throw std::invalid_argument("step function: breakpoints must increase");
  }
}

}  // namespace

double generalized_inverse(const StepFunction& g, double t) {
  check_step(g);
  const bool up = g.non_decreasing();
  if (!up && !g.non_increasing()) throw std::invalid_argument("generalized_inverse: step function is not monotone");
  // Both clauses reduce to the first piece whose value qualifies; the
  // infimum of that piece is its left end.
  for (std::size_t i = 0; i < g.v.size(); ++i) {
    const bool hit = up ? g.v[i] >= t : (g.v[i] > 0 && g.v[i] <= t);
    if (!hit) continue;
    if (!g.left_continuous || i == 0) return g.x[i];
    return g.x[i - 1];
  }
  return kInfinity;
}

double generalized_inverse(const TypeCurve& g, double t) {
  if (const auto* lin = std::get_if<LinearType>(&g)) {
    if (lin->slope < 0) throw std::invalid_argument("generalized_inverse: negative slope");
    if (t <= 0) return 0.0;
    if (lin->slope == 0) return kInfinity;
    return t / lin->slope;
  }
  return generalized_inverse(std::get<StepFunction>(g), t);
}

StepFunction type_curve_from_table(const std::vector<std::pair<double, double>>& L_to_D) {
  if (L_to_D.empty()) throw std::invalid_argument("type curve: empty table");
  StepFunction g;
  g.left_continuous = true;
  for (const auto& [L, D] : L_to_D) {
    g.x.push_back(L);
    g.v.push_back(D);
  }
  check_step(g);
  if (!g.non_decreasing()) throw std::invalid_argument("type curve: D must be non-decreasing");
  return g;
}

double UFamily::log_value_from_log(double log_t) const {
  switch (kind) {
    case Kind::kIdentity:
      return log_t;
    case Kind::kOverlog:
      if (!(log_t > 0)) throw std::domain_error("overlog u needs t > 1");
      return log_t - (1 + a) / p * std::log(log_t);
    case Kind::kConstant:
      return std::log(constant);
  }
  return 0;
}

double UFamily::operator()(double t) const {
  if (kind == Kind::kIdentity) return t;
  if (kind == Kind::kConstant) return constant;
  if (!(t > 1)) throw std::domain_error("overlog u needs t > 1");
  return t * std::pow(std::log(t), -(1 + a) / p);
}

std::string UFamily::describe() const {
  switch (kind) {
    case Kind::kIdentity:
      return "identity";
    case Kind::kOverlog:
      return "overlog(a=" + std::to_string(a) + ",p=" + std::to_string(p) + ")";
    case Kind::kConstant:
      return "constant(" + std::to_string(constant) + ")";
  }
  return "";
}

double WeightFunction::operator()(double s) const {
  return StepFunction{breakpoints, values, true}(s);
}

void WeightFunction::validate() const {
  if (breakpoints.empty() || breakpoints.size() != values.size()) {
    throw std::invalid_argument("weight function: breakpoints and values differ in length");
  }
  if (!(breakpoints.front() > 1)) throw std::invalid_argument("weight function: cutoff c must exceed 1");
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (!std::isfinite(values[i])) throw std::invalid_argument("weight function: non-finite value");
    if (i > 0 && !(breakpoints[i - 1] < breakpoints[i])) throw std::invalid_argument("weight function: breakpoints must increase");
    if (i > 0 && values[i] < values[i - 1]) throw std::invalid_argument("weight function: values must be non-decreasing");
  }
}

WeightFunction weight_from_type(const UFamily& u, const TypeCurve& D, const std::vector<double>& breakpoints) {
  if (const auto* step = std::get_if<StepFunction>(&D); step && step->x.empty()) {
    throw std::invalid_argument("weight_from_type: empty curve");
  }
  if (breakpoints.empty()) throw std::invalid_argument("weight_from_type: no breakpoints");
  WeightFunction f;
  f.breakpoints = breakpoints;
  std::optional<double> last;
  for (double S : breakpoints) {
    const double inv = generalized_inverse(D, S);
    if (std::isfinite(inv)) last = u(inv);
    if (!last) throw std::invalid_argument("weight_from_type: curve never reaches the cutoff");
    f.values.push_back(*last);
  }
  f.validate();
  return f;
}

namespace {

double power(double v, double p) { return p == 1.0 ? v : (p == 2.0 ? v * v : std::pow(v, p)); }
double root(double s, double p) { return p == 1.0 ? s : (p == 2.0 ? std::sqrt(s) : std::pow(s, 1.0 / p)); }

Distance kernel_support(const Kernel& k) {
  Distance r = 0;
  for (PointId x = 0; x < k.rows.size(); ++x) {
    if (!k.has(x)) continue;
    for (const auto& [z, v] : k.rows[x]) r = std::max(r, k.space->distance(x, z));
  }
  return r;
}

}  // namespace

Embedding::Embedding(KernelField field, WeightFunction f, PointId x0) : field_(std::move(field)), f_(std::move(f)), x0_(x0) {
  f_.validate();
  const std::size_t J = f_.breakpoints.size() - 1;
  if (J == 0) throw std::invalid_argument("build_embedding: weight function needs at least two breakpoints");
  if (field_.levels.size() != J || field_.kernels.size() != J || field_.eps.size() != J) {
    throw std::invalid_argument("build_embedding: kernel field does not match the weight breakpoints");
  }
  p_ = field_.kernels.front().p;
  for (std::size_t j = 0; j < J; ++j) {
    if (field_.levels[j] != f_.breakpoints[j]) throw std::invalid_argument("build_embedding: breakpoint mismatch at level " + std::to_string(j));
    const auto& k = field_.kernels[j];
    if (k.space != field_.kernels.front().space || k.p != p_) {
      throw std::invalid_argument("build_embedding: kernels must share space and p");
    }
    if (static_cast<double>(kernel_support(k)) > field_.levels[j]) {
      throw std::invalid_argument("build_embedding: kernel support exceeds its level " + std::to_string(field_.levels[j]));
    }
    weights_.push_back(power(f_.values[j + 1], p_) - power(f_.values[j], p_));
  }
  if (!defined_at(x0_)) throw std::invalid_argument("build_embedding: reference point outside the kernel domain");
}

bool Embedding::defined_at(PointId x) const {
  return std::all_of(field_.kernels.begin(), field_.kernels.end(), [x](const Kernel& k) { return k.has(x); });
}

EmbeddedDifference Embedding::difference(PointId x, PointId y) const {
  if (!defined_at(x) || !defined_at(y)) throw std::out_of_range("embedding undefined at a point of the pair");
  EmbeddedDifference d;
  d.weights = weights_;
  double sum = 0;
  for (std::size_t j = 0; j < weights_.size(); ++j) {
    const double n = lp_distance(field_.kernels[j].rows[x], field_.kernels[j].rows[y], p_);
    d.level_norms.push_back(n);
    sum += weights_[j] * power(n, p_);
  }
  d.total = root(sum, p_);
  return d;
}

double Embedding::theoretical_C() const {
  double sum = 0;
  for (std::size_t j = 0; j < weights_.size(); ++j) sum += power(field_.eps[j], p_) * weights_[j];
  return root(sum, p_);
}

double Embedding::compression_floor(double d) const { return 2 * f_(d / 2) - 2 * f_(f_.c()); }

Embedding build_embedding(KernelField field, WeightFunction f, PointId x0) {
  return Embedding(std::move(field), std::move(f), x0);
}

CompressionReport compression_report(const std::vector<std::pair<double, double>>& pairs,
                                     const std::function<double(double)>& floor) {
  if (pairs.empty()) throw std::invalid_argument("compression_report: no pairs");
  CompressionReport r;
  r.pairs = pairs.size();
  std::map<double, std::pair<double, double>> by_d;  // d -> (min, max) embedded distance
  for (const auto& [d, e] : pairs) {
    auto [it, fresh] = by_d.emplace(d, std::make_pair(e, e));
    if (!fresh) {
      it->second.first = std::min(it->second.first, e);
      it->second.second = std::max(it->second.second, e);
    }
    if (d > 0) r.lipschitz_estimate = std::max(r.lipschitz_estimate, e / d);
  }
  r.rows.reserve(by_d.size());
  double running_max = 0;
  for (const auto& [d, mm] : by_d) {
    running_max = std::max(running_max, mm.second);
    r.rows.push_back({d, 0, running_max, floor ? floor(d) : 0});
  }
  double running_min = kInfinity;
  auto it = by_d.rbegin();
  for (auto row = r.rows.rbegin(); row != r.rows.rend(); ++row, ++it) {
    running_min = std::min(running_min, it->second.first);
    row->rho_minus = running_min;
  }
  return r;
}

std::string to_string(CpVerdict v) {
  switch (v) {
    case CpVerdict::kConverging:
      return "converging";
    case CpVerdict::kDiverging:
      return "diverging";
    case CpVerdict::kUndecided:
      return "undecided";
  }
  return "";
}

std::vector<CpRow> cp_condition(const UFamily& u, double p, double c, const std::vector<double>& log_T_list,
                                const CpOptions& options) {
  if (!(c > 1)) throw std::invalid_argument("cp_condition: cutoff must exceed 1");
  if (!(p >= 1)) throw std::invalid_argument("cp_condition: p must be at least 1");
  if (!(options.grid_step > 0)) throw std::invalid_argument("cp_condition: grid step must be positive");
  if (!std::is_sorted(log_T_list.begin(), log_T_list.end())) throw std::invalid_argument("cp_condition: truncations must increase");
  const double log_c = std::log(c);
  std::vector<CpRow> rows;
  double partial = 0;
  std::int64_t i = 0;
  double lu = u.log_value_from_log(log_c);
  for (double log_T : log_T_list) {
    while (true) {
      const double lt_next = log_c + static_cast<double>(i + 1) * options.grid_step;
      if (lt_next > log_T) break;
      const double lu_next = u.log_value_from_log(lt_next);
      if (lu_next < lu - 1e-12) {
        throw std::domain_error("cp_condition: u decreases on the grid near log t = " + std::to_string(lt_next));
      }
      // (u_{i+1}^p - u_i^p) / t_{i+1}^p in log space.
      partial += std::exp(p * (lu_next - lt_next)) - std::exp(p * (lu - lt_next));
      lu = lu_next;
      ++i;
    }
    CpRow row{log_T, partial, CpVerdict::kUndecided};
    if (partial > options.threshold) {
      row.verdict = CpVerdict::kDiverging;
    } else if (!rows.empty() && partial - rows.back().partial < options.tolerance) {
      row.verdict = CpVerdict::kConverging;
    }
    rows.push_back(row);
  }
  return rows;
}

}  // namespace coarse
