#include "sspde/operator.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace sspde {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// sum_i c_i (p_i - 2 + shift_mul * 0 ... ) -- see callers; evaluates
// sum c_i * factor(p_i) * t^{p_i - 2} with the singular clamp applied once.
template <class Factor>
double clamped_power_sum(const OperatorSpec& op, double t, Factor factor) {
  double te = t;
  if (te < op.t_floor && op.singular_at_zero()) te = op.t_floor;
  double s = 0;
  for (const auto& [c, p] : op.terms) s += c * factor(p) * std::pow(te, p - 2.0);
  return s;
}

}  // namespace

double OperatorSpec::growth_exponent() const {
  double p = -kInf;
  for (const auto& t : terms) p = std::max(p, t.p);
  return p;
}

bool OperatorSpec::singular_at_zero() const {
  return std::any_of(terms.begin(), terms.end(), [](const PowerTerm& t) { return t.p < 2.0; });
}

double OperatorSpec::a0(double t) const {
  return clamped_power_sum(*this, t, [](double) { return 1.0; });
}

double OperatorSpec::a0_prime(double t) const {
  double te = t;
  if (te < t_floor && singular_at_zero()) te = t_floor;
  double s = 0;
  for (const auto& [c, p] : terms) s += c * (p - 2.0) * std::pow(te, p - 3.0);
  return s;
}

double OperatorSpec::lambda1(double t) const {
  // t a_0'(t) + a_0(t) collapses term-wise to (p_i - 1) c_i t^{p_i - 2}
  return clamped_power_sum(*this, t, [](double p) { return p - 1.0; });
}

double OperatorSpec::lambda2(double t) const { return a0(t); }

double OperatorSpec::flux_scalar(double xi) const {
  if (xi == 0.0) return 0.0;
  return a0(std::abs(xi)) * xi;
}

void OperatorSpec::validate() const {
  if (terms.empty()) throw std::invalid_argument("operator: at least one power term required");
  for (const auto& [c, p] : terms) {
    if (!std::isfinite(c) || c <= 0.0)
      throw std::invalid_argument("operator: coefficients must be positive and finite");
    if (!std::isfinite(p) || p <= 1.0)
      throw std::invalid_argument("operator: exponents must exceed 1");
  }
  if (!std::isfinite(t_floor) || t_floor <= 0.0 || t_floor >= 1.0)
    throw std::invalid_argument("operator: t_floor must lie in (0, 1)");
}

OperatorSpec OperatorSpec::p_laplacian(double p) { return OperatorSpec{{{1.0, p}}, 1e-12}; }

OperatorSpec OperatorSpec::pq_laplacian(double cp, double p, double cq, double q) {
  return OperatorSpec{{{cp, p}, {cq, q}}, 1e-12};
}

OperatorSpec operator_from_json(const nlohmann::json& j) {
  OperatorSpec op;
  if (!j.is_object()) throw std::invalid_argument("operator: expected an object");
  for (const auto& [key, val] : j.items()) {
    if (key == "terms") {
      if (!val.is_array() || val.empty())
        throw std::invalid_argument("operator.terms: expected a nonempty array");
      for (const auto& t : val) {
        if (!t.is_object()) throw std::invalid_argument("operator.terms: expected objects");
        PowerTerm pt;
        for (const auto& [tk, tv] : t.items()) {
          if (tk == "c") pt.c = tv.get<double>();
          else if (tk == "p") pt.p = tv.get<double>();
          else throw std::invalid_argument("operator.terms: unknown key '" + tk + "'");
        }
        op.terms.push_back(pt);
      }
    } else if (key == "t_floor") {
      op.t_floor = val.get<double>();
    } else {
      throw std::invalid_argument("operator: unknown key '" + key + "'");
    }
  }
  op.validate();
  return op;
}

nlohmann::json operator_to_json(const OperatorSpec& op) {
  nlohmann::json terms = nlohmann::json::array();
  for (const auto& [c, p] : op.terms) terms.push_back({{"c", c}, {"p", p}});
  return {{"terms", terms}, {"t_floor", op.t_floor}};
}

std::vector<double> log_grid(double lo, double hi, std::size_t n) {
  if (!(lo > 0) || !(hi > lo) || n < 2) throw std::invalid_argument("log_grid: bad range");
  std::vector<double> g(n);
  const double llo = std::log(lo), lhi = std::log(hi);
  for (std::size_t i = 0; i < n; ++i)
    g[i] = std::exp(llo + (lhi - llo) * static_cast<double>(i) / static_cast<double>(n - 1));
  g.front() = lo;
  g.back() = hi;
  return g;
}

void eval_flux(const OperatorSpec& op, std::span<const double> xi, std::span<double> out) {
  if (out.size() != xi.size()) throw std::invalid_argument("eval_flux: size mismatch");
  double t2 = 0;
  for (double x : xi) {
    if (!std::isfinite(x)) throw std::invalid_argument("eval_flux: non-finite input");
    t2 += x * x;
  }
  if (t2 == 0.0) {
    std::fill(out.begin(), out.end(), 0.0);
    return;
  }
  const double a = op.a0(std::sqrt(t2));
  for (std::size_t i = 0; i < xi.size(); ++i) out[i] = a * xi[i];
}

std::array<double, 2> jacobian_eigs(const OperatorSpec& op, double t) {
  if (!(t > 0) || !std::isfinite(t)) throw std::invalid_argument("jacobian_eigs: t must be positive");
  return {op.lambda1(t), op.lambda2(t)};
}

double energy_primitive(const OperatorSpec& op, double t) {
  if (t < 0 || !std::isfinite(t)) throw std::invalid_argument("energy_primitive: t must be >= 0");
  double s = 0;
  for (const auto& [c, p] : op.terms) s += c * std::pow(t, p) / p;
  return s;
}

MonotonicityIndices monotonicity_indices(const OperatorSpec& op,
                                         std::span<const double> t_grid) {
  if (t_grid.empty()) throw std::invalid_argument("monotonicity_indices: empty grid");
  double lo = kInf, hi = -kInf;
  for (double t : t_grid) {
    const double ratio = t * op.a0_prime(t) / op.a0(t);
    lo = std::min(lo, ratio);
    hi = std::max(hi, ratio);
  }
  // For power sums the ratio is a weighted mean of p_i - 2 whose weights
  // concentrate on the extreme exponents as t -> 0 or t -> inf.
  double p_min = kInf, p_max = -kInf;
  for (const auto& t : op.terms) {
    p_min = std::min(p_min, t.p);
    p_max = std::max(p_max, t.p);
  }
  lo = std::min(lo, p_min - 2.0);
  hi = std::max(hi, p_max - 2.0);
  return {lo, hi};
}

GrowthBounds verify_growth(const OperatorSpec& op, std::span<const double> t_grid) {
  if (t_grid.empty()) throw std::invalid_argument("verify_growth: empty grid");
  const double p = op.growth_exponent();
  GrowthBounds gb{kInf, -kInf, 0.0, 0.0, false};
  for (double t : t_grid) {
    const double ta0 = t * op.a0(t);
    const double lower_ratio = ta0 / std::pow(t, p - 1.0);
    const double upper_ratio = ta0 / (std::pow(t, p - 1.0) + 1.0);
    if (lower_ratio < gb.m) { gb.m = lower_ratio; gb.worst_t_m = t; }
    if (upper_ratio > gb.M) { gb.M = upper_ratio; gb.worst_t_M = t; }
  }
  // Endpoint limits: t a_0(t)/t^{p-1} -> sum of top-exponent coefficients as
  // t -> inf (and +inf at 0+ unless the sum is a pure top power); the upper
  // ratio tends to the same constant at inf and to 0 at 0+.
  double c_top = 0;
  for (const auto& [c, q] : op.terms)
    if (q == p) c_top += c;
  gb.m = std::min(gb.m, c_top);
  gb.M = std::max(gb.M, c_top);
  gb.passed = gb.m > 0 && std::isfinite(gb.M);
  return gb;
}

namespace {

// lhs <= rhs with relative rounding slack; margin > 0 means satisfied.
double le_margin(double lhs, double rhs) {
  const double scale = std::max({std::abs(lhs), std::abs(rhs), 1e-300});
  return (rhs - lhs) / scale + 1e-12;
}

}  // namespace

bool ConditionReport::passed() const {
  return ellipticity.passed && growth.passed && omega_log_slope.passed &&
         eigen_bounds.passed && eigen_pinching.passed && omega_envelope.passed &&
         flux_monotone.passed && omega_growth.passed;
}

nlohmann::json ConditionReport::to_json() const {
  auto chk = [](const ConditionCheck& c) {
    return nlohmann::json{{"passed", c.passed}, {"worst_t", c.worst_t},
                          {"worst_margin", c.worst_value}};
  };
  return {{"i_a", i_a},       {"s_a", s_a},
          {"m", m},           {"M", M},
          {"k_scale", k_scale}, {"Lambda", Lambda},
          {"C1", C1},         {"C2", C2},
          {"C3", C3},         {"C4", C4},
          {"passed", passed()},
          {"conditions",
           {{"growth", chk(growth)},
            {"ellipticity", chk(ellipticity)},
            {"omega_log_slope", chk(omega_log_slope)},
            {"eigenvalue_bounds", chk(eigen_bounds)},
            {"eigenvalue_pinching", chk(eigen_pinching)},
            {"flux_monotone", chk(flux_monotone)},
            {"omega_envelope", chk(omega_envelope)},
            {"omega_growth", chk(omega_growth)}}}};
}

ConditionReport verify_appendix_equivalence(const OperatorSpec& op,
                                            std::span<const double> t_grid) {
  if (t_grid.empty()) throw std::invalid_argument("verify_appendix_equivalence: empty grid");
  ConditionReport rep;
  const auto idx = monotonicity_indices(op, t_grid);
  const auto gb = verify_growth(op, t_grid);
  rep.i_a = idx.i_a;
  rep.s_a = idx.s_a;
  rep.m = gb.m;
  rep.M = gb.M;

  rep.ellipticity.passed = idx.i_a > -1.0 && std::isfinite(idx.s_a);
  rep.ellipticity.worst_t = 0.0;
  rep.ellipticity.worst_value = idx.i_a + 1.0;
  rep.growth.passed = gb.passed;
  rep.growth.worst_t = gb.worst_t_m;
  rep.growth.worst_value = gb.m;

  if (!rep.ellipticity.passed) {
    // Comparison-function constants are meaningless without i_a > -1; report
    // the failure instead of throwing.
    rep.omega_log_slope.passed = rep.eigen_bounds.passed = rep.eigen_pinching.passed =
        rep.omega_envelope.passed = rep.flux_monotone.passed = rep.omega_growth.passed = false;
    return rep;
  }

  rep.k_scale = std::min(1.0, idx.i_a + 1.0);
  rep.Lambda = std::max(1.0, idx.s_a + 1.0) / rep.k_scale;
  rep.C1 = idx.i_a + 1.0;
  rep.C2 = idx.s_a + 1.0;
  rep.C3 = rep.k_scale * gb.m;
  rep.C4 = rep.k_scale * gb.M;

  const double p = op.growth_exponent();
  const double k = rep.k_scale;
  auto omega = [&](double t) { return k * t * op.a0(t); };
  const double omega1 = omega(1.0);

  auto worst_init = [](ConditionCheck& c) {
    c.passed = true;
    c.worst_value = kInf;
  };
  auto fold_le = [](ConditionCheck& c, double lhs, double rhs, double t) {
    const double mg = le_margin(lhs, rhs);
    if (mg < c.worst_value) {
      c.worst_value = mg;
      c.worst_t = t;
    }
    if (mg < 0) c.passed = false;
  };

  worst_init(rep.omega_log_slope);
  worst_init(rep.eigen_bounds);
  worst_init(rep.eigen_pinching);
  worst_init(rep.omega_envelope);
  worst_init(rep.flux_monotone);
  worst_init(rep.omega_growth);

  double prev_flux = 0.0;
  double prev_t = 0.0;
  bool first = true;
  for (double t : t_grid) {
    const double a = op.a0(t);
    const double l1 = op.lambda1(t);
    const double l2 = a;
    const double w = omega(t);
    const double wt = w / t;  // k a_0(t)

    // t omega'/omega = 1 + t a_0'/a_0
    const double slope = 1.0 + t * op.a0_prime(t) / a;
    fold_le(rep.omega_log_slope, rep.C1, slope, t);
    fold_le(rep.omega_log_slope, slope, rep.C2, t);

    fold_le(rep.eigen_bounds, wt, std::min(l1, l2), t);
    fold_le(rep.eigen_bounds, std::max(l1, l2), rep.Lambda * wt, t);

    const double ratio = l1 / l2;
    fold_le(rep.eigen_pinching, 1.0 / rep.Lambda, ratio, t);
    fold_le(rep.eigen_pinching, ratio, rep.Lambda, t);

    const double tc1 = std::pow(t, rep.C1), tc2 = std::pow(t, rep.C2);
    fold_le(rep.omega_envelope, omega1 * std::min(tc1, tc2), w, t);
    fold_le(rep.omega_envelope, w, omega1 * std::max(tc1, tc2), t);

    const double flux = t * a;
    if (!first) fold_le(rep.flux_monotone, prev_flux, flux, prev_t);
    prev_flux = flux;
    prev_t = t;
    first = false;

    const double tp1 = std::pow(t, p - 1.0);
    fold_le(rep.omega_growth, rep.C3 * tp1, w, t);
    fold_le(rep.omega_growth, w, rep.C4 * (tp1 + 1.0), t);
  }

  // Vanishing limit at 0+: the envelope pins omega(t) <= omega(1) t^{C1} below
  // t = 1, so C1 > 0 forces t a_0(t) -> 0.
  if (!(rep.C1 > 0.0)) rep.flux_monotone.passed = false;

  return rep;
}

}  // namespace sspde
