#pragma once

#include <array>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

namespace sspde {

struct PowerTerm {
  double c = 1.0;  // coefficient, > 0
  double p = 2.0;  // exponent,    > 1
};

// Flux density a(xi) = a_0(|xi|) xi with a_0(t) = sum_i c_i t^{p_i - 2}.
// Finite positive power sums cover the p-Laplacian, (p,q)-Laplacian and
// weighted mixtures while keeping every derived quantity in closed form.
struct OperatorSpec {
  std::vector<PowerTerm> terms;
  double t_floor = 1e-12;  // clamp inside a_0 when a term with p_i < 2 is present

  double growth_exponent() const;  // largest p_i
  bool singular_at_zero() const;   // any p_i < 2

  double a0(double t) const;
  double a0_prime(double t) const;
  double lambda1(double t) const;  // radial tangent slope t a_0'(t) + a_0(t)
  double lambda2(double t) const;  // orthogonal slope a_0(t)
  double flux_scalar(double xi) const;  // a_0(|xi|) xi, exact zero at xi = 0

  // Throws std::invalid_argument when a term is out of contract.
  void validate() const;

  static OperatorSpec p_laplacian(double p);
  static OperatorSpec pq_laplacian(double cp, double p, double cq, double q);
};

OperatorSpec operator_from_json(const nlohmann::json& j);
nlohmann::json operator_to_json(const OperatorSpec& op);

// Default sampling grid for condition checks: log-spaced on [lo, hi].
std::vector<double> log_grid(double lo = 1e-6, double hi = 1e6, std::size_t n = 4096);

// a(xi) for an N-dimensional vector xi; out must match xi in size.
void eval_flux(const OperatorSpec& op, std::span<const double> xi, std::span<double> out);

// Jacobian eigenvalues {lambda1, lambda2} of grad a at |xi| = t > 0.
std::array<double, 2> jacobian_eigs(const OperatorSpec& op, double t);

// A(t) = int_0^t s a_0(s) ds, in closed form.
double energy_primitive(const OperatorSpec& op, double t);

struct MonotonicityIndices {
  double i_a;  // inf of t a_0'(t)/a_0(t)
  double s_a;  // sup of the same ratio
};

// Sampled over t_grid, then sharpened with the analytic endpoint limits
// p_min - 2 and p_max - 2 of the power sum.
MonotonicityIndices monotonicity_indices(const OperatorSpec& op,
                                         std::span<const double> t_grid);

struct GrowthBounds {
  double m;  // inf over the grid of t a_0(t) / t^{p-1}
  double M;  // sup over the grid of t a_0(t) / (t^{p-1} + 1)
  double worst_t_m;
  double worst_t_M;
  bool passed;  // m > 0 and M finite
};

GrowthBounds verify_growth(const OperatorSpec& op, std::span<const double> t_grid);

struct ConditionCheck {
  bool passed = false;
  double worst_t = 0.0;      // sample where the margin is smallest
  double worst_value = 0.0;  // measured margin there (negative = violated)
};

// Certifies the equivalence between the ellipticity/growth description of the
// operator and the comparison-function description, with explicit constants.
struct ConditionReport {
  double i_a = 0, s_a = 0;
  double m = 0, M = 0;
  double k_scale = 0;             // k = min{1, i_a + 1}
  double Lambda = 0;              // k^{-1} max{1, s_a + 1}
  double C1 = 0, C2 = 0;          // log-slope window of omega(t) = k t a_0(t)
  double C3 = 0, C4 = 0;          // k m and k M
  ConditionCheck ellipticity;     // i_a > -1 and s_a finite
  ConditionCheck growth;          // m t^{p-1} <= t a_0(t) <= M (t^{p-1} + 1)
  ConditionCheck omega_log_slope; // C1 <= t omega'/omega <= C2
  ConditionCheck eigen_bounds;    // omega/t <= min eig, max eig <= Lambda omega/t
  ConditionCheck eigen_pinching;  // 1/Lambda <= lambda1/lambda2 <= Lambda
  ConditionCheck omega_envelope;  // omega(1) min{t^C1,t^C2} <= omega <= omega(1) max{...}
  ConditionCheck flux_monotone;   // t a_0(t) strictly increasing, -> 0 at 0+
  ConditionCheck omega_growth;    // C3 t^{p-1} <= omega(t) <= C4 (t^{p-1} + 1)

  bool passed() const;
  nlohmann::json to_json() const;
};

// Never throws on condition failure; failures live in the report flags.
ConditionReport verify_appendix_equivalence(const OperatorSpec& op,
                                            std::span<const double> t_grid);

}  // namespace sspde
