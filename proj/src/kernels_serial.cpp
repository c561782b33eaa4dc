#include <cmath>

#include "sspde/kernels.hpp"
#include "sspde/operator.hpp"

// Reference implementations. Plain loops, accumulation in index order; the
// OpenMP backend must reproduce these bitwise.
namespace sspde::kernels::serial {

void interval_gradients(std::span<const double> u, double h, std::span<double> du) {
  const double inv = 1.0 / h;
  for (std::size_t j = 0; j < du.size(); ++j) du[j] = (u[j + 1] - u[j]) * inv;
}

void flux(const OperatorSpec& op, std::span<const double> du, std::span<double> q) {
  for (std::size_t j = 0; j < du.size(); ++j) q[j] = op.flux_scalar(du[j]);
}

void flux_tangent(const OperatorSpec& op, std::span<const double> du, double floor_t,
                  std::span<double> lam) {
  for (std::size_t j = 0; j < du.size(); ++j)
    lam[j] = op.lambda1(std::max(std::abs(du[j]), floor_t));
}

void energy_density(const OperatorSpec& op, std::span<const double> du, std::span<double> a) {
  for (std::size_t j = 0; j < du.size(); ++j) a[j] = energy_primitive(op, std::abs(du[j]));
}

void divergence_residual(std::span<const double> q, std::span<const double> W,
                         std::span<const double> v, std::span<const double> rhs,
                         std::span<double> res) {
  for (std::size_t i = 0; i < res.size(); ++i) {
    const double inflow = i == 0 ? 0.0 : W[i - 1] * q[i - 1];
    res[i] = (inflow - W[i] * q[i]) / v[i] - rhs[i];
  }
}

double weighted_pow_sum(std::span<const double> w, std::span<const double> x, double p) {
  double s = 0;
  for (std::size_t i = 0; i < x.size(); ++i) s += w[i] * std::pow(std::abs(x[i]), p);
  return s;
}

double weighted_pow_dist(std::span<const double> w, std::span<const double> x,
                         std::span<const double> y, double p) {
  double s = 0;
  for (std::size_t i = 0; i < x.size(); ++i) s += w[i] * std::pow(std::abs(x[i] - y[i]), p);
  return s;
}

double weighted_dot(std::span<const double> w, std::span<const double> x,
                    std::span<const double> y) {
  double s = 0;
  for (std::size_t i = 0; i < x.size(); ++i) s += w[i] * x[i] * y[i];
  return s;
}

}  // namespace sspde::kernels::serial
