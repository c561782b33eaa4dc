#include <cmath>
#include <vector>

#include "sspde/kernels.hpp"
#include "sspde/operator.hpp"

// OpenMP backend. Elementwise maps parallelize freely; reductions write
// their terms into a scratch buffer in parallel and accumulate serially in
// index order, so the result matches the serial backend bitwise regardless
// of scheduling. Short arrays stay serial to avoid fork overhead.
namespace sspde::kernels::omp {

namespace {

constexpr std::ptrdiff_t kGrain = 2048;

double ordered_sum(const std::vector<double>& terms) {
  double s = 0;
  for (double t : terms) s += t;
  return s;
}

}  // namespace

void interval_gradients(std::span<const double> u, double h, std::span<double> du) {
  const double inv = 1.0 / h;
  const std::ptrdiff_t n = static_cast<std::ptrdiff_t>(du.size());
  if (n < kGrain) {
    serial::interval_gradients(u, h, du);
    return;
  }
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t j = 0; j < n; ++j) du[j] = (u[j + 1] - u[j]) * inv;
}

void flux(const OperatorSpec& op, std::span<const double> du, std::span<double> q) {
  const std::ptrdiff_t n = static_cast<std::ptrdiff_t>(du.size());
  if (n < kGrain) {
    serial::flux(op, du, q);
    return;
  }
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t j = 0; j < n; ++j) q[j] = op.flux_scalar(du[j]);
}

void flux_tangent(const OperatorSpec& op, std::span<const double> du, double floor_t,
                  std::span<double> lam) {
  const std::ptrdiff_t n = static_cast<std::ptrdiff_t>(du.size());
  if (n < kGrain) {
    serial::flux_tangent(op, du, floor_t, lam);
    return;
  }
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t j = 0; j < n; ++j)
    lam[j] = op.lambda1(std::max(std::abs(du[j]), floor_t));
}

void energy_density(const OperatorSpec& op, std::span<const double> du, std::span<double> a) {
  const std::ptrdiff_t n = static_cast<std::ptrdiff_t>(du.size());
  if (n < kGrain) {
    serial::energy_density(op, du, a);
    return;
  }
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t j = 0; j < n; ++j) a[j] = energy_primitive(op, std::abs(du[j]));
}

void divergence_residual(std::span<const double> q, std::span<const double> W,
                         std::span<const double> v, std::span<const double> rhs,
                         std::span<double> res) {
  const std::ptrdiff_t n = static_cast<std::ptrdiff_t>(res.size());
  if (n < kGrain) {
    serial::divergence_residual(q, W, v, rhs, res);
    return;
  }
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    const double inflow = i == 0 ? 0.0 : W[i - 1] * q[i - 1];
    res[i] = (inflow - W[i] * q[i]) / v[i] - rhs[i];
  }
}

double weighted_pow_sum(std::span<const double> w, std::span<const double> x, double p) {
  const std::ptrdiff_t n = static_cast<std::ptrdiff_t>(x.size());
  if (n < kGrain) return serial::weighted_pow_sum(w, x, p);
  std::vector<double> terms(x.size());
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t i = 0; i < n; ++i) terms[i] = w[i] * std::pow(std::abs(x[i]), p);
  return ordered_sum(terms);
}

double weighted_pow_dist(std::span<const double> w, std::span<const double> x,
                         std::span<const double> y, double p) {
  const std::ptrdiff_t n = static_cast<std::ptrdiff_t>(x.size());
  if (n < kGrain) return serial::weighted_pow_dist(w, x, y, p);
  std::vector<double> terms(x.size());
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t i = 0; i < n; ++i)
    terms[i] = w[i] * std::pow(std::abs(x[i] - y[i]), p);
  return ordered_sum(terms);
}

double weighted_dot(std::span<const double> w, std::span<const double> x,
                    std::span<const double> y) {
  const std::ptrdiff_t n = static_cast<std::ptrdiff_t>(x.size());
  if (n < kGrain) return serial::weighted_dot(w, x, y);
  std::vector<double> terms(x.size());
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t i = 0; i < n; ++i) terms[i] = w[i] * x[i] * y[i];
  return ordered_sum(terms);
}

}  // namespace sspde::kernels::omp
