#include "sspde/kernels.hpp"

#include <atomic>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace sspde::kernels {

namespace {
std::atomic<Backend> g_backend{
#ifdef _OPENMP
    Backend::OpenMP
#else
    Backend::Serial
#endif
};
}  // namespace

Backend active() noexcept { return g_backend.load(std::memory_order_relaxed); }

void set_active(Backend b) noexcept {
#ifndef _OPENMP
  b = Backend::Serial;
#endif
  g_backend.store(b, std::memory_order_relaxed);
}

bool openmp_available() noexcept {
#ifdef _OPENMP
  return true;
#else
  return false;
#endif
}

int thread_count() noexcept {
#ifdef _OPENMP
  return omp_get_max_threads();
#else
  return 1;
#endif
}

#define SSPDE_DISPATCH(fn, ...)                                  \
  do {                                                           \
    if (active() == Backend::OpenMP) return omp::fn(__VA_ARGS__); \
    return serial::fn(__VA_ARGS__);                              \
  } while (0)

void interval_gradients(std::span<const double> u, double h, std::span<double> du) {
  SSPDE_DISPATCH(interval_gradients, u, h, du);
}

void flux(const OperatorSpec& op, std::span<const double> du, std::span<double> q) {
  SSPDE_DISPATCH(flux, op, du, q);
}

void flux_tangent(const OperatorSpec& op, std::span<const double> du, double floor_t,
                  std::span<double> lam) {
  SSPDE_DISPATCH(flux_tangent, op, du, floor_t, lam);
}

void energy_density(const OperatorSpec& op, std::span<const double> du, std::span<double> a) {
  SSPDE_DISPATCH(energy_density, op, du, a);
}

void divergence_residual(std::span<const double> q, std::span<const double> W,
                         std::span<const double> v, std::span<const double> rhs,
                         std::span<double> res) {
  SSPDE_DISPATCH(divergence_residual, q, W, v, rhs, res);
}

double weighted_pow_sum(std::span<const double> w, std::span<const double> x, double p) {
  SSPDE_DISPATCH(weighted_pow_sum, w, x, p);
}

double weighted_pow_dist(std::span<const double> w, std::span<const double> x,
                         std::span<const double> y, double p) {
  SSPDE_DISPATCH(weighted_pow_dist, w, x, y, p);
}

double weighted_dot(std::span<const double> w, std::span<const double> x,
                    std::span<const double> y) {
  SSPDE_DISPATCH(weighted_dot, w, x, y);
}

#undef SSPDE_DISPATCH

}  // namespace sspde::kernels
