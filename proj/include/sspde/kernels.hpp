#pragma once

#include <cstddef>
#include <span>

namespace sspde {
struct OperatorSpec;
}

// Array kernels shared by the discretization and the solvers. Each one has a
// serial reference implementation and an OpenMP implementation; the active
// backend is a process-wide switch. Reductions are two-phase (parallel
// elementwise map, serial index-order accumulation) so results are bitwise
// identical across backends and thread counts.
namespace sspde::kernels {

enum class Backend { Serial, OpenMP };

Backend active() noexcept;
void set_active(Backend b) noexcept;
bool openmp_available() noexcept;
int thread_count() noexcept;

// du[j] = (u[j+1] - u[j]) / h for j = 0 .. du.size()-1
void interval_gradients(std::span<const double> u, double h, std::span<double> du);

// q[j] = a_0(|du[j]|) du[j]
void flux(const OperatorSpec& op, std::span<const double> du, std::span<double> q);

// lam[j] = lambda1(max(|du[j]|, floor_t)); the floor regularizes the Newton
// matrix for degenerate operators, the residual itself is never floored.
void flux_tangent(const OperatorSpec& op, std::span<const double> du, double floor_t,
                  std::span<double> lam);

// a[j] = A(|du[j]|)
void energy_density(const OperatorSpec& op, std::span<const double> du, std::span<double> a);

// res[i] = (W[i-1] q[i-1] - W[i] q[i]) / v[i] - rhs[i], W[-1] q[-1] := 0
void divergence_residual(std::span<const double> q, std::span<const double> W,
                         std::span<const double> v, std::span<const double> rhs,
                         std::span<double> res);

// sum_i w[i] |x[i]|^p
double weighted_pow_sum(std::span<const double> w, std::span<const double> x, double p);

// sum_i w[i] |x[i] - y[i]|^p
double weighted_pow_dist(std::span<const double> w, std::span<const double> x,
                         std::span<const double> y, double p);

// sum_i w[i] x[i] y[i]
double weighted_dot(std::span<const double> w, std::span<const double> x,
                    std::span<const double> y);

namespace serial {
void interval_gradients(std::span<const double> u, double h, std::span<double> du);
void flux(const OperatorSpec& op, std::span<const double> du, std::span<double> q);
void flux_tangent(const OperatorSpec& op, std::span<const double> du, double floor_t,
                  std::span<double> lam);
void energy_density(const OperatorSpec& op, std::span<const double> du, std::span<double> a);
void divergence_residual(std::span<const double> q, std::span<const double> W,
                         std::span<const double> v, std::span<const double> rhs,
                         std::span<double> res);
double weighted_pow_sum(std::span<const double> w, std::span<const double> x, double p);
double weighted_pow_dist(std::span<const double> w, std::span<const double> x,
                         std::span<const double> y, double p);
double weighted_dot(std::span<const double> w, std::span<const double> x,
                    std::span<const double> y);
}  // namespace serial

namespace omp {
void interval_gradients(std::span<const double> u, double h, std::span<double> du);
void flux(const OperatorSpec& op, std::span<const double> du, std::span<double> q);
void flux_tangent(const OperatorSpec& op, std::span<const double> du, double floor_t,
                  std::span<double> lam);
void energy_density(const OperatorSpec& op, std::span<const double> du, std::span<double> a);
void divergence_residual(std::span<const double> q, std::span<const double> W,
                         std::span<const double> v, std::span<const double> rhs,
                         std::span<double> res);
double weighted_pow_sum(std::span<const double> w, std::span<const double> x, double p);
double weighted_pow_dist(std::span<const double> w, std::span<const double> x,
                         std::span<const double> y, double p);
double weighted_dot(std::span<const double> w, std::span<const double> x,
                    std::span<const double> y);
}  // namespace omp

}  // namespace sspde::kernels
