// Timing comparison between the serial reference kernels and the OpenMP
// backend on the hot array operations. Results are wall-clock medians over
// repeated runs; both backends produce bitwise identical values, so the table
// is purely about throughput.

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <vector>

#include "sspde/kernels.hpp"
#include "sspde/operator.hpp"

namespace {

using clock_type = std::chrono::steady_clock;

template <class F>
double median_ms(F&& body, int reps) {
  std::vector<double> times;
  times.reserve(reps);
  for (int r = 0; r < reps; ++r) {
    const auto t0 = clock_type::now();
    body();
    const auto t1 = clock_type::now();
    times.push_back(std::chrono::duration<double, std::milli>(t1 - t0).count());
  }
  std::sort(times.begin(), times.end());
  return times[times.size() / 2];
}

}  // namespace

int main() {
  using namespace sspde;
  const OperatorSpec op = OperatorSpec::pq_laplacian(1.0, 3.0, 0.5, 2.0);
  const std::size_t n = 1 << 21;
  std::vector<double> u(n + 1), du(n), q(n), w(n), y(n);
  for (std::size_t i = 0; i <= n; ++i) u[i] = 1.0 / (1.0 + i % 1024);
  for (std::size_t i = 0; i < n; ++i) {
    w[i] = 0.5 + (i % 7) * 0.1;
    y[i] = 1.0 - 2.0 * ((i % 13) / 13.0);
  }

  struct Row {
    const char* name;
    double serial_ms;
    double omp_ms;
  };
  std::vector<Row> rows;

  auto bench_pair = [&](const char* name, auto&& body) {
    kernels::set_active(kernels::Backend::Serial);
    const double ts = median_ms(body, 7);
    kernels::set_active(kernels::Backend::OpenMP);
    const double to = median_ms(body, 7);
    rows.push_back({name, ts, to});
  };

  bench_pair("interval_gradients", [&] { kernels::interval_gradients(u, 1e-3, du); });
  kernels::interval_gradients(u, 1e-3, du);
  bench_pair("flux", [&] { kernels::flux(op, du, q); });
  bench_pair("flux_tangent", [&] { kernels::flux_tangent(op, du, 1e-12, q); });
  bench_pair("energy_density", [&] { kernels::energy_density(op, du, q); });
  volatile double sink = 0;
  bench_pair("weighted_pow_sum", [&] { sink = kernels::weighted_pow_sum(w, du, 3.0); });
  bench_pair("weighted_dot", [&] { sink = kernels::weighted_dot(w, du, y); });
  (void)sink;

  std::printf("kernel benchmark, %zu elements, %d thread(s), openmp %s\n", n,
              kernels::thread_count(), kernels::openmp_available() ? "on" : "off");
  std::printf("%-20s %12s %12s %10s\n", "kernel", "serial [ms]", "openmp [ms]", "speedup");
  for (const Row& r : rows)
    std::printf("%-20s %12.3f %12.3f %9.2fx\n", r.name, r.serial_ms, r.omp_ms,
                r.omp_ms > 0 ? r.serial_ms / r.omp_ms : 0.0);
  return 0;
}
