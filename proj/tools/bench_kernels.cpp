// Times the parallel correlation kernels against their serial references.

#include <chrono>
#include <cstdio>
#include <functional>
#include <omp.h>

#include "vset/kernels.hpp"
#include "vset/rng.hpp"

using namespace vset;

namespace {

using clk = std::chrono::steady_clock;

double time_of(int reps, const std::function<void()>& fn) {
  fn();  // warm up
  auto t0 = clk::now();
  for (int i = 0; i < reps; ++i) fn();
  auto t1 = clk::now();
  return std::chrono::duration<double>(t1 - t0).count() / reps;
}

}  // namespace

int main() {
  std::printf("threads: %d\n", omp_get_max_threads());
  std::printf("%8s %8s %12s %12s %8s %12s\n", "n", "N", "serial_s",
              "parallel_s", "speedup", "max_abs_diff");
  Rng rng(1);
  for (auto [n, N] : {std::pair{100, 10000}, {300, 10000}, {600, 10000},
                      {300, 100000}}) {
    Eigen::MatrixXd A(n, N);
    for (int j = 0; j < N; ++j)
      for (int i = 0; i < n; ++i) A(i, j) = rng.normal();
    Eigen::VectorXd r(n);
    for (int i = 0; i < n; ++i) r[i] = rng.normal();

    Eigen::VectorXd ser, par;
    int reps = N >= 100000 ? 5 : 20;
    double ts = time_of(reps, [&] { kernels::correlations_serial(A, r, ser); });
    double tp = time_of(reps, [&] { kernels::correlations(A, r, par); });
    double diff = (ser - par).cwiseAbs().maxCoeff();
    std::printf("%8d %8d %12.3e %12.3e %8.2f %12.3e\n", n, N, ts, tp, ts / tp,
                diff);
  }
  return 0;
}
