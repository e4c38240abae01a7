// Serial vs OpenMP timing of the dense assembly kernels.
// Usage: bench_assembly [N ...]   (thread count from OMP_NUM_THREADS)
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <string>
#include <vector>

#include <omp.h>

#include "opid/identity_lab.hpp"
#include "opid/operators.hpp"

namespace {

double seconds(const std::function<void()>& f, int reps = 3) {
  double best = 1e300;
  for (int r = 0; r < reps; ++r) {
    const auto t0 = std::chrono::steady_clock::now();
    f();
    const auto t1 = std::chrono::steady_clock::now();
    best = std::min(best, std::chrono::duration<double>(t1 - t0).count());
  }
  return best;
}

opid::MatrixFunctionSpec fourier_spec() {
  opid::MatrixFunctionSpec s;
  s.family = opid::Family::fourier_random;
  s.m1 = 2;
  s.m2 = 2;
  s.num_terms = 6;
  s.seed = 7;
  return s;
}

}  // namespace

int main(int argc, char** argv) {
  std::vector<int> sizes;
  for (int k = 1; k < argc; ++k) sizes.push_back(std::atoi(argv[k]));
  if (sizes.empty()) sizes = {64, 128};

  const opid::MatrixFunction fn(fourier_spec());
  const auto phi = fn.as_path();
  opid::MatrixFunctionSpec hat_spec = fourier_spec();
  hat_spec.m1 = 2;
  hat_spec.seed = 8;
  const auto phi_hat = opid::MatrixFunction(hat_spec).as_path();

  std::printf("threads=%d\n", omp_get_max_threads());
  std::printf("%-16s %6s %12s %12s %8s %12s\n", "kernel", "N", "serial_s", "parallel_s", "speedup", "max_diff");
  for (int N : sizes) {
    const auto grid = opid::make_grid(1.0, N);
    const auto k = opid::flipped_identity_kernel(fn, 1.0);

    struct Case {
      std::string name;
      std::function<opid::MatrixXcd(opid::Exec)> run;
    };
    const std::vector<Case> cases = {
        {"kernel_samples",
         [&](opid::Exec e) { return opid::kernel_samples(fn, grid, opid::BuildOptions{opid::kKernelTolerance, e}); }},
        {"lemma_operator", [&](opid::Exec e) { return opid::build_lemma_operator(phi, phi_hat, grid, e).matrix; }},
        {"T_pnid", [&](opid::Exec e) { return opid::build_T_pnid(k, grid, e).matrix; }},
    };
    for (const auto& c : cases) {
      opid::MatrixXcd serial, parallel;
      const double ts = seconds([&] { serial = c.run(opid::Exec::serial); });
      const double tp = seconds([&] { parallel = c.run(opid::Exec::parallel); });
      std::printf("%-16s %6d %12.4f %12.4f %8.2f %12.3g\n", c.name.c_str(), N, ts, tp, ts / tp,
                  (serial - parallel).cwiseAbs().maxCoeff());
    }
  }
}
