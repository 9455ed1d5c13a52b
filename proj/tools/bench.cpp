// Times one adapter iteration (forward, backward, Adam) per kernel backend.
// Usage: adjvad_bench [hidden_width=256] [frame_side=32]

#include <chrono>
#include <cstdio>
#include <random>
#include <string>

#include "adjvad/engine.hpp"
#include "adjvad/grad.hpp"
#include "adjvad/kernels.hpp"

using namespace adjvad;

int main(int argc, char** argv) {
  const std::size_t width = argc > 1 ? std::stoul(argv[1]) : 256;
  const std::size_t side = argc > 2 ? std::stoul(argv[2]) : 32;

  MlpArchitecture arch;
  arch.hidden_width = width;
  std::mt19937 rng(1);
  std::uniform_real_distribution<double> u(-0.5, 0.5);
  InputTensor in;
  in.features = Stack(arch.input_dim, side, side);
  for (double& v : in.features.values) v = u(rng);
  Plane target(side, side);
  for (double& v : target.values) v = u(rng);

  for (auto backend : {kernels::Backend::avx2, kernels::Backend::scalar}) {
    if (!kernels::backend_available(backend)) continue;
    kernels::select_backend(backend);
    MlpParams<float> params = init_random<float>(arch, 1);
    ReconstructionEngine<float> engine(in);
    engine.set_target(target);
    std::vector<float> grad(params.size());
    AdamState<float> adam(params.size(), 1e-4);
    const float coef = 2.0f / static_cast<float>(engine.pixels());
    const int iters = backend == kernels::Backend::avx2 ? 50 : 5;

    const auto t0 = std::chrono::steady_clock::now();
    double eps = 0;
    for (int i = 0; i < iters; ++i) {
      eps = engine.evaluate(params);
      engine.gradient(params, coef, grad);
      adam_step(params, std::span<const float>(grad), adam);
    }
    const double ms =
        std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count() /
        iters;
    const double flops = 6.0 * static_cast<double>(side * side * params.size());
    std::printf("%-6s %8.2f ms/iteration  %6.1f GFLOP/s  mse=%.4g\n",
                std::string(kernels::active().name).c_str(), ms, flops / ms / 1e6, eps);
  }
}
