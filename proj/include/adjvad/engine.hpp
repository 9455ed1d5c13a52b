#pragma once

// Batched forward/backward evaluation of the MLP over all pixels of one frame.
// Pixels are processed in fixed-size row chunks in a fixed order, so results
// are bit-reproducible for a given kernel backend. Activations from the last
// evaluate() are cached (up to a memory budget) for gradient().

#include <cstddef>
#include <span>
#include <vector>

#include "adjvad/input.hpp"
#include "adjvad/mlp.hpp"
#include "adjvad/tensor.hpp"

namespace adjvad {

template <typename T>
class ReconstructionEngine {
 public:
  static constexpr std::size_t kDefaultChunkRows = 1020;
  static constexpr std::size_t kDefaultCacheBytes = std::size_t{768} << 20;

  explicit ReconstructionEngine(const InputTensor& input,
                                std::size_t chunk_rows = kDefaultChunkRows,
                                std::size_t cache_bytes = kDefaultCacheBytes);

  std::size_t pixels() const { return pixels_; }
  std::size_t input_dim() const { return input_dim_; }

  void set_target(const Plane& target);

  /// Forward pass over every pixel. Returns the MSE against the target, or 0
  /// when no target is set. Throws NumericError on non-finite output.
  double evaluate(const MlpParams<T>& params);

  /// Accumulates into grad (length P, overwritten) the gradient of
  /// coef * 0.5 * sum_p (y_p - target_p)^2. Must follow evaluate() with the
  /// same params; coef = 2 / N gives the gradient of the MSE.
  void gradient(const MlpParams<T>& params, T coef, std::span<T> grad);

  std::span<const T> reconstruction() const { return output_; }
  Plane reconstruction_plane() const;
  /// Squared error of the last evaluate(), in double precision.
  Plane error_map() const;

 private:
  struct ChunkCache {
    std::vector<std::vector<T>> act;   // per hidden layer, rows x width
    std::vector<std::vector<T>> dact;  // omega * cos(omega * z)
  };

  void forward_chunk(const MlpParams<T>& params, std::size_t chunk,
                     ChunkCache& cache, bool with_derivative);
  void ensure_shapes(const MlpParams<T>& params);

  std::size_t pixels_ = 0;
  std::size_t input_dim_ = 0;
  std::size_t height_ = 0, width_ = 0;
  std::size_t chunk_rows_;
  std::size_t cache_bytes_;
  std::vector<T> input_;   // pixels x input_dim
  std::vector<double> target_;
  std::vector<T> output_;  // pixels
  std::vector<ChunkCache> cached_;  // first n chunks
  ChunkCache scratch_;
  std::vector<T> delta_a_, delta_b_, upstream_;
  std::size_t cached_chunks_ = 0;
  std::size_t hidden_layers_ = 0, hidden_width_ = 0;
  bool cache_valid_ = false;
};

extern template class ReconstructionEngine<float>;
extern template class ReconstructionEngine<double>;

}  // namespace adjvad
