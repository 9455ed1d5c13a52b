#pragma once

// Pixel-level MLP with sine activations: every hidden layer computes
// x_k = sin(omega0 * (W_k x_{k-1} + b_k)); the output layer is affine.

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "adjvad/input.hpp"
#include "adjvad/tensor.hpp"

namespace adjvad {

struct MlpArchitecture {
  std::size_t input_dim = 15;
  std::size_t hidden_layers = 4;
  std::size_t hidden_width = 256;
  std::size_t output_dim = 1;
  double omega0 = 30.0;

  /// Throws ConfigError when the architecture is unusable.
  void validate() const;
  std::size_t parameter_count() const;
  bool operator==(const MlpArchitecture&) const = default;
};

/// Position of one affine layer inside the flat parameter vector. Weights are
/// stored out x in row-major, followed by the out biases.
struct LayerShape {
  std::size_t in = 0;
  std::size_t out = 0;
  std::size_t weight_offset = 0;
  std::size_t bias_offset = 0;

  bool operator==(const LayerShape&) const = default;
};

/// Hidden layers first, the output layer last.
std::vector<LayerShape> layer_shapes(const MlpArchitecture& arch);

template <typename T>
class MlpParams {
 public:
  MlpParams() = default;
  MlpParams(MlpArchitecture arch, std::vector<T> flat, std::uint64_t seed = 0);

  const MlpArchitecture& arch() const { return arch_; }
  std::uint64_t seed() const { return seed_; }
  std::span<T> flat() { return values_; }
  std::span<const T> flat() const { return values_; }
  std::size_t size() const { return values_.size(); }
  const std::vector<LayerShape>& layers() const { return layers_; }

  std::span<const T> weights(std::size_t layer) const;
  std::span<const T> bias(std::size_t layer) const;

  bool all_finite() const;

  template <typename U>
  MlpParams<U> cast() const {
    return MlpParams<U>(arch_, std::vector<U>(values_.begin(), values_.end()), seed_);
  }

  bool operator==(const MlpParams&) const = default;

 private:
  MlpArchitecture arch_;
  std::vector<LayerShape> layers_;
  std::vector<T> values_;
  std::uint64_t seed_ = 0;
};

/// First layer U(-1/d, 1/d), later layers U(-sqrt(6/fan_in)/omega0, +...),
/// zero biases. Deterministic in seed.
template <typename T>
MlpParams<T> init_random(const MlpArchitecture& arch, std::uint64_t seed);

/// Reconstructed pixel values for every pixel of the input.
template <typename T>
Plane forward(const MlpParams<T>& params, const InputTensor& input);

/// (target - recon)^2 elementwise.
Plane error_map(const Plane& recon, const Plane& target);

/// Mean of the map, accumulated in pixel order in double precision.
double mse(const Plane& map);

/// Parameter snapshot: little-endian header (magic, version, architecture,
/// seed, count) followed by the parameters as 32-bit floats.
void save_params(const std::filesystem::path& path, const MlpParams<float>& params);
MlpParams<float> load_params(const std::filesystem::path& path);

extern template class MlpParams<float>;
extern template class MlpParams<double>;

}  // namespace adjvad
