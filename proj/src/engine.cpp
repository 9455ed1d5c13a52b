#include "adjvad/engine.hpp"

#include <algorithm>
#include <cmath>

#include "adjvad/errors.hpp"
#include "adjvad/kernels.hpp"

namespace adjvad {

template <typename T>
ReconstructionEngine<T>::ReconstructionEngine(const InputTensor& input,
                                              std::size_t chunk_rows,
                                              std::size_t cache_bytes)
    : pixels_(input.pixels()),
      input_dim_(input.features.channels),
      height_(input.features.height),
      width_(input.features.width),
      chunk_rows_(std::max<std::size_t>(chunk_rows, 1)),
      cache_bytes_(cache_bytes) {
  if (pixels_ == 0) throw ShapeError("input tensor has no pixels");
  // Channel-major doubles -> pixel-major T.
  input_.resize(pixels_ * input_dim_);
  for (std::size_t ch = 0; ch < input_dim_; ++ch) {
    const auto src = input.features.channel(ch);
    for (std::size_t p = 0; p < pixels_; ++p)
      input_[p * input_dim_ + ch] = static_cast<T>(src[p]);
  }
  output_.resize(pixels_);
}

template <typename T>
void ReconstructionEngine<T>::set_target(const Plane& target) {
  if (target.height != height_ || target.width != width_)
    throw ShapeError("target frame is " + std::to_string(target.height) + "x" +
                     std::to_string(target.width) + ", input is " +
                     std::to_string(height_) + "x" + std::to_string(width_));
  target_ = target.values;
}

template <typename T>
void ReconstructionEngine<T>::ensure_shapes(const MlpParams<T>& params) {
  const MlpArchitecture& a = params.arch();
  if (a.input_dim != input_dim_)
    throw ShapeError("MLP expects " + std::to_string(a.input_dim) +
                     " input channels, tensor has " + std::to_string(input_dim_));
  if (a.hidden_layers == hidden_layers_ && a.hidden_width == hidden_width_) return;

  hidden_layers_ = a.hidden_layers;
  hidden_width_ = a.hidden_width;
  const std::size_t layer_elems = chunk_rows_ * hidden_width_;
  auto make = [&] {
    ChunkCache c;
    c.act.assign(hidden_layers_, std::vector<T>(layer_elems));
    c.dact.assign(hidden_layers_, std::vector<T>(layer_elems));
    return c;
  };
  const std::size_t chunks = (pixels_ + chunk_rows_ - 1) / chunk_rows_;
  const std::size_t per_chunk = 2 * hidden_layers_ * layer_elems * sizeof(T);
  cached_chunks_ = std::min(chunks, cache_bytes_ / std::max<std::size_t>(per_chunk, 1));
  cached_.clear();
  for (std::size_t i = 0; i < cached_chunks_; ++i) cached_.push_back(make());
  scratch_ = make();
  delta_a_.assign(layer_elems, T(0));
  delta_b_.assign(layer_elems, T(0));
  upstream_.assign(chunk_rows_, T(0));
  cache_valid_ = false;
}

template <typename T>
void ReconstructionEngine<T>::forward_chunk(const MlpParams<T>& params,
                                           std::size_t chunk, ChunkCache& cache,
                                           bool with_derivative) {
  const std::size_t r0 = chunk * chunk_rows_;
  const std::size_t rows = std::min(chunk_rows_, pixels_ - r0);
  const auto& shapes = params.layers();
  const T omega = static_cast<T>(params.arch().omega0);
  const T* flat = params.flat().data();

  const T* prev = input_.data() + r0 * input_dim_;
  std::size_t prev_cols = input_dim_;
  for (std::size_t l = 0; l < hidden_layers_; ++l) {
    const LayerShape& s = shapes[l];
    T* z = cache.act[l].data();
    kernels::Gemm<T> g;
    g.m = rows;
    g.n = s.out;
    g.k = prev_cols;
    g.a = prev;
    g.a_rs = static_cast<std::ptrdiff_t>(prev_cols);
    g.a_cs = 1;
    g.b = flat + s.weight_offset;  // B = W^T
    g.b_rs = 1;
    g.b_cs = static_cast<std::ptrdiff_t>(s.in);
    g.c = z;
    g.ldc = static_cast<std::ptrdiff_t>(s.out);
    kernels::gemm(g);
    kernels::bias_sine(z, rows, s.out, flat + s.bias_offset, omega, z,
                       with_derivative ? cache.dact[l].data() : nullptr);
    prev = z;
    prev_cols = s.out;
  }
  const LayerShape& out = shapes.back();
  kernels::dot_rows(prev, rows, prev_cols, flat + out.weight_offset,
                    flat[out.bias_offset], output_.data() + r0);
}

template <typename T>
double ReconstructionEngine<T>::evaluate(const MlpParams<T>& params) {
  if (!params.all_finite()) throw NumericError("MLP parameters contain non-finite values");
  ensure_shapes(params);
  const std::size_t chunks = (pixels_ + chunk_rows_ - 1) / chunk_rows_;
  for (std::size_t c = 0; c < chunks; ++c) {
    ChunkCache& cache = c < cached_chunks_ ? cached_[c] : scratch_;
    forward_chunk(params, c, cache, true);
  }
  cache_valid_ = true;
  for (T y : output_)
    if (!std::isfinite(y)) throw NumericError("MLP output is non-finite");
  if (target_.empty()) return 0.0;
  double sum = 0.0;
  for (std::size_t p = 0; p < pixels_; ++p) {
    const double d = target_[p] - static_cast<double>(output_[p]);
    sum += d * d;
  }
  return sum / static_cast<double>(pixels_);
}

template <typename T>
void ReconstructionEngine<T>::gradient(const MlpParams<T>& params, T coef,
                                       std::span<T> grad) {
  if (!cache_valid_) throw ShapeError("gradient() requires a preceding evaluate()");
  if (target_.empty()) throw ShapeError("gradient() requires a target frame");
  if (grad.size() != params.size())
    throw ShapeError("gradient buffer length does not match parameter count");
  std::fill(grad.begin(), grad.end(), T(0));

  const auto& shapes = params.layers();
  const T* flat = params.flat().data();
  const std::size_t chunks = (pixels_ + chunk_rows_ - 1) / chunk_rows_;

  for (std::size_t c = 0; c < chunks; ++c) {
    const std::size_t r0 = c * chunk_rows_;
    const std::size_t rows = std::min(chunk_rows_, pixels_ - r0);
    ChunkCache* cache = &scratch_;
    if (c < cached_chunks_) {
      cache = &cached_[c];
    } else {
      forward_chunk(params, c, scratch_, true);
    }

    for (std::size_t r = 0; r < rows; ++r)
      upstream_[r] = coef * (output_[r0 + r] - static_cast<T>(target_[r0 + r]));

    // Output layer.
    const LayerShape& out = shapes.back();
    const T* last = cache->act[hidden_layers_ - 1].data();
    kernels::weighted_col_sum(last, rows, out.in, upstream_.data(),
                              grad.data() + out.weight_offset);
    T bias_acc = T(0);
    for (std::size_t r = 0; r < rows; ++r) bias_acc += upstream_[r];
    grad[out.bias_offset] += bias_acc;

    // delta = dL/dz of the last hidden layer.
    T* delta = delta_a_.data();
    T* next = delta_b_.data();
    kernels::outer_scaled(upstream_.data(), rows, flat + out.weight_offset, out.in,
                          cache->dact[hidden_layers_ - 1].data(), delta);

    for (std::size_t l = hidden_layers_; l-- > 0;) {
      const LayerShape& s = shapes[l];
      const T* prev = l == 0 ? input_.data() + r0 * input_dim_ : cache->act[l - 1].data();

      kernels::Gemm<T> gw;  // grad_W += delta^T * prev
      gw.m = s.out;
      gw.n = s.in;
      gw.k = rows;
      gw.a = delta;
      gw.a_rs = 1;
      gw.a_cs = static_cast<std::ptrdiff_t>(s.out);
      gw.b = prev;
      gw.b_rs = static_cast<std::ptrdiff_t>(s.in);
      gw.b_cs = 1;
      gw.beta = T(1);
      gw.c = grad.data() + s.weight_offset;
      gw.ldc = static_cast<std::ptrdiff_t>(s.in);
      kernels::gemm(gw);
      kernels::weighted_col_sum(delta, rows, s.out, static_cast<const T*>(nullptr),
                                grad.data() + s.bias_offset);

      if (l == 0) break;
      kernels::Gemm<T> gx;  // next = (delta * W) .* sin'
      gx.m = rows;
      gx.n = s.in;
      gx.k = s.out;
      gx.a = delta;
      gx.a_rs = static_cast<std::ptrdiff_t>(s.out);
      gx.a_cs = 1;
      gx.b = flat + s.weight_offset;
      gx.b_rs = static_cast<std::ptrdiff_t>(s.in);
      gx.b_cs = 1;
      gx.c = next;
      gx.ldc = static_cast<std::ptrdiff_t>(s.in);
      kernels::gemm(gx);
      kernels::mul_inplace(next, cache->dact[l - 1].data(), rows * s.in);
      std::swap(delta, next);
    }
  }

  for (std::size_t l = 0; l < shapes.size(); ++l) {
    const LayerShape& s = shapes[l];
    for (std::size_t i = s.weight_offset; i < s.bias_offset + s.out; ++i)
      if (!std::isfinite(grad[i]))
        throw NumericError("non-finite gradient in layer " + std::to_string(l));
  }
}

template <typename T>
Plane ReconstructionEngine<T>::reconstruction_plane() const {
  Plane p(height_, width_);
  for (std::size_t i = 0; i < pixels_; ++i) p.values[i] = static_cast<double>(output_[i]);
  return p;
}

template <typename T>
Plane ReconstructionEngine<T>::error_map() const {
  if (target_.empty()) throw ShapeError("error_map() requires a target frame");
  Plane m(height_, width_);
  for (std::size_t i = 0; i < pixels_; ++i) {
    const double d = target_[i] - static_cast<double>(output_[i]);
    m.values[i] = d * d;
  }
  return m;
}

template class ReconstructionEngine<float>;
template class ReconstructionEngine<double>;

}  // namespace adjvad
