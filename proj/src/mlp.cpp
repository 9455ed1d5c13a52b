#include "adjvad/mlp.hpp"

#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <random>

#include "adjvad/engine.hpp"
#include "adjvad/errors.hpp"

namespace adjvad {

void MlpArchitecture::validate() const {
  if (input_dim < 3) throw ConfigError("MLP input_dim must be >= 3");
  if (hidden_layers < 1) throw ConfigError("MLP needs at least one hidden layer");
  if (hidden_width < 1) throw ConfigError("MLP hidden_width must be >= 1");
  if (output_dim != 1) throw ConfigError("MLP output_dim must be 1");
  if (!(omega0 > 0.0) || !std::isfinite(omega0)) throw ConfigError("omega0 must be positive");
}

std::vector<LayerShape> layer_shapes(const MlpArchitecture& arch) {
  std::vector<LayerShape> shapes;
  std::size_t offset = 0;
  std::size_t in = arch.input_dim;
  for (std::size_t l = 0; l <= arch.hidden_layers; ++l) {
    const std::size_t out = l == arch.hidden_layers ? arch.output_dim : arch.hidden_width;
    LayerShape s{in, out, offset, offset + in * out};
    offset = s.bias_offset + out;
    shapes.push_back(s);
    in = out;
  }
  return shapes;
}

std::size_t MlpArchitecture::parameter_count() const {
  const auto shapes = layer_shapes(*this);
  return shapes.back().bias_offset + shapes.back().out;
}

template <typename T>
MlpParams<T>::MlpParams(MlpArchitecture arch, std::vector<T> flat, std::uint64_t seed)
    : arch_(arch), layers_(layer_shapes(arch)), values_(std::move(flat)), seed_(seed) {
  arch_.validate();
  if (values_.size() != arch_.parameter_count())
    throw ShapeError("parameter vector has " + std::to_string(values_.size()) +
                     " entries, architecture needs " +
                     std::to_string(arch_.parameter_count()));
}

template <typename T>
std::span<const T> MlpParams<T>::weights(std::size_t layer) const {
  const LayerShape& s = layers_.at(layer);
  return {values_.data() + s.weight_offset, s.in * s.out};
}

template <typename T>
std::span<const T> MlpParams<T>::bias(std::size_t layer) const {
  const LayerShape& s = layers_.at(layer);
  return {values_.data() + s.bias_offset, s.out};
}

template <typename T>
bool MlpParams<T>::all_finite() const {
  for (T v : values_)
    if (!std::isfinite(v)) return false;
  return true;
}

template class MlpParams<float>;
template class MlpParams<double>;

template <typename T>
MlpParams<T> init_random(const MlpArchitecture& arch, std::uint64_t seed) {
  arch.validate();
  const auto shapes = layer_shapes(arch);
  std::vector<T> flat(arch.parameter_count(), T(0));
  std::mt19937_64 rng(seed);
  for (std::size_t l = 0; l < shapes.size(); ++l) {
    const LayerShape& s = shapes[l];
    const double bound = l == 0 ? 1.0 / static_cast<double>(s.in)
                                : std::sqrt(6.0 / static_cast<double>(s.in)) / arch.omega0;
    std::uniform_real_distribution<double> dist(-bound, bound);
    for (std::size_t i = 0; i < s.in * s.out; ++i)
      flat[s.weight_offset + i] = static_cast<T>(dist(rng));
  }
  return MlpParams<T>(arch, std::move(flat), seed);
}

template MlpParams<float> init_random<float>(const MlpArchitecture&, std::uint64_t);
template MlpParams<double> init_random<double>(const MlpArchitecture&, std::uint64_t);

template <typename T>
Plane forward(const MlpParams<T>& params, const InputTensor& input) {
  ReconstructionEngine<T> engine(input);
  engine.evaluate(params);
  return engine.reconstruction_plane();
}

template Plane forward<float>(const MlpParams<float>&, const InputTensor&);
template Plane forward<double>(const MlpParams<double>&, const InputTensor&);

Plane error_map(const Plane& recon, const Plane& target) {
  if (recon.height != target.height || recon.width != target.width)
    throw ShapeError("error_map: reconstruction and target sizes differ");
  Plane m(target.height, target.width);
  for (std::size_t i = 0; i < m.size(); ++i) {
    const double d = target.values[i] - recon.values[i];
    m.values[i] = d * d;
  }
  return m;
}

double mse(const Plane& map) {
  if (map.size() == 0) throw ShapeError("mse of an empty map");
  double sum = 0.0;
  for (double v : map.values) sum += v;
  return sum / static_cast<double>(map.size());
}

// ---------------------------------------------------------------------------
// Snapshots

namespace {

constexpr char kMagic[8] = {'A', 'D', 'J', 'V', 'M', 'L', 'P', '1'};
constexpr std::uint32_t kVersion = 1;

template <typename U>
void put_le(std::ostream& out, U value) {
  unsigned char bytes[sizeof(U)];
  for (std::size_t i = 0; i < sizeof(U); ++i)
    bytes[i] = static_cast<unsigned char>((value >> (8 * i)) & 0xff);
  out.write(reinterpret_cast<const char*>(bytes), sizeof(U));
}

template <typename U>
U get_le(std::istream& in, const std::filesystem::path& path) {
  unsigned char bytes[sizeof(U)];
  if (!in.read(reinterpret_cast<char*>(bytes), sizeof(U)))
    throw FormatError("truncated parameter snapshot " + path.string());
  U v = 0;
  for (std::size_t i = 0; i < sizeof(U); ++i) v |= static_cast<U>(bytes[i]) << (8 * i);
  return v;
}

}  // namespace

void save_params(const std::filesystem::path& path, const MlpParams<float>& params) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  const MlpArchitecture& a = params.arch();
  out.write(kMagic, sizeof(kMagic));
  put_le<std::uint32_t>(out, kVersion);
  put_le<std::uint32_t>(out, static_cast<std::uint32_t>(a.input_dim));
  put_le<std::uint32_t>(out, static_cast<std::uint32_t>(a.hidden_layers));
  put_le<std::uint32_t>(out, static_cast<std::uint32_t>(a.hidden_width));
  put_le<std::uint32_t>(out, static_cast<std::uint32_t>(a.output_dim));
  put_le<std::uint32_t>(out, std::bit_cast<std::uint32_t>(static_cast<float>(a.omega0)));
  put_le<std::uint64_t>(out, params.seed());
  put_le<std::uint64_t>(out, params.size());
  for (float v : params.flat()) put_le<std::uint32_t>(out, std::bit_cast<std::uint32_t>(v));
  if (!out) throw IoError("error writing " + path.string());
}

MlpParams<float> load_params(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  char magic[8];
  if (!in.read(magic, sizeof(magic)) || std::memcmp(magic, kMagic, sizeof(kMagic)) != 0)
    throw FormatError("not a parameter snapshot: " + path.string());
  if (get_le<std::uint32_t>(in, path) != kVersion)
    throw FormatError("unsupported snapshot version in " + path.string());
  MlpArchitecture a;
  a.input_dim = get_le<std::uint32_t>(in, path);
  a.hidden_layers = get_le<std::uint32_t>(in, path);
  a.hidden_width = get_le<std::uint32_t>(in, path);
  a.output_dim = get_le<std::uint32_t>(in, path);
  a.omega0 = std::bit_cast<float>(get_le<std::uint32_t>(in, path));
  const auto seed = get_le<std::uint64_t>(in, path);
  const auto count = get_le<std::uint64_t>(in, path);
  a.validate();
  if (count != a.parameter_count())
    throw FormatError("snapshot parameter count does not match its architecture");
  std::vector<float> flat(count);
  for (auto& v : flat) v = std::bit_cast<float>(get_le<std::uint32_t>(in, path));
  if (in.peek() != std::char_traits<char>::eof())
    throw FormatError("trailing bytes after parameter snapshot in " + path.string());
  return MlpParams<float>(a, std::move(flat), seed);
}

}  // namespace adjvad
