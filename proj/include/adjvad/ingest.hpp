#pragma once

// Frame ingestion: decoding, grayscale conversion, resizing, rescaling to
// [-0.5, 0.5], and grouping of frames into sliding temporal windows.

#include <cstdint>
#include <deque>
#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "adjvad/tensor.hpp"

namespace adjvad {

inline constexpr std::size_t kMinFrameSide = 16;
inline constexpr std::size_t kDefaultWindow = 16;

/// Decoded integer samples, interleaved when channels == 3.
struct RawFrame {
  std::size_t width = 0;
  std::size_t height = 0;
  std::size_t channels = 1;
  int bit_depth = 8;  // 8 or 16
  std::vector<std::uint16_t> pixels;

  std::uint16_t max_value() const { return bit_depth == 16 ? 65535 : 255; }
  std::uint16_t at(std::size_t r, std::size_t c, std::size_t ch = 0) const {
    return pixels[(r * width + c) * channels + ch];
  }
  bool operator==(const RawFrame&) const = default;
};

/// Throws FormatError unless the frame has a supported channel count and bit
/// depth and is at least kMinFrameSide on each side.
void validate(const RawFrame& raw);

struct Frame {
  Plane values;  // every entry in [-0.5, 0.5]
  std::string video_id;
  std::string scene_id;
  std::uint64_t timestep = 0;
};

/// n consecutive frames of one video; back() is the current frame.
struct FrameWindow {
  std::vector<std::shared_ptr<const Frame>> frames;

  std::size_t length() const { return frames.size(); }
  const Frame& current() const { return *frames.back(); }
  const Frame& operator[](std::size_t i) const { return *frames[i]; }
};

/// BT.601 luma, rounded to nearest. Single-channel input is returned as is.
RawFrame to_grayscale(const RawFrame& raw);

/// Bilinear resampling with half-pixel centres and edge clamping; results
/// are rounded to the source integer domain. Identity when sizes match.
RawFrame resize(const RawFrame& frame, std::size_t target_h, std::size_t target_w);

namespace detail {
// resize() without the 16x16 floor on the target.
RawFrame bilinear_resample(const RawFrame& frame, std::size_t target_h,
                           std::size_t target_w);
}  // namespace detail

/// v -> v / v_max - 0.5 with v_max the bit-depth maximum.
Frame rescale(const RawFrame& frame);

/// Inverse of rescale onto the 8- or 16-bit integer domain (rounded, clamped).
RawFrame quantize(const Plane& values, int bit_depth = 8);

/// Sliding-window iterator over one video. push() returns a window once n
/// frames have been seen; timesteps must increase by exactly one.
class WindowStream {
 public:
  explicit WindowStream(std::size_t n = kDefaultWindow);

  std::optional<FrameWindow> push(Frame frame);
  std::size_t window_length() const { return n_; }

 private:
  std::size_t n_;
  std::deque<std::shared_ptr<const Frame>> buffer_;
  std::optional<std::uint64_t> last_timestep_;
};

std::vector<FrameWindow> window_stream(const std::vector<Frame>& frames,
                                       std::size_t n = kDefaultWindow);

// ---------------------------------------------------------------------------
// Image files

/// Reads binary PGM (P5, 8- or 16-bit) or PNG (8-bit grayscale or RGB, alpha
/// stripped, palettes expanded). Throws IoError or FormatError.
RawFrame read_image(const std::filesystem::path& path);

void write_pgm(const std::filesystem::path& path, const RawFrame& raw);
void write_png(const std::filesystem::path& path, const RawFrame& raw);

/// Frame files (.pgm, .png) in a directory, sorted lexicographically by name.
std::vector<std::filesystem::path> list_frame_files(const std::filesystem::path& dir);

/// Decodes, converts, resizes and rescales one file.
Frame load_frame(const std::filesystem::path& path, std::size_t target_h,
                 std::size_t target_w);

}  // namespace adjvad
