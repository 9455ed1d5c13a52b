#include "adjvad/ingest.hpp"

#include <png.h>

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iterator>

#include "adjvad/errors.hpp"

namespace adjvad {

namespace fs = std::filesystem;

void validate(const RawFrame& raw) {
  if (raw.channels != 1 && raw.channels != 3)
    throw FormatError("unsupported channel count " + std::to_string(raw.channels));
  if (raw.bit_depth != 8 && raw.bit_depth != 16)
    throw FormatError("unsupported bit depth " + std::to_string(raw.bit_depth));
  if (raw.width < kMinFrameSide || raw.height < kMinFrameSide)
    throw FormatError("frame " + std::to_string(raw.height) + "x" +
                      std::to_string(raw.width) + " is smaller than 16x16");
  if (raw.pixels.size() != raw.width * raw.height * raw.channels)
    throw FormatError("pixel buffer does not match frame dimensions");
}

RawFrame to_grayscale(const RawFrame& raw) {
  if (raw.channels == 1) return raw;
  if (raw.channels != 3)
    throw FormatError("unsupported channel count " + std::to_string(raw.channels));
  RawFrame out{raw.width, raw.height, 1, raw.bit_depth, {}};
  out.pixels.resize(raw.width * raw.height);
  for (std::size_t i = 0; i < out.pixels.size(); ++i) {
    const double y = 0.299 * raw.pixels[3 * i] + 0.587 * raw.pixels[3 * i + 1] +
                     0.114 * raw.pixels[3 * i + 2];
    out.pixels[i] = static_cast<std::uint16_t>(
        std::min<double>(std::lround(y), raw.max_value()));
  }
  return out;
}

namespace detail {

RawFrame bilinear_resample(const RawFrame& frame, std::size_t target_h,
                           std::size_t target_w) {
  if (frame.height == target_h && frame.width == target_w) return frame;
  RawFrame out{target_w, target_h, frame.channels, frame.bit_depth, {}};
  out.pixels.resize(target_w * target_h * frame.channels);

  // Source coordinate of each output sample: (d + 0.5) * scale - 0.5.
  struct Tap {
    std::size_t lo, hi;
    double frac;
  };
  auto taps = [](std::size_t in, std::size_t out_n) {
    std::vector<Tap> t(out_n);
    const double scale = static_cast<double>(in) / static_cast<double>(out_n);
    for (std::size_t d = 0; d < out_n; ++d) {
      double s = (static_cast<double>(d) + 0.5) * scale - 0.5;
      s = std::clamp(s, 0.0, static_cast<double>(in - 1));
      const auto lo = static_cast<std::size_t>(std::floor(s));
      const std::size_t hi = std::min(lo + 1, in - 1);
      t[d] = {lo, hi, s - static_cast<double>(lo)};
    }
    return t;
  };
  const auto rows = taps(frame.height, target_h);
  const auto cols = taps(frame.width, target_w);

  for (std::size_t r = 0; r < target_h; ++r) {
    const Tap& tr = rows[r];
    for (std::size_t c = 0; c < target_w; ++c) {
      const Tap& tc = cols[c];
      for (std::size_t ch = 0; ch < frame.channels; ++ch) {
        const double top = (1.0 - tc.frac) * frame.at(tr.lo, tc.lo, ch) +
                           tc.frac * frame.at(tr.lo, tc.hi, ch);
        const double bottom = (1.0 - tc.frac) * frame.at(tr.hi, tc.lo, ch) +
                              tc.frac * frame.at(tr.hi, tc.hi, ch);
        const double v = (1.0 - tr.frac) * top + tr.frac * bottom;
        out.pixels[(r * target_w + c) * frame.channels + ch] =
            static_cast<std::uint16_t>(
                std::clamp<long>(std::lround(v), 0, frame.max_value()));
      }
    }
  }
  return out;
}

}  // namespace detail

RawFrame resize(const RawFrame& frame, std::size_t target_h, std::size_t target_w) {
  if (target_h < kMinFrameSide || target_w < kMinFrameSide)
    throw ConfigError("resize target " + std::to_string(target_h) + "x" +
                      std::to_string(target_w) + " is below 16x16");
  return detail::bilinear_resample(frame, target_h, target_w);
}

Frame rescale(const RawFrame& frame) {
  if (frame.channels != 1) throw FormatError("rescale expects a single-channel frame");
  Frame out;
  out.values = Plane(frame.height, frame.width);
  const double vmax = frame.max_value();
  for (std::size_t i = 0; i < frame.pixels.size(); ++i)
    out.values.values[i] = static_cast<double>(frame.pixels[i]) / vmax - 0.5;
  return out;
}

RawFrame quantize(const Plane& values, int bit_depth) {
  RawFrame out{values.width, values.height, 1, bit_depth, {}};
  out.pixels.resize(values.size());
  const double vmax = out.max_value();
  for (std::size_t i = 0; i < values.size(); ++i) {
    const double v = std::clamp(values.values[i] + 0.5, 0.0, 1.0) * vmax;
    out.pixels[i] = static_cast<std::uint16_t>(std::lround(v));
  }
  return out;
}

// ---------------------------------------------------------------------------

WindowStream::WindowStream(std::size_t n) : n_(n) {
  if (n < 8 || n % 2 != 0)
    throw ConfigError("window length must be even and at least 8, got " +
                      std::to_string(n));
}

std::optional<FrameWindow> WindowStream::push(Frame frame) {
  if (last_timestep_ && frame.timestep != *last_timestep_ + 1)
    throw StreamError("video " + frame.video_id + ": timestep " +
                      std::to_string(frame.timestep) + " follows " +
                      std::to_string(*last_timestep_));
  last_timestep_ = frame.timestep;
  buffer_.push_back(std::make_shared<const Frame>(std::move(frame)));
  if (buffer_.size() > n_) buffer_.pop_front();
  if (buffer_.size() < n_) return std::nullopt;
  return FrameWindow{{buffer_.begin(), buffer_.end()}};
}

std::vector<FrameWindow> window_stream(const std::vector<Frame>& frames, std::size_t n) {
  WindowStream stream(n);
  std::vector<FrameWindow> out;
  for (const Frame& f : frames)
    if (auto w = stream.push(f)) out.push_back(std::move(*w));
  return out;
}

// ---------------------------------------------------------------------------
// PGM

namespace {

std::vector<char> read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

RawFrame decode_pgm(const std::vector<char>& bytes, const fs::path& path) {
  std::size_t pos = 0;
  auto skip_space = [&] {
    while (pos < bytes.size()) {
      if (bytes[pos] == '#') {
        while (pos < bytes.size() && bytes[pos] != '\n') ++pos;
      } else if (std::isspace(static_cast<unsigned char>(bytes[pos]))) {
        ++pos;
      } else {
        break;
      }
    }
  };
  auto read_uint = [&]() -> unsigned long {
    skip_space();
    if (pos >= bytes.size() || !std::isdigit(static_cast<unsigned char>(bytes[pos])))
      throw FormatError("malformed PGM header in " + path.string());
    unsigned long v = 0;
    while (pos < bytes.size() && std::isdigit(static_cast<unsigned char>(bytes[pos]))) {
      v = v * 10 + static_cast<unsigned long>(bytes[pos] - '0');
      if (v > 1u << 20) throw FormatError("PGM header value too large in " + path.string());
      ++pos;
    }
    return v;
  };

  if (bytes.size() < 2 || bytes[0] != 'P' || bytes[1] != '5')
    throw FormatError("not a binary PGM: " + path.string());
  pos = 2;
  const auto width = read_uint();
  const auto height = read_uint();
  const auto maxval = read_uint();
  if (maxval == 0 || maxval > 65535) throw FormatError("bad PGM maxval in " + path.string());
  ++pos;  // single whitespace byte before the raster

  RawFrame raw{width, height, 1, maxval > 255 ? 16 : 8, {}};
  const std::size_t bytes_per = maxval > 255 ? 2 : 1;
  const std::size_t n = width * height;
  if (bytes.size() < pos + n * bytes_per)
    throw FormatError("truncated PGM raster in " + path.string());
  raw.pixels.resize(n);
  const auto* p = reinterpret_cast<const unsigned char*>(bytes.data() + pos);
  for (std::size_t i = 0; i < n; ++i) {
    raw.pixels[i] = bytes_per == 2
                        ? static_cast<std::uint16_t>((p[2 * i] << 8) | p[2 * i + 1])
                        : p[i];
  }
  return raw;
}

RawFrame decode_png(const fs::path& path) {
  png_image image;
  std::memset(&image, 0, sizeof(image));
  image.version = PNG_IMAGE_VERSION;
  if (!png_image_begin_read_from_file(&image, path.c_str()))
    throw FormatError("cannot decode PNG " + path.string() + ": " + image.message);
  const bool color = (image.format & PNG_FORMAT_FLAG_COLOR) != 0;
  image.format = color ? PNG_FORMAT_RGB : PNG_FORMAT_GRAY;
  RawFrame raw{image.width, image.height, color ? 3u : 1u, 8, {}};
  std::vector<png_byte> buffer(PNG_IMAGE_SIZE(image));
  if (!png_image_finish_read(&image, nullptr, buffer.data(), 0, nullptr)) {
    const std::string msg = image.message;
    png_image_free(&image);
    throw FormatError("cannot decode PNG " + path.string() + ": " + msg);
  }
  raw.pixels.assign(buffer.begin(), buffer.end());
  return raw;
}

std::string lower_ext(const fs::path& p) {
  std::string ext = p.extension().string();
  std::transform(ext.begin(), ext.end(), ext.begin(),
                 [](unsigned char ch) { return static_cast<char>(std::tolower(ch)); });
  return ext;
}

}  // namespace

RawFrame read_image(const fs::path& path) {
  const std::string ext = lower_ext(path);
  if (ext == ".pgm") return decode_pgm(read_file(path), path);
  if (ext == ".png") {
    if (!fs::exists(path)) throw IoError("cannot open " + path.string());
    return decode_png(path);
  }
  throw FormatError("unsupported image extension: " + path.string());
}

void write_pgm(const fs::path& path, const RawFrame& raw) {
  if (raw.channels != 1) throw FormatError("PGM output must be single-channel");
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  out << "P5\n" << raw.width << ' ' << raw.height << '\n' << raw.max_value() << '\n';
  std::vector<unsigned char> bytes;
  bytes.reserve(raw.pixels.size() * (raw.bit_depth == 16 ? 2 : 1));
  for (std::uint16_t v : raw.pixels) {
    if (raw.bit_depth == 16) bytes.push_back(static_cast<unsigned char>(v >> 8));
    bytes.push_back(static_cast<unsigned char>(v & 0xff));
  }
  out.write(reinterpret_cast<const char*>(bytes.data()),
            static_cast<std::streamsize>(bytes.size()));
  if (!out) throw IoError("error writing " + path.string());
}

void write_png(const fs::path& path, const RawFrame& raw) {
  if (raw.bit_depth != 8) throw FormatError("PNG output supports 8-bit samples only");
  if (raw.channels != 1 && raw.channels != 3)
    throw FormatError("PNG output supports gray or RGB");
  png_image image;
  std::memset(&image, 0, sizeof(image));
  image.version = PNG_IMAGE_VERSION;
  image.width = static_cast<png_uint_32>(raw.width);
  image.height = static_cast<png_uint_32>(raw.height);
  image.format = raw.channels == 3 ? PNG_FORMAT_RGB : PNG_FORMAT_GRAY;
  std::vector<png_byte> buffer(raw.pixels.begin(), raw.pixels.end());
  if (!png_image_write_to_file(&image, path.c_str(), 0, buffer.data(), 0, nullptr))
    throw IoError("cannot write PNG " + path.string() + ": " + image.message);
}

std::vector<fs::path> list_frame_files(const fs::path& dir) {
  if (!fs::is_directory(dir)) throw IoError("frame directory not found: " + dir.string());
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (!entry.is_regular_file()) continue;
    const std::string ext = lower_ext(entry.path());
    if (ext == ".pgm" || ext == ".png") files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end(), [](const fs::path& a, const fs::path& b) {
    return a.filename().string() < b.filename().string();
  });
  return files;
}

Frame load_frame(const fs::path& path, std::size_t target_h, std::size_t target_w) {
  RawFrame raw = read_image(path);
  validate(raw);
  return rescale(resize(to_grayscale(raw), target_h, target_w));
}

}  // namespace adjvad
