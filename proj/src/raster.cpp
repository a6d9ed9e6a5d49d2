#include "gradepipe/raster.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <iterator>
#include <string>

namespace gradepipe {

BinaryMask::BinaryMask(int width, int height, bool fill)
    : width_(width), height_(height),
      bits_(static_cast<std::size_t>(std::max(width, 0)) * std::max(height, 0), fill ? 1 : 0) {
  if (width <= 0 || height <= 0) {
    throw Error(Errc::DimensionMismatch, "mask dimensions must be positive");
  }
}

std::size_t BinaryMask::foreground_count() const noexcept {
  return static_cast<std::size_t>(std::count(bits_.begin(), bits_.end(), std::uint8_t{1}));
}

namespace {

// Netpbm header tokens are separated by whitespace; '#' starts a comment
// running to end of line.
class HeaderReader {
 public:
  HeaderReader(const std::vector<char>& bytes, const std::string& path) : bytes_(bytes), path_(path) {}

  std::string magic() {
    if (bytes_.size() < 2) fail("file too short for a magic number");
    pos_ = 2;
    return std::string(bytes_.begin(), bytes_.begin() + 2);
  }

  long number() {
    skip_space_and_comments();
    long value = 0;
    std::size_t digits = 0;
    while (pos_ < bytes_.size() && std::isdigit(static_cast<unsigned char>(bytes_[pos_]))) {
      value = value * 10 + (bytes_[pos_] - '0');
      if (value > 1'000'000'000L) fail("header value out of range");
      ++pos_;
      ++digits;
    }
    if (digits == 0) fail("expected a decimal header field");
    return value;
  }

  /// Exactly one whitespace byte separates maxval from the payload.
  std::size_t payload_offset() {
    if (pos_ >= bytes_.size() || !std::isspace(static_cast<unsigned char>(bytes_[pos_]))) {
      fail("missing whitespace after maxval");
    }
    return pos_ + 1;
  }

 private:
  void skip_space_and_comments() {
    bool any = false;
    while (pos_ < bytes_.size()) {
      const auto c = static_cast<unsigned char>(bytes_[pos_]);
      if (std::isspace(c)) {
        ++pos_;
        any = true;
      } else if (c == '#') {
        while (pos_ < bytes_.size() && bytes_[pos_] != '\n') ++pos_;
        any = true;
      } else {
        break;
      }
    }
    if (!any) fail("header fields must be whitespace separated");
  }

  [[noreturn]] void fail(const std::string& why) const { throw Error(Errc::MalformedHeader, path_ + ": " + why); }

  const std::vector<char>& bytes_;
  std::string path_;
  std::size_t pos_ = 0;
};

}  // namespace

Image8 load_image(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::FileNotFound, path.string());
  const std::vector<char> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());

  HeaderReader header(bytes, path.string());
  const std::string magic = header.magic();
  int channels = 0;
  if (magic == "P5") {
    channels = 1;
  } else if (magic == "P6") {
    channels = 3;
  } else {
    throw Error(Errc::MalformedHeader, path.string() + ": unsupported magic '" + magic + "'");
  }
  const long width = header.number();
  const long height = header.number();
  const long maxval = header.number();
  if (width <= 0 || height <= 0) throw Error(Errc::MalformedHeader, path.string() + ": zero dimension");
  if (maxval != 255) {
    throw Error(Errc::MalformedHeader, path.string() + ": only maxval 255 is supported, got " + std::to_string(maxval));
  }
  const std::size_t offset = header.payload_offset();
  const std::size_t needed = static_cast<std::size_t>(width) * height * channels;
  if (bytes.size() < offset + needed) {
    throw Error(Errc::TruncatedData, path.string() + ": expected " + std::to_string(needed) + " samples, found " +
                                         std::to_string(bytes.size() > offset ? bytes.size() - offset : 0));
  }
  std::vector<std::uint8_t> data(needed);
  std::transform(bytes.begin() + offset, bytes.begin() + offset + needed, data.begin(),
                 [](char c) { return static_cast<std::uint8_t>(c); });
  return Image8(static_cast<int>(width), static_cast<int>(height), channels, std::move(data));
}

void save_image(const Image8& image, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(Errc::IoFailure, "cannot open " + path.string() + " for writing");
  out << (image.channels() == 3 ? "P6" : "P5") << '\n' << image.width() << ' ' << image.height() << "\n255\n";
  const auto samples = image.samples();
  out.write(reinterpret_cast<const char*>(samples.data()), static_cast<std::streamsize>(samples.size()));
  if (!out) throw Error(Errc::IoFailure, "write failed for " + path.string());
}

void save_image(const ImageF& image, const std::filesystem::path& path) { save_image(quantize(image), path); }

std::uint8_t quantize_sample(double value) noexcept {
  if (!(value > 0.0)) return 0;  // also maps NaN to 0
  if (value >= 255.0) return 255;
  return static_cast<std::uint8_t>(std::floor(value + 0.5));
}

ImageF to_real(const Image8& image) {
  const auto src = image.samples();
  std::vector<double> data(src.begin(), src.end());
  return ImageF(image.width(), image.height(), image.channels(), std::move(data));
}

Image8 quantize(const ImageF& image) {
  const auto src = image.samples();
  std::vector<std::uint8_t> data(src.size());
  std::transform(src.begin(), src.end(), data.begin(), quantize_sample);
  return Image8(image.width(), image.height(), image.channels(), std::move(data));
}

ImageF to_gray(const ImageF& rgb) {
  if (rgb.channels() != 3) throw Error(Errc::WrongChannelCount, "to_gray expects 3 channels");
  ImageF gray(rgb.width(), rgb.height(), 1);
  for (int r = 0; r < rgb.height(); ++r) {
    for (int c = 0; c < rgb.width(); ++c) {
      gray.at(r, c) = 0.299 * rgb.at(r, c, 0) + 0.587 * rgb.at(r, c, 1) + 0.114 * rgb.at(r, c, 2);
    }
  }
  return gray;
}

ImageF to_gray(const Image8& rgb) { return to_gray(to_real(rgb)); }

Image8 mask_to_image(const BinaryMask& mask) {
  Image8 out(mask.width(), mask.height(), 1);
  for (int r = 0; r < mask.height(); ++r) {
    for (int c = 0; c < mask.width(); ++c) out.at(r, c) = mask.get(r, c) ? 255 : 0;
  }
  return out;
}

}  // namespace gradepipe
