#include "selfsim/pgm.hpp"

#include <cctype>
#include <fstream>
#include <iterator>
#include <string>

#include "selfsim/errors.hpp"

namespace selfsim {

namespace {

class HeaderReader {
 public:
  HeaderReader(std::span<const std::uint8_t> bytes, std::size_t start)
      : bytes_(bytes), pos_(start) {}

  std::size_t offset() const noexcept { return pos_; }

  [[noreturn]] void fail(const std::string& what) const {
    throw DataError("pnm: " + what + " at byte " + std::to_string(pos_));
  }

  void skip_space_and_comments() {
    while (pos_ < bytes_.size()) {
      if (bytes_[pos_] == '#') {
        while (pos_ < bytes_.size() && bytes_[pos_] != '\n') ++pos_;
      } else if (std::isspace(bytes_[pos_])) {
        ++pos_;
      } else {
        break;
      }
    }
  }

  long number(const char* what) {
    skip_space_and_comments();
    if (pos_ >= bytes_.size() || !std::isdigit(bytes_[pos_])) {
      fail(std::string("expected ") + what);
    }
    long v = 0;
    while (pos_ < bytes_.size() && std::isdigit(bytes_[pos_])) {
      v = v * 10 + (bytes_[pos_] - '0');
      if (v > 1'000'000) fail(std::string(what) + " too large");
      ++pos_;
    }
    return v;
  }

  // Exactly one whitespace byte separates maxval from the raster.
  void single_space() {
    if (pos_ >= bytes_.size() || !std::isspace(bytes_[pos_])) {
      fail("expected whitespace after maxval");
    }
    ++pos_;
  }

 private:
  std::span<const std::uint8_t> bytes_;
  std::size_t pos_ = 0;
};

}  // namespace

GrayImage decode_pnm(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < 2 || bytes[0] != 'P' || (bytes[1] != '5' && bytes[1] != '6')) {
    throw DataError("pnm: expected magic P5 or P6 at byte 0");
  }
  const bool color = bytes[1] == '6';

  HeaderReader body(bytes, 2);
  const long width = body.number("width");
  const long height = body.number("height");
  const long maxval = body.number("maxval");
  if (width <= 0 || height <= 0) {
    throw DataError("pnm: non-positive dimensions at byte " + std::to_string(body.offset()));
  }
  if (maxval != 255) {
    throw DataError("pnm: unsupported maxval " + std::to_string(maxval) + " (only 255) at byte " +
                    std::to_string(body.offset()));
  }
  body.single_space();
  const std::size_t data_at = body.offset();
  const std::size_t channels = color ? 3 : 1;
  const std::size_t expected = static_cast<std::size_t>(width) * static_cast<std::size_t>(height) * channels;
  const std::size_t actual = bytes.size() - data_at;
  if (actual < expected) {
    throw DataError("pnm: truncated payload: expected " + std::to_string(expected) +
                    " bytes, got " + std::to_string(actual) + " (raster starts at byte " +
                    std::to_string(data_at) + ")");
  }

  std::vector<std::uint8_t> px(static_cast<std::size_t>(width) * static_cast<std::size_t>(height));
  const std::uint8_t* src = bytes.data() + data_at;
  if (!color) {
    std::copy(src, src + px.size(), px.begin());
  } else {
    for (std::size_t i = 0; i < px.size(); ++i) {
      const unsigned r8 = src[3 * i];
      const unsigned g8 = src[3 * i + 1];
      const unsigned b8 = src[3 * i + 2];
      px[i] = static_cast<std::uint8_t>((299 * r8 + 587 * g8 + 114 * b8 + 500) / 1000);
    }
  }
  return GrayImage(static_cast<int>(width), static_cast<int>(height), std::move(px));
}

std::vector<std::uint8_t> encode_pgm(const GrayImage& img) {
  const std::string header =
      "P5\n" + std::to_string(img.width()) + " " + std::to_string(img.height()) + "\n255\n";
  std::vector<std::uint8_t> out(header.begin(), header.end());
  out.insert(out.end(), img.pixels().begin(), img.pixels().end());
  return out;
}

GrayImage load_pgm(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open image " + path.string());
  const std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                        std::istreambuf_iterator<char>());
  try {
    return decode_pnm(bytes);
  } catch (const DataError& e) {
    throw DataError(path.string() + ": " + e.what());
  }
}

void write_pgm(const GrayImage& img, const std::filesystem::path& path) {
  const auto bytes = encode_pgm(img);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write image " + path.string());
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw DataError("failed writing image " + path.string());
}

GrayImage mask_to_image(const BinaryMask& mask) {
  GrayImage img(mask.width(), mask.height());
  for (std::size_t i = 0; i < mask.bits().size(); ++i) {
    img.pixels()[i] = mask.bits()[i] != 0 ? 255 : 0;
  }
  return img;
}

}  // namespace selfsim
