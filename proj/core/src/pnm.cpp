#include "gsift/pnm.hpp"

#include <cctype>
#include <cmath>
#include <fstream>
#include <iterator>
#include <string>
#include <vector>

#include "gsift/error.hpp"

namespace gsift {

namespace {

struct PnmHeader {
  std::string magic;
  int width = 0;
  int height = 0;
  std::size_t payload_offset = 0;
};

std::vector<std::uint8_t> read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::missing_file, path.string());
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

class HeaderReader {
 public:
  HeaderReader(const std::vector<std::uint8_t>& bytes, const std::string& name)
      : bytes_(bytes), name_(name) {}

  std::string magic() {
    if (bytes_.size() < 2) fail("file too short for a magic number");
    pos_ = 2;
    return {static_cast<char>(bytes_[0]), static_cast<char>(bytes_[1])};
  }

  long number() {
    skip_space_and_comments();
    if (pos_ >= bytes_.size() || !std::isdigit(bytes_[pos_])) fail("expected a decimal field");
    long v = 0;
    while (pos_ < bytes_.size() && std::isdigit(bytes_[pos_])) {
      v = v * 10 + (bytes_[pos_] - '0');
      if (v > 1'000'000'000L) fail("header field out of range");
      ++pos_;
    }
    return v;
  }

  std::size_t end_of_header() {
    if (pos_ >= bytes_.size() || !std::isspace(bytes_[pos_])) {
      fail("missing whitespace after maxval");
    }
    return pos_ + 1;
  }

  [[noreturn]] void fail(const std::string& why) const {
    throw Error(Errc::malformed_header, name_ + ": " + why);
  }

 private:
  void skip_space_and_comments() {
    while (pos_ < bytes_.size()) {
      if (std::isspace(bytes_[pos_])) {
        ++pos_;
      } else if (bytes_[pos_] == '#') {
        while (pos_ < bytes_.size() && bytes_[pos_] != '\n') ++pos_;
      } else {
        break;
      }
    }
  }

  const std::vector<std::uint8_t>& bytes_;
  const std::string& name_;
  std::size_t pos_ = 0;
};

PnmHeader parse_header(const std::vector<std::uint8_t>& bytes, const std::string& expected_magic,
                       const std::string& name) {
  HeaderReader reader(bytes, name);
  PnmHeader h;
  h.magic = reader.magic();
  if (h.magic != expected_magic) {
    reader.fail("expected magic " + expected_magic + ", found '" + h.magic + "'");
  }
  const long w = reader.number();
  const long ht = reader.number();
  const long maxval = reader.number();
  if (w < 1 || ht < 1) reader.fail("zero image dimension");
  if (maxval != 255) {
    throw Error(Errc::unsupported_depth, name + ": maxval " + std::to_string(maxval) +
                                             " (only 255 is supported)");
  }
  h.width = static_cast<int>(w);
  h.height = static_cast<int>(ht);
  h.payload_offset = reader.end_of_header();
  return h;
}

void write_file(const std::filesystem::path& path, const std::string& header,
                std::span<const std::uint8_t> payload) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(Errc::io_error, "cannot open for writing: " + path.string());
  out.write(header.data(), static_cast<std::streamsize>(header.size()));
  out.write(reinterpret_cast<const char*>(payload.data()),
            static_cast<std::streamsize>(payload.size()));
  if (!out) throw Error(Errc::io_error, "write failed: " + path.string());
}

}  // namespace

RgbImage load_ppm(const std::filesystem::path& path) {
  const auto bytes = read_file(path);
  const auto h = parse_header(bytes, "P6", path.string());
  const std::size_t need = static_cast<std::size_t>(h.width) * h.height * 3;
  if (bytes.size() - h.payload_offset < need) {
    throw Error(Errc::truncated_payload, path.string() + ": expected " + std::to_string(need) +
                                             " payload bytes, found " +
                                             std::to_string(bytes.size() - h.payload_offset));
  }
  const auto first = bytes.begin() + static_cast<std::ptrdiff_t>(h.payload_offset);
  return RgbImage(h.width, h.height,
                  std::vector<std::uint8_t>(first, first + static_cast<std::ptrdiff_t>(need)));
}

GrayImage load_pgm(const std::filesystem::path& path) {
  const auto bytes = read_file(path);
  const auto h = parse_header(bytes, "P5", path.string());
  const std::size_t need = static_cast<std::size_t>(h.width) * h.height;
  if (bytes.size() - h.payload_offset < need) {
    throw Error(Errc::truncated_payload, path.string() + ": expected " + std::to_string(need) +
                                             " payload bytes, found " +
                                             std::to_string(bytes.size() - h.payload_offset));
  }
  std::vector<double> data(need);
  for (std::size_t i = 0; i < need; ++i) data[i] = bytes[h.payload_offset + i] / 255.0;
  return GrayImage(h.width, h.height, std::move(data));
}

void save_ppm(const RgbImage& img, const std::filesystem::path& path) {
  const std::string header =
      "P6\n" + std::to_string(img.width()) + " " + std::to_string(img.height()) + "\n255\n";
  write_file(path, header, img.data());
}

void save_pgm(const GrayImage& img, const std::filesystem::path& path) {
  const std::string header =
      "P5\n" + std::to_string(img.width()) + " " + std::to_string(img.height()) + "\n255\n";
  std::vector<std::uint8_t> payload(img.size());
  const auto src = img.data();
  for (std::size_t i = 0; i < payload.size(); ++i) {
    payload[i] = static_cast<std::uint8_t>(std::lround(src[i] * 255.0));
  }
  write_file(path, header, payload);
}

GrayImage load_gray_any(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::missing_file, path.string());
  char magic[2] = {0, 0};
  in.read(magic, 2);
  if (magic[0] == 'P' && magic[1] == '5') return load_pgm(path);
  if (magic[0] == 'P' && magic[1] == '6') return to_gray(load_ppm(path));
  throw Error(Errc::malformed_header, path.string() + ": not a P5 or P6 file");
}

}  // namespace gsift
