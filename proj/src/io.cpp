#include "ihqs/io.hpp"

#include <algorithm>
#include <bit>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>

namespace ihqs {

namespace {

std::uint64_t to_little(std::uint64_t v) {
  if constexpr (std::endian::native == std::endian::big) {
    std::uint64_t r = 0;
    for (int i = 0; i < 8; ++i) r |= ((v >> (8 * i)) & 0xffu) << (8 * (7 - i));
    return r;
  }
  return v;
}

/// Cursor over text that reports byte offsets in parse errors.
class Scanner {
 public:
  explicit Scanner(std::string_view s) : s_(s) {}

  std::size_t pos() const { return pos_; }
  void skip_spaces() {
    while (pos_ < s_.size() && (s_[pos_] == ' ' || s_[pos_] == '\t')) ++pos_;
  }
  void skip_whitespace() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
  }
  void expect(std::string_view lit, const char* what) {
    if (s_.substr(pos_, lit.size()) != lit) throw ParseError(std::string("expected ") + what, pos_);
    pos_ += lit.size();
  }
  std::size_t unsigned_int(const char* what) {
    std::size_t v = 0;
    auto [ptr, ec] = std::from_chars(s_.data() + pos_, s_.data() + s_.size(), v);
    if (ec != std::errc{}) throw ParseError(std::string("expected ") + what, pos_);
    pos_ = static_cast<std::size_t>(ptr - s_.data());
    return v;
  }
  double real(const char* what) {
    skip_whitespace();
    const std::size_t start = pos_;
    while (pos_ < s_.size() && !std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
    if (start == pos_) throw ParseError(std::string("missing ") + what, start);
    const std::string token(s_.substr(start, pos_ - start));
    char* end = nullptr;
    const double v = std::strtod(token.c_str(), &end);
    if (end != token.c_str() + token.size() || !std::isfinite(v))
      throw ParseError(std::string("invalid number for ") + what, start);
    return v;
  }
  bool at_end() const { return pos_ >= s_.size(); }

 private:
  std::string_view s_;
  std::size_t pos_ = 0;
};

}  // namespace

std::string encode_raw(const RawArray& arr) {
  if (arr.values.size() != arr.width * arr.height)
    throw DimensionError("raw array length does not match its dimensions");
  std::string header = "CTRAW " + std::to_string(arr.width) + " " + std::to_string(arr.height) + "\n";
  if (header.size() > kRawHeaderBytes) throw InvalidArgument("raw array dimensions too large");
  header.resize(kRawHeaderBytes, ' ');
  std::string out = header;
  out.resize(kRawHeaderBytes + 8 * arr.values.size());
  char* dst = out.data() + kRawHeaderBytes;
  for (double v : arr.values) {
    const std::uint64_t bits = to_little(std::bit_cast<std::uint64_t>(v));
    std::memcpy(dst, &bits, 8);
    dst += 8;
  }
  return out;
}

RawArray decode_raw(std::string_view bytes) {
  if (bytes.size() < kRawHeaderBytes) throw ParseError("truncated CTRAW header", bytes.size());
  Scanner sc(bytes.substr(0, kRawHeaderBytes));
  sc.expect("CTRAW ", "CTRAW magic");
  RawArray arr;
  arr.width = sc.unsigned_int("width");
  sc.expect(" ", "space after width");
  arr.height = sc.unsigned_int("height");
  sc.skip_spaces();
  sc.expect("\n", "newline after dimensions");
  for (std::size_t i = sc.pos(); i < kRawHeaderBytes; ++i)
    if (bytes[i] != ' ') throw ParseError("CTRAW header padding must be spaces", i);
  if (arr.width == 0 || arr.height == 0) throw ParseError("CTRAW dimensions must be positive", 6);

  const std::size_t count = arr.width * arr.height;
  const std::size_t expected = kRawHeaderBytes + 8 * count;
  if (bytes.size() < expected) throw ParseError("truncated CTRAW payload", bytes.size());
  if (bytes.size() > expected) throw ParseError("trailing bytes after CTRAW payload", expected);
  arr.values.resize(count);
  const char* src = bytes.data() + kRawHeaderBytes;
  for (std::size_t i = 0; i < count; ++i) {
    std::uint64_t bits;
    std::memcpy(&bits, src + 8 * i, 8);
    arr.values[i] = std::bit_cast<double>(to_little(bits));
    if (!std::isfinite(arr.values[i]))
      throw ParseError("non-finite value in CTRAW payload", kRawHeaderBytes + 8 * i);
  }
  return arr;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path + " for reading");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, std::string_view bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open " + path + " for writing");
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw IoError("write failed for " + path);
}

RawArray read_raw(const std::string& path) { return decode_raw(read_file(path)); }

void write_raw(const std::string& path, const RawArray& arr) { write_file(path, encode_raw(arr)); }

void save_image(const std::string& path, const Image& img) {
  write_raw(path, {img.width(), img.height(), img.values()});
}

Image load_image(const std::string& path, double pixel_size) {
  RawArray arr = read_raw(path);
  return Image(arr.width, arr.height, pixel_size, std::move(arr.values));
}

void save_sinogram(const std::string& path, const Sinogram& sino) {
  write_raw(path, {sino.num_bins(), sino.num_views(), sino.values()});
}

Sinogram load_sinogram(const std::string& path, const ScanGeometry& geom) {
  RawArray arr = read_raw(path);
  if (arr.width != geom.num_bins || arr.height != geom.num_views)
    throw DimensionError(path + ": sinogram is " + std::to_string(arr.height) + " views x " +
                         std::to_string(arr.width) + " bins, geometry expects " +
                         std::to_string(geom.num_views) + " x " + std::to_string(geom.num_bins));
  return Sinogram(geom.view_angles(), arr.width, std::move(arr.values));
}

void save_pgm16(const std::string& path, const Image& img, double peak) {
  if (!(peak > 0.0)) throw InvalidArgument("pgm peak must be positive");
  std::string out = "P5\n" + std::to_string(img.width()) + " " + std::to_string(img.height()) +
                    "\n65535\n";
  out.reserve(out.size() + 2 * img.size());
  for (double v : img.values()) {
    const double t = std::clamp(v / peak, 0.0, 1.0);
    const auto q = static_cast<std::uint16_t>(std::lround(t * 65535.0));
    out.push_back(static_cast<char>(q >> 8));
    out.push_back(static_cast<char>(q & 0xff));
  }
  write_file(path, out);
}

Initializer parse_initializer(std::string_view text) {
  Scanner sc(text);
  sc.expect("CTINIT ", "CTINIT magic");
  const std::size_t k_at = sc.pos();
  const std::size_t k = sc.unsigned_int("stencil size");
  sc.skip_spaces();
  sc.expect("\n", "newline after stencil size");
  if (k == 0 || k % 2 == 0) throw ParseError("stencil size must be odd and positive", k_at);
  std::vector<double> stencil(k * k);
  for (auto& v : stencil) v = sc.real("stencil value");
  const double bias = sc.real("bias");
  sc.skip_whitespace();
  if (!sc.at_end()) throw ParseError("unexpected content after bias", sc.pos());
  return Initializer::correction_field(k, std::move(stencil), bias);
}

Initializer load_initializer(const std::string& path) { return parse_initializer(read_file(path)); }

std::string format_initializer(const Initializer& init) {
  if (init.kind() != Initializer::Kind::CorrectionField)
    throw InvalidArgument("only correction-field initializers have a file form");
  std::string out = "CTINIT " + std::to_string(init.stencil_size()) + "\n";
  char buf[40];
  for (std::size_t r = 0; r < init.stencil_size(); ++r) {
    for (std::size_t c = 0; c < init.stencil_size(); ++c) {
      std::snprintf(buf, sizeof buf, "%s%.17g", c ? " " : "", init.stencil()[r * init.stencil_size() + c]);
      out += buf;
    }
    out += "\n";
  }
  std::snprintf(buf, sizeof buf, "%.17g\n", init.bias());
  out += buf;
  return out;
}

}  // namespace ihqs
