#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "ihqs/linear_solver.hpp"
#include "ihqs/projector.hpp"
#include "ihqs/types.hpp"

namespace ihqs {

/// Raw 2D array: a 32-byte ASCII header "CTRAW <width> <height>\n" padded
/// with spaces, followed by width*height little-endian float64 values in
/// row-major order.
struct RawArray {
  std::size_t width = 0;
  std::size_t height = 0;
  std::vector<double> values;
};

inline constexpr std::size_t kRawHeaderBytes = 32;

std::string encode_raw(const RawArray& arr);
/// Throws ParseError with the byte offset of the first violation.
RawArray decode_raw(std::string_view bytes);

RawArray read_raw(const std::string& path);
void write_raw(const std::string& path, const RawArray& arr);

void save_image(const std::string& path, const Image& img);
Image load_image(const std::string& path, double pixel_size);

/// Sinograms are stored with width = num_bins and height = num_views; the
/// angles come from the geometry.
void save_sinogram(const std::string& path, const Sinogram& sino);
Sinogram load_sinogram(const std::string& path, const ScanGeometry& geom);

/// 16-bit binary PGM, values windowed linearly from [0, peak] to [0, 65535].
void save_pgm16(const std::string& path, const Image& img, double peak);

/// "CTINIT <k>\n" followed by k*k stencil values and the bias, whitespace separated.
Initializer parse_initializer(std::string_view text);
Initializer load_initializer(const std::string& path);
std::string format_initializer(const Initializer& init);

std::string read_file(const std::string& path);
void write_file(const std::string& path, std::string_view bytes);

}  // namespace ihqs
