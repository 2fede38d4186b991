#pragma once

#include <memory>
#include <stdexcept>
#include <string>

#include "ihqs/ihqs.h"

namespace cli {

struct Deleter {
  void operator()(ihqs_image* p) const { ihqs_image_destroy(p); }
  void operator()(ihqs_sinogram* p) const { ihqs_sinogram_destroy(p); }
  void operator()(ihqs_geometry* p) const { ihqs_geometry_destroy(p); }
  void operator()(ihqs_initializer* p) const { ihqs_initializer_destroy(p); }
  void operator()(ihqs_trace* p) const { ihqs_trace_destroy(p); }
};

using Image = std::unique_ptr<ihqs_image, Deleter>;
using Sinogram = std::unique_ptr<ihqs_sinogram, Deleter>;
using Geometry = std::unique_ptr<ihqs_geometry, Deleter>;
using Initializer = std::unique_ptr<ihqs_initializer, Deleter>;
using Trace = std::unique_ptr<ihqs_trace, Deleter>;

/// A failed library call, carrying its status for exit-code mapping.
struct LibraryError : std::runtime_error {
  LibraryError(ihqs_status s, const std::string& msg) : std::runtime_error(msg), status(s) {}
  ihqs_status status;
};

inline void check(ihqs_status s, const std::string& context) {
  if (s != IHQS_OK) throw LibraryError(s, context + ": " + ihqs_last_error());
}

}  // namespace cli
