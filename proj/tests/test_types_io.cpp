#include <cmath>
#include <cstring>
#include <filesystem>
#include <limits>

#include "doctest.h"
#include "ihqs/io.hpp"
#include "ihqs/types.hpp"
#include "oracles.hpp"

using namespace ihqs;

namespace {

std::filesystem::path temp_path(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() / "ihqs_unit";
  std::filesystem::create_directories(dir);
  return dir / name;
}

std::size_t parse_offset(const std::string& bytes) {
  try {
    decode_raw(bytes);
  } catch (const ParseError& e) {
    return e.offset();
  }
  FAIL("expected a parse error");
  return 0;
}

}  // namespace

TEST_SUITE("types_io") {
  TEST_CASE("image invariants") {
    CHECK_THROWS_AS(Image(3, 3, 0.0), InvalidArgument);
    CHECK_THROWS_AS(Image(3, 3, -1.0), InvalidArgument);
    CHECK_THROWS_AS(Image(3, 3, 1.0, std::vector<double>(8)), DimensionError);
    Image img(4, 2, 0.5);
    CHECK(img.size() == 8);
    img(3, 1) = 2.0;
    CHECK(img.values()[7] == 2.0);
    CHECK(img.max_abs() == 2.0);
  }

  TEST_CASE("sinogram invariants") {
    CHECK_THROWS_AS(Sinogram({0.0, 0.0}, 3), InvalidArgument);
    CHECK_THROWS_AS(Sinogram({0.5, 0.1}, 3), InvalidArgument);
    CHECK_THROWS_AS(Sinogram({7.0}, 3), InvalidArgument);
    CHECK_THROWS_AS(Sinogram({0.0, 1.0}, 3, std::vector<double>(5)), DimensionError);
    Sinogram s({0.0, 1.0}, 3);
    CHECK(s.size() == 6);
    s.view(1)[2] = 4.0;
    CHECK(s.values()[5] == 4.0);
  }

  TEST_CASE("raw header layout") {
    const std::string bytes = encode_raw({2, 1, {1.0, -2.5}});
    REQUIRE(bytes.size() == 32 + 16);
    CHECK(bytes.substr(0, 11) == "CTRAW 2 1\n ");
    CHECK(bytes.substr(10, 22) == std::string(22, ' '));
    // Little-endian IEEE double for 1.0: 00 00 00 00 00 00 f0 3f.
    CHECK(static_cast<unsigned char>(bytes[32 + 6]) == 0xf0);
    CHECK(static_cast<unsigned char>(bytes[32 + 7]) == 0x3f);
    const RawArray back = decode_raw(bytes);
    CHECK(back.width == 2);
    CHECK(back.height == 1);
    CHECK(back.values == std::vector<double>{1.0, -2.5});
  }

  TEST_CASE("raw round trip preserves bits") {
    auto v = oracle::random_vector(35, 3, -1e300, 1e300);
    v[4] = -0.0;
    v[5] = std::numeric_limits<double>::denorm_min();
    const RawArray back = decode_raw(encode_raw({7, 5, v}));
    REQUIRE(back.values.size() == v.size());
    CHECK(std::memcmp(back.values.data(), v.data(), 8 * v.size()) == 0);
  }

  TEST_CASE("raw parse errors carry byte offsets") {
    const std::string good = encode_raw({2, 2, {1, 2, 3, 4}});
    CHECK(parse_offset("CTRAW") == 5);
    CHECK(parse_offset("XTRAW" + good.substr(5)) == 0);

    std::string bad_dim = good;
    bad_dim[6] = 'x';
    CHECK(parse_offset(bad_dim) == 6);

    std::string bad_pad = good;
    bad_pad[20] = '#';
    CHECK(parse_offset(bad_pad) == 20);

    CHECK(parse_offset(good.substr(0, good.size() - 3)) == good.size() - 3);
    CHECK(parse_offset(good + "x") == good.size());

    std::string nan_payload = good;
    const double nan = std::numeric_limits<double>::quiet_NaN();
    std::memcpy(nan_payload.data() + 32 + 16, &nan, 8);
    CHECK(parse_offset(nan_payload) == 48);

    CHECK(parse_offset(encode_raw({1, 1, {0.0}}).replace(6, 1, "0")) == 6);
  }

  TEST_CASE("file round trip and dimension checks") {
    const auto path = temp_path("img.raw").string();
    const Image img = oracle::random_image(5, 3, 11, 0.25);
    save_image(path, img);
    const Image back = load_image(path, 0.25);
    CHECK(back.values() == img.values());
    CHECK(back.width() == 5);

    ScanGeometry g;
    g.width = g.height = 8;
    g.num_views = 3;
    g.num_bins = 5;
    g = make_geometry(g);
    const auto spath = temp_path("sino.raw").string();
    Sinogram s(g.view_angles(), 5, oracle::random_vector(15, 2));
    save_sinogram(spath, s);
    CHECK(load_sinogram(spath, g).values() == s.values());
    g.num_views = 4;
    CHECK_THROWS_AS(load_sinogram(spath, g), DimensionError);
    CHECK_THROWS_AS(read_raw(temp_path("missing.raw").string()), IoError);
  }

  TEST_CASE("pgm preview is windowed to [0, peak]") {
    const auto path = temp_path("p.pgm").string();
    save_pgm16(path, Image(4, 1, 1.0, {-1.0, 0.0, 0.5, 2.0}), 1.0);
    const std::string bytes = read_file(path);
    const std::string header = "P5\n4 1\n65535\n";
    REQUIRE(bytes.size() == header.size() + 8);
    CHECK(bytes.substr(0, header.size()) == header);
    auto px = [&](int i) {
      return (static_cast<unsigned char>(bytes[header.size() + 2 * i]) << 8) |
             static_cast<unsigned char>(bytes[header.size() + 2 * i + 1]);
    };
    CHECK(px(0) == 0);
    CHECK(px(1) == 0);
    CHECK(px(2) == 32768);
    CHECK(px(3) == 65535);
    CHECK_THROWS_AS(save_pgm16(path, Image(1, 1, 1.0), 0.0), InvalidArgument);
  }

  TEST_CASE("initializer file format") {
    const Initializer init = parse_initializer("CTINIT 3\n0 0 0\n0 1 0\n0 0 0\n0.5\n");
    CHECK(init.kind() == Initializer::Kind::CorrectionField);
    CHECK(init.stencil_size() == 3);
    CHECK(init.stencil()[4] == 1.0);
    CHECK(init.bias() == 0.5);
    const Initializer again = parse_initializer(format_initializer(init));
    CHECK(again.stencil() == init.stencil());
    CHECK(again.bias() == init.bias());

    auto offset = [](std::string_view text) -> long {
      try {
        parse_initializer(text);
      } catch (const ParseError& e) {
        return static_cast<long>(e.offset());
      }
      return -1;
    };
    CHECK(offset("CTNIT 1\n0 0\n") == 0);
    CHECK(offset("CTINIT 2\n0 0 0 0 0\n") == 7);
    CHECK(offset("CTINIT 1\n0.5 abc\n") == 13);
    CHECK(offset("CTINIT 1\n0.5\n") == 13);
    CHECK(offset("CTINIT 1\n0.5 1 2\n") == 15);
  }
}
