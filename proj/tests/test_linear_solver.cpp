#include <Eigen/Dense>
#include <cmath>
#include <limits>

#include "doctest.h"
#include "ihqs/linear_solver.hpp"
#include "ihqs/phantom.hpp"
#include "oracles.hpp"

using namespace ihqs;

namespace {

ScanGeometry geometry(std::size_t n, std::size_t views) {
  ScanGeometry g;
  g.beam = BeamType::FanEquiangular;
  g.width = g.height = n;
  g.num_views = views;
  return make_geometry(g);
}

std::array<double, 9> uniform(double g) {
  std::array<double, 9> w;
  w.fill(g);
  return w;
}

Eigen::MatrixXd random_spd(int n, std::uint64_t seed) {
  const auto v = oracle::random_vector(static_cast<std::size_t>(n * n), seed);
  Eigen::MatrixXd b = Eigen::Map<const Eigen::MatrixXd>(v.data(), n, n);
  return b * b.transpose() / n + 0.05 * Eigen::MatrixXd::Identity(n, n);
}

}  // namespace

TEST_SUITE("linear_solver") {
  TEST_CASE("CG matches a dense Cholesky solve") {
    const int n = 50;
    for (std::uint64_t k = 0; k < 5; ++k) {
      const Eigen::MatrixXd m = random_spd(n, k);
      const auto bv = oracle::random_vector(n, 100 + k);
      const Eigen::VectorXd b = Eigen::Map<const Eigen::VectorXd>(bv.data(), n);
      const Eigen::VectorXd ref = m.llt().solve(b);
      const LinearMap apply = [&](std::span<const double> x, std::span<double> y) {
        Eigen::Map<Eigen::VectorXd>(y.data(), n) = m * Eigen::Map<const Eigen::VectorXd>(x.data(), n);
      };
      std::vector<double> x(n, 0.0);
      const CgReport rep = conjugate_gradient(apply, bv, x, {n, 1e-12});
      const Eigen::VectorXd got = Eigen::Map<const Eigen::VectorXd>(x.data(), n);
      CHECK(rep.iterations <= n);
      CHECK((got - ref).norm() <= 1e-6 * ref.norm());
    }
  }

  TEST_CASE("exact start, zero rhs and iteration cap") {
    const int n = 10;
    const Eigen::MatrixXd m = random_spd(n, 9);
    const LinearMap apply = [&](std::span<const double> x, std::span<double> y) {
      Eigen::Map<Eigen::VectorXd>(y.data(), n) = m * Eigen::Map<const Eigen::VectorXd>(x.data(), n);
    };
    const auto bv = oracle::random_vector(n, 1);
    const Eigen::VectorXd sol = m.llt().solve(Eigen::Map<const Eigen::VectorXd>(bv.data(), n));
    std::vector<double> x(sol.data(), sol.data() + n);
    CgReport rep = conjugate_gradient(apply, bv, x, {50, 1e-8});
    CHECK(rep.iterations == 0);
    CHECK(rep.converged);

    std::vector<double> zero_rhs(n, 0.0), y(n, 5.0);
    rep = conjugate_gradient(apply, zero_rhs, y, {50, 1e-8});
    CHECK(rep.converged);
    for (double v : y) CHECK(v == 0.0);

    std::vector<double> z(n, 0.0);
    rep = conjugate_gradient(apply, bv, z, {2, 1e-14});
    CHECK(rep.iterations == 2);
    CHECK_FALSE(rep.converged);
    CHECK(rep.final_residual_norm <= oracle::norm(bv));
  }

  TEST_CASE("non-finite values raise a numerical error") {
    const LinearMap bad = [](std::span<const double> x, std::span<double> y) {
      for (std::size_t i = 0; i < x.size(); ++i) y[i] = x[i] * std::numeric_limits<double>::infinity();
    };
    std::vector<double> b{1.0, 2.0}, x{0.0, 0.0};
    CHECK_THROWS_AS(conjugate_gradient(bad, b, x, {10, 1e-6}), NumericalError);
    std::vector<double> nan_b{std::nan(""), 1.0};
    const LinearMap id = [](std::span<const double> in, std::span<double> out) {
      std::copy(in.begin(), in.end(), out.begin());
    };
    CHECK_THROWS_AS(conjugate_gradient(id, nan_b, x, {10, 1e-6}), NumericalError);
  }

  TEST_CASE("regularization-only operator is a scaled identity") {
    const auto op = NormalOperator::regularization_only(20, 15, 1.0, uniform(2.5));
    const Image u = oracle::random_image(20, 15, 4);
    const Image out = apply_normal_operator(op, u);
    for (std::size_t i = 0; i < u.size(); ++i)
      CHECK(std::abs(out.values()[i] - 2.5 * u.values()[i]) <= 1e-13);

    const auto [x, rep] = cg_solve(op, u, Image(20, 15, 1.0), {50, 1e-10});
    CHECK(rep.iterations <= 2);
    for (std::size_t i = 0; i < u.size(); ++i) CHECK(x.values()[i] == doctest::Approx(u.values()[i] / 2.5));
  }

  TEST_CASE("gamma = 0 leaves the projector normal operator") {
    const ScanGeometry g = geometry(32, 30);
    const NormalOperator op(g, uniform(0.0));
    const Image u = oracle::random_image(32, 32, 5, g.pixel_size);
    const Image expect = back_project(forward_project(u, g), g);
    CHECK(oracle::max_abs_diff(apply_normal_operator(op, u).values(), expect.values()) <= 1e-12 * expect.max_abs());
    for (const auto out = apply_normal_operator(op, Image(32, 32, g.pixel_size)); double v : out.values()) CHECK(v == 0.0);
  }

  TEST_CASE("normal operator is symmetric and positive semidefinite") {
    const ScanGeometry g = geometry(32, 24);
    std::array<double, 9> gamma{0.5, 0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8};
    const NormalOperator op(g, gamma);
    for (std::uint64_t k = 0; k < 5; ++k) {
      const Image u = oracle::random_image(32, 32, 10 + k, g.pixel_size);
      const Image v = oracle::random_image(32, 32, 20 + k, g.pixel_size);
      const Image ou = apply_normal_operator(op, u), ov = apply_normal_operator(op, v);
      const double a = oracle::inner(ou.values(), v.values());
      const double b = oracle::inner(u.values(), ov.values());
      CHECK(std::abs(a - b) <= 1e-10 * oracle::norm(ou.values()) * oracle::norm(v.values()));
      CHECK(oracle::inner(ou.values(), u.values()) >= 0.0);
    }
  }

  TEST_CASE("consistent data and coefficients recover the source image") {
    const ScanGeometry g = geometry(32, 20);
    const Image truth = shepp_logan(32, g.pixel_size);
    const Sinogram f = forward_project(truth, g);
    const FrameCoeffs zbar = frame_decompose(truth);
    const NormalOperator op(g, uniform(50.0));
    const auto [u, rep] = solve_u_update(f, zbar, Image(32, 32, g.pixel_size), Initializer::identity(),
                                         op, {500, 1e-12});
    CHECK(rep.converged);
    CHECK(oracle::max_abs_diff(u.values(), truth.values()) <= 1e-8);
  }

  TEST_CASE("identity and zero-stencil initializers are bitwise identical") {
    const ScanGeometry g = geometry(24, 16);
    const Image prev = oracle::random_image(24, 24, 3, g.pixel_size, 0.0, 1.0);
    const Sinogram f = forward_project(oracle::random_image(24, 24, 4, g.pixel_size, 0.0, 1.0), g);
    const FrameCoeffs zbar = frame_decompose(oracle::random_image(24, 24, 5, g.pixel_size));
    const NormalOperator op(g, uniform(0.7));
    const auto zero = Initializer::correction_field(3, std::vector<double>(9, 0.0), 0.0);
    const auto [a, ra] = solve_u_update(f, zbar, prev, Initializer::identity(), op, {100, 1e-8});
    const auto [b, rb] = solve_u_update(f, zbar, prev, zero, op, {100, 1e-8});
    CHECK(a.values() == b.values());
    CHECK(ra.iterations == rb.iterations);
  }

  TEST_CASE("correction field is a reflect-padded stencil plus bias") {
    const Image u = oracle::random_image(7, 6, 2);
    const auto st = oracle::random_vector(25, 3);
    const auto init = Initializer::correction_field(5, st, 0.25);
    const Image c = init.correction(u);
    for (long y = 0; y < 6; ++y)
      for (long x = 0; x < 7; ++x) {
        double acc = 0.25;
        for (long dy = -2; dy <= 2; ++dy)
          for (long dx = -2; dx <= 2; ++dx)
            acc += st[(dy + 2) * 5 + dx + 2] * u.values()[oracle::mirror(y + dy, 6) * 7 + oracle::mirror(x + dx, 7)];
        CHECK(c.values()[y * 7 + x] == doctest::Approx(acc).epsilon(1e-14));
      }
    const Image s = init.start_point(u);
    for (std::size_t i = 0; i < u.size(); ++i) CHECK(s.values()[i] == u.values()[i] + c.values()[i]);
    CHECK_THROWS_AS(Initializer::correction_field(2, std::vector<double>(4), 0.0), InvalidArgument);
    CHECK_THROWS_AS(Initializer::correction_field(3, std::vector<double>(4), 0.0), DimensionError);
  }

  TEST_CASE("warm start needs no more iterations than a cold start") {
    const ScanGeometry g = geometry(48, 30);
    const Image truth = shepp_logan(48, g.pixel_size);
    const Sinogram f = forward_project(truth, g);
    const FrameCoeffs zbar = frame_decompose(truth);
    const NormalOperator op(g, uniform(0.2));
    const auto [first, r1] =
        solve_u_update(f, zbar, Image(48, 48, g.pixel_size), Initializer::identity(), op, {300, 1e-6});
    // Next outer step: slightly perturbed coefficients, started from the previous solution.
    FrameCoeffs z2 = zbar;
    for (double& v : z2.values()) v *= 0.98;
    const auto [cold, rc] =
        solve_u_update(f, z2, Image(48, 48, g.pixel_size), Initializer::identity(), op, {300, 1e-6});
    const auto [warm, rw] = solve_u_update(f, z2, first, Initializer::identity(), op, {300, 1e-6});
    CHECK(rw.iterations <= rc.iterations);
    CHECK(rw.final_residual_norm >= 0.0);
  }

  TEST_CASE("dimension checks") {
    const auto op = NormalOperator::regularization_only(8, 8, 1.0, uniform(1.0));
    CHECK_THROWS_AS(apply_normal_operator(op, Image(8, 7, 1.0)), DimensionError);
    CHECK_THROWS_AS(cg_solve(op, Image(8, 8, 1.0), Image(7, 8, 1.0), {}), DimensionError);
    CHECK_THROWS_AS(NormalOperator::regularization_only(8, 8, 1.0, uniform(-1.0)), InvalidArgument);
  }
}
