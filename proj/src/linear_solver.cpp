#include "ihqs/linear_solver.hpp"

#include <cmath>
#include <string>

namespace ihqs {

CgReport conjugate_gradient(const LinearMap& apply, std::span<const double> rhs,
                            std::span<double> x, const CgSettings& settings) {
  if (!(settings.tol > 0.0)) throw InvalidArgument("cg tolerance must be positive");
  if (settings.max_iter < 0) throw InvalidArgument("cg max_iter must be >= 0");
  if (rhs.size() != x.size()) throw DimensionError("cg: rhs and x sizes differ");
  const std::size_t n = rhs.size();

  const double bnorm = norm2(rhs);
  if (!std::isfinite(bnorm)) throw NumericalError("cg: non-finite right-hand side");
  if (bnorm == 0.0) {
    std::fill(x.begin(), x.end(), 0.0);
    return {0, 0.0, true};
  }

  std::vector<double> r(n), p(n), ap(n);
  apply(x, ap);
  for (std::size_t i = 0; i < n; ++i) r[i] = rhs[i] - ap[i];
  double rs = dot(r, r);
  if (!std::isfinite(rs)) throw NumericalError("cg: non-finite residual at iteration 0");
  if (std::sqrt(rs) <= settings.tol * bnorm) return {0, std::sqrt(rs), true};

  p = r;
  for (int k = 1; k <= settings.max_iter; ++k) {
    apply(p, ap);
    const double pap = dot(p, ap);
    if (!std::isfinite(pap))
      throw NumericalError("cg: non-finite operator product at iteration " + std::to_string(k));
    // Curvature vanished: operator is singular along p (or rounding took over).
    if (!(pap > 0.0)) return {k - 1, std::sqrt(rs), false};
    const double alpha = rs / pap;
    axpy(alpha, p, x);
    axpy(-alpha, ap, r);
    const double rs_new = dot(r, r);
    if (!std::isfinite(rs_new))
      throw NumericalError("cg: non-finite residual at iteration " + std::to_string(k));
    if (std::sqrt(rs_new) <= settings.tol * bnorm) return {k, std::sqrt(rs_new), true};
    const double beta = rs_new / rs;
    for (std::size_t i = 0; i < n; ++i) p[i] = r[i] + beta * p[i];
    rs = rs_new;
  }
  return {settings.max_iter, std::sqrt(rs), false};
}

NormalOperator::NormalOperator(std::optional<ScanGeometry> geom, std::size_t width,
                               std::size_t height, double pixel_size,
                               const std::array<double, 9>& gamma)
    : geom_(std::move(geom)), width_(width), height_(height), pixel_size_(pixel_size), gamma_(gamma) {
  for (double g : gamma_)
    if (!(g >= 0.0) || !std::isfinite(g))
      throw InvalidArgument("normal operator weights must be finite and nonnegative");
  if (geom_) {
    validate(*geom_);
    sino_scratch_.resize(geom_->num_views * geom_->num_bins);
  }
  frame_scratch_.resize(width * height);
}

NormalOperator::NormalOperator(const ScanGeometry& geom, const std::array<double, 9>& gamma)
    : NormalOperator(std::optional<ScanGeometry>(geom), geom.width, geom.height, geom.pixel_size,
                     gamma) {}

NormalOperator NormalOperator::regularization_only(std::size_t width, std::size_t height,
                                                   double pixel_size,
                                                   const std::array<double, 9>& gamma) {
  return NormalOperator(std::nullopt, width, height, pixel_size, gamma);
}

void NormalOperator::apply(std::span<const double> u, std::span<double> out) const {
  const std::size_t n = width_ * height_;
  if (u.size() != n || out.size() != n)
    throw DimensionError("normal operator applied to an image of the wrong size");
  frame_weighted_gram(u, width_, height_, gamma_, out);
  if (geom_) {
    forward_project_into(u, *geom_, sino_scratch_);
    back_project_into(sino_scratch_, *geom_, frame_scratch_);
    for (std::size_t i = 0; i < n; ++i) out[i] += frame_scratch_[i];
  }
}

Image apply_normal_operator(const NormalOperator& op, const Image& u) {
  if (u.width() != op.width() || u.height() != op.height())
    throw DimensionError("normal operator: image dims do not match");
  Image out(op.width(), op.height(), op.pixel_size());
  op.apply(u.data(), out.data());
  return out;
}

std::pair<Image, CgReport> cg_solve(const NormalOperator& op, const Image& rhs, const Image& x0,
                                    const CgSettings& settings) {
  if (rhs.width() != op.width() || rhs.height() != op.height() || !rhs.same_shape(x0))
    throw DimensionError("cg_solve: rhs/x0 dims do not match the operator");
  Image x = x0;
  const LinearMap map = [&op](std::span<const double> in, std::span<double> out) {
    op.apply(in, out);
  };
  const CgReport report = conjugate_gradient(map, rhs.data(), x.data(), settings);
  return {std::move(x), report};
}

Initializer Initializer::correction_field(std::size_t k, std::vector<double> stencil, double bias) {
  if (k == 0 || k % 2 == 0) throw InvalidArgument("initializer stencil size must be odd");
  if (stencil.size() != k * k)
    throw DimensionError("initializer stencil needs " + std::to_string(k * k) + " values");
  if (!all_finite(stencil) || !std::isfinite(bias))
    throw InvalidArgument("initializer values must be finite");
  Initializer init;
  init.kind_ = Kind::CorrectionField;
  init.k_ = k;
  init.stencil_ = std::move(stencil);
  init.bias_ = bias;
  return init;
}

namespace {

long reflect_index(long m, long n) {
  const long period = 2 * n;
  m %= period;
  if (m < 0) m += period;
  return m < n ? m : period - 1 - m;
}

}  // namespace

Image Initializer::correction(const Image& u) const {
  Image out(u.width(), u.height(), u.pixel_size());
  if (kind_ == Kind::Identity) return out;
  const long w = static_cast<long>(u.width());
  const long h = static_cast<long>(u.height());
  const long r = static_cast<long>(k_ / 2);
  for (long y = 0; y < h; ++y) {
    for (long x = 0; x < w; ++x) {
      double acc = bias_;
      for (long dy = -r; dy <= r; ++dy) {
        const long sy = reflect_index(y + dy, h);
        for (long dx = -r; dx <= r; ++dx) {
          const long sx = reflect_index(x + dx, w);
          acc += stencil_[static_cast<std::size_t>((dy + r) * static_cast<long>(k_) + dx + r)] *
                 u.values()[static_cast<std::size_t>(sy * w + sx)];
        }
      }
      out.values()[static_cast<std::size_t>(y * w + x)] = acc;
    }
  }
  return out;
}

Image Initializer::start_point(const Image& u) const {
  if (kind_ == Kind::Identity) return u;
  Image x = correction(u);
  for (std::size_t i = 0; i < x.size(); ++i) x.values()[i] = u.values()[i] + x.values()[i];
  return x;
}

Image u_update_rhs(const Image& atf, const FrameCoeffs& zbar, const std::array<double, 9>& gamma) {
  if (!zbar.includes_lowpass() || zbar.width() != atf.width() || zbar.height() != atf.height())
    throw DimensionError("u-update: coefficient stack must be a full 9-channel stack of image size");
  FrameCoeffs weighted = zbar;
  for (std::size_t c = 0; c < FrameCoeffs::kFullChannels; ++c)
    for (double& v : weighted.channel(c)) v *= gamma[c];
  Image rhs = frame_adjoint(weighted, atf.pixel_size());
  for (std::size_t i = 0; i < rhs.size(); ++i) rhs.values()[i] += atf.values()[i];
  return rhs;
}

std::pair<Image, CgReport> solve_u_update(const Sinogram& f, const FrameCoeffs& zbar,
                                          const Image& u_prev, const Initializer& init,
                                          const NormalOperator& op, const CgSettings& settings) {
  Image atf(op.width(), op.height(), op.pixel_size());
  if (op.geometry()) atf = back_project(f, *op.geometry());
  const Image rhs = u_update_rhs(atf, zbar, op.gamma());
  return cg_solve(op, rhs, init.start_point(u_prev), settings);
}

}  // namespace ihqs
