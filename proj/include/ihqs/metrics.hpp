#pragma once

#include <utility>

#include "ihqs/types.hpp"

namespace ihqs {

/// 10 log10(peak^2 / MSE); +infinity when the images are identical.
double psnr(const Image& x, const Image& ref, double peak = 1.0);

/// Mean SSIM over all fully-covered 11x11 Gaussian windows (sigma 1.5),
/// C1 = (0.01 peak)^2, C2 = (0.03 peak)^2.
double ssim(const Image& x, const Image& ref, double peak = 1.0);

/// (mean |x - ref|, sqrt(mean (x - ref)^2))
std::pair<double, double> mae_rmse(const Image& x, const Image& ref);

}  // namespace ihqs
