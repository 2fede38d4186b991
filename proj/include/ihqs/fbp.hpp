#pragma once

#include "ihqs/projector.hpp"
#include "ihqs/types.hpp"

namespace ihqs {

enum class FilterWindow { RamLak, Hann };

/// Discrete Ram-Lak kernel for sample spacing `spacing` at integer lag n.
double ramlak_tap(long n, double spacing);

/// Convolves every view with the Ram-Lak kernel sampled at the detector
/// spacing. Uses zero-padded FFT products (padding >= 2 * num_bins), so the
/// result is the linear, not circular, convolution. No Δs quadrature factor
/// is applied here.
Sinogram ramp_filter(const Sinogram& sino, const ScanGeometry& geom,
                     FilterWindow window = FilterWindow::RamLak);

/// Filtered backprojection. Parallel: weight pi/num_views. Fan (equiangular):
/// cosine pre-weight, (γ/sin γ)^2 kernel correction, 1/L^2 post-weight over a
/// full 2π scan. Output is not clamped.
Image fbp_reconstruct(const Sinogram& sino, const ScanGeometry& geom,
                      FilterWindow window = FilterWindow::RamLak);

/// FBP clamped to [0, inf), used as the starting point of the iterative solver.
Image fbp_initial_guess(const Sinogram& sino, const ScanGeometry& geom,
                        FilterWindow window = FilterWindow::RamLak);

}  // namespace ihqs
