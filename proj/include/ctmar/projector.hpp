#pragma once

#include <utility>
#include <vector>

#include "ctmar/core.hpp"

namespace ctmar {

/// Frequency-domain ramp filter for one detector row, precomputed over the
/// zero-padded FFT length (>= 2x detector count, rounded to a power of two).
/// The response is real, even-symmetric, and zero at DC.
struct RampFilter {
    enum class Window { Ramp, Hann };

    int n_detectors = 0;
    int padded_size = 0;
    double detector_spacing = 1.0;
    Window window = Window::Ramp;
    std::vector<double> response;  // padded_size bins, physical |f| units (1/mm)

    static RampFilter make(const Geometry& geo, Window w = Window::Ramp);
};

/// Discrete line integrals along every (angle, detector) ray. Linear in the
/// image; Joseph sampling (one step per pixel line of the dominant axis,
/// linear interpolation transverse to it) so that back_project can be an
/// exact transpose.
Sinogram forward_project(const Image& img, const Geometry& geo);

/// Exact numerical adjoint of forward_project (same rays, same sample
/// points, same weights, scatter instead of gather).
Image back_project(const Sinogram& sino, const Geometry& geo);

/// Ramp-filtered back projection. Fan-beam sinograms are rebinned to
/// parallel geometry first; the filter must have been built for `geo`.
Image fbp(const Sinogram& sino, const Geometry& geo, const RampFilter& filt);

/// Vector-Jacobian product of fbp: <fbp(s), y> == <s, ril_vjp(y)> for all
/// s, y. fbp is linear, so this is its transpose applied to the cotangent.
Sinogram ril_vjp(const Image& cotangent, const Geometry& geo, const RampFilter& filt);

/// Detector-axis ramp filtering of every angle row, FFT-based. Exposed for
/// tests; self-adjoint as a linear operator on each row.
Sinogram filter_sinogram(const Sinogram& sino, const RampFilter& filt);

/// Resamples an equiangular fan sinogram onto the parallel geometry used by
/// fbp. Returns the rebinned sinogram together with that geometry.
std::pair<Sinogram, Geometry> rebin_fan_to_parallel(const Sinogram& sino, const Geometry& fan_geo);

/// Parallel geometry that rebin_fan_to_parallel maps onto (identity for
/// parallel input).
Geometry rebinned_geometry(const Geometry& geo);

}  // namespace ctmar
