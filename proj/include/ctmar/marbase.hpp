#pragma once

#include <vector>

#include "ctmar/core.hpp"
#include "ctmar/projector.hpp"

namespace ctmar {

/// Prior image for normalized inpainting. Strictly positive everywhere
/// (floored) so sinogram normalization divisions stay finite.
struct PriorImage {
    enum class Provenance { ThresholdSegmented, ExternallySupplied };
    Image image;  // attenuation units
    Provenance provenance = Provenance::ThresholdSegmented;
};

struct InpaintResult {
    Sinogram s;
    /// Angle rows whose every bin was inside the trace; these were filled
    /// along the angle axis instead.
    std::vector<int> fallback_rows;
};

/// Replaces in-trace bins of each angle row by linear interpolation between
/// the nearest out-of-trace neighbors. Off the trace the input is returned
/// bitwise.
InpaintResult li_inpaint(const Sinogram& s_ma, const Sinogram& m_t);

/// Widens the trace by `radius` bins along the detector axis. Used to keep
/// partially corrupted bins from serving as interpolation anchors.
Sinogram dilate_trace(const Sinogram& m_t, int radius);

struct PriorConfig {
    double air_hu = -500.0;   // below this: air class
    double bone_hu = 350.0;   // above this: bone class
    double mu_water = kDefaultMuWater;
    double air_mu = 0.0;
    double bone_mu_scale = 2.0;  // bone value = scale * mu_water
    double smooth_radius = 3.0;  // Gaussian sigma, pixels
};

/// Three-class threshold prior from a corrupted reconstruction. Metal
/// pixels, when a mask is supplied, are treated as soft tissue before
/// smoothing.
PriorImage nmar_prior(const Image& x_ma_hu, const PriorConfig& cfg,
                      const MetalMask* metal = nullptr);

/// Normalized inpainting: divide by the forward-projected prior, linearly
/// interpolate the flattened sinogram, multiply back. Off the trace the
/// input is returned bitwise.
InpaintResult nmar_inpaint(const Sinogram& s_ma, const Sinogram& m_t, const PriorImage& prior,
                           const Geometry& geo);

/// Same, with the prior's projection already computed.
InpaintResult nmar_inpaint_projected(const Sinogram& s_ma, const Sinogram& m_t,
                                     const Sinogram& prior_sino);

}  // namespace ctmar
