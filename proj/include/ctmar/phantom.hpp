#pragma once

#include <random>

#include "ctmar/core.hpp"

namespace ctmar {

/// Sets `value` on every pixel whose center lies inside the ellipse.
/// Center/axes in pixel units, rotation in degrees.
void fill_ellipse(Grid2& g, double value, double cx, double cy, double a, double b,
                  double phi_deg);

/// Classic head phantom (high-contrast variant), rendered in HU: air at
/// -1000, skull at +1000.
Image shepp_logan_hu(int n);

/// Synthetic torso slice in HU: soft-tissue body, a couple of low-density
/// regions, bone structures. Deterministic for a given generator state.
Image random_body_phantom(int n, std::mt19937_64& rng);

/// One or two discs totalling roughly target_px pixels, placed inside the
/// central body region.
MetalMask random_metal_mask(int n, long long target_px, std::mt19937_64& rng);

MetalMask disk_mask(int n, double cx, double cy, double r);

}  // namespace ctmar
