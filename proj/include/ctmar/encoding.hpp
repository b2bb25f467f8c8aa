#pragma once

#include <vector>

#include "ctmar/core.hpp"

namespace ctmar {

/// Average-pooling pyramid of a mask projection. Level 0 is the input;
/// level k+1 is the stride-2 2x2 mean of level k, edge cells averaging over
/// the valid window only.
struct PoolPyramid {
    std::vector<Grid2> levels;
    int depth() const { return static_cast<int>(levels.size()); }
};

PoolPyramid pool_pyramid(const Sinogram& m_p, int depth);

enum class PadMode {
    Periodic,  // plain cyclic wrap along the angle axis (full-turn scans)
    FlipWrap,  // half-turn parallel scans: wrap with detector axis flipped
};

/// Sinogram padded for convolution: cyclic copies along the angle axis,
/// zeros along the detector axis. The interior is the source bitwise.
struct PaddedSinogram {
    Grid2 grid;
    int pad_a = 0;
    int pad_d = 0;

    Grid2 interior() const;
};

PaddedSinogram periodic_pad(const Sinogram& s, int pad_a, int pad_d, const Geometry& geo,
                            PadMode mode = PadMode::Periodic);

struct LossWeights {
    double se = 1.0;
    double rc = 1.0;
    double ie = 1.0;
};

struct LossBreakdown {
    double total = 0.0;
    double se = 0.0;  // sinogram L1, all bins
    double rc = 0.0;  // reconstruction L1, non-metal pixels
    double ie = 0.0;  // enhanced-image L1, non-metal pixels
};

/// Training objective: weighted L1 on the enhanced sinogram plus masked L1
/// terms on the reconstructed and refined images. Image terms average over
/// non-metal pixels so the magnitude is invariant to metal size.
LossBreakdown total_loss(const Sinogram& s_se, const Sinogram& s_gt, const Image& x_se,
                         const Image& x_out, const Image& x_gt, const MetalMask& m,
                         const LossWeights& w = {});

}  // namespace ctmar
