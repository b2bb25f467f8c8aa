#include "ctmar/encoding.hpp"

#include <cmath>

namespace ctmar {

namespace {

Grid2 avg_pool_2x2(const Grid2& in) {
    const int rows = (in.rows() + 1) / 2;
    const int cols = (in.cols() + 1) / 2;
    Grid2 out(rows, cols);
    for (int r = 0; r < rows; ++r) {
        for (int c = 0; c < cols; ++c) {
            const int r0 = 2 * r, c0 = 2 * c;
            const int r1 = std::min(r0 + 1, in.rows() - 1);
            const int c1 = std::min(c0 + 1, in.cols() - 1);
            double acc = in(r0, c0);
            int n = 1;
            if (c1 > c0) {
                acc += in(r0, c1);
                ++n;
            }
            if (r1 > r0) {
                acc += in(r1, c0);
                ++n;
                if (c1 > c0) {
                    acc += in(r1, c1);
                    ++n;
                }
            }
            out(r, c) = acc / n;
        }
    }
    return out;
}

}  // namespace

PoolPyramid pool_pyramid(const Sinogram& m_p, int depth) {
    if (depth < 1) throw ConfigError("pool_pyramid: depth must be >= 1");
    const int limit = std::min(m_p.n_angles(), m_p.n_detectors());
    if ((1 << (depth - 1)) > limit)
        throw ConfigError("pool_pyramid: depth too large for sinogram size");

    PoolPyramid pyr;
    pyr.levels.reserve(depth);
    pyr.levels.push_back(m_p.grid);
    for (int k = 1; k < depth; ++k) pyr.levels.push_back(avg_pool_2x2(pyr.levels.back()));
    return pyr;
}

Grid2 PaddedSinogram::interior() const {
    const int rows = grid.rows() - 2 * pad_a;
    const int cols = grid.cols() - 2 * pad_d;
    Grid2 out(rows, cols);
    for (int r = 0; r < rows; ++r)
        for (int c = 0; c < cols; ++c) out(r, c) = grid(r + pad_a, c + pad_d);
    return out;
}

PaddedSinogram periodic_pad(const Sinogram& s, int pad_a, int pad_d, const Geometry& geo,
                            PadMode mode) {
    if (pad_a < 0 || pad_d < 0) throw ConfigError("periodic_pad: pad sizes must be >= 0");
    if (pad_a >= s.n_angles()) throw ConfigError("periodic_pad: pad_a must be < n_angles");
    if (!geo.sino_matches(s))
        throw DimensionMismatch("periodic_pad: sinogram does not match geometry");

    const bool half_turn = std::abs(geo.angle_range - 0.5 * kTwoPi) < 1e-9;
    if (mode == PadMode::Periodic && !geo.full_turn())
        throw ConfigError(
            "periodic_pad: angle axis is only periodic over a full 2*pi turn; "
            "use FlipWrap for half-turn parallel scans");
    if (mode == PadMode::FlipWrap &&
        !(half_turn && geo.beam == BeamModel::Parallel))
        throw ConfigError("periodic_pad: FlipWrap applies to half-turn parallel scans only");

    const int na = s.n_angles();
    const int nd = s.n_detectors();
    PaddedSinogram out;
    out.pad_a = pad_a;
    out.pad_d = pad_d;
    out.grid = Grid2(na + 2 * pad_a, nd + 2 * pad_d, 0.0);

    for (int r = -pad_a; r < na + pad_a; ++r) {
        int src_r = ((r % na) + na) % na;
        bool flip = false;
        if (mode == PadMode::FlipWrap) {
            // S(theta + pi, s) == S(theta, -s)
            const int wraps = static_cast<int>(std::floor(static_cast<double>(r) / na));
            flip = (wraps % 2) != 0;
        }
        double* dst = out.grid.row(r + pad_a) + pad_d;
        const double* src = s.grid.row(src_r);
        if (!flip)
            for (int c = 0; c < nd; ++c) dst[c] = src[c];
        else
            for (int c = 0; c < nd; ++c) dst[c] = src[nd - 1 - c];
    }
    return out;
}

LossBreakdown total_loss(const Sinogram& s_se, const Sinogram& s_gt, const Image& x_se,
                         const Image& x_out, const Image& x_gt, const MetalMask& m,
                         const LossWeights& w) {
    if (!s_se.grid.same_shape(s_gt.grid))
        throw DimensionMismatch("total_loss: sinogram shapes differ");
    if (!x_se.grid.same_shape(x_gt.grid) || !x_out.grid.same_shape(x_gt.grid) ||
        !m.grid.same_shape(x_gt.grid))
        throw DimensionMismatch("total_loss: image shapes differ");
    if (w.se < 0.0 || w.rc < 0.0 || w.ie < 0.0)
        throw ConfigError("total_loss: weights must be nonnegative");

    LossBreakdown out;

    double se_acc = 0.0;
    {
        const double* a = s_se.grid.data();
        const double* b = s_gt.grid.data();
        for (size_t i = 0; i < s_se.grid.size(); ++i) se_acc += std::abs(a[i] - b[i]);
    }
    out.se = w.se * se_acc / static_cast<double>(s_se.grid.size());

    double rc_acc = 0.0, ie_acc = 0.0;
    long long n_free = 0;
    {
        const double* se = x_se.grid.data();
        const double* oe = x_out.grid.data();
        const double* gt = x_gt.grid.data();
        const double* mm = m.grid.data();
        for (size_t i = 0; i < x_gt.grid.size(); ++i) {
            if (mm[i] != 0.0) continue;
            rc_acc += std::abs(se[i] - gt[i]);
            ie_acc += std::abs(oe[i] - gt[i]);
            ++n_free;
        }
    }
    if (n_free > 0) {
        out.rc = w.rc * rc_acc / static_cast<double>(n_free);
        out.ie = w.ie * ie_acc / static_cast<double>(n_free);
    }
    out.total = out.se + out.rc + out.ie;
    return out;
}

}  // namespace ctmar
