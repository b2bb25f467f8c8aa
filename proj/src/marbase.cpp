#include "ctmar/marbase.hpp"

#include <algorithm>
#include <cmath>

namespace ctmar {

namespace {

void check_binary(const Sinogram& m_t, const char* who) {
    for (double v : m_t.grid)
        if (v != 0.0 && v != 1.0)
            throw DataError(std::string(who) + ": trace must be exactly 0/1");
}

// Fills bins of a fully-traced angle row by interpolating along the angle
// axis within each detector column.
void fill_row_from_columns(Grid2& out, const Grid2& trace, int row) {
    const int na = out.rows();
    const int nd = out.cols();
    for (int d = 0; d < nd; ++d) {
        int above = -1, below = -1;
        for (int r = row - 1; r >= 0; --r)
            if (trace(r, d) == 0.0) {
                above = r;
                break;
            }
        for (int r = row + 1; r < na; ++r)
            if (trace(r, d) == 0.0) {
                below = r;
                break;
            }
        if (above >= 0 && below >= 0) {
            const double t = static_cast<double>(row - above) / (below - above);
            out(row, d) = out(above, d) + (out(below, d) - out(above, d)) * t;
        } else if (above >= 0) {
            out(row, d) = out(above, d);
        } else if (below >= 0) {
            out(row, d) = out(below, d);
        }
        // column entirely inside the trace: leave the original value, there
        // is no anchor anywhere to interpolate from
    }
}

}  // namespace

InpaintResult li_inpaint(const Sinogram& s_ma, const Sinogram& m_t) {
    if (!s_ma.grid.same_shape(m_t.grid))
        throw DimensionMismatch("li_inpaint: trace does not match sinogram");
    check_binary(m_t, "li_inpaint");

    const int na = s_ma.n_angles();
    const int nd = s_ma.n_detectors();
    InpaintResult res{s_ma, {}};
    Grid2& out = res.s.grid;

    for (int r = 0; r < na; ++r) {
        const double* trow = m_t.grid.row(r);
        double* orow = out.row(r);
        int c = 0;
        bool whole_row = true;
        while (c < nd) {
            if (trow[c] == 0.0) {
                whole_row = false;
                ++c;
                continue;
            }
            int b = c;
            while (b + 1 < nd && trow[b + 1] == 1.0) ++b;
            const int left = c - 1;
            const int right = b + 1;
            const bool has_left = left >= 0;
            const bool has_right = right < nd;
            if (has_left && has_right) {
                const double vl = orow[left];
                const double vr = orow[right];
                for (int i = c; i <= b; ++i) {
                    const double t = static_cast<double>(i - left) / (right - left);
                    orow[i] = vl + (vr - vl) * t;
                }
            } else if (has_left) {
                for (int i = c; i <= b; ++i) orow[i] = orow[left];
            } else if (has_right) {
                for (int i = c; i <= b; ++i) orow[i] = orow[right];
            }
            // neither anchor: whole row is trace, handled below
            c = b + 1;
        }
        if (whole_row) res.fallback_rows.push_back(r);
    }
    for (int r : res.fallback_rows) fill_row_from_columns(out, m_t.grid, r);
    return res;
}

Sinogram dilate_trace(const Sinogram& m_t, int radius) {
    check_binary(m_t, "dilate_trace");
    if (radius < 0) throw ConfigError("dilate_trace: radius must be >= 0");
    const int na = m_t.n_angles();
    const int nd = m_t.n_detectors();
    Sinogram out{Grid2(na, nd, 0.0), SinoUnit::Dimensionless};
    for (int r = 0; r < na; ++r) {
        const double* src = m_t.grid.row(r);
        double* dst = out.grid.row(r);
        for (int d = 0; d < nd; ++d) {
            if (src[d] != 1.0) continue;
            const int lo = std::max(0, d - radius);
            const int hi = std::min(nd - 1, d + radius);
            for (int i = lo; i <= hi; ++i) dst[i] = 1.0;
        }
    }
    return out;
}

namespace {

// Gaussian blur, separable, kernel renormalized at the borders.
Grid2 gaussian_blur(const Grid2& in, double sigma) {
    if (sigma <= 0.0) return in;
    const int radius = std::max(1, static_cast<int>(std::ceil(3.0 * sigma)));
    std::vector<double> k(2 * radius + 1);
    for (int i = -radius; i <= radius; ++i)
        k[i + radius] = std::exp(-0.5 * (i * i) / (sigma * sigma));

    const int rows = in.rows(), cols = in.cols();
    Grid2 tmp(rows, cols), out(rows, cols);
    for (int r = 0; r < rows; ++r) {
        for (int c = 0; c < cols; ++c) {
            double acc = 0.0, wsum = 0.0;
            const int lo = std::max(0, c - radius), hi = std::min(cols - 1, c + radius);
            for (int i = lo; i <= hi; ++i) {
                const double w = k[i - c + radius];
                acc += w * in(r, i);
                wsum += w;
            }
            tmp(r, c) = acc / wsum;
        }
    }
    for (int c = 0; c < cols; ++c) {
        for (int r = 0; r < rows; ++r) {
            double acc = 0.0, wsum = 0.0;
            const int lo = std::max(0, r - radius), hi = std::min(rows - 1, r + radius);
            for (int i = lo; i <= hi; ++i) {
                const double w = k[i - r + radius];
                acc += w * tmp(i, c);
                wsum += w;
            }
            out(r, c) = acc / wsum;
        }
    }
    return out;
}

}  // namespace

PriorImage nmar_prior(const Image& x_ma_hu, const PriorConfig& cfg, const MetalMask* metal) {
    if (x_ma_hu.unit != ImageUnit::HU)
        throw UnitMismatch("nmar_prior: input must be in HU");
    if (!(cfg.air_hu < cfg.bone_hu))
        throw ConfigError("nmar_prior: cutpoints must be ascending");
    if (metal && !metal->grid.same_shape(x_ma_hu.grid))
        throw DimensionMismatch("nmar_prior: metal mask does not match image");

    const double soft_mu = cfg.mu_water;
    const double bone_mu = cfg.bone_mu_scale * cfg.mu_water;
    Grid2 cls(x_ma_hu.height(), x_ma_hu.width());
    const double* src = x_ma_hu.grid.data();
    const double* mm = metal ? metal->grid.data() : nullptr;
    for (size_t i = 0; i < cls.size(); ++i) {
        double v;
        if (mm && mm[i] != 0.0)
            v = soft_mu;
        else if (src[i] < cfg.air_hu)
            v = cfg.air_mu;
        else if (src[i] > cfg.bone_hu)
            v = bone_mu;
        else
            v = soft_mu;
        cls.data()[i] = v;
    }

    Grid2 smooth = gaussian_blur(cls, cfg.smooth_radius);
    const double floor = 1e-6 * cfg.mu_water;
    for (double& v : smooth) v = std::max(v, floor);
    return PriorImage{Image{std::move(smooth), ImageUnit::Attenuation},
                      PriorImage::Provenance::ThresholdSegmented};
}

InpaintResult nmar_inpaint_projected(const Sinogram& s_ma, const Sinogram& m_t,
                                     const Sinogram& prior_sino) {
    if (!s_ma.grid.same_shape(m_t.grid) || !s_ma.grid.same_shape(prior_sino.grid))
        throw DimensionMismatch("nmar_inpaint: shapes do not match");
    check_binary(m_t, "nmar_inpaint");

    // divide guard, scaled to the projection's own magnitude
    std::vector<double> positive;
    positive.reserve(prior_sino.grid.size());
    for (double v : prior_sino.grid)
        if (v > 0.0) positive.push_back(v);
    double eps = 1e-6;
    if (!positive.empty()) {
        auto mid = positive.begin() + positive.size() / 2;
        std::nth_element(positive.begin(), mid, positive.end());
        eps = 1e-6 * *mid;
    }

    Sinogram norm{Grid2(s_ma.n_angles(), s_ma.n_detectors()), SinoUnit::Dimensionless};
    {
        const double* s = s_ma.grid.data();
        const double* p = prior_sino.grid.data();
        double* n = norm.grid.data();
        for (size_t i = 0; i < norm.grid.size(); ++i) n[i] = s[i] / std::max(p[i], eps);
    }

    InpaintResult li = li_inpaint(norm, m_t);

    InpaintResult res{s_ma, std::move(li.fallback_rows)};
    const double* t = m_t.grid.data();
    const double* q = li.s.grid.data();
    const double* p = prior_sino.grid.data();
    double* o = res.s.grid.data();
    for (size_t i = 0; i < res.s.grid.size(); ++i)
        if (t[i] == 1.0) o[i] = q[i] * std::max(p[i], eps);
    return res;
}

InpaintResult nmar_inpaint(const Sinogram& s_ma, const Sinogram& m_t, const PriorImage& prior,
                           const Geometry& geo) {
    if (prior.image.unit != ImageUnit::Attenuation)
        throw UnitMismatch("nmar_inpaint: prior must be in attenuation units");
    Sinogram prior_sino = forward_project(prior.image, geo);
    return nmar_inpaint_projected(s_ma, m_t, prior_sino);
}

}  // namespace ctmar
