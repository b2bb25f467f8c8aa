#include "ctmar/projector.hpp"

#include <fftw3.h>

#include <cmath>
#include <complex>
#include <mutex>

namespace ctmar {

namespace {

// Joseph ray: the driving axis is the one the ray direction is most aligned
// with; one sample per driven pixel line, linear interpolation along the
// other axis. The transpose scatters with identical weights, so the
// projector/backprojector pair is an exact adjoint by construction.
struct JosephRay {
    bool y_driven = true;  // iterate image rows; false: iterate columns
    double m0 = 0.0;       // transverse pixel coordinate at driven index 0
    double dm = 0.0;       // transverse increment per driven index
    double weight = 0.0;   // path length per step, mm
};

// Line through (ox, oy) with unit direction (dx, dy), in mm.
JosephRay make_joseph(const Geometry& geo, double ox, double oy, double dx, double dy) {
    JosephRay r;
    const double c = 0.5 * (geo.image_size - 1);
    const double p = geo.pixel_size;
    r.y_driven = std::abs(dy) >= std::abs(dx);
    if (r.y_driven) {
        // x as a function of the row index
        r.dm = dx / dy;
        const double x_at_row0 = ox + ((0 - c) * p - oy) * (dx / dy);
        r.m0 = x_at_row0 / p + c;
        r.weight = p / std::abs(dy);
    } else {
        r.dm = dy / dx;
        const double y_at_col0 = oy + ((0 - c) * p - ox) * (dy / dx);
        r.m0 = y_at_col0 / p + c;
        r.weight = p / std::abs(dx);
    }
    return r;
}

JosephRay parallel_ray(const Geometry& geo, double sin_a, double cos_a, int id) {
    const double s = geo.detector_coord(id);
    return make_joseph(geo, s * cos_a, s * sin_a, -sin_a, cos_a);
}

JosephRay fan_ray(const Geometry& geo, double sin_b, double cos_b, double sin_g, double cos_g) {
    const double D = geo.source_distance;
    // direction -(cos(b+g), sin(b+g)), from source towards the FOV
    const double dx = -(cos_b * cos_g - sin_b * sin_g);
    const double dy = -(sin_b * cos_g + cos_b * sin_g);
    return make_joseph(geo, D * cos_b, D * sin_b, dx, dy);
}

inline double joseph_gather(const JosephRay& r, const double* img, int N) {
    double acc = 0.0;
    if (r.y_driven) {
        double m = r.m0;
        for (int k = 0; k < N; ++k, m += r.dm) {
            const int i0 = static_cast<int>(std::floor(m));
            const double f = m - i0;
            const double* row = img + static_cast<size_t>(k) * N;
            if (i0 >= 0 && i0 + 1 < N) {
                acc += row[i0] * (1.0 - f) + row[i0 + 1] * f;
            } else if (i0 == -1) {
                acc += row[0] * f;
            } else if (i0 == N - 1) {
                acc += row[N - 1] * (1.0 - f);
            }
        }
    } else {
        double m = r.m0;
        for (int k = 0; k < N; ++k, m += r.dm) {
            const int i0 = static_cast<int>(std::floor(m));
            const double f = m - i0;
            const double* col = img + k;
            if (i0 >= 0 && i0 + 1 < N) {
                acc += col[static_cast<size_t>(i0) * N] * (1.0 - f) +
                       col[static_cast<size_t>(i0 + 1) * N] * f;
            } else if (i0 == -1) {
                acc += col[0] * f;
            } else if (i0 == N - 1) {
                acc += col[static_cast<size_t>(N - 1) * N] * (1.0 - f);
            }
        }
    }
    return acc * r.weight;
}

inline void joseph_scatter(const JosephRay& r, double* img, int N, double value) {
    const double v = value * r.weight;
    if (r.y_driven) {
        double m = r.m0;
        for (int k = 0; k < N; ++k, m += r.dm) {
            const int i0 = static_cast<int>(std::floor(m));
            const double f = m - i0;
            double* row = img + static_cast<size_t>(k) * N;
            if (i0 >= 0 && i0 + 1 < N) {
                row[i0] += v * (1.0 - f);
                row[i0 + 1] += v * f;
            } else if (i0 == -1) {
                row[0] += v * f;
            } else if (i0 == N - 1) {
                row[N - 1] += v * (1.0 - f);
            }
        }
    } else {
        double m = r.m0;
        for (int k = 0; k < N; ++k, m += r.dm) {
            const int i0 = static_cast<int>(std::floor(m));
            const double f = m - i0;
            double* col = img + k;
            if (i0 >= 0 && i0 + 1 < N) {
                col[static_cast<size_t>(i0) * N] += v * (1.0 - f);
                col[static_cast<size_t>(i0 + 1) * N] += v * f;
            } else if (i0 == -1) {
                col[0] += v * f;
            } else if (i0 == N - 1) {
                col[static_cast<size_t>(N - 1) * N] += v * (1.0 - f);
            }
        }
    }
}

struct AngleTrig {
    double sin_a, cos_a;
};

std::vector<AngleTrig> angle_table(const Geometry& geo) {
    std::vector<AngleTrig> t(geo.n_angles);
    for (int ia = 0; ia < geo.n_angles; ++ia) {
        const double a = geo.angle_of(ia);
        t[ia] = {std::sin(a), std::cos(a)};
    }
    return t;
}

std::vector<AngleTrig> fan_detector_table(const Geometry& geo) {
    std::vector<AngleTrig> t(geo.n_detectors);
    const double dgamma = geo.detector_spacing / geo.source_distance;
    for (int id = 0; id < geo.n_detectors; ++id) {
        const double g = (id - 0.5 * (geo.n_detectors - 1)) * dgamma;
        t[id] = {std::sin(g), std::cos(g)};
    }
    return t;
}

int next_pow2(int n) {
    int p = 1;
    while (p < n) p <<= 1;
    return p;
}

std::mutex g_fftw_planner_mutex;

}  // namespace

Sinogram forward_project(const Image& img, const Geometry& geo) {
    geo.validate();
    if (!geo.image_matches(img))
        throw DimensionMismatch("forward_project: image does not match geometry");
    if (img.unit != ImageUnit::Attenuation)
        throw UnitMismatch("forward_project: image must be in attenuation units");

    const int N = geo.image_size;
    const double* src = img.grid.data();
    Sinogram out{Grid2(geo.n_angles, geo.n_detectors), SinoUnit::LineIntegral};

    const auto angles = angle_table(geo);
    const bool fan = geo.beam == BeamModel::FanEquiangular;
    const auto dets = fan ? fan_detector_table(geo) : std::vector<AngleTrig>{};

    for (int ia = 0; ia < geo.n_angles; ++ia) {
        const auto [sin_a, cos_a] = angles[ia];
        double* orow = out.grid.row(ia);
        for (int id = 0; id < geo.n_detectors; ++id) {
            const JosephRay ray = fan
                ? fan_ray(geo, sin_a, cos_a, dets[id].sin_a, dets[id].cos_a)
                : parallel_ray(geo, sin_a, cos_a, id);
            orow[id] = joseph_gather(ray, src, N);
        }
    }
    return out;
}

Image back_project(const Sinogram& sino, const Geometry& geo) {
    geo.validate();
    if (!geo.sino_matches(sino))
        throw DimensionMismatch("back_project: sinogram does not match geometry");

    const int N = geo.image_size;
    Image out{Grid2(N, N, 0.0), ImageUnit::Attenuation};
    double* dst = out.grid.data();

    const auto angles = angle_table(geo);
    const bool fan = geo.beam == BeamModel::FanEquiangular;
    const auto dets = fan ? fan_detector_table(geo) : std::vector<AngleTrig>{};

    for (int ia = 0; ia < geo.n_angles; ++ia) {
        const auto [sin_a, cos_a] = angles[ia];
        const double* irow = sino.grid.row(ia);
        for (int id = 0; id < geo.n_detectors; ++id) {
            const double v = irow[id];
            if (v == 0.0) continue;
            const JosephRay ray = fan
                ? fan_ray(geo, sin_a, cos_a, dets[id].sin_a, dets[id].cos_a)
                : parallel_ray(geo, sin_a, cos_a, id);
            joseph_scatter(ray, dst, N, v);
        }
    }
    return out;
}

Geometry rebinned_geometry(const Geometry& geo) {
    if (geo.beam == BeamModel::Parallel) return geo;
    Geometry par = geo;
    par.beam = BeamModel::Parallel;
    par.source_distance = 0.0;
    par.angle_range = kTwoPi;
    const double half = 0.5 * (geo.n_detectors - 1);
    const double gamma_max = half * geo.detector_spacing / geo.source_distance;
    par.detector_spacing = geo.source_distance * std::sin(gamma_max) / half;
    return par;
}

std::pair<Sinogram, Geometry> rebin_fan_to_parallel(const Sinogram& sino, const Geometry& geo) {
    geo.validate();
    if (geo.beam != BeamModel::FanEquiangular)
        throw ConfigError("rebin_fan_to_parallel: geometry is not fan beam");
    if (!geo.full_turn())
        throw ConfigError("rebin_fan_to_parallel: fan rebinning requires a full 2*pi turn");
    if (!geo.sino_matches(sino))
        throw DimensionMismatch("rebin_fan_to_parallel: sinogram does not match geometry");

    const Geometry par = rebinned_geometry(geo);
    const double D = geo.source_distance;
    const double dgamma = geo.detector_spacing / D;
    const double dbeta = geo.angle_range / geo.n_angles;
    const double cdet = 0.5 * (geo.n_detectors - 1);
    const int na = geo.n_angles;
    const int nd = geo.n_detectors;

    Sinogram out{Grid2(na, nd), sino.unit};
    for (int it = 0; it < na; ++it) {
        const double theta = par.angle_of(it);
        for (int is = 0; is < nd; ++is) {
            const double s = par.detector_coord(is);
            const double gamma = std::asin(s / D);
            const double beta = theta - gamma;
            // fractional indices; beta wraps cyclically, gamma clamps
            double fb = beta / dbeta;
            fb -= std::floor(fb / na) * na;
            double fg = gamma / dgamma + cdet;
            if (fg < 0.0) fg = 0.0;
            if (fg > nd - 1) fg = nd - 1;
            const int b0 = static_cast<int>(std::floor(fb));
            const int g0 = static_cast<int>(std::floor(fg));
            const double wb = fb - b0;
            const double wg = fg - g0;
            const int b1 = (b0 + 1) % na;
            const int g1 = std::min(g0 + 1, nd - 1);
            out.grid(it, is) = (1.0 - wb) * ((1.0 - wg) * sino.grid(b0, g0) + wg * sino.grid(b0, g1)) +
                               wb * ((1.0 - wg) * sino.grid(b1, g0) + wg * sino.grid(b1, g1));
        }
    }
    return {std::move(out), par};
}

// Transpose of rebin_fan_to_parallel: scatter the parallel-domain cotangent
// back onto fan bins with the interpolation weights of the forward map.
static Sinogram rebin_transpose(const Sinogram& par_cot, const Geometry& geo) {
    const Geometry par = rebinned_geometry(geo);
    const double D = geo.source_distance;
    const double dgamma = geo.detector_spacing / D;
    const double dbeta = geo.angle_range / geo.n_angles;
    const double cdet = 0.5 * (geo.n_detectors - 1);
    const int na = geo.n_angles;
    const int nd = geo.n_detectors;

    Sinogram out{Grid2(na, nd, 0.0), par_cot.unit};
    for (int it = 0; it < na; ++it) {
        const double theta = par.angle_of(it);
        for (int is = 0; is < nd; ++is) {
            const double v = par_cot.grid(it, is);
            if (v == 0.0) continue;
            const double s = par.detector_coord(is);
            const double gamma = std::asin(s / D);
            const double beta = theta - gamma;
            double fb = beta / dbeta;
            fb -= std::floor(fb / na) * na;
            double fg = gamma / dgamma + cdet;
            if (fg < 0.0) fg = 0.0;
            if (fg > nd - 1) fg = nd - 1;
            const int b0 = static_cast<int>(std::floor(fb));
            const int g0 = static_cast<int>(std::floor(fg));
            const double wb = fb - b0;
            const double wg = fg - g0;
            const int b1 = (b0 + 1) % na;
            const int g1 = std::min(g0 + 1, nd - 1);
            out.grid(b0, g0) += v * (1.0 - wb) * (1.0 - wg);
            out.grid(b0, g1) += v * (1.0 - wb) * wg;
            out.grid(b1, g0) += v * wb * (1.0 - wg);
            out.grid(b1, g1) += v * wb * wg;
        }
    }
    return out;
}

RampFilter RampFilter::make(const Geometry& geo, Window w) {
    geo.validate();
    const Geometry par = rebinned_geometry(geo);
    RampFilter f;
    f.n_detectors = par.n_detectors;
    f.detector_spacing = par.detector_spacing;
    f.window = w;
    f.padded_size = next_pow2(2 * par.n_detectors);
    const int L = f.padded_size;
    const double tau = par.detector_spacing;

    // Response = DFT of the band-limited spatial ramp kernel rather than
    // sampled |f|; the naive sampling biases the lowest frequencies.
    std::vector<double> h(L, 0.0);
    h[0] = 1.0 / (4.0 * tau * tau);
    for (int n = 1; n < L / 2; n += 2) {
        const double v = -1.0 / (M_PI * M_PI * n * n * tau * tau);
        h[n] = v;
        h[L - n] = v;
    }

    double* in = fftw_alloc_real(L);
    fftw_complex* spec = fftw_alloc_complex(L / 2 + 1);
    {
        std::lock_guard<std::mutex> lock(g_fftw_planner_mutex);
        fftw_plan plan = fftw_plan_dft_r2c_1d(L, in, spec, FFTW_ESTIMATE);
        for (int i = 0; i < L; ++i) in[i] = h[i];
        fftw_execute(plan);
        fftw_destroy_plan(plan);
    }

    f.response.resize(L);
    for (int k = 0; k <= L / 2; ++k) {
        double r = tau * spec[k][0];  // kernel is even, spectrum is real
        if (r < 0.0) r = 0.0;
        const int keff = k;
        if (w == Window::Hann) r *= 0.5 * (1.0 + std::cos(M_PI * keff / (0.5 * L)));
        f.response[k] = r;
        if (k > 0 && k < L / 2) f.response[L - k] = r;
    }
    f.response[0] = 0.0;
    fftw_free(in);
    fftw_free(spec);
    return f;
}

Sinogram filter_sinogram(const Sinogram& sino, const RampFilter& filt) {
    if (sino.n_detectors() != filt.n_detectors)
        throw DimensionMismatch("filter_sinogram: filter built for a different detector count");
    const int nd = filt.n_detectors;
    const int L = filt.padded_size;
    const int nc = L / 2 + 1;

    double* buf = fftw_alloc_real(L);
    fftw_complex* spec = fftw_alloc_complex(nc);
    fftw_plan fwd, inv;
    {
        // FFTW planning is not thread-safe; execution on private buffers is.
        std::lock_guard<std::mutex> lock(g_fftw_planner_mutex);
        fwd = fftw_plan_dft_r2c_1d(L, buf, spec, FFTW_ESTIMATE);
        inv = fftw_plan_dft_c2r_1d(L, spec, buf, FFTW_ESTIMATE);
    }

    Sinogram out{Grid2(sino.n_angles(), nd), sino.unit};
    const double inv_l = 1.0 / L;
    for (int ia = 0; ia < sino.n_angles(); ++ia) {
        const double* irow = sino.grid.row(ia);
        for (int i = 0; i < nd; ++i) buf[i] = irow[i];
        for (int i = nd; i < L; ++i) buf[i] = 0.0;
        fftw_execute(fwd);
        for (int k = 0; k < nc; ++k) {
            spec[k][0] *= filt.response[k];
            spec[k][1] *= filt.response[k];
        }
        fftw_execute(inv);
        double* orow = out.grid.row(ia);
        for (int i = 0; i < nd; ++i) orow[i] = buf[i] * inv_l;
    }

    {
        std::lock_guard<std::mutex> lock(g_fftw_planner_mutex);
        fftw_destroy_plan(fwd);
        fftw_destroy_plan(inv);
    }
    fftw_free(buf);
    fftw_free(spec);
    return out;
}

namespace {

// Discretization of the inverse Radon normalization: pi/n_angles for the
// angular sum (each ray counted once per half turn), detector_spacing/p^2
// because the bilinear transpose spreads unit mass p^2/detector_spacing.
double fbp_scale(const Geometry& par) {
    return M_PI * par.detector_spacing /
           (par.n_angles * par.pixel_size * par.pixel_size);
}

}  // namespace

Image fbp(const Sinogram& sino, const Geometry& geo, const RampFilter& filt) {
    geo.validate();
    if (geo.beam == BeamModel::FanEquiangular) {
        auto [par_sino, par_geo] = rebin_fan_to_parallel(sino, geo);
        return fbp(par_sino, par_geo, filt);
    }
    if (!geo.sino_matches(sino))
        throw DimensionMismatch("fbp: sinogram does not match geometry");

    Sinogram q = filter_sinogram(sino, filt);
    Image img = back_project(q, geo);
    const double scale = fbp_scale(geo);
    for (double& v : img.grid) v *= scale;
    return img;
}

Sinogram ril_vjp(const Image& cotangent, const Geometry& geo, const RampFilter& filt) {
    geo.validate();
    if (cotangent.width() != geo.image_size || cotangent.height() != geo.image_size)
        throw DimensionMismatch("ril_vjp: cotangent does not match geometry");

    const Geometry par = rebinned_geometry(geo);
    // transpose of (filter; back_project; scale) is (project; filter; scale);
    // the ramp response is real and even, hence self-adjoint per row.
    Image cot{cotangent.grid, ImageUnit::Attenuation};
    Sinogram s = forward_project(cot, par);
    Sinogram q = filter_sinogram(s, filt);
    const double scale = fbp_scale(par);
    for (double& v : q.grid) v *= scale;

    if (geo.beam == BeamModel::FanEquiangular) return rebin_transpose(q, geo);
    return q;
}

}  // namespace ctmar
