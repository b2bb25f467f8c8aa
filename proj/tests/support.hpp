#pragma once

// Shared helpers for the test suites: random grids, inner products, the
// dense-matrix transpose oracle, a naive SSIM reference, image rotation.

#include <cmath>
#include <random>
#include <vector>

#include "ctmar/core.hpp"
#include "ctmar/projector.hpp"

namespace testsup {

using namespace ctmar;

inline Geometry desk_geometry() {
    Geometry g;
    g.image_size = 64;
    g.n_angles = 90;
    g.n_detectors = 65;
    return g;
}

inline Geometry tiny_geometry() {
    Geometry g;
    g.image_size = 16;
    g.n_angles = 20;
    g.n_detectors = 17;
    return g;
}

inline Grid2 random_grid(int rows, int cols, std::mt19937_64& rng, double lo = -1.0,
                         double hi = 1.0) {
    std::uniform_real_distribution<double> u(lo, hi);
    Grid2 g(rows, cols);
    for (double& v : g) v = u(rng);
    return g;
}

inline Image random_image(const Geometry& geo, std::mt19937_64& rng,
                          ImageUnit unit = ImageUnit::Attenuation) {
    return Image{random_grid(geo.image_size, geo.image_size, rng), unit};
}

inline Sinogram random_sinogram(const Geometry& geo, std::mt19937_64& rng) {
    return Sinogram{random_grid(geo.n_angles, geo.n_detectors, rng), SinoUnit::LineIntegral};
}

inline double dot(const Grid2& a, const Grid2& b) {
    double s = 0.0;
    for (size_t i = 0; i < a.size(); ++i) s += a.data()[i] * b.data()[i];
    return s;
}

inline double norm2(const Grid2& a) { return std::sqrt(dot(a, a)); }

inline double max_abs_diff(const Grid2& a, const Grid2& b) {
    double m = 0.0;
    for (size_t i = 0; i < a.size(); ++i)
        m = std::max(m, std::abs(a.data()[i] - b.data()[i]));
    return m;
}

inline double rel_l2_diff(const Grid2& a, const Grid2& b) {
    double num = 0.0, den = 0.0;
    for (size_t i = 0; i < a.size(); ++i) {
        const double d = a.data()[i] - b.data()[i];
        num += d * d;
        den += b.data()[i] * b.data()[i];
    }
    return std::sqrt(num / den);
}

inline bool bitwise_equal(const Grid2& a, const Grid2& b) {
    if (!a.same_shape(b)) return false;
    for (size_t i = 0; i < a.size(); ++i)
        if (a.data()[i] != b.data()[i]) return false;
    return true;
}

// Dense matrix of the forward projector, one column per basis image pixel.
inline std::vector<std::vector<double>> dense_forward_matrix(const Geometry& geo) {
    const int n_pix = geo.image_size * geo.image_size;
    const int n_ray = geo.n_angles * geo.n_detectors;
    std::vector<std::vector<double>> a(n_ray, std::vector<double>(n_pix, 0.0));
    for (int j = 0; j < n_pix; ++j) {
        Image e{Grid2(geo.image_size, geo.image_size, 0.0), ImageUnit::Attenuation};
        e.grid.data()[j] = 1.0;
        const Sinogram col = forward_project(e, geo);
        for (int i = 0; i < n_ray; ++i) a[i][j] = col.grid.data()[i];
    }
    return a;
}

// Plain per-window SSIM evaluation, quadratic cost. Checks the filtered
// implementation on small images.
inline double naive_ssim(const Grid2& a, const Grid2& b) {
    const int rad = 5;
    const double sigma = 1.5, c1 = 1e-4, c2 = 9e-4;
    std::vector<double> k(2 * rad + 1);
    double ks = 0.0;
    for (int i = -rad; i <= rad; ++i) {
        k[i + rad] = std::exp(-0.5 * i * i / (sigma * sigma));
        ks += k[i + rad];
    }
    for (double& v : k) v /= ks;

    double acc = 0.0;
    long long cnt = 0;
    for (int r = rad; r < a.rows() - rad; ++r) {
        for (int c = rad; c < a.cols() - rad; ++c) {
            double ma = 0, mb = 0, ea = 0, eb = 0, eab = 0;
            for (int dr = -rad; dr <= rad; ++dr) {
                for (int dc = -rad; dc <= rad; ++dc) {
                    const double w = k[dr + rad] * k[dc + rad];
                    const double va = a(r + dr, c + dc), vb = b(r + dr, c + dc);
                    ma += w * va;
                    mb += w * vb;
                    ea += w * va * va;
                    eb += w * vb * vb;
                    eab += w * va * vb;
                }
            }
            const double sa = ea - ma * ma, sb = eb - mb * mb, sab = eab - ma * mb;
            acc += ((2 * ma * mb + c1) * (2 * sab + c2)) /
                   ((ma * ma + mb * mb + c1) * (sa + sb + c2));
            ++cnt;
        }
    }
    return acc / cnt;
}

// Bilinear rotation about the grid center, zero outside.
inline Grid2 rotate_bilinear(const Grid2& in, double angle_rad) {
    const int n = in.rows();
    const double c = 0.5 * (n - 1);
    const double ca = std::cos(angle_rad), sa = std::sin(angle_rad);
    Grid2 out(n, n, 0.0);
    for (int r = 0; r < n; ++r) {
        for (int cc = 0; cc < n; ++cc) {
            // source point: rotate backwards
            const double x = cc - c, y = r - c;
            const double sx = ca * x + sa * y + c;
            const double sy = -sa * x + ca * y + c;
            const int ix = static_cast<int>(std::floor(sx));
            const int iy = static_cast<int>(std::floor(sy));
            const double fx = sx - ix, fy = sy - iy;
            double v = 0.0;
            for (int dy = 0; dy <= 1; ++dy) {
                for (int dx = 0; dx <= 1; ++dx) {
                    const int px = ix + dx, py = iy + dy;
                    if (px < 0 || px >= n || py < 0 || py >= n) continue;
                    const double w = (dx ? fx : 1 - fx) * (dy ? fy : 1 - fy);
                    v += w * in(py, px);
                }
            }
            out(r, cc) = v;
        }
    }
    return out;
}

// Smooth test image: a few Gaussian bumps, fully inside the FOV.
inline Image gaussian_blobs(int n) {
    Grid2 g(n, n, 0.0);
    const double c = 0.5 * (n - 1);
    struct Blob {
        double x, y, s, v;
    };
    const Blob blobs[] = {{0.15, 0.0, 0.12, 1.0}, {-0.2, 0.15, 0.08, 0.6}, {0.0, -0.25, 0.1, 0.8}};
    for (int r = 0; r < n; ++r) {
        for (int cc = 0; cc < n; ++cc) {
            const double x = (cc - c) / n, y = (r - c) / n;
            double v = 0.0;
            for (const Blob& b : blobs)
                v += b.v * std::exp(-((x - b.x) * (x - b.x) + (y - b.y) * (y - b.y)) /
                                    (b.s * b.s));
            g(r, cc) = v;
        }
    }
    return Image{std::move(g), ImageUnit::Attenuation};
}

}  // namespace testsup
