#include "ctmar/phantom.hpp"

#include <cmath>

namespace ctmar {

void fill_ellipse(Grid2& g, double value, double cx, double cy, double a, double b,
                  double phi_deg) {
    const double phi = phi_deg * M_PI / 180.0;
    const double cp = std::cos(phi), sp = std::sin(phi);
    const int r0 = std::max(0, static_cast<int>(std::floor(cy - std::max(a, b) - 1)));
    const int r1 = std::min(g.rows() - 1, static_cast<int>(std::ceil(cy + std::max(a, b) + 1)));
    const int c0 = std::max(0, static_cast<int>(std::floor(cx - std::max(a, b) - 1)));
    const int c1 = std::min(g.cols() - 1, static_cast<int>(std::ceil(cx + std::max(a, b) + 1)));
    for (int r = r0; r <= r1; ++r) {
        for (int c = c0; c <= c1; ++c) {
            const double x = c - cx, y = r - cy;
            const double u = (x * cp + y * sp) / a;
            const double v = (-x * sp + y * cp) / b;
            if (u * u + v * v <= 1.0) g(r, c) = value;
        }
    }
}

namespace {

struct NormEllipse {
    double value, a, b, x0, y0, phi_deg;  // unit-disc coordinates
};

constexpr NormEllipse kHeadEllipses[] = {
    {1.0, 0.69, 0.92, 0.0, 0.0, 0.0},
    {-0.8, 0.6624, 0.8740, 0.0, -0.0184, 0.0},
    {-0.2, 0.1100, 0.3100, 0.22, 0.0, -18.0},
    {-0.2, 0.1600, 0.4100, -0.22, 0.0, 18.0},
    {0.1, 0.2100, 0.2500, 0.0, 0.35, 0.0},
    {0.1, 0.0460, 0.0460, 0.0, 0.1, 0.0},
    {0.1, 0.0460, 0.0460, 0.0, -0.1, 0.0},
    {0.1, 0.0460, 0.0230, -0.08, -0.605, 0.0},
    {0.1, 0.0230, 0.0230, 0.0, -0.606, 0.0},
    {0.1, 0.0230, 0.0460, 0.06, -0.605, 0.0},
};

// 4x4 sub-pixel area weighting; pixel-center membership staircases the
// edges, which no measured object has
constexpr int kSupersample = 4;

double head_value(double x, double y) {
    double v = 0.0;
    for (const NormEllipse& e : kHeadEllipses) {
        const double phi = e.phi_deg * M_PI / 180.0;
        const double cp = std::cos(phi), sp = std::sin(phi);
        const double xx = x - e.x0, yy = y - e.y0;
        const double u = (xx * cp + yy * sp) / e.a;
        const double w = (-xx * sp + yy * cp) / e.b;
        if (u * u + w * w <= 1.0) v += e.value;
    }
    return v;
}

// 2x2 box downsample; the body phantom is rendered at double resolution so
// its edges carry area weights too
Grid2 downsample2(const Grid2& big) {
    Grid2 out(big.rows() / 2, big.cols() / 2);
    for (int r = 0; r < out.rows(); ++r)
        for (int c = 0; c < out.cols(); ++c)
            out(r, c) = 0.25 * (big(2 * r, 2 * c) + big(2 * r, 2 * c + 1) +
                                big(2 * r + 1, 2 * c) + big(2 * r + 1, 2 * c + 1));
    return out;
}

}  // namespace

Image shepp_logan_hu(int n) {
    Grid2 g(n, n, 0.0);
    const double half = 0.5 * (n - 1);
    const double scale = 0.5 * n;
    for (int r = 0; r < n; ++r) {
        for (int c = 0; c < n; ++c) {
            double acc = 0.0;
            for (int sr = 0; sr < kSupersample; ++sr) {
                for (int sc = 0; sc < kSupersample; ++sc) {
                    const double y = (r - half + (sr + 0.5) / kSupersample - 0.5) / scale;
                    const double x = (c - half + (sc + 0.5) / kSupersample - 0.5) / scale;
                    acc += head_value(x, y);
                }
            }
            g(r, c) = 2000.0 * (acc / (kSupersample * kSupersample)) - 1000.0;
        }
    }
    return Image{std::move(g), ImageUnit::HU};
}

Image random_body_phantom(int n, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> uni(0.0, 1.0);
    const int n2 = 2 * n;
    Grid2 g(n2, n2, -1000.0);
    const double c = 0.5 * (n2 - 1);

    const double body_a = n2 * (0.34 + 0.05 * uni(rng));
    const double body_b = n2 * (0.26 + 0.05 * uni(rng));
    const double body_phi = (uni(rng) - 0.5) * 30.0;
    const double body_hu = 20.0 + 30.0 * uni(rng);
    fill_ellipse(g, body_hu, c, c, body_a, body_b, body_phi);

    // low/medium-density organ regions inside the body
    const int n_organs = 3 + static_cast<int>(uni(rng) * 3);
    for (int i = 0; i < n_organs; ++i) {
        const double oa = n2 * (0.04 + 0.08 * uni(rng));
        const double ob = n2 * (0.04 + 0.08 * uni(rng));
        const double ang = uni(rng) * kTwoPi;
        const double rad = uni(rng) * 0.45;
        const double ox = c + std::cos(ang) * rad * body_a;
        const double oy = c + std::sin(ang) * rad * body_b;
        const double hu = body_hu - 160.0 + 240.0 * uni(rng);
        fill_ellipse(g, hu, ox, oy, oa, ob, uni(rng) * 180.0);
    }

    // bone: a spine-like disc plus a few smaller pieces
    const double sp_r = n2 * (0.030 + 0.015 * uni(rng));
    fill_ellipse(g, 700.0 + 200.0 * uni(rng), c, c + 0.55 * body_b, sp_r, sp_r, 0.0);
    const int n_bones = 2 + static_cast<int>(uni(rng) * 2);
    for (int i = 0; i < n_bones; ++i) {
        const double ang = uni(rng) * kTwoPi;
        const double rad = 0.55 + 0.25 * uni(rng);
        const double ox = c + std::cos(ang) * rad * body_a;
        const double oy = c + std::sin(ang) * rad * body_b;
        const double br = n2 * (0.012 + 0.012 * uni(rng));
        fill_ellipse(g, 400.0 + 400.0 * uni(rng), ox, oy, br, 1.6 * br, uni(rng) * 180.0);
    }

    return Image{downsample2(g), ImageUnit::HU};
}

MetalMask disk_mask(int n, double cx, double cy, double r) {
    Grid2 g(n, n, 0.0);
    fill_ellipse(g, 1.0, cx, cy, r, r, 0.0);
    return MetalMask{std::move(g)};
}

MetalMask random_metal_mask(int n, long long target_px, std::mt19937_64& rng) {
    if (target_px < 1) throw ConfigError("random_metal_mask: target_px must be >= 1");
    std::uniform_real_distribution<double> uni(0.0, 1.0);
    const double c = 0.5 * (n - 1);
    const int k = (target_px >= 40 && uni(rng) < 0.5) ? 2 : 1;

    struct Disc {
        double cx, cy;
    };
    std::vector<Disc> discs(k);
    for (int i = 0; i < k; ++i) {
        const double ang = uni(rng) * kTwoPi;
        const double rad = uni(rng) * 0.30 * n;
        discs[i] = {c + std::cos(ang) * rad, c + std::sin(ang) * rad};
    }

    double r = std::sqrt(static_cast<double>(target_px) / (k * M_PI));
    MetalMask m;
    // a couple of corrections land the rasterized count near the target
    for (int iter = 0; iter < 6; ++iter) {
        Grid2 g(n, n, 0.0);
        for (const Disc& d : discs) fill_ellipse(g, 1.0, d.cx, d.cy, r, r, 0.0);
        m = MetalMask{std::move(g)};
        const long long count = m.pixel_count();
        if (count == 0) {
            r += 1.0;
            continue;
        }
        if (std::abs(count - target_px) <= std::max<long long>(2, target_px / 20)) break;
        r *= std::sqrt(static_cast<double>(target_px) / count);
    }
    return m;
}

}  // namespace ctmar
