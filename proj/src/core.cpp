#include "ctmar/core.hpp"

#include <algorithm>

namespace ctmar {

long long MetalMask::pixel_count() const {
    long long n = 0;
    for (double v : grid)
        if (v != 0.0) ++n;
    return n;
}

MetalMask MetalMask::from_grid(Grid2 g) {
    for (double v : g)
        if (v != 0.0 && v != 1.0)
            throw DataError("MetalMask: values must be exactly 0 or 1");
    return MetalMask{std::move(g)};
}

void Geometry::validate() const {
    if (n_angles < 1) throw ConfigError("Geometry: n_angles must be >= 1");
    if (n_detectors < 1) throw ConfigError("Geometry: n_detectors must be >= 1");
    if (image_size < 1) throw ConfigError("Geometry: image_size must be >= 1");
    if (!(detector_spacing > 0.0)) throw ConfigError("Geometry: detector_spacing must be > 0");
    if (!(pixel_size > 0.0)) throw ConfigError("Geometry: pixel_size must be > 0");
    if (!(angle_range > 0.0)) throw ConfigError("Geometry: angle_range must be > 0");
    if (beam == BeamModel::FanEquiangular && !(source_distance > 0.0))
        throw ConfigError("Geometry: fan beam requires source_distance > 0");
}

void Spectrum::validate() const {
    if (energies_kev.empty()) throw ConfigError("Spectrum: no energy bins");
    if (energies_kev.size() != weights.size())
        throw ConfigError("Spectrum: energies and weights differ in length");
    double sum = 0.0;
    for (double w : weights) {
        if (w < 0.0) throw ConfigError("Spectrum: negative weight");
        sum += w;
    }
    if (std::abs(sum - 1.0) > 1e-9)
        throw ConfigError("Spectrum: weights must sum to 1 within 1e-9");
    for (size_t i = 1; i < energies_kev.size(); ++i)
        if (!(energies_kev[i] > energies_kev[i - 1]))
            throw ConfigError("Spectrum: energies must be strictly increasing");
    for (const auto& [name, mat] : materials) {
        if (mat.lambda.size() != energies_kev.size())
            throw ConfigError("Spectrum: material '" + name + "' lambda table does not match energy grid");
        if (!(mat.rho > 0.0))
            throw ConfigError("Spectrum: material '" + name + "' density must be > 0");
        for (double l : mat.lambda)
            if (!(l > 0.0))
                throw ConfigError("Spectrum: material '" + name + "' lambda values must be > 0");
    }
}

Image hu_to_mu(const Image& img, double mu_water) {
    if (img.unit != ImageUnit::HU) throw UnitMismatch("hu_to_mu: input must be in HU");
    if (!(mu_water > 0.0)) throw ConfigError("hu_to_mu: mu_water must be > 0");
    Image out{Grid2(img.height(), img.width()), ImageUnit::Attenuation};
    const double* src = img.grid.data();
    double* dst = out.grid.data();
    for (size_t i = 0; i < img.grid.size(); ++i)
        dst[i] = std::max(0.0, mu_water * (1.0 + src[i] / 1000.0));
    return out;
}

Image mu_to_hu(const Image& img, double mu_water) {
    if (img.unit != ImageUnit::Attenuation)
        throw UnitMismatch("mu_to_hu: input must be in attenuation units");
    if (!(mu_water > 0.0)) throw ConfigError("mu_to_hu: mu_water must be > 0");
    Image out{Grid2(img.height(), img.width()), ImageUnit::HU};
    const double* src = img.grid.data();
    double* dst = out.grid.data();
    for (size_t i = 0; i < img.grid.size(); ++i)
        dst[i] = 1000.0 * (src[i] / mu_water - 1.0);
    return out;
}

std::optional<int> metal_size_group(const MetalMask& m, const SizeThresholds& t) {
    for (size_t i = 1; i < t.size(); ++i)
        if (!(t[i] > t[i - 1])) throw ConfigError("metal_size_group: thresholds must be ascending");
    const long long count = m.pixel_count();
    if (count == 0) return std::nullopt;
    if (count > t[3]) return 1;
    if (count > t[2]) return 2;
    if (count > t[1]) return 3;
    if (count > t[0]) return 4;
    return 5;
}

}  // namespace ctmar
