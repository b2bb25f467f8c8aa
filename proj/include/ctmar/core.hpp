#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace ctmar {

// Error hierarchy. The CLI maps ConfigError -> exit 1, DataError -> exit 2,
// anything else -> exit 3.
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct DataError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct DimensionMismatch : DataError {
    using DataError::DataError;
};
struct UnitMismatch : DataError {
    using DataError::DataError;
};

/// Dense row-major 2D grid of doubles. The workhorse container behind
/// images, sinograms and masks.
class Grid2 {
public:
    Grid2() = default;
    Grid2(int rows, int cols, double fill = 0.0)
        : rows_(rows), cols_(cols), v_(static_cast<size_t>(rows) * cols, fill) {
        if (rows < 1 || cols < 1)
            throw DimensionMismatch("Grid2: dimensions must be positive");
    }

    int rows() const { return rows_; }
    int cols() const { return cols_; }
    size_t size() const { return v_.size(); }

    double& operator()(int r, int c) { return v_[static_cast<size_t>(r) * cols_ + c]; }
    double operator()(int r, int c) const { return v_[static_cast<size_t>(r) * cols_ + c]; }

    double* data() { return v_.data(); }
    const double* data() const { return v_.data(); }
    double* row(int r) { return v_.data() + static_cast<size_t>(r) * cols_; }
    const double* row(int r) const { return v_.data() + static_cast<size_t>(r) * cols_; }

    bool same_shape(const Grid2& o) const { return rows_ == o.rows_ && cols_ == o.cols_; }

    auto begin() { return v_.begin(); }
    auto end() { return v_.end(); }
    auto begin() const { return v_.begin(); }
    auto end() const { return v_.end(); }

private:
    int rows_ = 0;
    int cols_ = 0;
    std::vector<double> v_;
};

enum class ImageUnit { HU, Attenuation };  // attenuation is per mm
enum class SinoUnit { LineIntegral, Dimensionless };

struct Image {
    Grid2 grid;
    ImageUnit unit = ImageUnit::HU;

    int width() const { return grid.cols(); }
    int height() const { return grid.rows(); }
};

/// Projection data indexed (angle row, detector column).
struct Sinogram {
    Grid2 grid;
    SinoUnit unit = SinoUnit::LineIntegral;

    int n_angles() const { return grid.rows(); }
    int n_detectors() const { return grid.cols(); }
};

/// Binary mask aligned with an Image; values are exactly 0.0 or 1.0.
struct MetalMask {
    Grid2 grid;

    long long pixel_count() const;
    /// Validates the 0/1 invariant; throws DataError on any other value.
    static MetalMask from_grid(Grid2 g);
};

enum class BeamModel { Parallel, FanEquiangular };

inline constexpr double kTwoPi = 6.283185307179586476925286766559;

struct Geometry {
    int n_angles = 640;
    double angle_range = kTwoPi;  // radians spanned by the scan
    int n_detectors = 641;
    double detector_spacing = 1.0;  // mm per detector bin
    double pixel_size = 1.0;        // mm per image pixel
    int image_size = 416;           // pixels per side
    BeamModel beam = BeamModel::Parallel;
    double source_distance = 0.0;  // source-to-center distance, fan beam only

    void validate() const;

    double angle_of(int ia) const { return angle_range * ia / n_angles; }
    /// Signed detector coordinate; the center detector passes through the
    /// rotation center.
    double detector_coord(int id) const {
        return (id - 0.5 * (n_detectors - 1)) * detector_spacing;
    }
    bool full_turn() const { return std::abs(angle_range - kTwoPi) < 1e-9; }
    bool image_matches(const Image& img) const {
        return img.width() == image_size && img.height() == image_size;
    }
    bool sino_matches(const Sinogram& s) const {
        return s.n_angles() == n_angles && s.n_detectors() == n_detectors;
    }
};

/// Polychromatic source model: discrete energy bins with fractional weights
/// plus per-material mass attenuation tables sampled on the same bins.
struct Spectrum {
    struct Material {
        std::vector<double> lambda;  // mass attenuation, cm^2/g, one per energy bin
        double rho = 0.0;            // density, g/cm^3
    };

    std::vector<double> energies_kev;  // strictly increasing
    std::vector<double> weights;       // nonnegative, sums to 1 within 1e-9
    std::map<std::string, Material> materials;

    void validate() const;
    size_t n_bins() const { return energies_kev.size(); }
};

struct SimCase {
    Image x_gt;  // clean image, HU
    MetalMask m;
    Sinogram s_gt;
    Sinogram s_ma;
    Image x_ma;  // corrupted reconstruction, HU
    Sinogram m_p;
    Sinogram m_t;  // binary trace
    Sinogram s_li;
    std::optional<int> metal_size_group;  // 1 = largest .. 5 = smallest; empty mask -> nullopt
};

inline constexpr double kDefaultMuWater = 0.02;  // per mm, ~70 keV

Image hu_to_mu(const Image& img, double mu_water = kDefaultMuWater);
Image mu_to_hu(const Image& img, double mu_water = kDefaultMuWater);

using SizeThresholds = std::array<long long, 4>;  // ascending pixel counts
inline constexpr SizeThresholds kDefaultSizeThresholds{100, 300, 700, 1500};

/// Bins a mask by pixel count into groups 1 (largest) .. 5 (smallest).
/// A count exactly equal to a threshold lands on the smaller-metal side.
/// Returns nullopt for an empty mask.
std::optional<int> metal_size_group(const MetalMask& m,
                                    const SizeThresholds& thresholds = kDefaultSizeThresholds);

}  // namespace ctmar
