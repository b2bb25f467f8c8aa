#pragma once

#include <filesystem>
#include <string>

#include "ctmar/core.hpp"
#include "ctmar/projector.hpp"

namespace ctmar {

/// Metal implant: mask plus the material data needed to attenuate it,
/// sampled on the owning Spectrum's energy grid.
struct MetalInsert {
    MetalMask mask;
    std::string material;
    double rho = 0.0;            // g/cm^3
    std::vector<double> lambda;  // cm^2/g per energy bin
};

/// Sinogram entries below this magnitude count as zero when binarizing the
/// metal trace and when deciding where the artifact term applies.
inline constexpr double kTraceTol = 1e-12;

/// Loads {energies_keV, weights, materials:{name:{lambda, rho}}} JSON.
Spectrum load_spectrum(const std::filesystem::path& path);

/// Builds a MetalInsert for a named material of the spectrum.
MetalInsert make_insert(const Spectrum& spec, const std::string& material, MetalMask mask);

/// M_p: forward projection of the binary mask; per-ray metal path length.
Sinogram metal_mask_projection(const MetalMask& m, const Geometry& geo);

/// Binary indicator of metal-affected sinogram bins.
Sinogram metal_trace(const Sinogram& m_p);

/// Scalar beam-hardening term for a metal path length m_p_value:
/// -ln(sum_E eta(E) * exp(-lambda(E) * rho * m_p)). Zero at m_p = 0.
double beam_hardening_term(double m_p_value, const MetalInsert& insert, const Spectrum& spec);

struct MetalSim {
    Sinogram s_ma;
    Sinogram s_gt;
    Sinogram m_p;
};

/// Corrupts the clean projection of x_r (metal pixels already zeroed) with
/// the polychromatic artifact term. Off the metal trace, s_ma == s_gt
/// bitwise.
MetalSim simulate_metal_sinogram(const Image& x_r, const MetalInsert& insert,
                                 const Spectrum& spec, const Geometry& geo);

struct SimOptions {
    double mu_water = kDefaultMuWater;
    SizeThresholds size_thresholds = kDefaultSizeThresholds;
    int trace_dilation = 1;  // detector bins, applied to M_t before LI
};

/// Full simulation of one case from a clean HU image and a metal mask.
SimCase simulate_case(const Image& x_gt_hu, const MetalMask& m, const MetalInsert& insert,
                      const Spectrum& spec, const Geometry& geo, const RampFilter& filt,
                      const SimOptions& opts = {});

struct IngestResult {
    Sinogram s_ma;
    MetalMask m;
    Sinogram m_p;
    Sinogram m_t;
    bool empty_metal = false;
    long long pixels_above_3000_hu = 0;
};

/// Projects a clinical HU slice into the simulation geometry and segments
/// its metal by threshold. No ground-truth fields exist for clinical data.
IngestResult clinical_ingest(const Image& x_clinical_hu, double metal_hu_threshold,
                             const Geometry& geo, double mu_water = kDefaultMuWater);

}  // namespace ctmar
