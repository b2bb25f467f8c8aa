#include "ctmar/physics.hpp"

#include <cmath>
#include <fstream>

#include "ctmar/marbase.hpp"
#include "json.hpp"

namespace ctmar {

namespace {

// lambda [cm^2/g] * rho [g/cm^3] gives 1/cm; geometry lengths are mm.
constexpr double kPerCmToPerMm = 0.1;

}  // namespace

Spectrum load_spectrum(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("load_spectrum: cannot open " + path.string());
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError("load_spectrum: bad JSON in " + path.string() + ": " + e.what());
    }
    Spectrum s;
    try {
        s.energies_kev = j.at("energies_keV").get<std::vector<double>>();
        s.weights = j.at("weights").get<std::vector<double>>();
        for (const auto& [name, m] : j.at("materials").items()) {
            Spectrum::Material mat;
            mat.lambda = m.at("lambda").get<std::vector<double>>();
            mat.rho = m.at("rho").get<double>();
            s.materials.emplace(name, std::move(mat));
        }
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError("load_spectrum: schema error in " + path.string() + ": " + e.what());
    }
    s.validate();
    return s;
}

MetalInsert make_insert(const Spectrum& spec, const std::string& material, MetalMask mask) {
    spec.validate();
    auto it = spec.materials.find(material);
    if (it == spec.materials.end())
        throw ConfigError("make_insert: material '" + material + "' not in spectrum config");
    if (it->second.lambda.size() != spec.n_bins())
        throw ConfigError("make_insert: material energy grid does not match spectrum");
    return MetalInsert{std::move(mask), material, it->second.rho, it->second.lambda};
}

Sinogram metal_mask_projection(const MetalMask& m, const Geometry& geo) {
    Image as_img{m.grid, ImageUnit::Attenuation};
    return forward_project(as_img, geo);
}

Sinogram metal_trace(const Sinogram& m_p) {
    Sinogram out{Grid2(m_p.n_angles(), m_p.n_detectors()), SinoUnit::Dimensionless};
    const double* src = m_p.grid.data();
    double* dst = out.grid.data();
    for (size_t i = 0; i < m_p.grid.size(); ++i) {
        const double v = src[i];
        if (v <= -kTraceTol)
            throw DataError("metal_trace: negative projection value beyond tolerance");
        dst[i] = (v >= kTraceTol) ? 1.0 : 0.0;
    }
    return out;
}

double beam_hardening_term(double m_p_value, const MetalInsert& insert, const Spectrum& spec) {
    if (m_p_value < kTraceTol) return 0.0;
    double acc = 0.0;
    for (size_t e = 0; e < spec.n_bins(); ++e) {
        const double att = insert.lambda[e] * insert.rho * kPerCmToPerMm;  // 1/mm
        acc += spec.weights[e] * std::exp(-att * m_p_value);
    }
    return -std::log(acc);
}

MetalSim simulate_metal_sinogram(const Image& x_r, const MetalInsert& insert,
                                 const Spectrum& spec, const Geometry& geo) {
    spec.validate();
    if (insert.lambda.size() != spec.n_bins())
        throw ConfigError("simulate_metal_sinogram: insert energy grid does not match spectrum");
    if (insert.mask.grid.rows() != x_r.height() || insert.mask.grid.cols() != x_r.width())
        throw DimensionMismatch("simulate_metal_sinogram: mask does not match image");

    MetalSim out;
    out.s_gt = forward_project(x_r, geo);
    out.m_p = metal_mask_projection(insert.mask, geo);
    out.s_ma = out.s_gt;
    const double* mp = out.m_p.grid.data();
    double* ma = out.s_ma.grid.data();
    for (size_t i = 0; i < out.m_p.grid.size(); ++i) {
        // term applied only on the trace so the clean data stays bitwise
        // untouched elsewhere
        if (mp[i] >= kTraceTol) ma[i] += beam_hardening_term(mp[i], insert, spec);
    }
    return out;
}

SimCase simulate_case(const Image& x_gt_hu, const MetalMask& m, const MetalInsert& insert,
                      const Spectrum& spec, const Geometry& geo, const RampFilter& filt,
                      const SimOptions& opts) {
    if (x_gt_hu.unit != ImageUnit::HU)
        throw UnitMismatch("simulate_case: clean image must be in HU");
    if (!geo.image_matches(x_gt_hu))
        throw DimensionMismatch("simulate_case: image does not match geometry");
    if (m.grid.rows() != x_gt_hu.height() || m.grid.cols() != x_gt_hu.width())
        throw DimensionMismatch("simulate_case: mask does not match image");

    Image x_r = hu_to_mu(x_gt_hu, opts.mu_water);
    const double* mm = m.grid.data();
    double* xr = x_r.grid.data();
    for (size_t i = 0; i < x_r.grid.size(); ++i)
        if (mm[i] != 0.0) xr[i] = 0.0;

    MetalSim sim = simulate_metal_sinogram(x_r, insert, spec, geo);

    SimCase c;
    c.x_gt = x_gt_hu;
    c.m = m;
    c.s_gt = std::move(sim.s_gt);
    c.s_ma = std::move(sim.s_ma);
    c.m_p = std::move(sim.m_p);
    c.m_t = metal_trace(c.m_p);
    c.x_ma = mu_to_hu(fbp(c.s_ma, geo, filt), opts.mu_water);
    const Sinogram li_trace =
        opts.trace_dilation > 0 ? dilate_trace(c.m_t, opts.trace_dilation) : c.m_t;
    c.s_li = li_inpaint(c.s_ma, li_trace).s;
    c.metal_size_group = metal_size_group(m, opts.size_thresholds);
    return c;
}

IngestResult clinical_ingest(const Image& x_clinical_hu, double metal_hu_threshold,
                             const Geometry& geo, double mu_water) {
    if (x_clinical_hu.unit != ImageUnit::HU)
        throw UnitMismatch("clinical_ingest: image must be in HU");
    if (!geo.image_matches(x_clinical_hu))
        throw DimensionMismatch("clinical_ingest: image does not match geometry");

    IngestResult r;
    const int n = geo.image_size;
    Grid2 mg(n, n, 0.0);
    long long metal_px = 0;
    const double* src = x_clinical_hu.grid.data();
    double* dst = mg.data();
    for (size_t i = 0; i < mg.size(); ++i) {
        if (src[i] >= metal_hu_threshold) {
            dst[i] = 1.0;
            ++metal_px;
        }
        if (src[i] > 3000.0) ++r.pixels_above_3000_hu;
    }
    r.m = MetalMask{std::move(mg)};
    r.empty_metal = metal_px == 0;
    r.s_ma = forward_project(hu_to_mu(x_clinical_hu, mu_water), geo);
    r.m_p = metal_mask_projection(r.m, geo);
    r.m_t = metal_trace(r.m_p);
    return r;
}

}  // namespace ctmar
