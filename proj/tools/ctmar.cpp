// Command-line front end: batch simulation, classical MAR baselines,
// network-input encodings, and evaluation over the raw+JSON grid format.

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <mutex>
#include <optional>
#include <set>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include "ctmar/core.hpp"
#include "ctmar/encoding.hpp"
#include "ctmar/grid_io.hpp"
#include "ctmar/marbase.hpp"
#include "ctmar/metrics.hpp"
#include "ctmar/phantom.hpp"
#include "ctmar/physics.hpp"
#include "ctmar/png_io.hpp"
#include "ctmar/projector.hpp"
#include "json.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace ctmar;

namespace {

struct RunConfig {
    Geometry geometry;
    std::string spectrum_file = "data/spectrum_120kvp_titanium.json";
    std::string material = "titanium";
    double mu_water = kDefaultMuWater;
    SizeThresholds metal_size_thresholds = kDefaultSizeThresholds;
    std::string mar_method = "li";
    int trace_dilation = 1;
    int pad_angles = 32;
    int pad_detectors = 32;
    int pyramid_depth = 4;
    LossWeights loss_weights;
    double metal_hu_threshold = 2500.0;
    PriorConfig nmar;
    RampFilter::Window filter_window = RampFilter::Window::Ramp;
    int workers = 0;  // 0: hardware concurrency
    std::uint64_t seed = 0;
};

template <typename T>
void get_if(const json& j, const char* key, T& out) {
    if (j.contains(key)) out = j.at(key).get<T>();
}

Geometry parse_geometry(const json& j) {
    Geometry g;
    static const std::set<std::string> known = {
        "n_angles",    "angle_range", "n_detectors",     "detector_spacing",
        "pixel_size",  "image_size",  "beam_model",      "source_distance"};
    for (const auto& [k, v] : j.items())
        if (!known.count(k)) throw ConfigError("config: unknown geometry key '" + k + "'");
    get_if(j, "n_angles", g.n_angles);
    get_if(j, "angle_range", g.angle_range);
    get_if(j, "n_detectors", g.n_detectors);
    get_if(j, "detector_spacing", g.detector_spacing);
    get_if(j, "pixel_size", g.pixel_size);
    get_if(j, "image_size", g.image_size);
    get_if(j, "source_distance", g.source_distance);
    if (j.contains("beam_model")) {
        const std::string b = j.at("beam_model").get<std::string>();
        if (b == "parallel")
            g.beam = BeamModel::Parallel;
        else if (b == "fan-equiangular")
            g.beam = BeamModel::FanEquiangular;
        else
            throw ConfigError("config: unknown beam_model '" + b + "'");
    }
    return g;
}

RunConfig load_config(const std::string& path) {
    RunConfig c;
    if (path.empty()) return c;
    std::ifstream in(path);
    if (!in) throw ConfigError("config: cannot open " + path);
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw ConfigError(std::string("config: bad JSON: ") + e.what());
    }
    static const std::set<std::string> known = {
        "geometry",      "spectrum_file",        "material",
        "mu_water",      "metal_size_thresholds", "mar_method",
        "trace_dilation", "pad_angles",           "pad_detectors",
        "pyramid_depth", "loss_weights",          "metal_hu_threshold",
        "nmar",          "filter_window",         "workers",
        "seed"};
    for (const auto& [k, v] : j.items())
        if (!known.count(k)) throw ConfigError("config: unknown key '" + k + "'");
    try {
        if (j.contains("geometry")) c.geometry = parse_geometry(j.at("geometry"));
        get_if(j, "spectrum_file", c.spectrum_file);
        get_if(j, "material", c.material);
        get_if(j, "mu_water", c.mu_water);
        if (j.contains("metal_size_thresholds")) {
            auto v = j.at("metal_size_thresholds").get<std::vector<long long>>();
            if (v.size() != 4) throw ConfigError("config: metal_size_thresholds needs 4 values");
            std::copy(v.begin(), v.end(), c.metal_size_thresholds.begin());
        }
        get_if(j, "mar_method", c.mar_method);
        get_if(j, "trace_dilation", c.trace_dilation);
        get_if(j, "pad_angles", c.pad_angles);
        get_if(j, "pad_detectors", c.pad_detectors);
        get_if(j, "pyramid_depth", c.pyramid_depth);
        if (j.contains("loss_weights")) {
            const json& w = j.at("loss_weights");
            get_if(w, "se", c.loss_weights.se);
            get_if(w, "rc", c.loss_weights.rc);
            get_if(w, "ie", c.loss_weights.ie);
        }
        get_if(j, "metal_hu_threshold", c.metal_hu_threshold);
        if (j.contains("nmar")) {
            const json& n = j.at("nmar");
            get_if(n, "air_hu", c.nmar.air_hu);
            get_if(n, "bone_hu", c.nmar.bone_hu);
            get_if(n, "bone_mu_scale", c.nmar.bone_mu_scale);
            get_if(n, "smooth_radius", c.nmar.smooth_radius);
        }
        if (j.contains("filter_window")) {
            const std::string w = j.at("filter_window").get<std::string>();
            if (w == "ramp")
                c.filter_window = RampFilter::Window::Ramp;
            else if (w == "hann")
                c.filter_window = RampFilter::Window::Hann;
            else
                throw ConfigError("config: unknown filter_window '" + w + "'");
        }
        get_if(j, "workers", c.workers);
        get_if(j, "seed", c.seed);
    } catch (const json::exception& e) {
        throw ConfigError(std::string("config: schema error: ") + e.what());
    }
    c.nmar.mu_water = c.mu_water;
    c.geometry.validate();
    return c;
}

json config_echo(const RunConfig& c) {
    json g;
    g["n_angles"] = c.geometry.n_angles;
    g["angle_range"] = c.geometry.angle_range;
    g["n_detectors"] = c.geometry.n_detectors;
    g["detector_spacing"] = c.geometry.detector_spacing;
    g["pixel_size"] = c.geometry.pixel_size;
    g["image_size"] = c.geometry.image_size;
    g["beam_model"] = c.geometry.beam == BeamModel::Parallel ? "parallel" : "fan-equiangular";
    g["source_distance"] = c.geometry.source_distance;
    json j;
    j["geometry"] = g;
    j["spectrum_file"] = c.spectrum_file;
    j["material"] = c.material;
    j["mu_water"] = c.mu_water;
    j["metal_size_thresholds"] = c.metal_size_thresholds;
    j["mar_method"] = c.mar_method;
    j["trace_dilation"] = c.trace_dilation;
    j["metal_hu_threshold"] = c.metal_hu_threshold;
    j["seed"] = c.seed;
    return j;
}

// case ids = basenames of "<id>.raw" files in a directory
std::vector<std::string> list_cases(const fs::path& dir, const std::string& suffix = "") {
    if (!fs::is_directory(dir)) throw DataError("not a directory: " + dir.string());
    std::vector<std::string> ids;
    for (const auto& e : fs::directory_iterator(dir)) {
        if (!e.is_regular_file() || e.path().extension() != ".raw") continue;
        std::string stem = e.path().stem().string();
        if (!suffix.empty()) {
            if (stem.size() <= suffix.size() || !stem.ends_with(suffix)) continue;
            stem = stem.substr(0, stem.size() - suffix.size());
        }
        ids.push_back(stem);
    }
    std::sort(ids.begin(), ids.end());
    return ids;
}

void run_parallel(int workers, size_t n, const std::function<void(size_t)>& fn) {
    if (workers <= 0) workers = static_cast<int>(std::thread::hardware_concurrency());
    workers = std::max(1, std::min<int>(workers, static_cast<int>(n)));
    if (workers == 1 || n <= 1) {
        for (size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::atomic<size_t> next{0};
    std::exception_ptr err;
    std::mutex err_mutex;
    std::vector<std::thread> pool;
    for (int w = 0; w < workers; ++w) {
        pool.emplace_back([&] {
            while (true) {
                const size_t i = next.fetch_add(1);
                if (i >= n) return;
                try {
                    fn(i);
                } catch (...) {
                    std::lock_guard<std::mutex> lock(err_mutex);
                    if (!err) err = std::current_exception();
                }
            }
        });
    }
    for (auto& t : pool) t.join();
    if (err) std::rethrow_exception(err);
}

void write_manifest(const fs::path& out, const json& j) {
    std::ofstream f(out);
    if (!f) throw DataError("cannot write manifest: " + out.string());
    f << j.dump(2) << "\n";
}

// ---------------------------------------------------------------- simulate

int cmd_simulate(const RunConfig& cfg, const fs::path& clean_dir, const fs::path& mask_dir,
                 const fs::path& out_dir) {
    const auto clean_ids = list_cases(clean_dir);
    const auto mask_ids = list_cases(mask_dir);
    std::vector<std::string> ids, unpaired;
    std::set<std::string> mask_set(mask_ids.begin(), mask_ids.end());
    std::set<std::string> clean_set(clean_ids.begin(), clean_ids.end());
    for (const auto& id : clean_ids)
        (mask_set.count(id) ? ids : unpaired).push_back(id);
    for (const auto& id : mask_ids)
        if (!clean_set.count(id)) unpaired.push_back(id);
    for (const auto& id : unpaired)
        std::cerr << "error: unpaired basename: " << id << "\n";

    const Spectrum spectrum = load_spectrum(cfg.spectrum_file);
    const RampFilter filt = RampFilter::make(cfg.geometry, cfg.filter_window);
    SimOptions opts;
    opts.mu_water = cfg.mu_water;
    opts.size_thresholds = cfg.metal_size_thresholds;
    opts.trace_dilation = cfg.trace_dilation;

    fs::create_directories(out_dir);
    struct CaseRecord {
        std::string id;
        std::optional<int> group;
        std::string error;
    };
    std::vector<CaseRecord> records(ids.size());

    run_parallel(cfg.workers, ids.size(), [&](size_t i) {
        const std::string& id = ids[i];
        records[i].id = id;
        try {
            Image x_gt = read_image(clean_dir / (id + ".raw"));
            MetalMask m = read_mask(mask_dir / (id + ".raw"));
            MetalInsert insert = make_insert(spectrum, cfg.material, m);
            SimCase c = simulate_case(x_gt, m, insert, spectrum, cfg.geometry, filt, opts);
            records[i].group = c.metal_size_group;
            write_image(out_dir / (id + "_Xgt.raw"), c.x_gt);
            write_mask(out_dir / (id + "_M.raw"), c.m);
            write_sinogram(out_dir / (id + "_Sgt.raw"), c.s_gt);
            write_sinogram(out_dir / (id + "_Sma.raw"), c.s_ma);
            write_image(out_dir / (id + "_Xma.raw"), c.x_ma);
            write_sinogram(out_dir / (id + "_Mp.raw"), c.m_p);
            write_sinogram(out_dir / (id + "_Mt.raw"), c.m_t);
            write_sinogram(out_dir / (id + "_SLI.raw"), c.s_li);
        } catch (const std::exception& e) {
            records[i].error = e.what();
        }
    });

    json cases = json::array();
    bool any_error = false;
    for (const auto& r : records) {
        json c;
        c["id"] = r.id;
        if (r.group)
            c["group"] = *r.group;
        else
            c["group"] = nullptr;
        if (!r.error.empty()) {
            c["error"] = r.error;
            any_error = true;
            std::cerr << "error: case " << r.id << ": " << r.error << "\n";
        }
        cases.push_back(c);
    }
    json manifest;
    manifest["cases"] = cases;
    manifest["config"] = config_echo(cfg);
    write_manifest(out_dir / "manifest.json", manifest);
    std::cout << "simulated " << ids.size() << " case(s) -> " << out_dir.string() << "\n";
    return (any_error || !unpaired.empty()) ? 2 : 0;
}

// --------------------------------------------------------------------- mar

int cmd_mar(const RunConfig& cfg, const fs::path& case_dir, const fs::path& out_dir,
            const std::string& method) {
    if (method != "li" && method != "nmar")
        throw ConfigError("mar: unknown method '" + method + "' (expected li or nmar)");
    const auto ids = list_cases(case_dir, "_Sma");
    if (ids.empty()) throw DataError("mar: no cases (*_Sma.raw) in " + case_dir.string());

    const RampFilter filt = RampFilter::make(cfg.geometry, cfg.filter_window);
    fs::create_directories(out_dir);

    run_parallel(cfg.workers, ids.size(), [&](size_t i) {
        const std::string& id = ids[i];
        Sinogram s_ma = read_sinogram(case_dir / (id + "_Sma.raw"));
        Sinogram m_t = read_sinogram(case_dir / (id + "_Mt.raw"));
        const Sinogram trace =
            cfg.trace_dilation > 0 ? dilate_trace(m_t, cfg.trace_dilation) : m_t;

        Sinogram corrected;
        if (method == "li") {
            corrected = li_inpaint(s_ma, trace).s;
        } else {
            Image x_ma{Grid2(), ImageUnit::HU};
            const fs::path xma_path = case_dir / (id + "_Xma.raw");
            if (fs::exists(xma_path))
                x_ma = read_image(xma_path);
            else
                x_ma = mu_to_hu(fbp(s_ma, cfg.geometry, filt), cfg.mu_water);
            const fs::path mask_path = case_dir / (id + "_M.raw");
            std::optional<MetalMask> mask;
            if (fs::exists(mask_path)) mask = read_mask(mask_path);
            PriorImage prior = nmar_prior(x_ma, cfg.nmar, mask ? &*mask : nullptr);
            corrected = nmar_inpaint(s_ma, trace, prior, cfg.geometry).s;
            write_image(out_dir / (id + "_prior.raw"), prior.image);
        }
        write_sinogram(out_dir / (id + "_S" + method + ".raw"), corrected);
        Image x = mu_to_hu(fbp(corrected, cfg.geometry, filt), cfg.mu_water);
        write_image(out_dir / (id + "_X" + method + ".raw"), x);
    });
    std::cout << "corrected " << ids.size() << " case(s) with " << method << " -> "
              << out_dir.string() << "\n";
    return 0;
}

// -------------------------------------------------------------------- eval

std::map<std::string, int> manifest_groups(const fs::path& dir) {
    std::map<std::string, int> groups;
    const fs::path mpath = dir / "manifest.json";
    if (!fs::exists(mpath)) return groups;
    std::ifstream in(mpath);
    json j;
    in >> j;
    for (const auto& c : j.at("cases")) {
        if (c.contains("group") && !c.at("group").is_null())
            groups[c.at("id").get<std::string>()] = c.at("group").get<int>();
    }
    return groups;
}

std::string detect_suffix(const fs::path& candidate_dir, const std::string& id) {
    std::vector<std::string> found;
    for (const auto& e : fs::directory_iterator(candidate_dir)) {
        if (!e.is_regular_file() || e.path().extension() != ".raw") continue;
        const std::string stem = e.path().stem().string();
        const std::string prefix = id + "_X";
        if (stem.starts_with(prefix)) {
            const std::string s = stem.substr(prefix.size());
            if (s != "gt") found.push_back(s);
        }
    }
    if (found.size() != 1)
        throw DataError("eval: cannot auto-detect candidate suffix for case '" + id +
                        "' (pass --suffix)");
    return found[0];
}

int cmd_eval(const RunConfig& cfg, const fs::path& truth_dir, const fs::path& candidate_dir,
             const fs::path& out_dir, std::string suffix) {
    const auto ids = list_cases(truth_dir, "_Xgt");
    if (ids.empty()) throw DataError("eval: no cases (*_Xgt.raw) in " + truth_dir.string());
    const auto groups = manifest_groups(truth_dir);
    if (suffix == "auto") suffix = detect_suffix(candidate_dir, ids.front());

    fs::create_directories(out_dir / "previews");
    std::vector<CaseMetrics> rows(ids.size());
    std::vector<char> skipped(ids.size(), 0);

    run_parallel(cfg.workers, ids.size(), [&](size_t i) {
        const std::string& id = ids[i];
        const auto git = groups.find(id);
        if (git == groups.end()) {
            skipped[i] = 1;
            return;
        }
        const Image x_gt = read_image(truth_dir / (id + "_Xgt.raw"));
        const fs::path cand_path = candidate_dir / (id + "_X" + suffix + ".raw");
        if (!fs::exists(cand_path)) throw DataError("eval: missing counterpart " + cand_path.string());
        const Image x_cand = read_image(cand_path);

        std::optional<Sinogram> s_gt, s_cand, trace;
        const fs::path sgt_path = truth_dir / (id + "_Sgt.raw");
        const fs::path scand_path = candidate_dir / (id + "_S" + suffix + ".raw");
        if (fs::exists(sgt_path) && fs::exists(scand_path)) {
            s_gt = read_sinogram(sgt_path);
            s_cand = read_sinogram(scand_path);
            const fs::path mt_path = truth_dir / (id + "_Mt.raw");
            if (fs::exists(mt_path)) trace = read_sinogram(mt_path);
        }
        rows[i] = evaluate_case(id, git->second, x_gt, x_cand, s_gt ? &*s_gt : nullptr,
                                s_cand ? &*s_cand : nullptr, trace ? &*trace : nullptr);
        write_png_preview(out_dir / "previews" / (id + "_gt.png"), x_gt);
        write_png_preview(out_dir / "previews" / (id + "_" + suffix + ".png"), x_cand);
    });

    std::vector<CaseMetrics> kept;
    for (size_t i = 0; i < rows.size(); ++i) {
        if (skipped[i]) {
            std::cerr << "warning: case " << ids[i] << " has no metal-size group, skipped\n";
            continue;
        }
        kept.push_back(std::move(rows[i]));
    }
    if (kept.empty()) throw DataError("eval: no evaluable cases");
    const EvalReport rep = aggregate(std::move(kept));
    const std::string csv = to_csv(rep);
    std::ofstream f(out_dir / "report.csv");
    f << csv;
    std::cout << "evaluated " << rep.cases.size() << " case(s), suffix '" << suffix << "'\n";
    std::printf("overall: psnr %.2f dB  ssim %.4f", rep.overall.psnr_db, rep.overall.ssim);
    if (rep.overall.sino_mse) std::printf("  sino_mse %.4g", *rep.overall.sino_mse);
    std::printf("\n");
    for (int g = 0; g < 5; ++g) {
        if (rep.groups[g].n == 0) continue;
        std::printf("group %d (n=%lld): psnr %.2f dB  ssim %.4f\n", g + 1, rep.groups[g].n,
                    rep.groups[g].psnr_db, rep.groups[g].ssim);
    }
    return 0;
}

// ------------------------------------------------------------------ ingest

int cmd_ingest(const RunConfig& cfg, const fs::path& image_dir, const fs::path& out_dir) {
    const auto ids = list_cases(image_dir);
    if (ids.empty()) throw DataError("ingest: no images (*.raw) in " + image_dir.string());
    fs::create_directories(out_dir);

    struct Rec {
        std::string id;
        bool empty_metal = false;
        long long px3000 = 0;
        std::string error;
    };
    std::vector<Rec> recs(ids.size());

    run_parallel(cfg.workers, ids.size(), [&](size_t i) {
        const std::string& id = ids[i];
        recs[i].id = id;
        try {
            const Image x = read_image(image_dir / (id + ".raw"));
            IngestResult r = clinical_ingest(x, cfg.metal_hu_threshold, cfg.geometry, cfg.mu_water);
            recs[i].empty_metal = r.empty_metal;
            recs[i].px3000 = r.pixels_above_3000_hu;
            write_sinogram(out_dir / (id + "_Sma.raw"), r.s_ma);
            write_mask(out_dir / (id + "_M.raw"), r.m);
            write_sinogram(out_dir / (id + "_Mp.raw"), r.m_p);
            write_sinogram(out_dir / (id + "_Mt.raw"), r.m_t);
        } catch (const std::exception& e) {
            recs[i].error = e.what();
        }
    });

    json cases = json::array();
    bool any_error = false;
    for (const auto& r : recs) {
        json c;
        c["id"] = r.id;
        c["pixels_above_3000_hu"] = r.px3000;
        json warnings = json::array();
        if (r.empty_metal) {
            warnings.push_back("empty metal segmentation");
            std::cerr << "warning: case " << r.id << ": empty metal segmentation\n";
        }
        if (r.px3000 < 100) {
            warnings.push_back("fewer than 100 pixels above 3000 HU");
            std::cerr << "warning: case " << r.id << ": fewer than 100 pixels above 3000 HU\n";
        }
        c["warnings"] = warnings;
        if (!r.error.empty()) {
            c["error"] = r.error;
            any_error = true;
            std::cerr << "error: case " << r.id << ": " << r.error << "\n";
        }
        cases.push_back(c);
    }
    json manifest;
    manifest["cases"] = cases;
    manifest["config"] = config_echo(cfg);
    write_manifest(out_dir / "manifest.json", manifest);
    std::cout << "ingested " << ids.size() << " image(s) -> " << out_dir.string() << "\n";
    return any_error ? 2 : 0;
}

// ------------------------------------------------------------------ encode

int cmd_encode(const RunConfig& cfg, const fs::path& case_dir, const fs::path& out_dir,
               int depth, int pad_a, int pad_d) {
    const auto ids = list_cases(case_dir, "_Mp");
    if (ids.empty()) throw DataError("encode: no cases (*_Mp.raw) in " + case_dir.string());
    fs::create_directories(out_dir);

    run_parallel(cfg.workers, ids.size(), [&](size_t i) {
        const std::string& id = ids[i];
        const Sinogram m_p = read_sinogram(case_dir / (id + "_Mp.raw"));
        const PoolPyramid pyr = pool_pyramid(m_p, depth);
        for (int k = 0; k < pyr.depth(); ++k) {
            const Grid2& lv = pyr.levels[k];
            write_grid(out_dir / (id + "_Mp_l" + std::to_string(k) + ".raw"), lv,
                       GridMeta{lv.cols(), lv.rows(), "line_integral", "sinogram"});
        }
        const Sinogram s_ma = read_sinogram(case_dir / (id + "_Sma.raw"));
        const PaddedSinogram padded = periodic_pad(s_ma, pad_a, pad_d, cfg.geometry);
        write_grid(out_dir / (id + "_Sma_pad.raw"), padded.grid,
                   GridMeta{padded.grid.cols(), padded.grid.rows(), "line_integral", "sinogram"});
    });
    std::cout << "encoded " << ids.size() << " case(s) -> " << out_dir.string() << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"2D CT metal-artifact simulation, baselines, encodings and metrics"};
    app.require_subcommand(1);

    std::string config_path, out_dir = "out";
    int workers = -1;
    std::int64_t seed = -1;
    app.add_option("--config", config_path, "JSON run configuration");
    app.add_option("--out", out_dir, "output directory");
    app.add_option("--workers", workers, "worker threads (0: all cores)");
    app.add_option("--seed", seed, "RNG seed override");

    auto* sim = app.add_subcommand("simulate", "simulate metal-corrupted cases");
    std::string clean_dir, mask_dir;
    sim->add_option("--clean", clean_dir, "directory of clean HU images")->required();
    sim->add_option("--masks", mask_dir, "directory of metal masks")->required();

    auto* mar = app.add_subcommand("mar", "run a sinogram-inpainting baseline");
    std::string case_dir, method;
    mar->add_option("--cases", case_dir, "directory of simulated/ingested cases")->required();
    mar->add_option("--method", method, "li | nmar (default from config)");

    auto* ev = app.add_subcommand("eval", "evaluate candidate images against ground truth");
    std::string truth_dir, cand_dir, suffix = "auto";
    ev->add_option("--truth", truth_dir, "directory with *_Xgt.raw and manifest")->required();
    ev->add_option("--candidate", cand_dir, "directory with *_X<suffix>.raw")->required();
    ev->add_option("--suffix", suffix, "candidate suffix (default: auto-detect)");

    auto* ing = app.add_subcommand("ingest", "project clinical HU slices into the geometry");
    std::string image_dir;
    ing->add_option("--images", image_dir, "directory of clinical HU images")->required();

    auto* enc = app.add_subcommand("encode", "write pooling pyramids and padded sinograms");
    std::string enc_cases;
    int depth = -1, pad_a = -1, pad_d = -1;
    enc->add_option("--cases", enc_cases, "directory of simulated cases")->required();
    enc->add_option("--depth", depth, "pyramid depth (default from config)");
    enc->add_option("--pad-a", pad_a, "angle padding (default from config)");
    enc->add_option("--pad-d", pad_d, "detector padding (default from config)");

    CLI11_PARSE(app, argc, argv);

    try {
        RunConfig cfg = load_config(config_path);
        if (workers >= 0) cfg.workers = workers;  // flags win over config
        if (seed >= 0) cfg.seed = static_cast<std::uint64_t>(seed);

        if (sim->parsed()) return cmd_simulate(cfg, clean_dir, mask_dir, out_dir);
        if (mar->parsed())
            return cmd_mar(cfg, case_dir, out_dir, method.empty() ? cfg.mar_method : method);
        if (ev->parsed()) return cmd_eval(cfg, truth_dir, cand_dir, out_dir, suffix);
        if (ing->parsed()) return cmd_ingest(cfg, image_dir, out_dir);
        if (enc->parsed())
            return cmd_encode(cfg, enc_cases, out_dir, depth > 0 ? depth : cfg.pyramid_depth,
                              pad_a >= 0 ? pad_a : cfg.pad_angles,
                              pad_d >= 0 ? pad_d : cfg.pad_detectors);
        return 1;
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 1;
    } catch (const DataError& e) {
        std::cerr << "data error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << "\n";
        return 3;
    }
}
