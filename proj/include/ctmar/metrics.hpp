#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "ctmar/core.hpp"

namespace ctmar {

/// Soft-tissue display window, HU. Images are clamped to [lo, hi] and
/// affinely mapped to [0, 1] before any metric is computed.
struct HuWindow {
    double lo = -175.0;
    double hi = 275.0;
};

Image window_image(const Image& img_hu, const HuWindow& w = {});

/// Sentinel returned for identical images so reports stay numeric.
inline constexpr double kPsnrCap = 99.0;

/// PSNR over windowed images, data range 1.
double psnr(const Image& a_hu, const Image& b_hu, const HuWindow& w = {});

/// Mean local SSIM over windowed images; Gaussian window sigma 1.5, 11x11,
/// K1 = 0.01, K2 = 0.03, data range 1.
double ssim(const Image& a_hu, const Image& b_hu, const HuWindow& w = {});

struct SinoMse {
    double overall = 0.0;                 // the headline number
    std::optional<double> in_trace;       // restricted to trace bins, if a trace was given
};

SinoMse sino_mse(const Sinogram& a, const Sinogram& b, const Sinogram* trace = nullptr);

struct CaseMetrics {
    std::string case_id;
    int group = 0;  // 1..5
    double psnr_db = 0.0;
    double ssim = 0.0;
    std::optional<double> sino_mse;
    std::optional<double> sino_mse_trace;
};

struct EvalReport {
    struct Agg {
        long long n = 0;
        double psnr_db = 0.0;
        double ssim = 0.0;
        std::optional<double> sino_mse;
        std::optional<double> sino_mse_trace;
    };
    std::vector<CaseMetrics> cases;
    std::array<Agg, 5> groups;  // index 0 = group 1 (largest metal)
    Agg overall;
};

CaseMetrics evaluate_case(std::string case_id, int group, const Image& x_gt, const Image& x_cand,
                          const Sinogram* s_gt = nullptr, const Sinogram* s_cand = nullptr,
                          const Sinogram* trace = nullptr, const HuWindow& w = {});

/// Five-group plus overall means. Ordering is fixed: per-group sums in case
/// order, overall from the group sums, so the weighted-mean identity holds
/// exactly.
EvalReport aggregate(std::vector<CaseMetrics> rows);

struct EvalCase {
    std::string case_id;
    int group = 0;
    Image x_gt;
    Image x_cand;
    std::optional<Sinogram> s_gt;
    std::optional<Sinogram> s_cand;
    std::optional<Sinogram> trace;
};

EvalReport evaluate_dataset(const std::vector<EvalCase>& cases, const HuWindow& w = {});

/// Fixed schema: case_id,group,psnr_db,ssim,sino_mse,sino_mse_trace with one
/// row per case, then rows group_1..group_5 and overall.
std::string to_csv(const EvalReport& report);

}  // namespace ctmar
