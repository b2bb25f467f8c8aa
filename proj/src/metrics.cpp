#include "ctmar/metrics.hpp"

#include <cmath>
#include <cstdio>

namespace ctmar {

Image window_image(const Image& img_hu, const HuWindow& w) {
    if (!(w.lo < w.hi)) throw ConfigError("window_image: lo must be < hi");
    if (img_hu.unit != ImageUnit::HU)
        throw UnitMismatch("window_image: input must be in HU");
    Image out{Grid2(img_hu.height(), img_hu.width()), ImageUnit::HU};
    const double inv = 1.0 / (w.hi - w.lo);
    const double* src = img_hu.grid.data();
    double* dst = out.grid.data();
    for (size_t i = 0; i < out.grid.size(); ++i) {
        double v = src[i];
        if (v < w.lo) v = w.lo;
        if (v > w.hi) v = w.hi;
        dst[i] = (v - w.lo) * inv;
    }
    return out;
}

double psnr(const Image& a_hu, const Image& b_hu, const HuWindow& w) {
    if (!a_hu.grid.same_shape(b_hu.grid))
        throw DimensionMismatch("psnr: image shapes differ");
    const Image wa = window_image(a_hu, w);
    const Image wb = window_image(b_hu, w);
    double acc = 0.0;
    const double* pa = wa.grid.data();
    const double* pb = wb.grid.data();
    for (size_t i = 0; i < wa.grid.size(); ++i) {
        const double d = pa[i] - pb[i];
        acc += d * d;
    }
    const double mse = acc / static_cast<double>(wa.grid.size());
    if (mse == 0.0) return kPsnrCap;
    return 10.0 * std::log10(1.0 / mse);
}

namespace {

constexpr int kSsimRadius = 5;  // 11x11 window
constexpr double kSsimSigma = 1.5;
constexpr double kSsimC1 = 0.01 * 0.01;
constexpr double kSsimC2 = 0.03 * 0.03;

// Valid-mode separable Gaussian filter; output is (rows-10) x (cols-10).
Grid2 gauss_valid(const Grid2& in, const std::array<double, 2 * kSsimRadius + 1>& k) {
    const int rows = in.rows(), cols = in.cols();
    const int vcols = cols - 2 * kSsimRadius;
    Grid2 tmp(rows, vcols);
    for (int r = 0; r < rows; ++r) {
        const double* src = in.row(r);
        double* dst = tmp.row(r);
        for (int c = 0; c < vcols; ++c) {
            double acc = 0.0;
            for (int i = 0; i < 2 * kSsimRadius + 1; ++i) acc += k[i] * src[c + i];
            dst[c] = acc;
        }
    }
    const int vrows = rows - 2 * kSsimRadius;
    Grid2 out(vrows, vcols);
    for (int r = 0; r < vrows; ++r) {
        double* dst = out.row(r);
        for (int c = 0; c < vcols; ++c) {
            double acc = 0.0;
            for (int i = 0; i < 2 * kSsimRadius + 1; ++i) acc += k[i] * tmp(r + i, c);
            dst[c] = acc;
        }
    }
    return out;
}

}  // namespace

double ssim(const Image& a_hu, const Image& b_hu, const HuWindow& w) {
    if (!a_hu.grid.same_shape(b_hu.grid))
        throw DimensionMismatch("ssim: image shapes differ");
    if (a_hu.height() < 2 * kSsimRadius + 1 || a_hu.width() < 2 * kSsimRadius + 1)
        throw DataError("ssim: image smaller than the 11x11 window");

    const Image wa = window_image(a_hu, w);
    const Image wb = window_image(b_hu, w);

    std::array<double, 2 * kSsimRadius + 1> k;
    double ksum = 0.0;
    for (int i = -kSsimRadius; i <= kSsimRadius; ++i) {
        k[i + kSsimRadius] = std::exp(-0.5 * i * i / (kSsimSigma * kSsimSigma));
        ksum += k[i + kSsimRadius];
    }
    for (double& v : k) v /= ksum;

    const int rows = wa.grid.rows(), cols = wa.grid.cols();
    Grid2 aa(rows, cols), bb(rows, cols), ab(rows, cols);
    {
        const double* pa = wa.grid.data();
        const double* pb = wb.grid.data();
        for (size_t i = 0; i < wa.grid.size(); ++i) {
            aa.data()[i] = pa[i] * pa[i];
            bb.data()[i] = pb[i] * pb[i];
            ab.data()[i] = pa[i] * pb[i];
        }
    }
    const Grid2 mu_a = gauss_valid(wa.grid, k);
    const Grid2 mu_b = gauss_valid(wb.grid, k);
    const Grid2 e_aa = gauss_valid(aa, k);
    const Grid2 e_bb = gauss_valid(bb, k);
    const Grid2 e_ab = gauss_valid(ab, k);

    double acc = 0.0;
    for (size_t i = 0; i < mu_a.size(); ++i) {
        const double ma = mu_a.data()[i];
        const double mb = mu_b.data()[i];
        const double va = e_aa.data()[i] - ma * ma;
        const double vb = e_bb.data()[i] - mb * mb;
        const double cab = e_ab.data()[i] - ma * mb;
        const double num = (2.0 * ma * mb + kSsimC1) * (2.0 * cab + kSsimC2);
        const double den = (ma * ma + mb * mb + kSsimC1) * (va + vb + kSsimC2);
        acc += num / den;
    }
    return acc / static_cast<double>(mu_a.size());
}

SinoMse sino_mse(const Sinogram& a, const Sinogram& b, const Sinogram* trace) {
    if (!a.grid.same_shape(b.grid))
        throw DimensionMismatch("sino_mse: sinogram shapes differ");
    if (trace && !trace->grid.same_shape(a.grid))
        throw DimensionMismatch("sino_mse: trace shape differs");

    SinoMse out;
    double acc = 0.0;
    const double* pa = a.grid.data();
    const double* pb = b.grid.data();
    for (size_t i = 0; i < a.grid.size(); ++i) {
        const double d = pa[i] - pb[i];
        acc += d * d;
    }
    out.overall = acc / static_cast<double>(a.grid.size());

    if (trace) {
        double tacc = 0.0;
        long long n = 0;
        const double* t = trace->grid.data();
        for (size_t i = 0; i < a.grid.size(); ++i) {
            if (t[i] == 0.0) continue;
            const double d = pa[i] - pb[i];
            tacc += d * d;
            ++n;
        }
        out.in_trace = n > 0 ? tacc / static_cast<double>(n) : 0.0;
    }
    return out;
}

CaseMetrics evaluate_case(std::string case_id, int group, const Image& x_gt, const Image& x_cand,
                          const Sinogram* s_gt, const Sinogram* s_cand, const Sinogram* trace,
                          const HuWindow& w) {
    CaseMetrics m;
    m.case_id = std::move(case_id);
    m.group = group;
    m.psnr_db = psnr(x_cand, x_gt, w);
    m.ssim = ssim(x_cand, x_gt, w);
    if (s_gt && s_cand) {
        const SinoMse sm = sino_mse(*s_cand, *s_gt, trace);
        m.sino_mse = sm.overall;
        m.sino_mse_trace = sm.in_trace;
    }
    return m;
}

EvalReport aggregate(std::vector<CaseMetrics> rows) {
    if (rows.empty()) throw DataError("aggregate: empty dataset");
    EvalReport rep;

    struct Sums {
        long long n = 0;
        double psnr = 0.0, ssim = 0.0;
        long long n_mse = 0, n_trace = 0;
        double mse = 0.0, mse_trace = 0.0;
    };
    std::array<Sums, 5> gs;

    for (const CaseMetrics& r : rows) {
        if (r.group < 1 || r.group > 5)
            throw DataError("aggregate: case '" + r.case_id + "' has no size group");
        Sums& s = gs[r.group - 1];
        ++s.n;
        s.psnr += r.psnr_db;
        s.ssim += r.ssim;
        if (r.sino_mse) {
            ++s.n_mse;
            s.mse += *r.sino_mse;
        }
        if (r.sino_mse_trace) {
            ++s.n_trace;
            s.mse_trace += *r.sino_mse_trace;
        }
    }

    Sums total;
    for (int g = 0; g < 5; ++g) {
        const Sums& s = gs[g];
        EvalReport::Agg& a = rep.groups[g];
        a.n = s.n;
        if (s.n > 0) {
            a.psnr_db = s.psnr / s.n;
            a.ssim = s.ssim / s.n;
        }
        if (s.n_mse > 0) a.sino_mse = s.mse / s.n_mse;
        if (s.n_trace > 0) a.sino_mse_trace = s.mse_trace / s.n_trace;
        total.n += s.n;
        total.psnr += s.psnr;
        total.ssim += s.ssim;
        total.n_mse += s.n_mse;
        total.mse += s.mse;
        total.n_trace += s.n_trace;
        total.mse_trace += s.mse_trace;
    }
    rep.overall.n = total.n;
    rep.overall.psnr_db = total.psnr / total.n;
    rep.overall.ssim = total.ssim / total.n;
    if (total.n_mse > 0) rep.overall.sino_mse = total.mse / total.n_mse;
    if (total.n_trace > 0) rep.overall.sino_mse_trace = total.mse_trace / total.n_trace;

    rep.cases = std::move(rows);
    return rep;
}

EvalReport evaluate_dataset(const std::vector<EvalCase>& cases, const HuWindow& w) {
    if (cases.empty()) throw DataError("evaluate_dataset: empty dataset");
    std::vector<CaseMetrics> rows;
    rows.reserve(cases.size());
    for (const EvalCase& c : cases) {
        const Sinogram* sg = c.s_gt ? &*c.s_gt : nullptr;
        const Sinogram* sc = c.s_cand ? &*c.s_cand : nullptr;
        const Sinogram* tr = c.trace ? &*c.trace : nullptr;
        rows.push_back(evaluate_case(c.case_id, c.group, c.x_gt, c.x_cand, sg, sc, tr, w));
    }
    return aggregate(std::move(rows));
}

namespace {

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.10g", v);
    return buf;
}

std::string fmt(const std::optional<double>& v) {
    return v ? fmt(*v) : "nan";
}

void csv_row(std::string& out, const std::string& id, int group, double psnr_db, double ssim_v,
             const std::optional<double>& mse, const std::optional<double>& mse_trace) {
    out += id;
    out += ',';
    out += std::to_string(group);
    out += ',';
    out += fmt(psnr_db);
    out += ',';
    out += fmt(ssim_v);
    out += ',';
    out += fmt(mse);
    out += ',';
    out += fmt(mse_trace);
    out += '\n';
}

}  // namespace

std::string to_csv(const EvalReport& rep) {
    std::string out = "case_id,group,psnr_db,ssim,sino_mse,sino_mse_trace\n";
    for (const CaseMetrics& c : rep.cases)
        csv_row(out, c.case_id, c.group, c.psnr_db, c.ssim, c.sino_mse, c.sino_mse_trace);
    for (int g = 0; g < 5; ++g) {
        const EvalReport::Agg& a = rep.groups[g];
        csv_row(out, "group_" + std::to_string(g + 1), g + 1, a.psnr_db, a.ssim, a.sino_mse,
                a.sino_mse_trace);
    }
    csv_row(out, "overall", 0, rep.overall.psnr_db, rep.overall.ssim, rep.overall.sino_mse,
            rep.overall.sino_mse_trace);
    return out;
}

}  // namespace ctmar
