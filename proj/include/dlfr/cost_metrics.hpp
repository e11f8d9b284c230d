#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <string>
#include <utility>
#include <vector>

#include "dlfr/errors.hpp"
#include "dlfr/flow.hpp"
#include "dlfr/schedule.hpp"
#include "dlfr/tensor.hpp"

namespace dlfr {

// Transformer step cost in FLOPs for n tokens:
//   L * (a*(n+n_txt)^2*d + c_lin*(n+n_txt)*d^2)
// a covers the two quadratic attention products, c_lin the projections + MLP.
struct DiTCostParams {
    int n_layers = 41;
    int model_dim = 128;
    double attn_coeff = 2.0;
    double linear_coeff = 12.0;
    std::int64_t text_tokens = 0;
};

inline double step_cost(std::int64_t n_tokens, const DiTCostParams& p) {
    if (n_tokens < 1) {
        throw bounds_error("step_cost: n_tokens must be >= 1");
    }
    const double n = static_cast<double>(n_tokens + p.text_tokens);
    const double d = static_cast<double>(p.model_dim);
    return static_cast<double>(p.n_layers) *
           (p.attn_coeff * n * n * d + p.linear_coeff * n * d * d);
}

struct CostReport {
    double baseline_flops = 0.0;
    double dlfr_flops = 0.0;       // pre + overhead + compressed
    double pre_flops = 0.0;        // k full-resolution steps
    double overhead_flops = 0.0;   // compression-module work
    double compressed_flops = 0.0; // T-k steps on the merged grid
    std::int64_t tokens_full = 0;
    std::int64_t tokens_compressed = 0;
    double speedup = 1.0;
};

// Default accounting for the compression module itself: one full-resolution
// step (the preview) plus a decoder and an encoder pass at linear cost.
inline double default_module_overhead(std::int64_t n_full, const DiTCostParams& p) {
    return step_cost(n_full, p) +
           2.0 * p.linear_coeff * static_cast<double>(n_full) * static_cast<double>(p.model_dim);
}

inline CostReport pipeline_cost(std::int64_t n_full, std::int64_t n_compressed,
                                const SamplerConfig& cfg, const DiTCostParams& p,
                                double overhead) {
    validate_sampler(cfg);
    if (n_compressed > n_full) {
        throw bounds_error("pipeline_cost: n_compressed must not exceed n_full");
    }
    const double t = static_cast<double>(cfg.total_steps);
    const double k = static_cast<double>(cfg.compression_start);
    CostReport r;
    r.tokens_full = n_full;
    r.tokens_compressed = n_compressed;
    r.baseline_flops = t * step_cost(n_full, p);
    r.pre_flops = k * step_cost(n_full, p);
    r.overhead_flops = overhead;
    r.compressed_flops = (t - k) * step_cost(n_compressed, p);
    r.dlfr_flops = r.pre_flops + r.overhead_flops + r.compressed_flops;
    r.speedup = r.baseline_flops / r.dlfr_flops;
    return r;
}

// 10*log10(peak^2 / MSE), capped at 100 dB; identical inputs hit the cap.
inline double psnr(const PixelVideo& a, const PixelVideo& b, double peak = 1.0) {
    require_same_shape(a.tensor, b.tensor, "psnr");
    double acc = 0.0;
    for (std::size_t i = 0; i < a.tensor.numel(); ++i) {
        const double d = static_cast<double>(a.tensor.data[i]) - b.tensor.data[i];
        acc += d * d;
    }
    const double mse = acc / static_cast<double>(a.tensor.numel());
    if (mse == 0.0) {
        return 100.0;
    }
    return std::min(100.0, 10.0 * std::log10(peak * peak / mse));
}

// Mean absolute difference between consecutive frames, averaged over pairs.
inline double flicker_mae(const PixelVideo& v) {
    if (v.frames() < 2) {
        throw shape_error("flicker_mae: need at least 2 frames");
    }
    const std::size_t fs = v.frame_size();
    double total = 0.0;
    for (std::size_t f = 0; f + 1 < v.frames(); ++f) {
        const float* a = v.frame_data(f);
        const float* b = v.frame_data(f + 1);
        double acc = 0.0;
        for (std::size_t i = 0; i < fs; ++i) {
            acc += std::fabs(static_cast<double>(a[i]) - b[i]);
        }
        total += acc / static_cast<double>(fs);
    }
    return total / static_cast<double>(v.frames() - 1);
}

// "metric,value" rows, fixed 6-decimal formatting, stable row order.
inline std::string metrics_csv(const std::vector<std::pair<std::string, double>>& rows) {
    std::string out = "metric,value\n";
    char buf[64];
    for (const auto& [name, value] : rows) {
        std::snprintf(buf, sizeof(buf), "%.6f", value);
        out += name;
        out += ',';
        out += buf;
        out += '\n';
    }
    return out;
}

// Fixed field order, shortest round-trip number text.
inline std::string cost_report_json(const CostReport& r) {
    const auto num = [](double v) { return detail::double_string(v); };
    std::string out = "{";
    out += "\"baseline_flops\": " + num(r.baseline_flops);
    out += ", \"dlfr_flops\": " + num(r.dlfr_flops);
    out += ", \"pre_flops\": " + num(r.pre_flops);
    out += ", \"overhead_flops\": " + num(r.overhead_flops);
    out += ", \"compressed_flops\": " + num(r.compressed_flops);
    out += ", \"tokens_full\": " + std::to_string(r.tokens_full);
    out += ", \"tokens_compressed\": " + std::to_string(r.tokens_compressed);
    out += ", \"speedup\": " + num(r.speedup);
    out += "}";
    return out;
}

}  // namespace dlfr
