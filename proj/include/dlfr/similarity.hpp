#pragma once

#include <algorithm>
#include <cstddef>
#include <string>
#include <vector>

#include "dlfr/errors.hpp"
#include "dlfr/tensor.hpp"

namespace dlfr {

// Uniform-window SSIM, valid windows only (no padding), computed per channel
// and averaged over channels and window positions. Moments are population
// moments (divide by window area). C1 = (k1*L)^2, C2 = (k2*L)^2.
struct SsimParams {
    int window = 7;
    double k1 = 0.01;
    double k2 = 0.03;
    double dynamic_range = 1.0;
};

struct SimilarityMatrix {
    std::size_t n = 0;
    std::vector<double> s;  // row-major n*n

    SimilarityMatrix() = default;
    explicit SimilarityMatrix(std::size_t count) : n(count), s(count * count, 0.0) {}

    double at(std::size_t i, std::size_t j) const { return s[i * n + j]; }
    double& at(std::size_t i, std::size_t j) { return s[i * n + j]; }
};

namespace detail {

inline void validate_ssim_params(const SsimParams& p, std::size_t h, std::size_t w) {
    if (p.window <= 0 || p.window % 2 == 0) {
        throw shape_error("ssim: window must be odd and positive, got " + std::to_string(p.window));
    }
    if (static_cast<std::size_t>(p.window) > h || static_cast<std::size_t>(p.window) > w) {
        throw shape_error("ssim: window " + std::to_string(p.window) + " larger than frame " +
                          std::to_string(h) + "x" + std::to_string(w));
    }
    if (p.k1 <= 0 || p.k2 <= 0 || p.dynamic_range <= 0) {
        throw shape_error("ssim: k1, k2, dynamic_range must be positive");
    }
}

// Summed-area table over one channel plane; sat has (h+1)*(w+1) entries.
inline void build_sat(const float* plane, std::size_t h, std::size_t w,
                      const float* other, std::vector<double>& sat, bool product) {
    sat.assign((h + 1) * (w + 1), 0.0);
    const std::size_t stride = w + 1;
    for (std::size_t y = 0; y < h; ++y) {
        for (std::size_t x = 0; x < w; ++x) {
            const double v = product ? static_cast<double>(plane[y * w + x]) * other[y * w + x]
                                     : static_cast<double>(plane[y * w + x]);
            sat[(y + 1) * stride + (x + 1)] =
                v + sat[y * stride + (x + 1)] + sat[(y + 1) * stride + x] - sat[y * stride + x];
        }
    }
}

inline double sat_window(const std::vector<double>& sat, std::size_t stride, std::size_t y,
                         std::size_t x, std::size_t win) {
    return sat[(y + win) * stride + (x + win)] - sat[y * stride + (x + win)] -
           sat[(y + win) * stride + x] + sat[y * stride + x];
}

}  // namespace detail

// a, b: rank-3 [C,H,W] frames with matching shapes.
inline double ssim_frame_pair(const Tensor& a, const Tensor& b, const SsimParams& params = {}) {
    require_same_shape(a, b, "ssim_frame_pair");
    if (a.rank() != 3) {
        throw shape_error("ssim_frame_pair: expected rank-3 [C,H,W] frames, got " +
                          shape_string(a.shape));
    }
    const std::size_t c = a.shape[0], h = a.shape[1], w = a.shape[2];
    detail::validate_ssim_params(params, h, w);

    const std::size_t win = static_cast<std::size_t>(params.window);
    const double area = static_cast<double>(win * win);
    const double c1 = (params.k1 * params.dynamic_range) * (params.k1 * params.dynamic_range);
    const double c2 = (params.k2 * params.dynamic_range) * (params.k2 * params.dynamic_range);
    const std::size_t stride = w + 1;

    std::vector<double> sa, sb, saa, sbb, sab;
    double total = 0.0;
    std::size_t windows = 0;
    for (std::size_t ch = 0; ch < c; ++ch) {
        const float* pa = a.data.data() + ch * h * w;
        const float* pb = b.data.data() + ch * h * w;
        detail::build_sat(pa, h, w, nullptr, sa, false);
        detail::build_sat(pb, h, w, nullptr, sb, false);
        detail::build_sat(pa, h, w, pa, saa, true);
        detail::build_sat(pb, h, w, pb, sbb, true);
        detail::build_sat(pa, h, w, pb, sab, true);
        for (std::size_t y = 0; y + win <= h; ++y) {
            for (std::size_t x = 0; x + win <= w; ++x) {
                const double mu_a = detail::sat_window(sa, stride, y, x, win) / area;
                const double mu_b = detail::sat_window(sb, stride, y, x, win) / area;
                const double var_a = detail::sat_window(saa, stride, y, x, win) / area - mu_a * mu_a;
                const double var_b = detail::sat_window(sbb, stride, y, x, win) / area - mu_b * mu_b;
                const double cov = detail::sat_window(sab, stride, y, x, win) / area - mu_a * mu_b;
                const double num = (2.0 * mu_a * mu_b + c1) * (2.0 * cov + c2);
                const double den = (mu_a * mu_a + mu_b * mu_b + c1) * (var_a + var_b + c2);
                // bounded by 1 in exact arithmetic; clamp away rounding spill
                // so near-identical frames cannot score above 1
                total += std::clamp(num / den, -1.0, 1.0);
                ++windows;
            }
        }
    }
    return total / static_cast<double>(windows);
}

// All-pairs frame similarity. Upper triangle computed, mirrored below;
// diagonal pinned to 1 (SSIM of a frame with itself is identically 1).
inline SimilarityMatrix similarity_matrix(const PixelVideo& video, const SsimParams& params = {}) {
    const std::size_t n = video.frames();
    SimilarityMatrix m(n);
    std::vector<Tensor> frames;
    frames.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        frames.push_back(video.frame(i));
    }
    for (std::size_t i = 0; i < n; ++i) {
        m.at(i, i) = 1.0;
        for (std::size_t j = i + 1; j < n; ++j) {
            const double v = ssim_frame_pair(frames[i], frames[j], params);
            m.at(i, j) = v;
            m.at(j, i) = v;
        }
    }
    return m;
}

}  // namespace dlfr
