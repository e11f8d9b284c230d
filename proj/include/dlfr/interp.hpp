#pragma once

#include <algorithm>
#include <string>
#include <utility>

#include "dlfr/errors.hpp"
#include "dlfr/schedule.hpp"
#include "dlfr/tensor.hpp"

namespace dlfr {

// One missing frame between two kept frames that sit gap steps apart.
struct InterpRequest {
    Tensor left;   // kept frame Y_i
    Tensor right;  // next kept frame
    int delta = 1; // offset from left, 1 <= delta <= gap-1
    int gap = 2;
};

// Deterministic blending stand-in for a learned interpolation network.
inline Tensor interpolate_frame(const InterpRequest& req) {
    if (req.gap < 2 || req.delta < 1 || req.delta > req.gap - 1) {
        throw bounds_error("interpolate_frame: need 1 <= delta <= gap-1, got delta " +
                           std::to_string(req.delta) + ", gap " + std::to_string(req.gap));
    }
    return elementwise_lerp(req.left, req.right,
                            static_cast<double>(req.delta) / static_cast<double>(req.gap));
}

// Expand a compressed video (one frame per segment) back to map.n_original
// frames. Kept indices receive their frames bit-exactly; interior gaps are
// blended between neighboring kept frames; a merged trailing segment repeats
// its kept frame (no right anchor exists).
inline PixelVideo restore_full_rate(const PixelVideo& video, const FrameIndexMap& map) {
    if (static_cast<int>(video.frames()) != map.compressed_length()) {
        throw shape_error("restore_full_rate: video has " + std::to_string(video.frames()) +
                          " frames, map expects " + std::to_string(map.compressed_length()));
    }
    PixelVideo out(static_cast<std::size_t>(map.n_original), video.channels(), video.height(),
                   video.width());
    const std::size_t fs = video.frame_size();
    for (std::size_t s = 0; s < map.kept.size(); ++s) {
        const float* src = video.frame_data(s);
        std::copy(src, src + fs, out.frame_data(static_cast<std::size_t>(map.kept[s])));
        if (s + 1 < map.kept.size()) {
            const int gap = map.gaps[s];
            if (gap > 1) {
                const Tensor left = video.frame(s);
                const Tensor right = video.frame(s + 1);
                for (int d = 1; d < gap; ++d) {
                    const Tensor mid = interpolate_frame({left, right, d, gap});
                    std::copy(mid.data.begin(), mid.data.end(),
                              out.frame_data(static_cast<std::size_t>(map.kept[s] + d)));
                }
            }
        } else {
            for (int f = map.kept[s] + 1; f < map.n_original; ++f) {
                std::copy(src, src + fs, out.frame_data(static_cast<std::size_t>(f)));
            }
        }
    }
    return out;
}

}  // namespace dlfr
