#pragma once

#include <algorithm>
#include <cstdint>
#include <string>
#include <vector>

#include "dlfr/errors.hpp"
#include "dlfr/rng.hpp"
#include "dlfr/tensor.hpp"

namespace dlfr {

enum class MotionKind { Static, MovingSquare, Noise };

struct SceneSegment {
    MotionKind kind = MotionKind::Static;
    int length = 1;
    double param = 0.0;  // MovingSquare: speed in px/frame; Noise: sigma
};

// Piecewise scene: a filled square over a flat background, either frozen,
// sliding horizontally, or dissolving under per-frame Gaussian noise.
struct SyntheticSceneSpec {
    int frames = 16;
    int channels = 4;
    int height = 64;
    int width = 64;
    double base_level = 0.3;
    std::vector<SceneSegment> segments;
};

inline void validate_scene(const SyntheticSceneSpec& spec) {
    if (spec.frames < 1 || spec.channels < 1 || spec.height < 1 || spec.width < 1) {
        throw config_error("scene: extents must be >= 1");
    }
    if (spec.segments.empty()) {
        throw config_error("scene: needs at least one segment");
    }
    int total = 0;
    for (const SceneSegment& s : spec.segments) {
        if (s.length < 1) {
            throw config_error("scene: segment lengths must be >= 1");
        }
        total += s.length;
    }
    if (total != spec.frames) {
        throw config_error("scene: segment lengths sum to " + std::to_string(total) +
                           ", expected " + std::to_string(spec.frames));
    }
}

namespace detail {

inline void draw_frame(float* dst, const SyntheticSceneSpec& spec, int square_x) {
    const int h = spec.height, w = spec.width, c = spec.channels;
    const int side = std::max(2, h / 4);
    const int y0 = h / 4;
    for (int ch = 0; ch < c; ++ch) {
        const float bg =
            std::clamp(static_cast<float>(spec.base_level + 0.02 * ch), 0.0f, 1.0f);
        const float fg = std::clamp(0.85f - 0.03f * static_cast<float>(ch), 0.0f, 1.0f);
        float* plane = dst + static_cast<std::size_t>(ch) * h * w;
        for (int y = 0; y < h; ++y) {
            for (int x = 0; x < w; ++x) {
                const bool inside = y >= y0 && y < y0 + side && x >= square_x &&
                                    x < square_x + side;
                plane[y * w + x] = inside ? fg : bg;
            }
        }
    }
}

}  // namespace detail

// Deterministic for a given (spec, seed): noise is drawn frame by frame in
// row-major order from one generator stream.
inline PixelVideo generate_scene(const SyntheticSceneSpec& spec, std::uint64_t seed) {
    validate_scene(spec);
    PixelVideo video(static_cast<std::size_t>(spec.frames), static_cast<std::size_t>(spec.channels),
                     static_cast<std::size_t>(spec.height), static_cast<std::size_t>(spec.width));
    Rng rng(seed);
    const int side = std::max(2, spec.height / 4);
    const int x_home = spec.width / 8;
    const int x_range = std::max(1, spec.width - side);
    std::size_t f = 0;
    for (const SceneSegment& seg : spec.segments) {
        for (int i = 0; i < seg.length; ++i, ++f) {
            float* dst = video.frame_data(f);
            switch (seg.kind) {
                case MotionKind::Static:
                    detail::draw_frame(dst, spec, x_home);
                    break;
                case MotionKind::MovingSquare: {
                    const int x = (x_home + static_cast<int>(seg.param * i)) % x_range;
                    detail::draw_frame(dst, spec, x < 0 ? x + x_range : x);
                    break;
                }
                case MotionKind::Noise: {
                    detail::draw_frame(dst, spec, x_home);
                    for (std::size_t p = 0; p < video.frame_size(); ++p) {
                        dst[p] = std::clamp(
                            dst[p] + static_cast<float>(seg.param * rng.normal()), 0.0f, 1.0f);
                    }
                    break;
                }
            }
        }
    }
    return video;
}

// 16-frame mixed scene used as the default workload: a merge-friendly static
// head, a sliding middle, a noisy tail.
inline SyntheticSceneSpec standard_scene() {
    SyntheticSceneSpec spec;
    spec.segments = {{MotionKind::Static, 4, 0.0},
                     {MotionKind::MovingSquare, 8, 4.0},
                     {MotionKind::Noise, 4, 0.15}};
    return spec;
}

}  // namespace dlfr
