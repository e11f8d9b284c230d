#pragma once

#include <algorithm>
#include <string>

#include "dlfr/errors.hpp"
#include "dlfr/tensor.hpp"

namespace dlfr {

// Deterministic stand-in for the trimmed VAE decoder/encoder pair: latent
// values in [-1,1] map affinely onto pixel values in [0,1], nearest-neighbor
// upsampling against average pooling. The channel map is the identity
// (C_lat == C_px). encode(decode(x)) == x wherever no clamping occurs.
struct CodecConfig {
    int spatial_factor = 4;
    int temporal_factor = 1;
};

inline void validate_codec(const CodecConfig& cfg) {
    if (cfg.spatial_factor < 1 || cfg.temporal_factor < 1) {
        throw bounds_error("codec: factors must be >= 1");
    }
}

// Per-frame nearest-neighbor upsample by spatial_factor, frame replication by
// temporal_factor, then pixel = clamp(0.5*v + 0.5, 0, 1).
inline PixelVideo compression_decode(const LatentVideo& x, const CodecConfig& cfg) {
    validate_codec(cfg);
    const std::size_t s = static_cast<std::size_t>(cfg.spatial_factor);
    const std::size_t tf = static_cast<std::size_t>(cfg.temporal_factor);
    const std::size_t c = x.channels(), lh = x.height(), lw = x.width();
    const std::size_t ph = lh * s, pw = lw * s;
    PixelVideo out(x.frames() * tf, c, ph, pw);
    for (std::size_t f = 0; f < x.frames(); ++f) {
        float* first = out.frame_data(f * tf);
        const float* src = x.frame_data(f);
        for (std::size_t ch = 0; ch < c; ++ch) {
            for (std::size_t y = 0; y < ph; ++y) {
                for (std::size_t px = 0; px < pw; ++px) {
                    const float v = src[(ch * lh + y / s) * lw + px / s];
                    first[(ch * ph + y) * pw + px] =
                        std::clamp(0.5f * v + 0.5f, 0.0f, 1.0f);
                }
            }
        }
        for (std::size_t rep = 1; rep < tf; ++rep) {
            std::copy(first, first + out.frame_size(), out.frame_data(f * tf + rep));
        }
    }
    return out;
}

// Inverse affine map, average pooling by spatial_factor, temporal mean over
// groups of temporal_factor frames.
inline LatentVideo compression_encode(const PixelVideo& y, const CodecConfig& cfg) {
    validate_codec(cfg);
    const std::size_t s = static_cast<std::size_t>(cfg.spatial_factor);
    const std::size_t tf = static_cast<std::size_t>(cfg.temporal_factor);
    if (y.height() % s != 0 || y.width() % s != 0) {
        throw shape_error("compression_encode: frame " + std::to_string(y.height()) + "x" +
                          std::to_string(y.width()) + " not divisible by spatial_factor " +
                          std::to_string(s));
    }
    if (y.frames() % tf != 0) {
        throw shape_error("compression_encode: " + std::to_string(y.frames()) +
                          " frames not divisible by temporal_factor " + std::to_string(tf));
    }
    const std::size_t c = y.channels(), ph = y.height(), pw = y.width();
    const std::size_t lh = ph / s, lw = pw / s;
    LatentVideo out(y.frames() / tf, c, lh, lw);
    const double inv = 1.0 / static_cast<double>(tf * s * s);
    for (std::size_t f = 0; f < out.frames(); ++f) {
        float* dst = out.frame_data(f);
        for (std::size_t ch = 0; ch < c; ++ch) {
            for (std::size_t ly = 0; ly < lh; ++ly) {
                for (std::size_t lx = 0; lx < lw; ++lx) {
                    double acc = 0.0;
                    for (std::size_t g = 0; g < tf; ++g) {
                        const float* src = y.frame_data(f * tf + g);
                        for (std::size_t dy = 0; dy < s; ++dy) {
                            for (std::size_t dx = 0; dx < s; ++dx) {
                                acc += 2.0 * src[(ch * ph + ly * s + dy) * pw + lx * s + dx] - 1.0;
                            }
                        }
                    }
                    dst[(ch * lh + ly) * lw + lx] = static_cast<float>(acc * inv);
                }
            }
        }
    }
    return out;
}

}  // namespace dlfr
