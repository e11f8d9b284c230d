#pragma once

#include <cmath>
#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include "dlfr/errors.hpp"

namespace dlfr {

// Dense row-major float32 tensor. Plain value type: copy, move, compare.
// Reductions accumulate in double.
struct Tensor {
    std::vector<std::size_t> shape;
    std::vector<float> data;

    Tensor() = default;

    explicit Tensor(std::vector<std::size_t> s) : shape(std::move(s)) {
        data.assign(count(shape), 0.0f);
    }

    Tensor(std::vector<std::size_t> s, std::vector<float> d)
        : shape(std::move(s)), data(std::move(d)) {
        if (data.size() != count(shape)) {
            throw shape_error("tensor data length " + std::to_string(data.size()) +
                              " does not match shape product " + std::to_string(count(shape)));
        }
    }

    static Tensor full(std::vector<std::size_t> s, float v) {
        Tensor t(std::move(s));
        for (float& x : t.data) {
            x = v;
        }
        return t;
    }

    static std::size_t count(const std::vector<std::size_t>& s) {
        std::size_t n = 1;
        for (std::size_t e : s) {
            n *= e;
        }
        return n;
    }

    std::size_t numel() const { return data.size(); }
    std::size_t rank() const { return shape.size(); }

    float& operator[](std::size_t i) { return data[i]; }
    float operator[](std::size_t i) const { return data[i]; }

    bool same_shape(const Tensor& o) const { return shape == o.shape; }

    bool all_finite() const {
        for (float v : data) {
            if (!std::isfinite(v)) {
                return false;
            }
        }
        return true;
    }
};

inline std::string shape_string(const std::vector<std::size_t>& s) {
    std::string out = "[";
    for (std::size_t i = 0; i < s.size(); ++i) {
        if (i) {
            out += ",";
        }
        out += std::to_string(s[i]);
    }
    return out + "]";
}

inline void require_same_shape(const Tensor& a, const Tensor& b, const char* op) {
    if (!a.same_shape(b)) {
        throw shape_error(std::string(op) + ": shape mismatch " + shape_string(a.shape) +
                          " vs " + shape_string(b.shape));
    }
}

// out[i] = (1-w)*a[i] + w*b[i]
inline Tensor elementwise_lerp(const Tensor& a, const Tensor& b, double w) {
    require_same_shape(a, b, "elementwise_lerp");
    Tensor out(a.shape);
    const double cw = 1.0 - w;
    for (std::size_t i = 0; i < a.numel(); ++i) {
        out.data[i] = static_cast<float>(cw * a.data[i] + w * b.data[i]);
    }
    return out;
}

inline Tensor mean_over_first_axis(const std::vector<Tensor>& stack) {
    if (stack.empty()) {
        throw shape_error("mean_over_first_axis: empty stack");
    }
    for (const Tensor& t : stack) {
        require_same_shape(stack.front(), t, "mean_over_first_axis");
    }
    Tensor out(stack.front().shape);
    const double inv = 1.0 / static_cast<double>(stack.size());
    for (std::size_t i = 0; i < out.numel(); ++i) {
        double acc = 0.0;
        for (const Tensor& t : stack) {
            acc += t.data[i];
        }
        out.data[i] = static_cast<float>(acc * inv);
    }
    return out;
}

namespace detail {

inline void require_video_shape(const Tensor& t, const char* type_name) {
    if (t.rank() != 4) {
        throw shape_error(std::string(type_name) + ": expected rank-4 tensor [N,C,H,W], got rank " +
                          std::to_string(t.rank()));
    }
    for (std::size_t e : t.shape) {
        if (e == 0) {
            throw shape_error(std::string(type_name) + ": zero extent in " + shape_string(t.shape));
        }
    }
}

}  // namespace detail

// Diffusion-state stack, shape [N_latent, C_lat, H_latent, W_latent].
struct LatentVideo {
    Tensor tensor;

    LatentVideo() = default;
    explicit LatentVideo(Tensor t) : tensor(std::move(t)) {
        detail::require_video_shape(tensor, "LatentVideo");
    }
    LatentVideo(std::size_t n, std::size_t c, std::size_t h, std::size_t w)
        : tensor(std::vector<std::size_t>{n, c, h, w}) {}

    std::size_t frames() const { return tensor.shape[0]; }
    std::size_t channels() const { return tensor.shape[1]; }
    std::size_t height() const { return tensor.shape[2]; }
    std::size_t width() const { return tensor.shape[3]; }
    std::size_t frame_size() const { return channels() * height() * width(); }

    float* frame_data(std::size_t f) { return tensor.data.data() + f * frame_size(); }
    const float* frame_data(std::size_t f) const { return tensor.data.data() + f * frame_size(); }

    // Copy of frame f as a rank-3 [C,H,W] tensor.
    Tensor frame(std::size_t f) const {
        if (f >= frames()) {
            throw bounds_error("LatentVideo::frame: index " + std::to_string(f) + " out of range");
        }
        return Tensor({channels(), height(), width()},
                      std::vector<float>(frame_data(f), frame_data(f) + frame_size()));
    }
};

// Decoded frame stack, shape [N_frames, C_px, H, W], values in [0,1].
struct PixelVideo {
    Tensor tensor;

    PixelVideo() = default;
    explicit PixelVideo(Tensor t) : tensor(std::move(t)) {
        detail::require_video_shape(tensor, "PixelVideo");
    }
    PixelVideo(std::size_t n, std::size_t c, std::size_t h, std::size_t w)
        : tensor(std::vector<std::size_t>{n, c, h, w}) {}

    std::size_t frames() const { return tensor.shape[0]; }
    std::size_t channels() const { return tensor.shape[1]; }
    std::size_t height() const { return tensor.shape[2]; }
    std::size_t width() const { return tensor.shape[3]; }
    std::size_t frame_size() const { return channels() * height() * width(); }

    float* frame_data(std::size_t f) { return tensor.data.data() + f * frame_size(); }
    const float* frame_data(std::size_t f) const { return tensor.data.data() + f * frame_size(); }

    Tensor frame(std::size_t f) const {
        if (f >= frames()) {
            throw bounds_error("PixelVideo::frame: index " + std::to_string(f) + " out of range");
        }
        return Tensor({channels(), height(), width()},
                      std::vector<float>(frame_data(f), frame_data(f) + frame_size()));
    }
};

}  // namespace dlfr
