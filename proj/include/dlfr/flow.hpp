#pragma once

#include <algorithm>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "dlfr/errors.hpp"
#include "dlfr/rng.hpp"
#include "dlfr/schedule.hpp"
#include "dlfr/tensor.hpp"

namespace dlfr {

// Sampling runs over normalized time tau = step/total_steps in [0,1). The
// velocity field transports noise at tau=0 toward data at tau=1.
struct SamplerConfig {
    int total_steps = 50;       // T
    int compression_start = 5;  // k, 0 <= k < T
};

inline void validate_sampler(const SamplerConfig& cfg) {
    if (cfg.total_steps < 1) {
        throw bounds_error("sampler: total_steps must be >= 1");
    }
    if (cfg.compression_start < 0 || cfg.compression_start >= cfg.total_steps) {
        throw bounds_error("sampler: compression_start must satisfy 0 <= k < total_steps");
    }
}

class FlowModel {
public:
    virtual ~FlowModel() = default;

    // dX/dtau at state x and normalized time tau in [0,1). Same shape as x.
    virtual LatentVideo velocity(const LatentVideo& x, double tau) const = 0;

    // The model restricted to the compressed frame grid implied by `map`,
    // used to resume sampling after frame merging.
    virtual std::unique_ptr<FlowModel> compressed_view(const FrameIndexMap& map) const = 0;
};

class ZeroFlow final : public FlowModel {
public:
    LatentVideo velocity(const LatentVideo& x, double) const override {
        return LatentVideo(x.frames(), x.channels(), x.height(), x.width());
    }
    std::unique_ptr<FlowModel> compressed_view(const FrameIndexMap&) const override {
        return std::make_unique<ZeroFlow>();
    }
};

// State-independent drift. Scalar form broadcasts over any shape; the field
// form carries a latent-shaped drift whose compressed view merges frames the
// same way merged content does.
class ConstantFlow final : public FlowModel {
public:
    explicit ConstantFlow(float value) : scalar_(value), has_field_(false) {}
    explicit ConstantFlow(LatentVideo drift) : field_(std::move(drift)), has_field_(true) {}

    LatentVideo velocity(const LatentVideo& x, double) const override {
        if (!has_field_) {
            LatentVideo v(x.frames(), x.channels(), x.height(), x.width());
            for (float& e : v.tensor.data) {
                e = scalar_;
            }
            return v;
        }
        require_same_shape(x.tensor, field_.tensor, "ConstantFlow::velocity");
        return field_;
    }

    std::unique_ptr<FlowModel> compressed_view(const FrameIndexMap& map) const override {
        if (!has_field_) {
            return std::make_unique<ConstantFlow>(scalar_);
        }
        return std::make_unique<ConstantFlow>(apply_schedule_latent(field_, map));
    }

private:
    float scalar_ = 0.0f;
    LatentVideo field_;
    bool has_field_;
};

// Straight-path field toward a fixed clean endpoint:
//   v(x, tau) = (target - x) / (1 - tau)
// Along any trajectory of this field the velocity is constant, so the
// uniform-step Euler sampler integrates it exactly.
class LinearTargetFlow : public FlowModel {
public:
    explicit LinearTargetFlow(LatentVideo target) : target_(std::move(target)) {}

    const LatentVideo& target() const { return target_; }

    LatentVideo velocity(const LatentVideo& x, double tau) const override {
        if (tau >= 1.0) {
            throw bounds_error("LinearTargetFlow: velocity undefined at tau >= 1");
        }
        require_same_shape(x.tensor, target_.tensor, "LinearTargetFlow::velocity");
        LatentVideo v(x.frames(), x.channels(), x.height(), x.width());
        const double inv = 1.0 / (1.0 - tau);
        for (std::size_t i = 0; i < v.tensor.numel(); ++i) {
            v.tensor.data[i] =
                static_cast<float>((target_.tensor.data[i] - x.tensor.data[i]) * inv);
        }
        return v;
    }

    std::unique_ptr<FlowModel> compressed_view(const FrameIndexMap& map) const override {
        return std::make_unique<LinearTargetFlow>(apply_schedule_latent(target_, map));
    }

private:
    LatentVideo target_;
};

// LinearTargetFlow whose endpoint is piecewise constant in time: each scene
// segment repeats one latent frame, giving similarity structure the scheduler
// can act on.
class PiecewiseSceneFlow final : public LinearTargetFlow {
public:
    // segment_frames: one rank-3 [C,H,W] latent frame per segment.
    PiecewiseSceneFlow(const std::vector<int>& segment_lengths,
                       const std::vector<Tensor>& segment_frames)
        : LinearTargetFlow(build_target(segment_lengths, segment_frames)) {}

private:
    static LatentVideo build_target(const std::vector<int>& lengths,
                                    const std::vector<Tensor>& frames) {
        if (lengths.empty() || lengths.size() != frames.size()) {
            throw shape_error("PiecewiseSceneFlow: need one frame per segment");
        }
        for (const Tensor& f : frames) {
            if (f.rank() != 3) {
                throw shape_error("PiecewiseSceneFlow: segment frames must be rank-3 [C,H,W]");
            }
            require_same_shape(frames.front(), f, "PiecewiseSceneFlow");
        }
        std::size_t total = 0;
        for (int len : lengths) {
            if (len < 1) {
                throw bounds_error("PiecewiseSceneFlow: segment lengths must be >= 1");
            }
            total += static_cast<std::size_t>(len);
        }
        LatentVideo target(total, frames[0].shape[0], frames[0].shape[1], frames[0].shape[2]);
        std::size_t f = 0;
        for (std::size_t s = 0; s < lengths.size(); ++s) {
            for (int r = 0; r < lengths[s]; ++r, ++f) {
                std::copy(frames[s].data.begin(), frames[s].data.end(), target.frame_data(f));
            }
        }
        return target;
    }
};

// Seeded standard-normal latent, filled in row-major order (see Rng for the
// generator definition). This is the X at tau=0 for every run.
inline LatentVideo gaussian_latent(std::size_t n, std::size_t c, std::size_t h, std::size_t w,
                                   std::uint64_t seed) {
    LatentVideo x(n, c, h, w);
    Rng rng(seed);
    for (float& v : x.tensor.data) {
        v = static_cast<float>(rng.normal());
    }
    return x;
}

// Explicit Euler with uniform step 1/T:
//   X <- X + v(X, s/T) / T   for s = from_step ... to_step-1
inline LatentVideo denoise_steps(LatentVideo x, int from_step, int to_step, const FlowModel& model,
                                 const SamplerConfig& cfg) {
    if (!(0 <= from_step && from_step < to_step && to_step <= cfg.total_steps)) {
        throw bounds_error("denoise_steps: need 0 <= from < to <= total_steps, got " +
                           std::to_string(from_step) + ".." + std::to_string(to_step));
    }
    const double t = static_cast<double>(cfg.total_steps);
    for (int s = from_step; s < to_step; ++s) {
        const LatentVideo v = model.velocity(x, static_cast<double>(s) / t);
        const double dt = 1.0 / t;
        for (std::size_t i = 0; i < x.tensor.numel(); ++i) {
            x.tensor.data[i] =
                static_cast<float>(x.tensor.data[i] + v.tensor.data[i] * dt);
        }
    }
    return x;
}

// Single extrapolation from step k to the clean endpoint:
//   X_pre = X + v(X, k/T) * (T-k)/T
inline LatentVideo one_step_preview(const LatentVideo& x_k, int k, const FlowModel& model,
                                    const SamplerConfig& cfg) {
    if (k < 0 || k >= cfg.total_steps) {
        throw bounds_error("one_step_preview: need 0 <= k < total_steps, got " +
                           std::to_string(k));
    }
    const double t = static_cast<double>(cfg.total_steps);
    const double horizon = (t - static_cast<double>(k)) / t;
    const LatentVideo v = model.velocity(x_k, static_cast<double>(k) / t);
    LatentVideo out = x_k;
    for (std::size_t i = 0; i < out.tensor.numel(); ++i) {
        out.tensor.data[i] =
            static_cast<float>(out.tensor.data[i] + v.tensor.data[i] * horizon);
    }
    return out;
}

// Re-mix selected noise with the compressed clean latent so the result sits
// at step k of the straight trajectory between them:
//   X^k = (1 - k/T) * X0 + (k/T) * X_pre
inline LatentVideo renoise(const LatentVideo& x0_dy, const LatentVideo& x_dy_pre, int k,
                           const SamplerConfig& cfg) {
    if (k < 0 || k > cfg.total_steps) {
        throw bounds_error("renoise: need 0 <= k <= total_steps, got " + std::to_string(k));
    }
    require_same_shape(x0_dy.tensor, x_dy_pre.tensor, "renoise");
    const double w = static_cast<double>(k) / static_cast<double>(cfg.total_steps);
    return LatentVideo(elementwise_lerp(x0_dy.tensor, x_dy_pre.tensor, w));
}

}  // namespace dlfr
