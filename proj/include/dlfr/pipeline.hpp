#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "dlfr/codec.hpp"
#include "dlfr/cost_metrics.hpp"
#include "dlfr/errors.hpp"
#include "dlfr/flow.hpp"
#include "dlfr/interp.hpp"
#include "dlfr/rope.hpp"
#include "dlfr/schedule.hpp"
#include "dlfr/similarity.hpp"
#include "dlfr/tensor.hpp"

namespace dlfr {

struct LatentGeometry {
    std::size_t frames = 16;
    std::size_t channels = 4;
    std::size_t height = 16;
    std::size_t width = 16;
};

struct PipelineConfig {
    LatentGeometry geometry;
    SamplerConfig sampler;
    ScheduleConstraints constraints;
    CodecConfig codec;
    SsimParams ssim;
    RopeConfig rope;
    LayerRopeAssignment layers;
    DiTCostParams cost;
    std::uint64_t seed = 1;
    bool disable_compression_module = false;
    bool skip_denoise_renoise = false;
    bool keep_intermediates = false;
};

inline void validate_pipeline(const PipelineConfig& cfg) {
    validate_sampler(cfg.sampler);
    validate_constraints(cfg.constraints);
    validate_codec(cfg.codec);
    validate_rope(cfg.rope);
    if (cfg.geometry.frames < 1 || cfg.geometry.channels < 1 || cfg.geometry.height < 1 ||
        cfg.geometry.width < 1) {
        throw config_error("pipeline: latent geometry extents must be >= 1");
    }
    // The end-to-end run is defined for a codec that keeps the frame count;
    // temporal resampling is supported by the codec and noise selection in
    // isolation only.
    if (cfg.codec.temporal_factor != 1) {
        throw config_error("pipeline: codec temporal_factor must be 1 for full runs");
    }
    if (cfg.layers.n_layers < 1) {
        throw config_error("pipeline: n_layers must be >= 1");
    }
    for (int l : cfg.layers.global_layers) {
        if (l < 0 || l >= cfg.layers.n_layers) {
            throw config_error("pipeline: global layer index " + std::to_string(l) +
                               " outside [0," + std::to_string(cfg.layers.n_layers) + ")");
        }
    }
}

struct Intermediates {
    LatentVideo preview;   // latent extrapolated to the clean endpoint
    PixelVideo y_low;      // decoded preview
    PixelVideo y_dy_low;   // merged decoded preview
    LatentVideo x_dy_k;    // state that resumes compressed sampling
};

struct RunResult {
    PixelVideo video;
    Schedule schedule;
    FrameIndexMap map;
    SimilarityMatrix similarity;
    CostReport cost;
    RopeTable global_table;
    RopeTable local_table;
    std::vector<RopeMode> layer_modes;
    std::optional<Intermediates> intermediates;
};

namespace detail {

inline Schedule identity_schedule(int n, double theta) {
    Schedule sch;
    sch.n_original = n;
    sch.theta = theta;
    for (int i = 0; i < n; ++i) {
        sch.segments.push_back({i, i});
    }
    return sch;
}

inline std::int64_t grid_tokens(std::size_t frames, const LatentGeometry& g) {
    return static_cast<std::int64_t>(frames) * static_cast<std::int64_t>(g.height) *
           static_cast<std::int64_t>(g.width);
}

inline void attach_rope(RunResult& r, const PipelineConfig& cfg) {
    const std::vector<int> global_pos = global_rope_positions(r.map);
    const std::vector<int> local_pos = local_rope_positions(r.map.compressed_length());
    r.global_table = build_rope_table(global_pos, static_cast<int>(cfg.geometry.height),
                                      static_cast<int>(cfg.geometry.width), cfg.rope);
    r.local_table = build_rope_table(local_pos, static_cast<int>(cfg.geometry.height),
                                     static_cast<int>(cfg.geometry.width), cfg.rope);
    r.layer_modes = resolve_layer_modes(cfg.layers);
}

}  // namespace detail

// Reference run: sample noise, integrate the full trajectory, decode.
inline RunResult run_baseline(const FlowModel& model, const PipelineConfig& cfg) {
    validate_pipeline(cfg);
    const auto& g = cfg.geometry;
    const LatentVideo x0 = gaussian_latent(g.frames, g.channels, g.height, g.width, cfg.seed);
    const LatentVideo x_t = denoise_steps(x0, 0, cfg.sampler.total_steps, model, cfg.sampler);

    RunResult r;
    r.video = compression_decode(x_t, cfg.codec);
    r.schedule = detail::identity_schedule(static_cast<int>(r.video.frames()),
                                           cfg.constraints.theta);
    r.map = frame_index_map(r.schedule);
    r.similarity = SimilarityMatrix();
    const std::int64_t n_full = detail::grid_tokens(g.frames, g);
    r.cost = pipeline_cost(n_full, n_full, cfg.sampler, cfg.cost, 0.0);
    detail::attach_rope(r, cfg);
    return r;
}

// Dynamic frame-rate run. In order: k warm-up steps, one-step preview, decode,
// similarity-driven segmentation, pixel merge, encode, noise selection,
// renoise, compressed-space sampling, decode, full-rate restoration.
//
// disable_compression_module: run the two sampling phases back to back at
// full resolution; bit-identical to run_baseline by construction.
// skip_denoise_renoise: omit the preview and the renoise, feeding the raw
// noisy latent through the codec path and resuming from its encoding.
inline RunResult run_dlfr(const FlowModel& model, const PipelineConfig& cfg) {
    validate_pipeline(cfg);
    const auto& g = cfg.geometry;
    const int k = cfg.sampler.compression_start;
    const int t = cfg.sampler.total_steps;
    const LatentVideo x0 = gaussian_latent(g.frames, g.channels, g.height, g.width, cfg.seed);
    const std::int64_t n_full = detail::grid_tokens(g.frames, g);

    if (cfg.disable_compression_module) {
        LatentVideo x = k > 0 ? denoise_steps(x0, 0, k, model, cfg.sampler) : x0;
        x = denoise_steps(x, k, t, model, cfg.sampler);
        RunResult r;
        r.video = compression_decode(x, cfg.codec);
        r.schedule = detail::identity_schedule(static_cast<int>(r.video.frames()),
                                               cfg.constraints.theta);
        r.map = frame_index_map(r.schedule);
        r.cost = pipeline_cost(n_full, n_full, cfg.sampler, cfg.cost, 0.0);
        detail::attach_rope(r, cfg);
        return r;
    }

    const LatentVideo x_k = k > 0 ? denoise_steps(x0, 0, k, model, cfg.sampler) : x0;
    const LatentVideo preview =
        cfg.skip_denoise_renoise ? x_k : one_step_preview(x_k, k, model, cfg.sampler);
    const PixelVideo y_low = compression_decode(preview, cfg.codec);

    RunResult r;
    r.similarity = similarity_matrix(y_low, cfg.ssim);
    r.schedule = segment_schedule(r.similarity, cfg.constraints);
    auto [y_dy_low, map] = apply_schedule_pixels(y_low, r.schedule);
    r.map = std::move(map);

    const LatentVideo x_dy_pre = compression_encode(y_dy_low, cfg.codec);
    const LatentVideo x0_dy = select_noise_frames(x0, r.map, cfg.codec.temporal_factor);
    const LatentVideo x_dy_k =
        cfg.skip_denoise_renoise ? x_dy_pre : renoise(x0_dy, x_dy_pre, k, cfg.sampler);

    const auto compressed_model = model.compressed_view(r.map);
    const LatentVideo x_dy_t = denoise_steps(x_dy_k, k, t, *compressed_model, cfg.sampler);
    const PixelVideo y_dy = compression_decode(x_dy_t, cfg.codec);
    r.video = restore_full_rate(y_dy, r.map);

    const std::int64_t n_comp =
        detail::grid_tokens(static_cast<std::size_t>(r.map.compressed_length()), g);
    r.cost = pipeline_cost(n_full, n_comp, cfg.sampler, cfg.cost,
                           default_module_overhead(n_full, cfg.cost));
    detail::attach_rope(r, cfg);
    if (cfg.keep_intermediates) {
        r.intermediates = Intermediates{preview, y_low, y_dy_low, x_dy_k};
    }
    return r;
}

// {psnr, frame-mean ssim, per-input flicker}.
inline std::vector<std::pair<std::string, double>> compare_runs(const RunResult& a,
                                                                const RunResult& b,
                                                                const SsimParams& params = {}) {
    require_same_shape(a.video.tensor, b.video.tensor, "compare_runs");
    double ssim_acc = 0.0;
    for (std::size_t f = 0; f < a.video.frames(); ++f) {
        ssim_acc += ssim_frame_pair(a.video.frame(f), b.video.frame(f), params);
    }
    return {
        {"psnr", psnr(a.video, b.video)},
        {"ssim", ssim_acc / static_cast<double>(a.video.frames())},
        {"flicker_mae_a", flicker_mae(a.video)},
        {"flicker_mae_b", flicker_mae(b.video)},
    };
}

}  // namespace dlfr
