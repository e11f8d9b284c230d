#include <cmath>

#include "doctest.h"
#include "dlfr/dlfr.hpp"
#include "test_scenes.hpp"

using namespace dlfr;

namespace {

double max_abs_diff(const PixelVideo& a, const PixelVideo& b) {
    double m = 0.0;
    for (std::size_t i = 0; i < a.tensor.numel(); ++i) {
        m = std::max(m, std::fabs(static_cast<double>(a.tensor.data[i]) - b.tensor.data[i]));
    }
    return m;
}

}  // namespace

TEST_CASE("baseline with a straight-path field decodes the target") {
    RunSpec spec = default_run_spec();
    finalize_run_spec(spec);
    const PreparedRun prep = prepare_run(spec);
    const RunResult base = run_baseline(*prep.model, spec.pipeline);
    const PixelVideo direct = compression_decode(prep.target, spec.pipeline.codec);
    CHECK(max_abs_diff(base.video, direct) < 1e-5);
    CHECK(base.cost.speedup == 1.0);
    CHECK(base.schedule.compressed_length() == 16);
}

TEST_CASE("baseline with zero velocity decodes the noise") {
    RunSpec spec = default_run_spec();
    spec.model_kind = "zero";
    finalize_run_spec(spec);
    const PreparedRun prep = prepare_run(spec);
    const RunResult base = run_baseline(*prep.model, spec.pipeline);
    const auto& g = spec.pipeline.geometry;
    const LatentVideo x0 = gaussian_latent(g.frames, g.channels, g.height, g.width,
                                           spec.pipeline.seed);
    const PixelVideo direct = compression_decode(x0, spec.pipeline.codec);
    CHECK(max_abs_diff(base.video, direct) < 1e-6);
}

TEST_CASE("same seed gives bit-identical runs") {
    RunSpec spec = default_run_spec();
    finalize_run_spec(spec);
    const PreparedRun prep = prepare_run(spec);
    const RunResult a = run_dlfr(*prep.model, spec.pipeline);
    const RunResult b = run_dlfr(*prep.model, spec.pipeline);
    CHECK(a.video.tensor.data == b.video.tensor.data);
    CHECK(schedule_json(a.schedule) == schedule_json(b.schedule));
}

TEST_CASE("theta above every similarity reduces to the baseline") {
    RunSpec spec = default_run_spec();
    spec.pipeline.constraints.theta = 1.0;
    finalize_run_spec(spec);
    const PreparedRun prep = prepare_run(spec);
    const RunResult base = run_baseline(*prep.model, spec.pipeline);
    const RunResult run = run_dlfr(*prep.model, spec.pipeline);
    CHECK(run.schedule.compressed_length() == 16);
    CHECK(max_abs_diff(run.video, base.video) < 1e-5);
    CHECK(run.cost.tokens_compressed == run.cost.tokens_full);
}

TEST_CASE("piecewise targets merge only inside the identical segment") {
    // frames 0-3 share one target frame; every later frame gets its own
    Rng rng(77);
    std::vector<int> lengths = {4};
    std::vector<Tensor> frames;
    auto random_frame = [&rng]() {
        Tensor f({4, 16, 16});
        for (float& v : f.data) {
            v = static_cast<float>(rng.uniform(-1.0, 1.0));
        }
        return f;
    };
    frames.push_back(random_frame());
    for (int i = 0; i < 12; ++i) {
        lengths.push_back(1);
        frames.push_back(random_frame());
    }
    const PiecewiseSceneFlow model(lengths, frames);

    RunSpec spec = default_run_spec();
    spec.pipeline.constraints.theta = 0.9;
    finalize_run_spec(spec);
    const RunResult run = run_dlfr(model, spec.pipeline);
    REQUIRE_FALSE(run.schedule.segments.empty());
    CHECK(run.schedule.segments[0] == Segment{0, 3});
    for (std::size_t s = 1; s < run.schedule.segments.size(); ++s) {
        CHECK(run.schedule.segments[s].length() == 1);
    }
    CHECK(verify_schedule(run.similarity, run.schedule, 0.9));
}

TEST_CASE("disabling the compression module is bit-identical to baseline") {
    for (const char* kind : {"linear", "constant", "zero"}) {
        RunSpec spec = default_run_spec();
        spec.model_kind = kind;
        spec.pipeline.disable_compression_module = true;
        finalize_run_spec(spec);
        const PreparedRun prep = prepare_run(spec);
        const RunResult base = run_baseline(*prep.model, spec.pipeline);
        const RunResult run = run_dlfr(*prep.model, spec.pipeline);
        CHECK(vgt_bytes(run.video.tensor) == vgt_bytes(base.video.tensor));
        CHECK(run.cost.speedup == 1.0);
    }
}

TEST_CASE("skipping denoise+renoise degrades the run under a drift field") {
    // A state-independent drift keeps early-state damage in the output, so
    // the codec's clamping of the raw noisy latent shows up as a strictly
    // worse reconstruction. (A straight-path contraction would erase it:
    // its final Euler step lands on the target from any state.)
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
        RunSpec spec = default_run_spec();
        spec.model_kind = "constant";
        spec.pipeline.seed = seed;
        finalize_run_spec(spec);
        const PreparedRun prep = prepare_run(spec);
        const RunResult base = run_baseline(*prep.model, spec.pipeline);
        const RunResult full = run_dlfr(*prep.model, spec.pipeline);
        RunSpec skip_spec = spec;
        skip_spec.pipeline.skip_denoise_renoise = true;
        const RunResult skip = run_dlfr(*prep.model, skip_spec.pipeline);
        CHECK(psnr(skip.video, base.video) < psnr(full.video, base.video) - 1.0);
    }
}

TEST_CASE("static head merges losslessly at high theta") {
    RunSpec spec = testing::static_head_spec();
    spec.pipeline.constraints.theta = 0.9;
    finalize_run_spec(spec);
    const PreparedRun prep = prepare_run(spec);
    const RunResult base = run_baseline(*prep.model, spec.pipeline);
    const RunResult run = run_dlfr(*prep.model, spec.pipeline);
    REQUIRE(run.schedule.segments.size() >= 2);
    CHECK(run.schedule.segments[0] == Segment{0, 3});
    CHECK(run.schedule.segments[1] == Segment{4, 7});
    CHECK(psnr(run.video, base.video) >= 40.0);
}

TEST_CASE("fully static scenes survive merging exactly") {
    RunSpec spec = testing::all_static_spec();
    spec.pipeline.constraints.theta = 0.9;
    finalize_run_spec(spec);
    const PreparedRun prep = prepare_run(spec);
    const RunResult base = run_baseline(*prep.model, spec.pipeline);
    const RunResult run = run_dlfr(*prep.model, spec.pipeline);
    CHECK(run.schedule.compressed_length() == 4);  // 16 frames in blocks of 4
    CHECK(psnr(run.video, base.video) >= 40.0);
}

TEST_CASE("high-motion merging loses more than static merging") {
    RunSpec still = testing::all_static_spec();
    still.pipeline.constraints.theta = 0.5;
    finalize_run_spec(still);
    const PreparedRun prep_still = prepare_run(still);
    const double psnr_static =
        psnr(run_dlfr(*prep_still.model, still.pipeline).video,
             run_baseline(*prep_still.model, still.pipeline).video);

    RunSpec moving = default_run_spec();  // sliding square mid-scene
    moving.pipeline.constraints.theta = 0.5;
    finalize_run_spec(moving);
    const PreparedRun prep_moving = prepare_run(moving);
    const RunResult run_m = run_dlfr(*prep_moving.model, moving.pipeline);
    REQUIRE(run_m.schedule.compressed_length() < 16);  // motion actually merged
    const double psnr_moving =
        psnr(run_m.video, run_baseline(*prep_moving.model, moving.pipeline).video);

    CHECK(psnr_moving < psnr_static);
}

TEST_CASE("token accounting is exact") {
    RunSpec spec = default_run_spec();
    spec.pipeline.constraints.theta = 0.5;
    finalize_run_spec(spec);
    const PreparedRun prep = prepare_run(spec);
    const RunResult run = run_dlfr(*prep.model, spec.pipeline);
    const auto& g = spec.pipeline.geometry;
    CHECK(run.cost.tokens_full ==
          static_cast<std::int64_t>(g.frames * g.height * g.width));
    CHECK(run.cost.tokens_compressed ==
          static_cast<std::int64_t>(run.schedule.segments.size() * g.height * g.width));
}

TEST_CASE("compare_runs of a run with itself is perfect") {
    RunSpec spec = default_run_spec();
    finalize_run_spec(spec);
    const PreparedRun prep = prepare_run(spec);
    const RunResult base = run_baseline(*prep.model, spec.pipeline);
    const auto rows = compare_runs(base, base);
    CHECK(rows[0].second == 100.0);                               // psnr
    CHECK(rows[1].second == doctest::Approx(1.0).epsilon(1e-9));  // ssim
    CHECK(rows[2].second == rows[3].second);                      // same flicker
}

TEST_CASE("rope tables ride along with the run") {
    RunSpec spec = testing::static_head_spec();
    spec.pipeline.constraints.theta = 0.9;
    finalize_run_spec(spec);
    const PreparedRun prep = prepare_run(spec);
    const RunResult run = run_dlfr(*prep.model, spec.pipeline);
    const std::size_t tokens = static_cast<std::size_t>(run.schedule.compressed_length()) *
                               spec.pipeline.geometry.height * spec.pipeline.geometry.width;
    CHECK(run.global_table.n_tokens == tokens);
    CHECK(run.local_table.n_tokens == tokens);
    // merged schedule: gapped global positions differ from contiguous local
    CHECK(run.global_table.cos_v != run.local_table.cos_v);
    CHECK(run.layer_modes.size() == 41);

    // identity schedule: both modes coincide bitwise
    RunSpec ident = default_run_spec();
    ident.pipeline.constraints.theta = 1.0;
    finalize_run_spec(ident);
    const PreparedRun prep_i = prepare_run(ident);
    const RunResult run_i = run_dlfr(*prep_i.model, ident.pipeline);
    CHECK(run_i.global_table.cos_v == run_i.local_table.cos_v);
    CHECK(run_i.global_table.sin_v == run_i.local_table.sin_v);
}

TEST_CASE("intermediates are retained on request") {
    RunSpec spec = default_run_spec();
    spec.pipeline.keep_intermediates = true;
    finalize_run_spec(spec);
    const PreparedRun prep = prepare_run(spec);
    const RunResult run = run_dlfr(*prep.model, spec.pipeline);
    REQUIRE(run.intermediates.has_value());
    // straight-path preview sits on the clean endpoint
    double m = 0.0;
    for (std::size_t i = 0; i < prep.target.tensor.numel(); ++i) {
        m = std::max(m,
                     std::fabs(static_cast<double>(run.intermediates->preview.tensor.data[i]) -
                               prep.target.tensor.data[i]));
    }
    CHECK(m < 1e-5);
    CHECK(run.intermediates->y_low.frames() == 16);
    CHECK(run.intermediates->x_dy_k.frames() ==
          static_cast<std::size_t>(run.schedule.compressed_length()));

    spec.pipeline.keep_intermediates = false;
    const RunResult bare = run_dlfr(*prep.model, spec.pipeline);
    CHECK_FALSE(bare.intermediates.has_value());
}

TEST_CASE("pipeline rejects temporal resampling configs") {
    RunSpec spec = default_run_spec();
    finalize_run_spec(spec);
    PipelineConfig cfg = spec.pipeline;
    cfg.codec.temporal_factor = 2;
    const ZeroFlow model;
    CHECK_THROWS_AS(run_dlfr(model, cfg), config_error);
    cfg = spec.pipeline;
    cfg.layers.global_layers = {99};
    CHECK_THROWS_AS(run_baseline(model, cfg), config_error);
}
