#include <cmath>

#include "doctest.h"
#include "dlfr/cost_metrics.hpp"
#include "dlfr/rng.hpp"

using namespace dlfr;

TEST_CASE("pure quadratic cost scales by four when tokens double") {
    DiTCostParams p;
    p.n_layers = 3;
    p.model_dim = 16;
    p.linear_coeff = 0.0;
    p.text_tokens = 0;
    CHECK(step_cost(512, p) == doctest::Approx(4.0 * step_cost(256, p)).epsilon(1e-12));
}

TEST_CASE("unit parameters give the hand-computed cost") {
    DiTCostParams p;
    p.n_layers = 1;
    p.model_dim = 1;
    p.attn_coeff = 2.0;
    p.linear_coeff = 12.0;
    p.text_tokens = 0;
    CHECK(step_cost(1, p) == 14.0);
}

TEST_CASE("step cost matches a scalar recomputation") {
    Rng rng(3);
    for (int trial = 0; trial < 50; ++trial) {
        DiTCostParams p;
        p.n_layers = 1 + static_cast<int>(rng.uniform() * 60.0);
        p.model_dim = 1 + static_cast<int>(rng.uniform() * 512.0);
        p.attn_coeff = rng.uniform(0.5, 4.0);
        p.linear_coeff = rng.uniform(4.0, 16.0);
        p.text_tokens = static_cast<std::int64_t>(rng.uniform() * 128.0);
        const std::int64_t n = 1 + static_cast<std::int64_t>(rng.uniform() * 10000.0);
        const double nn = static_cast<double>(n + p.text_tokens);
        const double expect = p.n_layers * (p.attn_coeff * nn * nn * p.model_dim +
                                            p.linear_coeff * nn * p.model_dim * p.model_dim);
        CHECK(step_cost(n, p) == doctest::Approx(expect).epsilon(1e-12));
        CHECK(step_cost(n + 1, p) > step_cost(n, p));  // strictly increasing in n
    }
}

TEST_CASE("layer count is additive") {
    DiTCostParams p;
    p.n_layers = 10;
    DiTCostParams doubled = p;
    doubled.n_layers = 20;
    CHECK(step_cost(777, doubled) == doctest::Approx(2.0 * step_cost(777, p)).epsilon(1e-12));
}

TEST_CASE("no compression means speedup of exactly one") {
    const CostReport r = pipeline_cost(4096, 4096, {50, 5}, DiTCostParams{}, 0.0);
    CHECK(r.speedup == 1.0);
    CHECK(r.dlfr_flops == r.baseline_flops);
}

TEST_CASE("half tokens, quadratic only: closed-form speedup") {
    DiTCostParams p;
    p.n_layers = 41;
    p.model_dim = 128;
    p.linear_coeff = 0.0;
    p.text_tokens = 0;
    const CostReport r = pipeline_cost(4096, 2048, {50, 5}, p, 0.0);
    // 50 / (5 + 45*0.25)
    CHECK(r.speedup == doctest::Approx(50.0 / 16.25).epsilon(1e-9));
}

TEST_CASE("speedup falls as compression starts later") {
    DiTCostParams p;
    double prev = 1e9;
    for (int k : {5, 10, 15}) {
        const CostReport r = pipeline_cost(4096, 1024, {50, k}, p, 0.0);
        CHECK(r.speedup < prev);
        prev = r.speedup;
    }
}

TEST_CASE("speedup is monotone in compressed token count") {
    DiTCostParams p;
    double prev = 1e18;
    for (std::int64_t n_comp : {512, 1024, 2048, 4096}) {
        const CostReport r =
            pipeline_cost(4096, n_comp, {50, 5}, p, default_module_overhead(4096, p));
        CHECK(r.speedup <= prev);
        prev = r.speedup;
    }
}

TEST_CASE("overhead can push speedup below one but never to zero") {
    DiTCostParams p;
    const CostReport r = pipeline_cost(256, 256, {50, 5}, p, 1e15);
    CHECK(r.speedup < 1.0);
    CHECK(r.speedup > 0.0);
    CHECK_THROWS_AS(pipeline_cost(256, 512, {50, 5}, p, 0.0), bounds_error);
    CHECK_THROWS_AS(step_cost(0, p), bounds_error);
}

TEST_CASE("psnr conventions") {
    PixelVideo a(2, 1, 4, 4);
    Rng rng(5);
    for (float& v : a.tensor.data) {
        v = static_cast<float>(rng.uniform());
    }
    CHECK(psnr(a, a) == 100.0);

    // uniform squared error of 0.01 -> 20 dB
    PixelVideo b = a;
    for (float& v : b.tensor.data) {
        v += 0.1f;
    }
    CHECK(psnr(a, b) == doctest::Approx(20.0).epsilon(1e-5));
    CHECK(psnr(a, b) == psnr(b, a));

    PixelVideo wrong(3, 1, 4, 4);
    CHECK_THROWS_AS(psnr(a, wrong), shape_error);
}

TEST_CASE("psnr matches a scalar mse oracle") {
    Rng rng(6);
    PixelVideo a(3, 2, 5, 5), b(3, 2, 5, 5);
    for (std::size_t i = 0; i < a.tensor.numel(); ++i) {
        a.tensor.data[i] = static_cast<float>(rng.uniform());
        b.tensor.data[i] = static_cast<float>(rng.uniform());
    }
    double mse = 0.0;
    for (std::size_t i = 0; i < a.tensor.numel(); ++i) {
        const double d = static_cast<double>(a.tensor.data[i]) - b.tensor.data[i];
        mse += d * d;
    }
    mse /= static_cast<double>(a.tensor.numel());
    CHECK(psnr(a, b) == doctest::Approx(10.0 * std::log10(1.0 / mse)).epsilon(1e-9));
}

TEST_CASE("flicker of a constant video is zero") {
    PixelVideo v(4, 1, 3, 3);
    for (float& x : v.tensor.data) {
        x = 0.6f;
    }
    CHECK(flicker_mae(v) == 0.0);
}

TEST_CASE("alternating black/white flickers at one") {
    PixelVideo v(4, 1, 2, 2);
    for (std::size_t f = 0; f < 4; ++f) {
        for (std::size_t i = 0; i < 4; ++i) {
            v.frame_data(f)[i] = (f % 2 == 0) ? 0.0f : 1.0f;
        }
    }
    CHECK(flicker_mae(v) == doctest::Approx(1.0).epsilon(1e-7));
}

TEST_CASE("linear ramp over five frames flickers at a quarter") {
    PixelVideo v(5, 1, 2, 2);
    for (std::size_t f = 0; f < 5; ++f) {
        for (std::size_t i = 0; i < 4; ++i) {
            v.frame_data(f)[i] = 0.25f * static_cast<float>(f);
        }
    }
    CHECK(flicker_mae(v) == doctest::Approx(0.25).epsilon(1e-7));
    const PixelVideo single(1, 1, 2, 2);
    CHECK_THROWS_AS(flicker_mae(single), shape_error);
}

TEST_CASE("metrics CSV formatting is pinned") {
    const std::string csv = metrics_csv({{"psnr", 20.0}, {"ssim", 0.5}});
    CHECK(csv == "metric,value\npsnr,20.000000\nssim,0.500000\n");
}

TEST_CASE("cost report JSON field order is pinned") {
    DiTCostParams p;
    p.n_layers = 1;
    p.model_dim = 1;
    p.attn_coeff = 2.0;
    p.linear_coeff = 0.0;
    const CostReport r = pipeline_cost(2, 1, {2, 1}, p, 0.0);
    CHECK(cost_report_json(r) ==
          "{\"baseline_flops\": 16, \"dlfr_flops\": 10, \"pre_flops\": 8"
          ", \"overhead_flops\": 0, \"compressed_flops\": 2"
          ", \"tokens_full\": 2, \"tokens_compressed\": 1, \"speedup\": 1.6}");
}
