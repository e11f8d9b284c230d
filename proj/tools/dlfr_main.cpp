// dlfr: synthetic-scene generation, dynamic frame-rate pipeline runs,
// (k, theta) sweeps, and video comparison. Exit codes: 0 success, 1 runtime
// failure, 2 config error.

#include <algorithm>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "dlfr/dlfr.hpp"

namespace fs = std::filesystem;

namespace {

struct GenOptions {
    int frames = 16;
    int channels = 4;
    int height = 64;
    int width = 64;
    double base = 0.3;
    std::string segments = "static:4,square:8:4,noise:4:0.15";
    std::uint64_t seed = 1;
    std::string out;
};

struct RunOptions {
    std::string config;
    std::string preset;
    std::string out;
    std::uint64_t seed = 0;
    bool seed_set = false;
    double theta = 0.0;
    bool theta_set = false;
    int k = 0;
    bool k_set = false;
    bool disable_compression = false;
    bool skip_denoise_renoise = false;
};

struct SweepOptions {
    std::string config;
    std::string preset;
    std::string out;
    std::uint64_t seed = 0;
    bool seed_set = false;
    std::string thetas = "0.5,0.6,0.7,0.8,0.9";
    std::string ks = "5,10,15";
};

struct CompareOptions {
    std::string path_a;
    std::string path_b;
    std::string out;
};

void write_text(const fs::path& path, const std::string& text) {
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f) {
        throw dlfr::io_error("cannot open for writing: " + path.string());
    }
    f.write(text.data(), static_cast<std::streamsize>(text.size()));
    if (!f) {
        throw dlfr::io_error("write failed: " + path.string());
    }
}

dlfr::RunSpec resolve_spec(const std::string& config, const std::string& preset) {
    if (!config.empty() && !preset.empty()) {
        throw dlfr::config_error("use either --config or --preset, not both");
    }
    if (!preset.empty()) {
        auto spec = dlfr::preset_run_spec(preset);
        if (!spec) {
            throw dlfr::config_error("unknown preset '" + preset + "'");
        }
        return *spec;
    }
    if (!config.empty()) {
        return dlfr::load_run_spec(config);
    }
    dlfr::RunSpec spec = dlfr::default_run_spec();
    dlfr::finalize_run_spec(spec);
    return spec;
}

void apply_overrides(dlfr::RunSpec& spec, const RunOptions& opt) {
    if (opt.seed_set) {
        spec.pipeline.seed = opt.seed;
    }
    if (opt.theta_set) {
        spec.pipeline.constraints.theta = opt.theta;
    }
    if (opt.k_set) {
        spec.pipeline.sampler.compression_start = opt.k;
    }
    if (opt.disable_compression) {
        spec.pipeline.disable_compression_module = true;
    }
    if (opt.skip_denoise_renoise) {
        spec.pipeline.skip_denoise_renoise = true;
    }
    dlfr::finalize_run_spec(spec);
}

int cmd_gen(const GenOptions& opt) {
    dlfr::SyntheticSceneSpec scene;
    scene.frames = opt.frames;
    scene.channels = opt.channels;
    scene.height = opt.height;
    scene.width = opt.width;
    scene.base_level = opt.base;
    scene.segments = dlfr::detail::parse_segments(opt.segments, 0);
    dlfr::validate_scene(scene);
    const dlfr::PixelVideo video = dlfr::generate_scene(scene, opt.seed);
    dlfr::write_vgt(opt.out, video.tensor);
    std::cout << "wrote " << opt.out << " (" << video.frames() << " frames, "
              << video.height() << "x" << video.width() << ")\n";
    return 0;
}

int cmd_run(const RunOptions& opt) {
    dlfr::RunSpec spec = resolve_spec(opt.config, opt.preset);
    apply_overrides(spec, opt);

    const dlfr::PreparedRun prep = dlfr::prepare_run(spec);
    const dlfr::RunResult base = dlfr::run_baseline(*prep.model, spec.pipeline);
    const dlfr::RunResult run = dlfr::run_dlfr(*prep.model, spec.pipeline);

    fs::create_directories(opt.out);
    const fs::path dir(opt.out);
    dlfr::write_vgt((dir / "video.vgt").string(), run.video.tensor);
    dlfr::write_vgt((dir / "baseline.vgt").string(), base.video.tensor);
    write_text(dir / "schedule.json", dlfr::schedule_json(run.schedule));
    write_text(dir / "cost.json", dlfr::cost_report_json(run.cost));

    auto rows = dlfr::compare_runs(base, run, spec.pipeline.ssim);
    rows[2].first = "flicker_mae_baseline";
    rows[3].first = "flicker_mae_run";
    rows.emplace_back("speedup", run.cost.speedup);
    write_text(dir / "metrics.csv", dlfr::metrics_csv(rows));

    std::cout << "wrote " << opt.out << ": tokens " << run.cost.tokens_full << " -> "
              << run.cost.tokens_compressed << ", speedup " << run.cost.speedup << ", psnr "
              << rows[0].second << "\n";
    return 0;
}

int cmd_sweep(const SweepOptions& opt) {
    dlfr::RunSpec spec = resolve_spec(opt.config, opt.preset);
    if (opt.seed_set) {
        spec.pipeline.seed = opt.seed;
        dlfr::finalize_run_spec(spec);
    }
    std::vector<double> thetas;
    for (const std::string& item : dlfr::detail::split(opt.thetas, ',')) {
        if (!item.empty()) {
            thetas.push_back(dlfr::detail::parse_real(item, 0));
        }
    }
    std::vector<int> ks = dlfr::detail::parse_int_list(opt.ks, 0);
    if (thetas.empty() || ks.empty()) {
        throw dlfr::config_error("sweep needs non-empty --thetas and --ks");
    }
    std::sort(thetas.begin(), thetas.end());
    std::sort(ks.begin(), ks.end());

    const dlfr::PreparedRun prep = dlfr::prepare_run(spec);
    const dlfr::RunResult base = dlfr::run_baseline(*prep.model, spec.pipeline);

    std::string csv = "k,theta,tokens_full,tokens_compressed,speedup,psnr\n";
    char buf[160];
    for (int k : ks) {
        for (double theta : thetas) {
            dlfr::RunSpec cell = spec;
            cell.pipeline.sampler.compression_start = k;
            cell.pipeline.constraints.theta = theta;
            dlfr::finalize_run_spec(cell);
            const dlfr::RunResult run = dlfr::run_dlfr(*prep.model, cell.pipeline);
            const double p = dlfr::psnr(run.video, base.video);
            std::snprintf(buf, sizeof(buf), "%d,%.6f,%lld,%lld,%.6f,%.6f\n", k, theta,
                          static_cast<long long>(run.cost.tokens_full),
                          static_cast<long long>(run.cost.tokens_compressed), run.cost.speedup,
                          p);
            csv += buf;
        }
    }
    fs::create_directories(opt.out);
    write_text(fs::path(opt.out) / "sweep.csv", csv);
    std::cout << "wrote " << opt.out << "/sweep.csv (" << ks.size() * thetas.size()
              << " cells)\n";
    return 0;
}

int cmd_compare(const CompareOptions& opt) {
    const dlfr::PixelVideo a(dlfr::read_vgt(opt.path_a));
    const dlfr::PixelVideo b(dlfr::read_vgt(opt.path_b));
    dlfr::require_same_shape(a.tensor, b.tensor, "compare");
    double ssim_acc = 0.0;
    for (std::size_t f = 0; f < a.frames(); ++f) {
        ssim_acc += dlfr::ssim_frame_pair(a.frame(f), b.frame(f));
    }
    const std::vector<std::pair<std::string, double>> rows = {
        {"psnr", dlfr::psnr(a, b)},
        {"ssim", ssim_acc / static_cast<double>(a.frames())},
        {"flicker_mae_a", dlfr::flicker_mae(a)},
        {"flicker_mae_b", dlfr::flicker_mae(b)},
    };
    const std::string csv = dlfr::metrics_csv(rows);
    if (opt.out.empty()) {
        std::cout << csv;
    } else {
        write_text(opt.out, csv);
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"dynamic latent frame-rate pipeline"};
    app.require_subcommand(1);

    GenOptions gen;
    auto* gen_cmd = app.add_subcommand("gen", "generate a synthetic scene as a VGT file");
    gen_cmd->add_option("--frames", gen.frames, "total frame count");
    gen_cmd->add_option("--channels", gen.channels, "channels per frame");
    gen_cmd->add_option("--height", gen.height, "frame height");
    gen_cmd->add_option("--width", gen.width, "frame width");
    gen_cmd->add_option("--base", gen.base, "background level");
    gen_cmd->add_option("--segments", gen.segments, "kind:length[:param], comma separated");
    gen_cmd->add_option("--seed", gen.seed, "noise seed");
    gen_cmd->add_option("--out", gen.out, "output .vgt path")->required();

    RunOptions run;
    auto* run_cmd = app.add_subcommand("run", "run baseline + dynamic pipeline, write artifacts");
    run_cmd->add_option("--config", run.config, "config file path");
    run_cmd->add_option("--preset", run.preset, "embedded preset name, e.g. k5-theta05");
    run_cmd->add_option("--out", run.out, "output directory")->required();
    auto* run_seed = run_cmd->add_option("--seed", run.seed, "override seed");
    auto* run_theta = run_cmd->add_option("--theta", run.theta, "override merge threshold");
    auto* run_k = run_cmd->add_option("--k", run.k, "override compression start step");
    run_cmd->add_flag("--disable-compression", run.disable_compression,
                      "bypass the compression module");
    run_cmd->add_flag("--skip-denoise-renoise", run.skip_denoise_renoise,
                      "omit the preview and renoise steps");

    SweepOptions sweep;
    auto* sweep_cmd = app.add_subcommand("sweep", "grid of (k, theta) runs, one CSV row each");
    sweep_cmd->add_option("--config", sweep.config, "config file path");
    sweep_cmd->add_option("--preset", sweep.preset, "embedded preset name");
    sweep_cmd->add_option("--out", sweep.out, "output directory")->required();
    auto* sweep_seed = sweep_cmd->add_option("--seed", sweep.seed, "override seed");
    sweep_cmd->add_option("--thetas", sweep.thetas, "comma list of thresholds");
    sweep_cmd->add_option("--ks", sweep.ks, "comma list of start steps");

    CompareOptions cmp;
    auto* cmp_cmd = app.add_subcommand("compare", "difference metrics between two VGT videos");
    cmp_cmd->add_option("a", cmp.path_a, "first video")->required();
    cmp_cmd->add_option("b", cmp.path_b, "second video")->required();
    cmp_cmd->add_option("--out", cmp.out, "metrics CSV path (default stdout)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << e.what() << "\n";
        return 2;
    }

    run.seed_set = run_seed->count() > 0;
    run.theta_set = run_theta->count() > 0;
    run.k_set = run_k->count() > 0;
    sweep.seed_set = sweep_seed->count() > 0;

    try {
        if (gen_cmd->parsed()) {
            return cmd_gen(gen);
        }
        if (run_cmd->parsed()) {
            return cmd_run(run);
        }
        if (sweep_cmd->parsed()) {
            return cmd_sweep(sweep);
        }
        if (cmp_cmd->parsed()) {
            return cmd_compare(cmp);
        }
    } catch (const dlfr::config_error& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
