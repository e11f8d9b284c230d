#pragma once

#include <cstdint>
#include <fstream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "dlfr/codec.hpp"
#include "dlfr/errors.hpp"
#include "dlfr/flow.hpp"
#include "dlfr/pipeline.hpp"
#include "dlfr/synthetic.hpp"

namespace dlfr {

// A full run description: the synthetic scene, the flow model kind driven by
// it, and the pipeline parameters.
//
// Plain-text config, INI-style. Sections and keys:
//   [scene]    frames, channels, height, width, base, segments
//   [sampler]  steps, k
//   [schedule] theta, max_segment_len, g_align
//   [codec]    spatial_factor, temporal_factor
//   [rope]     head_dim, base, n_layers, global_layers
//   [cost]     n_layers, model_dim, attn_coeff, linear_coeff, text_tokens
//   [run]      seed, model, disable_compression, skip_denoise_renoise
// segments is a comma list of kind:length[:param] with kinds static,
// square (param = speed), noise (param = sigma). model is one of
// linear | piecewise | zero | constant. '#' starts a comment.
struct RunSpec {
    SyntheticSceneSpec scene;
    std::string model_kind = "linear";
    PipelineConfig pipeline;
};

inline RunSpec default_run_spec() {
    RunSpec spec;
    spec.scene = standard_scene();
    return spec;
}

namespace detail {

[[noreturn]] inline void config_fail(int line, const std::string& msg) {
    throw config_error("line " + std::to_string(line) + ": " + msg);
}

inline std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) {
        return "";
    }
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

inline long long parse_int(const std::string& v, int line) {
    std::size_t pos = 0;
    long long out = 0;
    try {
        out = std::stoll(v, &pos);
    } catch (const std::exception&) {
        config_fail(line, "expected integer, got '" + v + "'");
    }
    if (pos != v.size()) {
        config_fail(line, "expected integer, got '" + v + "'");
    }
    return out;
}

inline double parse_real(const std::string& v, int line) {
    std::size_t pos = 0;
    double out = 0;
    try {
        out = std::stod(v, &pos);
    } catch (const std::exception&) {
        config_fail(line, "expected number, got '" + v + "'");
    }
    if (pos != v.size()) {
        config_fail(line, "expected number, got '" + v + "'");
    }
    return out;
}

inline bool parse_bool(const std::string& v, int line) {
    if (v == "true" || v == "1") {
        return true;
    }
    if (v == "false" || v == "0") {
        return false;
    }
    config_fail(line, "expected true/false, got '" + v + "'");
}

inline std::vector<std::string> split(const std::string& v, char sep) {
    std::vector<std::string> out;
    std::string item;
    std::istringstream in(v);
    while (std::getline(in, item, sep)) {
        out.push_back(trim(item));
    }
    return out;
}

inline std::vector<int> parse_int_list(const std::string& v, int line) {
    std::vector<int> out;
    for (const std::string& item : split(v, ',')) {
        if (!item.empty()) {
            out.push_back(static_cast<int>(parse_int(item, line)));
        }
    }
    return out;
}

inline std::vector<SceneSegment> parse_segments(const std::string& v, int line) {
    std::vector<SceneSegment> out;
    for (const std::string& item : split(v, ',')) {
        if (item.empty()) {
            continue;
        }
        const std::vector<std::string> parts = split(item, ':');
        if (parts.size() < 2) {
            config_fail(line, "segment '" + item + "' needs kind:length");
        }
        SceneSegment seg;
        seg.length = static_cast<int>(parse_int(parts[1], line));
        if (parts[0] == "static") {
            seg.kind = MotionKind::Static;
        } else if (parts[0] == "square") {
            seg.kind = MotionKind::MovingSquare;
            if (parts.size() < 3) {
                config_fail(line, "segment '" + item + "' missing speed");
            }
            seg.param = parse_real(parts[2], line);
        } else if (parts[0] == "noise") {
            seg.kind = MotionKind::Noise;
            if (parts.size() < 3) {
                config_fail(line, "segment '" + item + "' missing sigma");
            }
            seg.param = parse_real(parts[2], line);
        } else {
            config_fail(line, "unknown segment kind '" + parts[0] + "'");
        }
        out.push_back(seg);
    }
    if (out.empty()) {
        config_fail(line, "empty segment list");
    }
    return out;
}

}  // namespace detail

// Derive the latent geometry from the scene and codec, then validate the
// assembled spec.
inline void finalize_run_spec(RunSpec& spec) {
    validate_scene(spec.scene);
    const int s = spec.pipeline.codec.spatial_factor;
    const int tf = spec.pipeline.codec.temporal_factor;
    if (spec.scene.height % s != 0 || spec.scene.width % s != 0) {
        throw config_error("scene resolution " + std::to_string(spec.scene.height) + "x" +
                           std::to_string(spec.scene.width) + " not divisible by spatial_factor " +
                           std::to_string(s));
    }
    if (spec.scene.frames % tf != 0) {
        throw config_error("scene frame count not divisible by temporal_factor");
    }
    spec.pipeline.geometry.frames = static_cast<std::size_t>(spec.scene.frames / tf);
    spec.pipeline.geometry.channels = static_cast<std::size_t>(spec.scene.channels);
    spec.pipeline.geometry.height = static_cast<std::size_t>(spec.scene.height / s);
    spec.pipeline.geometry.width = static_cast<std::size_t>(spec.scene.width / s);
    if (spec.model_kind != "linear" && spec.model_kind != "piecewise" &&
        spec.model_kind != "zero" && spec.model_kind != "constant") {
        throw config_error("unknown model '" + spec.model_kind + "'");
    }
    try {
        validate_pipeline(spec.pipeline);
    } catch (const config_error&) {
        throw;
    } catch (const error& e) {
        throw config_error(e.what());
    }
}

inline RunSpec parse_run_spec(const std::string& text) {
    RunSpec spec = default_run_spec();
    std::string section;
    std::istringstream in(text);
    std::string raw;
    int line_no = 0;
    while (std::getline(in, raw)) {
        ++line_no;
        const auto hash = raw.find('#');
        std::string line = detail::trim(hash == std::string::npos ? raw : raw.substr(0, hash));
        if (line.empty()) {
            continue;
        }
        if (line.front() == '[') {
            if (line.back() != ']') {
                detail::config_fail(line_no, "unterminated section header");
            }
            section = line.substr(1, line.size() - 2);
            if (section != "scene" && section != "sampler" && section != "schedule" &&
                section != "codec" && section != "rope" && section != "cost" &&
                section != "run") {
                detail::config_fail(line_no, "unknown section [" + section + "]");
            }
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            detail::config_fail(line_no, "expected key = value");
        }
        const std::string key = detail::trim(line.substr(0, eq));
        const std::string value = detail::trim(line.substr(eq + 1));
        if (section.empty()) {
            detail::config_fail(line_no, "key '" + key + "' outside any section");
        }

        auto& p = spec.pipeline;
        if (section == "scene") {
            if (key == "frames") {
                spec.scene.frames = static_cast<int>(detail::parse_int(value, line_no));
            } else if (key == "channels") {
                spec.scene.channels = static_cast<int>(detail::parse_int(value, line_no));
            } else if (key == "height") {
                spec.scene.height = static_cast<int>(detail::parse_int(value, line_no));
            } else if (key == "width") {
                spec.scene.width = static_cast<int>(detail::parse_int(value, line_no));
            } else if (key == "base") {
                spec.scene.base_level = detail::parse_real(value, line_no);
            } else if (key == "segments") {
                spec.scene.segments = detail::parse_segments(value, line_no);
            } else {
                detail::config_fail(line_no, "unknown key '" + key + "' in [scene]");
            }
        } else if (section == "sampler") {
            if (key == "steps") {
                p.sampler.total_steps = static_cast<int>(detail::parse_int(value, line_no));
            } else if (key == "k") {
                p.sampler.compression_start = static_cast<int>(detail::parse_int(value, line_no));
            } else {
                detail::config_fail(line_no, "unknown key '" + key + "' in [sampler]");
            }
        } else if (section == "schedule") {
            if (key == "theta") {
                p.constraints.theta = detail::parse_real(value, line_no);
            } else if (key == "max_segment_len") {
                p.constraints.max_segment_len = static_cast<int>(detail::parse_int(value, line_no));
            } else if (key == "g_align") {
                p.constraints.g_align = static_cast<int>(detail::parse_int(value, line_no));
            } else {
                detail::config_fail(line_no, "unknown key '" + key + "' in [schedule]");
            }
        } else if (section == "codec") {
            if (key == "spatial_factor") {
                p.codec.spatial_factor = static_cast<int>(detail::parse_int(value, line_no));
            } else if (key == "temporal_factor") {
                p.codec.temporal_factor = static_cast<int>(detail::parse_int(value, line_no));
            } else {
                detail::config_fail(line_no, "unknown key '" + key + "' in [codec]");
            }
        } else if (section == "rope") {
            if (key == "head_dim") {
                p.rope = RopeConfig::make(static_cast<int>(detail::parse_int(value, line_no)));
            } else if (key == "base") {
                p.rope.base = detail::parse_real(value, line_no);
            } else if (key == "n_layers") {
                p.layers.n_layers = static_cast<int>(detail::parse_int(value, line_no));
            } else if (key == "global_layers") {
                p.layers.global_layers = detail::parse_int_list(value, line_no);
            } else {
                detail::config_fail(line_no, "unknown key '" + key + "' in [rope]");
            }
        } else if (section == "cost") {
            if (key == "n_layers") {
                p.cost.n_layers = static_cast<int>(detail::parse_int(value, line_no));
            } else if (key == "model_dim") {
                p.cost.model_dim = static_cast<int>(detail::parse_int(value, line_no));
            } else if (key == "attn_coeff") {
                p.cost.attn_coeff = detail::parse_real(value, line_no);
            } else if (key == "linear_coeff") {
                p.cost.linear_coeff = detail::parse_real(value, line_no);
            } else if (key == "text_tokens") {
                p.cost.text_tokens = detail::parse_int(value, line_no);
            } else {
                detail::config_fail(line_no, "unknown key '" + key + "' in [cost]");
            }
        } else if (section == "run") {
            if (key == "seed") {
                p.seed = static_cast<std::uint64_t>(detail::parse_int(value, line_no));
            } else if (key == "model") {
                spec.model_kind = value;
            } else if (key == "disable_compression") {
                p.disable_compression_module = detail::parse_bool(value, line_no);
            } else if (key == "skip_denoise_renoise") {
                p.skip_denoise_renoise = detail::parse_bool(value, line_no);
            } else {
                detail::config_fail(line_no, "unknown key '" + key + "' in [run]");
            }
        }
    }
    finalize_run_spec(spec);
    return spec;
}

inline RunSpec load_run_spec(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw config_error("cannot open config: " + path);
    }
    std::stringstream buf;
    buf << in.rdbuf();
    return parse_run_spec(buf.str());
}

// Embedded presets covering the reference (k, theta) grid on the standard
// scene: k5-theta05 ... k15-theta09.
inline std::vector<std::string> preset_names() {
    std::vector<std::string> names;
    for (int k : {5, 10, 15}) {
        for (int d : {5, 6, 7, 8, 9}) {
            names.push_back("k" + std::to_string(k) + "-theta0" + std::to_string(d));
        }
    }
    return names;
}

inline std::optional<RunSpec> preset_run_spec(const std::string& name) {
    for (int k : {5, 10, 15}) {
        for (int d : {5, 6, 7, 8, 9}) {
            if (name == "k" + std::to_string(k) + "-theta0" + std::to_string(d)) {
                RunSpec spec = default_run_spec();
                spec.pipeline.sampler.compression_start = k;
                spec.pipeline.constraints.theta = 0.1 * d;
                finalize_run_spec(spec);
                return spec;
            }
        }
    }
    return std::nullopt;
}

// Scene noise must not share a stream with the sampling noise drawn from the
// same seed value.
inline constexpr std::uint64_t kSceneStreamOffset = 0x6A09E667F3BCC909ull;

struct PreparedRun {
    PixelVideo scene;
    LatentVideo target;
    std::unique_ptr<FlowModel> model;
};

inline PreparedRun prepare_run(const RunSpec& spec) {
    PreparedRun out;
    out.scene = generate_scene(spec.scene, spec.pipeline.seed ^ kSceneStreamOffset);
    out.target = compression_encode(out.scene, spec.pipeline.codec);
    if (spec.model_kind == "zero") {
        out.model = std::make_unique<ZeroFlow>();
    } else if (spec.model_kind == "constant") {
        out.model = std::make_unique<ConstantFlow>(out.target);
    } else if (spec.model_kind == "piecewise") {
        std::vector<int> lengths;
        std::vector<Tensor> frames;
        int start = 0;
        for (const SceneSegment& seg : spec.scene.segments) {
            lengths.push_back(seg.length);
            frames.push_back(out.target.frame(static_cast<std::size_t>(start)));
            start += seg.length;
        }
        out.model = std::make_unique<PiecewiseSceneFlow>(lengths, frames);
    } else {
        out.model = std::make_unique<LinearTargetFlow>(out.target);
    }
    return out;
}

}  // namespace dlfr
