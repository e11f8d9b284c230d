#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include "dlfr/errors.hpp"
#include "dlfr/schedule.hpp"
#include "dlfr/tensor.hpp"

namespace dlfr {

// Three-axis rotary embedding over the (time, height, width) token grid.
// Channel pair m of an axis with dimension d rotates by pos * base^(-2m/d).
struct RopeConfig {
    int head_dim = 64;
    int dim_t = 24;
    int dim_h = 20;
    int dim_w = 20;
    double base = 10000.0;

    // Even three-way split with the remainder assigned to the time axis.
    static RopeConfig make(int head_dim) {
        RopeConfig cfg;
        cfg.head_dim = head_dim;
        const int per_axis = (head_dim / 6) * 2;
        cfg.dim_h = per_axis;
        cfg.dim_w = per_axis;
        cfg.dim_t = head_dim - 2 * per_axis;
        return cfg;
    }
};

inline void validate_rope(const RopeConfig& cfg) {
    if (cfg.head_dim <= 0 || cfg.head_dim % 2 != 0) {
        throw shape_error("rope: head_dim must be even and positive");
    }
    if (cfg.dim_t < 0 || cfg.dim_h < 0 || cfg.dim_w < 0 || cfg.dim_t % 2 != 0 ||
        cfg.dim_h % 2 != 0 || cfg.dim_w % 2 != 0 ||
        cfg.dim_t + cfg.dim_h + cfg.dim_w != cfg.head_dim) {
        throw shape_error("rope: axis split must be even per axis and sum to head_dim");
    }
    if (cfg.base <= 1.0) {
        throw shape_error("rope: base must exceed 1");
    }
}

enum class RopeMode { Global, Local };

struct LayerRopeAssignment {
    int n_layers = 41;
    std::vector<int> global_layers = {4, 19, 23, 31, 35, 36, 37, 40};
};

// Global mode keeps the original temporal indices of the kept frames, gaps
// included; local mode renumbers them contiguously so the span matches what
// the model saw in pretraining. Positions are 0-based internally; add 1 for
// the conventional 1-based frame numbering (to_one_based).
inline std::vector<int> global_rope_positions(const FrameIndexMap& map) {
    return map.kept;
}

inline std::vector<int> local_rope_positions(int n_kept) {
    if (n_kept < 1) {
        throw bounds_error("local_rope_positions: n_kept must be >= 1");
    }
    std::vector<int> out(static_cast<std::size_t>(n_kept));
    for (int i = 0; i < n_kept; ++i) {
        out[static_cast<std::size_t>(i)] = i;
    }
    return out;
}

inline std::vector<int> to_one_based(std::vector<int> positions) {
    for (int& p : positions) {
        ++p;
    }
    return positions;
}

// Per-token cos/sin, head_dim/2 pairs per token, token order (t, y, x)
// row-major over the grid [positions.size(), height, width].
struct RopeTable {
    std::size_t n_tokens = 0;
    int head_dim = 0;
    std::vector<float> cos_v;
    std::vector<float> sin_v;
};

inline RopeTable build_rope_table(const std::vector<int>& time_positions, int height, int width,
                                  const RopeConfig& cfg) {
    validate_rope(cfg);
    if (time_positions.empty()) {
        throw shape_error("build_rope_table: empty time positions");
    }
    for (std::size_t i = 1; i < time_positions.size(); ++i) {
        if (time_positions[i] <= time_positions[i - 1]) {
            throw shape_error("build_rope_table: time positions must be strictly increasing");
        }
    }
    if (height < 1 || width < 1) {
        throw shape_error("build_rope_table: grid extents must be >= 1");
    }

    auto axis_freqs = [&](int d) {
        std::vector<double> f(static_cast<std::size_t>(d / 2));
        for (int m = 0; m < d / 2; ++m) {
            f[static_cast<std::size_t>(m)] =
                std::pow(cfg.base, -2.0 * static_cast<double>(m) / static_cast<double>(d));
        }
        return f;
    };
    const std::vector<double> ft = axis_freqs(cfg.dim_t);
    const std::vector<double> fh = axis_freqs(cfg.dim_h);
    const std::vector<double> fw = axis_freqs(cfg.dim_w);

    RopeTable table;
    table.n_tokens = time_positions.size() * static_cast<std::size_t>(height) *
                     static_cast<std::size_t>(width);
    table.head_dim = cfg.head_dim;
    const std::size_t pairs = static_cast<std::size_t>(cfg.head_dim / 2);
    table.cos_v.resize(table.n_tokens * pairs);
    table.sin_v.resize(table.n_tokens * pairs);

    std::size_t tok = 0;
    for (int t : time_positions) {
        for (int y = 0; y < height; ++y) {
            for (int x = 0; x < width; ++x, ++tok) {
                float* cdst = table.cos_v.data() + tok * pairs;
                float* sdst = table.sin_v.data() + tok * pairs;
                std::size_t p = 0;
                auto emit = [&](double pos, const std::vector<double>& freqs) {
                    for (double f : freqs) {
                        const double angle = pos * f;
                        cdst[p] = static_cast<float>(std::cos(angle));
                        sdst[p] = static_cast<float>(std::sin(angle));
                        ++p;
                    }
                };
                emit(static_cast<double>(t), ft);
                emit(static_cast<double>(y), fh);
                emit(static_cast<double>(x), fw);
            }
        }
    }
    return table;
}

// Rotate channel pairs (x_2m, x_2m+1) of each token by the tabulated angles.
inline Tensor apply_rotary(const Tensor& qk, const RopeTable& table) {
    if (qk.rank() != 2 || qk.shape[0] != table.n_tokens ||
        qk.shape[1] != static_cast<std::size_t>(table.head_dim)) {
        throw shape_error("apply_rotary: expected [" + std::to_string(table.n_tokens) + "," +
                          std::to_string(table.head_dim) + "], got " + shape_string(qk.shape));
    }
    Tensor out = qk;
    const std::size_t pairs = static_cast<std::size_t>(table.head_dim / 2);
    for (std::size_t tok = 0; tok < table.n_tokens; ++tok) {
        const float* c = table.cos_v.data() + tok * pairs;
        const float* s = table.sin_v.data() + tok * pairs;
        float* row = out.data.data() + tok * static_cast<std::size_t>(table.head_dim);
        for (std::size_t m = 0; m < pairs; ++m) {
            const float a = row[2 * m];
            const float b = row[2 * m + 1];
            row[2 * m] = a * c[m] - b * s[m];
            row[2 * m + 1] = a * s[m] + b * c[m];
        }
    }
    return out;
}

inline RopeMode layer_rope_mode(int layer, const LayerRopeAssignment& assign) {
    if (layer < 0 || layer >= assign.n_layers) {
        throw bounds_error("layer_rope_mode: layer " + std::to_string(layer) +
                           " outside [0," + std::to_string(assign.n_layers) + ")");
    }
    const bool global = std::find(assign.global_layers.begin(), assign.global_layers.end(),
                                  layer) != assign.global_layers.end();
    return global ? RopeMode::Global : RopeMode::Local;
}

inline std::vector<RopeMode> resolve_layer_modes(const LayerRopeAssignment& assign) {
    std::vector<RopeMode> modes(static_cast<std::size_t>(assign.n_layers));
    for (int l = 0; l < assign.n_layers; ++l) {
        modes[static_cast<std::size_t>(l)] = layer_rope_mode(l, assign);
    }
    return modes;
}

}  // namespace dlfr
