#pragma once

#include <algorithm>
#include <charconv>
#include <cstddef>
#include <string>
#include <vector>

#include "dlfr/errors.hpp"
#include "dlfr/similarity.hpp"
#include "dlfr/tensor.hpp"

namespace dlfr {

struct ScheduleConstraints {
    double theta = 0.5;      // all-pairs similarity threshold, in (0,1]
    int max_segment_len = 4;
    int g_align = 1;         // segment boundaries fall on multiples of this
};

struct Segment {
    int start = 0;
    int end = 0;  // inclusive

    int length() const { return end - start + 1; }
    bool operator==(const Segment&) const = default;
};

// Contiguous partition of [0, n_original-1]; one output frame per segment,
// represented by the segment's first original index.
struct Schedule {
    int n_original = 0;
    double theta = 0.0;
    std::vector<Segment> segments;

    int compressed_length() const { return static_cast<int>(segments.size()); }
    bool operator==(const Schedule&) const = default;
};

struct FrameIndexMap {
    int n_original = 0;
    std::vector<int> kept;       // original index kept per segment (= segment start)
    std::vector<Segment> spans;
    std::vector<int> gaps;       // kept[i+1] - kept[i], size kept.size()-1

    int compressed_length() const { return static_cast<int>(kept.size()); }
};

inline void validate_constraints(const ScheduleConstraints& c) {
    if (!(c.theta > 0.0 && c.theta <= 1.0)) {
        throw bounds_error("schedule: theta must be in (0,1]");
    }
    if (c.g_align < 1) {
        throw bounds_error("schedule: g_align must be >= 1");
    }
    if (c.max_segment_len < c.g_align) {
        throw bounds_error("schedule: max_segment_len must be >= g_align");
    }
}

inline FrameIndexMap frame_index_map(const Schedule& sch) {
    FrameIndexMap map;
    map.n_original = sch.n_original;
    map.spans = sch.segments;
    map.kept.reserve(sch.segments.size());
    for (const Segment& s : sch.segments) {
        map.kept.push_back(s.start);
    }
    for (std::size_t i = 0; i + 1 < map.kept.size(); ++i) {
        map.gaps.push_back(map.kept[i + 1] - map.kept[i]);
    }
    return map;
}

// Greedy left-to-right segmentation: from the cursor, take the longest run
// (capped by max_segment_len, length a multiple of g_align) whose frames are
// pairwise more similar than theta, then advance. Deterministic.
//
// With g_align > 1 a block of g_align frames is the atomic unit: it is
// emitted even when its internal pairs fall below theta, because boundary
// alignment is a hard constraint. The pairwise condition gates only merging
// beyond one atomic unit. At the default g_align = 1 every multi-frame
// segment satisfies the all-pairs condition.
inline Schedule segment_schedule(const SimilarityMatrix& sim, const ScheduleConstraints& c) {
    validate_constraints(c);
    const int n = static_cast<int>(sim.n);
    const int g = c.g_align;
    if (g > 1 && n % g != 0) {
        throw shape_error("segment_schedule: frame count " + std::to_string(n) +
                          " not a multiple of g_align " + std::to_string(g));
    }
    Schedule sch;
    sch.n_original = n;
    sch.theta = c.theta;

    auto pairs_ok = [&](int start, int end) {
        for (int i = start; i <= end; ++i) {
            for (int j = i + 1; j <= end; ++j) {
                if (!(sim.at(static_cast<std::size_t>(i), static_cast<std::size_t>(j)) > c.theta)) {
                    return false;
                }
            }
        }
        return true;
    };

    int cursor = 0;
    while (cursor < n) {
        int len = g;
        if (g == 1) {
            // validity is antitone in extension, so extend until first failure
            while (len < c.max_segment_len && cursor + len < n) {
                const int cand = cursor + len;
                bool ok = true;
                for (int i = cursor; i < cand; ++i) {
                    if (!(sim.at(static_cast<std::size_t>(i), static_cast<std::size_t>(cand)) >
                          c.theta)) {
                        ok = false;
                        break;
                    }
                }
                if (!ok) {
                    break;
                }
                ++len;
            }
        } else {
            const int cap = std::min(c.max_segment_len - c.max_segment_len % g, n - cursor);
            for (int cand = cap; cand > g; cand -= g) {
                if (pairs_ok(cursor, cursor + cand - 1)) {
                    len = cand;
                    break;
                }
            }
        }
        sch.segments.push_back({cursor, cursor + len - 1});
        cursor += len;
    }
    return sch;
}

// True iff segments partition [0, n-1] contiguously and every segment longer
// than atomic_len satisfies the strict all-pairs condition.
inline bool verify_schedule(const SimilarityMatrix& sim, const Schedule& sch, double theta,
                            int atomic_len = 1) {
    if (sch.n_original != static_cast<int>(sim.n)) {
        return false;
    }
    int expect = 0;
    for (const Segment& s : sch.segments) {
        if (s.start != expect || s.end < s.start || s.end >= sch.n_original) {
            return false;
        }
        if (s.length() > atomic_len) {
            for (int i = s.start; i <= s.end; ++i) {
                for (int j = i + 1; j <= s.end; ++j) {
                    if (!(sim.at(static_cast<std::size_t>(i), static_cast<std::size_t>(j)) >
                          theta)) {
                        return false;
                    }
                }
            }
        }
        expect = s.end + 1;
    }
    return expect == sch.n_original;
}

// One output frame per segment: the mean of the segment's frames.
inline std::pair<PixelVideo, FrameIndexMap> apply_schedule_pixels(const PixelVideo& video,
                                                                  const Schedule& sch) {
    if (static_cast<int>(video.frames()) != sch.n_original) {
        throw shape_error("apply_schedule_pixels: video has " + std::to_string(video.frames()) +
                          " frames, schedule expects " + std::to_string(sch.n_original));
    }
    PixelVideo out(sch.segments.size(), video.channels(), video.height(), video.width());
    for (std::size_t s = 0; s < sch.segments.size(); ++s) {
        std::vector<Tensor> stack;
        stack.reserve(static_cast<std::size_t>(sch.segments[s].length()));
        for (int f = sch.segments[s].start; f <= sch.segments[s].end; ++f) {
            stack.push_back(video.frame(static_cast<std::size_t>(f)));
        }
        const Tensor merged = mean_over_first_axis(stack);
        std::copy(merged.data.begin(), merged.data.end(), out.frame_data(s));
    }
    return {std::move(out), frame_index_map(sch)};
}

// Mean-merge latent frames per segment. Frame counts must match one-to-one
// (latent temporal factor 1).
inline LatentVideo apply_schedule_latent(const LatentVideo& x, const FrameIndexMap& map) {
    if (static_cast<int>(x.frames()) != map.n_original) {
        throw shape_error("apply_schedule_latent: latent has " + std::to_string(x.frames()) +
                          " frames, map expects " + std::to_string(map.n_original));
    }
    LatentVideo out(map.spans.size(), x.channels(), x.height(), x.width());
    const std::size_t fs = x.frame_size();
    for (std::size_t s = 0; s < map.spans.size(); ++s) {
        const Segment& seg = map.spans[s];
        float* dst = out.frame_data(s);
        const double inv = 1.0 / static_cast<double>(seg.length());
        for (std::size_t i = 0; i < fs; ++i) {
            double acc = 0.0;
            for (int f = seg.start; f <= seg.end; ++f) {
                acc += x.frame_data(static_cast<std::size_t>(f))[i];
            }
            dst[i] = static_cast<float>(acc * inv);
        }
    }
    return out;
}

// Gather the noise frames matching the kept temporal indices. Kept pixel-frame
// indices map to latent frames by exact division by temporal_factor.
inline LatentVideo select_noise_frames(const LatentVideo& noise, const FrameIndexMap& map,
                                       int temporal_factor = 1) {
    if (temporal_factor < 1) {
        throw bounds_error("select_noise_frames: temporal_factor must be >= 1");
    }
    LatentVideo out(map.kept.size(), noise.channels(), noise.height(), noise.width());
    const std::size_t fs = noise.frame_size();
    for (std::size_t s = 0; s < map.kept.size(); ++s) {
        const int k = map.kept[s];
        if (k % temporal_factor != 0) {
            throw bounds_error("select_noise_frames: kept index " + std::to_string(k) +
                               " not aligned to temporal_factor " + std::to_string(temporal_factor));
        }
        const int idx = k / temporal_factor;
        if (idx < 0 || idx >= static_cast<int>(noise.frames())) {
            throw bounds_error("select_noise_frames: latent index " + std::to_string(idx) +
                               " out of range [0," + std::to_string(noise.frames()) + ")");
        }
        const float* src = noise.frame_data(static_cast<std::size_t>(idx));
        std::copy(src, src + fs, out.frame_data(s));
    }
    return out;
}

namespace detail {

inline std::string double_string(double v) {
    char buf[32];
    auto r = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, r.ptr);
}

}  // namespace detail

// Canonical single-line JSON, byte-stable: fixed field order, shortest
// round-trip float text, no trailing whitespace or newline.
inline std::string schedule_json(const Schedule& sch) {
    std::string out = "{\"n_original\": " + std::to_string(sch.n_original) +
                      ", \"theta\": " + detail::double_string(sch.theta) + ", \"segments\": [";
    for (std::size_t i = 0; i < sch.segments.size(); ++i) {
        if (i) {
            out += ",";
        }
        out += "[" + std::to_string(sch.segments[i].start) + "," +
               std::to_string(sch.segments[i].end) + "]";
    }
    out += "]}";
    return out;
}

}  // namespace dlfr
