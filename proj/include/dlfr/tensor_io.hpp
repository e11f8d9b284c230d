#pragma once

#include <cstdint>
#include <cstring>
#include <fstream>
#include <string>
#include <vector>

#include "dlfr/errors.hpp"
#include "dlfr/tensor.hpp"

namespace dlfr {

// VGT tensor file: magic "VGT1", u32 LE rank, rank u64 LE extents,
// row-major f32 LE payload. No padding, no trailer.

namespace detail {

inline void put_u32le(std::string& buf, std::uint32_t v) {
    for (int i = 0; i < 4; ++i) {
        buf.push_back(static_cast<char>((v >> (8 * i)) & 0xFF));
    }
}

inline void put_u64le(std::string& buf, std::uint64_t v) {
    for (int i = 0; i < 8; ++i) {
        buf.push_back(static_cast<char>((v >> (8 * i)) & 0xFF));
    }
}

inline std::uint32_t get_u32le(const unsigned char* p) {
    return static_cast<std::uint32_t>(p[0]) | (static_cast<std::uint32_t>(p[1]) << 8) |
           (static_cast<std::uint32_t>(p[2]) << 16) | (static_cast<std::uint32_t>(p[3]) << 24);
}

inline std::uint64_t get_u64le(const unsigned char* p) {
    std::uint64_t v = 0;
    for (int i = 7; i >= 0; --i) {
        v = (v << 8) | p[i];
    }
    return v;
}

}  // namespace detail

inline std::string vgt_bytes(const Tensor& t) {
    std::string buf;
    buf.reserve(8 + 8 * t.rank() + 4 * t.numel());
    buf += "VGT1";
    detail::put_u32le(buf, static_cast<std::uint32_t>(t.rank()));
    for (std::size_t e : t.shape) {
        detail::put_u64le(buf, static_cast<std::uint64_t>(e));
    }
    for (float v : t.data) {
        std::uint32_t bits;
        std::memcpy(&bits, &v, 4);
        detail::put_u32le(buf, bits);
    }
    return buf;
}

inline void write_vgt(const std::string& path, const Tensor& t) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw io_error("cannot open for writing: " + path);
    }
    const std::string buf = vgt_bytes(t);
    out.write(buf.data(), static_cast<std::streamsize>(buf.size()));
    if (!out) {
        throw io_error("write failed: " + path);
    }
}

inline Tensor parse_vgt(const std::string& bytes, const std::string& origin = "<memory>") {
    const auto* p = reinterpret_cast<const unsigned char*>(bytes.data());
    const std::size_t n = bytes.size();
    if (n < 8 || std::memcmp(p, "VGT1", 4) != 0) {
        throw io_error("not a VGT file: " + origin);
    }
    const std::uint32_t rank = detail::get_u32le(p + 4);
    std::size_t off = 8;
    if (n < off + 8ull * rank) {
        throw io_error("truncated VGT header: " + origin);
    }
    std::vector<std::size_t> shape(rank);
    std::size_t numel = 1;
    for (std::uint32_t i = 0; i < rank; ++i) {
        const std::uint64_t e = detail::get_u64le(p + off);
        off += 8;
        shape[i] = static_cast<std::size_t>(e);
        numel *= shape[i];
    }
    if (n < off + 4ull * numel) {
        throw io_error("truncated VGT payload: " + origin);
    }
    if (n > off + 4ull * numel) {
        throw io_error("trailing bytes after VGT payload: " + origin);
    }
    std::vector<float> data(numel);
    for (std::size_t i = 0; i < numel; ++i) {
        const std::uint32_t bits = detail::get_u32le(p + off + 4 * i);
        std::memcpy(&data[i], &bits, 4);
    }
    return Tensor(std::move(shape), std::move(data));
}

inline Tensor read_vgt(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw io_error("cannot open: " + path);
    }
    std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return parse_vgt(bytes, path);
}

}  // namespace dlfr
