#include <cstdio>
#include <filesystem>
#include <fstream>
#include <numeric>

#include "doctest.h"
#include "dlfr/rng.hpp"
#include "dlfr/tensor.hpp"
#include "dlfr/tensor_io.hpp"

using namespace dlfr;

namespace {

Tensor random_tensor(std::vector<std::size_t> shape, std::uint64_t seed, double lo = -2.0,
                     double hi = 2.0) {
    Tensor t(std::move(shape));
    Rng rng(seed);
    for (float& v : t.data) {
        v = static_cast<float>(rng.uniform(lo, hi));
    }
    return t;
}

}  // namespace

TEST_CASE("tensor construction enforces shape/data agreement") {
    CHECK_THROWS_AS(Tensor({2, 3}, std::vector<float>(5, 0.0f)), shape_error);
    const Tensor t({2, 3});
    CHECK(t.numel() == 6);
    CHECK(t.rank() == 2);
    CHECK(t.all_finite());
}

TEST_CASE("elementwise_lerp endpoints and midpoint") {
    const Tensor a = random_tensor({3, 4}, 11);
    const Tensor b = random_tensor({3, 4}, 22);
    const Tensor at0 = elementwise_lerp(a, b, 0.0);
    const Tensor at1 = elementwise_lerp(a, b, 1.0);
    for (std::size_t i = 0; i < a.numel(); ++i) {
        CHECK(at0[i] == a[i]);
        CHECK(at1[i] == b[i]);
    }
    const Tensor zeros = Tensor::full({2, 2}, 0.0f);
    const Tensor ones = Tensor::full({2, 2}, 1.0f);
    const Tensor mid = elementwise_lerp(zeros, ones, 0.5);
    for (std::size_t i = 0; i < mid.numel(); ++i) {
        CHECK(mid[i] == 0.5f);
    }
}

TEST_CASE("elementwise_lerp weight symmetry is exact at binary weights") {
    const Tensor a = random_tensor({5, 7}, 33);
    const Tensor b = random_tensor({5, 7}, 44);
    for (double w : {0.0, 0.25, 0.5, 1.0}) {
        const Tensor lhs = elementwise_lerp(a, b, w);
        const Tensor rhs = elementwise_lerp(b, a, 1.0 - w);
        for (std::size_t i = 0; i < lhs.numel(); ++i) {
            CHECK(lhs[i] == rhs[i]);
        }
    }
}

TEST_CASE("elementwise_lerp rejects shape mismatch") {
    CHECK_THROWS_AS(elementwise_lerp(Tensor({2, 2}), Tensor({2, 3}), 0.5), shape_error);
}

TEST_CASE("mean_over_first_axis basics") {
    const Tensor x = random_tensor({4, 4}, 55);
    const Tensor single = mean_over_first_axis({x});
    for (std::size_t i = 0; i < x.numel(); ++i) {
        CHECK(single[i] == x[i]);
    }
    const Tensor m =
        mean_over_first_axis({Tensor::full({3}, 0.0f), Tensor::full({3}, 2.0f)});
    for (std::size_t i = 0; i < m.numel(); ++i) {
        CHECK(m[i] == 1.0f);
    }
    CHECK_THROWS_AS(mean_over_first_axis({}), shape_error);
    CHECK_THROWS_AS(mean_over_first_axis({Tensor({2}), Tensor({3})}), shape_error);
}

TEST_CASE("mean_over_first_axis matches a scalar-loop oracle") {
    const std::vector<Tensor> stack = {random_tensor({2, 3, 5}, 1), random_tensor({2, 3, 5}, 2),
                                       random_tensor({2, 3, 5}, 3)};
    const Tensor m = mean_over_first_axis(stack);
    for (std::size_t i = 0; i < m.numel(); ++i) {
        double acc = 0.0;
        for (const Tensor& t : stack) {
            acc += t[i];
        }
        CHECK(m[i] == doctest::Approx(acc / 3.0).epsilon(1e-7));
    }
}

TEST_CASE("mean_over_first_axis is permutation invariant") {
    std::vector<Tensor> stack;
    for (std::uint64_t s = 0; s < 6; ++s) {
        stack.push_back(random_tensor({3, 3}, 100 + s));
    }
    const Tensor fwd = mean_over_first_axis(stack);
    std::vector<Tensor> rev(stack.rbegin(), stack.rend());
    std::swap(rev[1], rev[4]);
    const Tensor shuffled = mean_over_first_axis(rev);
    for (std::size_t i = 0; i < fwd.numel(); ++i) {
        CHECK(fwd[i] == doctest::Approx(shuffled[i]).epsilon(1e-6));
    }
}

TEST_CASE("video wrappers validate rank and extents") {
    CHECK_THROWS_AS(LatentVideo(Tensor({2, 3})), shape_error);
    CHECK_THROWS_AS(PixelVideo(Tensor({0, 1, 4, 4})), shape_error);
    const LatentVideo lat(2, 3, 4, 5);
    CHECK(lat.frames() == 2);
    CHECK(lat.frame_size() == 60);
    const Tensor f = lat.frame(1);
    CHECK(f.shape == std::vector<std::size_t>{3, 4, 5});
    CHECK_THROWS_AS(lat.frame(2), bounds_error);
}

TEST_CASE("VGT round trip preserves shape and bits") {
    const Tensor t = random_tensor({2, 3, 4}, 77);
    const auto path = std::filesystem::temp_directory_path() / "dlfr_roundtrip.vgt";
    write_vgt(path.string(), t);
    const Tensor back = read_vgt(path.string());
    CHECK(back.shape == t.shape);
    for (std::size_t i = 0; i < t.numel(); ++i) {
        CHECK(back[i] == t[i]);
    }
    std::filesystem::remove(path);
}

TEST_CASE("VGT layout is byte exact") {
    Tensor t({1, 2}, {1.0f, -2.0f});
    const std::string bytes = vgt_bytes(t);
    // magic + rank + two extents + two f32
    REQUIRE(bytes.size() == 4 + 4 + 16 + 8);
    CHECK(bytes.substr(0, 4) == "VGT1");
    const std::string expect_rank{"\x02\x00\x00\x00", 4};
    CHECK(bytes.substr(4, 4) == expect_rank);
    const std::string expect_e0{"\x01\x00\x00\x00\x00\x00\x00\x00", 8};
    const std::string expect_e1{"\x02\x00\x00\x00\x00\x00\x00\x00", 8};
    CHECK(bytes.substr(8, 8) == expect_e0);
    CHECK(bytes.substr(16, 8) == expect_e1);
    const std::string expect_one{"\x00\x00\x80\x3f", 4};  // 1.0f LE
    const std::string expect_minus_two{"\x00\x00\x00\xc0", 4};
    CHECK(bytes.substr(24, 4) == expect_one);
    CHECK(bytes.substr(28, 4) == expect_minus_two);
}

TEST_CASE("VGT reader rejects damage") {
    const Tensor t = random_tensor({2, 2}, 5);
    std::string bytes = vgt_bytes(t);
    CHECK_THROWS_AS(parse_vgt(bytes + "x"), io_error);            // trailing byte
    CHECK_THROWS_AS(parse_vgt(bytes.substr(0, bytes.size() - 1)), io_error);
    std::string bad = bytes;
    bad[0] = 'X';
    CHECK_THROWS_AS(parse_vgt(bad), io_error);
    CHECK_THROWS_AS(read_vgt("/nonexistent/nowhere.vgt"), io_error);
}

TEST_CASE("rng streams are deterministic per seed") {
    Rng a(42), b(42), c(43);
    bool all_equal = true;
    bool any_diff = false;
    for (int i = 0; i < 64; ++i) {
        const double va = a.normal();
        all_equal = all_equal && va == b.normal();
        any_diff = any_diff || va != c.normal();
    }
    CHECK(all_equal);
    CHECK(any_diff);
}
