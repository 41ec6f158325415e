#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "support.hpp"

#include "fracdeblur/errors.hpp"
#include "fracdeblur/grid.hpp"

using namespace fracdeblur;

TEST_CASE("norm2 of zero and 3-4-5 grids") {
    CHECK(norm2(PixelGrid(4, 4)) == 0.0);
    CHECK(norm2(PixelGrid(1, 2, 1, {3.0, 4.0})) == doctest::Approx(5.0).epsilon(1e-15));
}

TEST_CASE("norm2, norm1 and inner follow their loop definitions") {
    std::mt19937_64 rng(1);
    const PixelGrid a = testing::random_grid(8, 8, 1, rng, -1, 1);
    const PixelGrid b = testing::random_grid(8, 8, 1, rng, -1, 1);
    double sq = 0.0, l1 = 0.0, dot = 0.0;
    for (int r = 0; r < 8; ++r)
        for (int c = 0; c < 8; ++c) {
            sq += a(r, c) * a(r, c);
            l1 += std::abs(a(r, c));
            dot += a(r, c) * b(r, c);
        }
    CHECK(norm2(a) == doctest::Approx(std::sqrt(sq)).epsilon(1e-13));
    CHECK(norm1(a) == doctest::Approx(l1).epsilon(1e-13));
    CHECK(inner(a, b) == doctest::Approx(dot).epsilon(1e-13));
    CHECK(inner(a, PixelGrid(8, 8)) == 0.0);
}

TEST_CASE("inner(a, a) equals norm2(a)^2 up to 64x64x3") {
    std::mt19937_64 rng(2);
    for (int n : {1, 7, 32, 64})
        for (int c : {1, 3}) {
            const PixelGrid a = testing::random_grid(n, n, c, rng, -1, 1);
            const double n2 = norm2(a);
            CHECK(std::abs(inner(a, a) - n2 * n2) <= 1e-12 * n2 * n2);
        }
}

TEST_CASE("inner rejects mismatched shapes") {
    CHECK_THROWS_AS(inner(PixelGrid(2, 2), PixelGrid(2, 3)), UsageError);
    CHECK_THROWS_AS(inner(PixelGrid(2, 2, 1), PixelGrid(2, 2, 3)), UsageError);
    CHECK_THROWS_AS(axpy(1.0, PixelGrid(2, 2), PixelGrid(3, 2)), UsageError);
}

TEST_CASE("axpy arithmetic") {
    std::mt19937_64 rng(3);
    const PixelGrid x = testing::random_grid(3, 5, 1, rng);
    const PixelGrid y = testing::random_grid(3, 5, 1, rng);
    CHECK(axpy(0.0, x, y) == y);
    CHECK(axpy(1.0, x, PixelGrid(3, 5)) == x);
    CHECK(axpy(2.0, PixelGrid(1, 1, 1, {1.0}), PixelGrid(1, 1, 1, {3.0}))[0] == 5.0);
}

TEST_CASE("clamp01 examples and idempotence") {
    const PixelGrid g(1, 3, 1, {-0.1, 0.5, 1.2});
    const PixelGrid c = clamp01(g);
    CHECK(c[0] == 0.0);
    CHECK(c[1] == 0.5);
    CHECK(c[2] == 1.0);
    std::mt19937_64 rng(4);
    const PixelGrid r = testing::random_grid(9, 9, 3, rng, -2, 2);
    CHECK(clamp01(clamp01(r)) == clamp01(r));
}

TEST_CASE("construction validates shape") {
    CHECK_THROWS_AS(PixelGrid(0, 4), UsageError);
    CHECK_THROWS_AS(PixelGrid(4, 4, 2), UsageError);
    CHECK_THROWS_AS(PixelGrid(2, 2, 1, std::vector<double>(3)), UsageError);
    const PixelGrid g(2, 3, 3);
    CHECK(g.size() == 18);
    CHECK(g.plane_size() == 6);
}

TEST_CASE("channel-planar layout and channel access") {
    PixelGrid g(2, 2, 3);
    g(1, 0, 2) = 7.0;
    CHECK(g[2 * 4 + 2] == 7.0);
    const PixelGrid plane = g.extract_channel(2);
    CHECK(plane.channels() == 1);
    CHECK(plane(1, 0) == 7.0);
    PixelGrid h(2, 2, 3);
    h.set_channel(0, plane);
    CHECK(h(1, 0, 0) == 7.0);
    CHECK(h(1, 0, 2) == 0.0);
}

TEST_CASE("all_finite detects NaN and infinity") {
    PixelGrid g(2, 2);
    CHECK(g.all_finite());
    g(0, 1) = std::nan("");
    CHECK_FALSE(g.all_finite());
    g(0, 1) = INFINITY;
    CHECK_FALSE(g.all_finite());
}
