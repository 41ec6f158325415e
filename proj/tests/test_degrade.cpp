#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "support.hpp"

#include "fracdeblur/degrade.hpp"
#include "fracdeblur/errors.hpp"

#include <fstream>
#include <sstream>

using namespace fracdeblur;

#ifndef FRACDEBLUR_DATA_DIR
#error "FRACDEBLUR_DATA_DIR must point at the shipped data directory"
#endif

namespace {

void check_normalized(const Kernel& k) {
    double s = 0.0;
    for (double w : k.weights) {
        CHECK(w >= 0.0);
        s += w;
    }
    CHECK(std::abs(s - 1.0) <= 1e-12);
}

} // namespace

TEST_CASE("average kernels") {
    CHECK(make_average_kernel(1, 1) == Kernel{1, 1, {1.0}});
    const Kernel a22 = make_average_kernel(2, 2);
    CHECK(a22.rows == 2);
    for (double w : a22.weights) CHECK(w == 0.25);
    const Kernel a11 = make_average_kernel(11, 11);
    CHECK(a11.weights.size() == 121);
    for (double w : a11.weights) CHECK(w == doctest::Approx(1.0 / 121).epsilon(1e-15));
    CHECK_THROWS_AS(make_average_kernel(0, 3), UsageError);
}

TEST_CASE("gaussian kernels") {
    CHECK(make_gaussian_kernel(1, 0.5) == Kernel{1, 1, {1.0}});
    for (double w : make_gaussian_kernel(3, 1e6).weights) CHECK(w == doctest::Approx(1.0 / 9).epsilon(1e-9));

    const Kernel g = make_gaussian_kernel(7, 4);
    check_normalized(g);
    for (int r = 0; r < 7; ++r)
        for (int c = 0; c < 7; ++c) CHECK(std::abs(g(r, c) - g(c, 6 - r)) <= 1e-15); // 90 degree rotation

    // exp(-(x^2+y^2)/(2 s^2)) ratio between the corner and the centre tap.
    CHECK(g(0, 0) / g(3, 3) == doctest::Approx(std::exp(-18.0 / 32.0)).epsilon(1e-12));
    CHECK_THROWS_AS(make_gaussian_kernel(5, 0.0), UsageError);
    CHECK_THROWS_AS(make_gaussian_kernel(5, -1.0), UsageError);
}

TEST_CASE("motion kernels") {
    for (double t : {0.0, 33.0, 90.0, 200.0}) CHECK(make_motion_kernel(1, t) == Kernel{1, 1, {1.0}});
    const Kernel h = make_motion_kernel(5, 0);
    CHECK(h.rows == 1);
    CHECK(h.cols == 5);
    for (double w : h.weights) CHECK(w == doctest::Approx(0.2).epsilon(1e-14));
    const Kernel v = make_motion_kernel(5, 90);
    CHECK(v.rows == 5);
    CHECK(v.cols == 1);
    for (double w : v.weights) CHECK(w == doctest::Approx(0.2).epsilon(1e-14));
    for (auto [len, ang] : {std::pair{15, 135.0}, {21, 45.0}, {41, 90.0}, {61, 135.0}, {7, 17.0}})
        check_normalized(make_motion_kernel(len, ang));

    // A 45 degree line rises to the right: mass sits on the anti-diagonal.
    const Kernel d = make_motion_kernel(9, 45);
    CHECK(d(0, d.cols - 1) > 0.0);
    CHECK(d(0, 0) == 0.0);
    CHECK_THROWS_AS(make_motion_kernel(0, 10), UsageError);
}

TEST_CASE("motion kernels match the shipped golden files") {
    const std::pair<const char*, std::pair<int, double>> golden[] = {
        {"motion_15_135", {15, 135.0}}, {"motion_21_45", {21, 45.0}}, {"motion_9_0", {9, 0.0}}, {"motion_9_90", {9, 90.0}}};
    for (const auto& [name, args] : golden) {
        const Kernel file = read_kernel_file(std::string(FRACDEBLUR_DATA_DIR) + "/kernels/" + name + ".txt");
        const Kernel made = make_motion_kernel(args.first, args.second);
        REQUIRE(file.rows == made.rows);
        REQUIRE(file.cols == made.cols);
        for (std::size_t i = 0; i < made.weights.size(); ++i) CHECK(file.weights[i] == made.weights[i]);
    }
}

TEST_CASE("kernel text format round-trips") {
    std::mt19937_64 rng(1);
    const Kernel k = testing::random_kernel(3, 4, rng);
    std::stringstream ss;
    write_kernel(ss, k);
    CHECK(read_kernel(ss) == k);
    std::stringstream bad("2 2\n0.5 0.5 0.5\n");
    CHECK_THROWS(read_kernel(bad));
}

TEST_CASE("kernel spec parsing") {
    CHECK(parse_kernel_spec("gaussian:7,4") == make_gaussian_kernel(7, 4));
    CHECK(parse_kernel_spec("average:11,11") == make_average_kernel(11, 11));
    CHECK(parse_kernel_spec("motion:35,135") == make_motion_kernel(35, 135));
    CHECK(parse_kernel_spec("identity") == identity_kernel());
    CHECK_THROWS_AS(parse_kernel_spec("gaussian:7"), UsageError);
    CHECK_THROWS_AS(parse_kernel_spec("box:3,3"), UsageError);
    CHECK_THROWS_AS(parse_kernel_spec("average:2.5,3"), UsageError);
}

TEST_CASE("blur_gray") {
    std::mt19937_64 rng(2);
    const PixelGrid u = testing::random_grid(16, 16, 1, rng);
    CHECK(testing::max_abs_diff(blur_gray(u, identity_kernel()), u) < 1e-14);
    const PixelGrid flat = blur_gray(PixelGrid(16, 16, 1, 0.37), make_gaussian_kernel(7, 4));
    for (double v : flat.data()) CHECK(v == doctest::Approx(0.37).epsilon(1e-13));
    for (const Kernel& k : {make_average_kernel(3, 5), make_gaussian_kernel(5, 1.5), make_motion_kernel(7, 60)})
        CHECK(testing::max_abs_diff(blur_gray(u, k), testing::direct_conv(u, k)) < 1e-10);
    CHECK_THROWS_AS(blur_gray(u, make_average_kernel(17, 3)), UsageError);
    CHECK_THROWS_AS(blur_gray(PixelGrid(8, 8, 3), identity_kernel()), UsageError);

    // Linearity.
    const PixelGrid v = testing::random_grid(16, 16, 1, rng);
    const Kernel k = make_motion_kernel(9, 20);
    CHECK(testing::max_abs_diff(blur_gray(axpy(2.0, u, -0.5 * v), k),
                                axpy(2.0, blur_gray(u, k), -0.5 * blur_gray(v, k))) < 1e-10);
}

TEST_CASE("blur_color") {
    std::mt19937_64 rng(3);
    const PixelGrid u = testing::random_grid(16, 16, 3, rng);

    ColorBlurSpec id;
    for (int i = 0; i < 3; ++i) id.entries[i][i] = {1.0, identity_kernel()};
    CHECK(testing::max_abs_diff(blur_color(u, id), u) < 1e-14);

    const PixelGrid third = blur_color(PixelGrid(16, 16, 3, 1.0), color_preset("house"));
    for (double x : third.data()) CHECK(x == doctest::Approx(1.0 / 3).epsilon(1e-13));

    const ColorBlurSpec peppers = color_preset("peppers-small");
    const PixelGrid out = blur_color(u, peppers);
    for (int i = 0; i < 3; ++i) {
        PixelGrid expect(16, 16);
        for (int j = 0; j < 3; ++j)
            expect = axpy(peppers.entries[i][j].weight, testing::direct_conv(u, peppers.entries[i][j].kernel, j), expect);
        CHECK(testing::max_abs_diff(out.extract_channel(i), expect) < 1e-10);
    }
    CHECK_THROWS_AS(blur_color(testing::random_grid(32, 32, 3, rng), color_preset("lena")), UsageError);
    CHECK_THROWS_AS(blur_color(PixelGrid(16, 16, 1), id), UsageError);
}

TEST_CASE("colour presets") {
    const ColorBlurSpec house = color_preset("house");
    CHECK(house.entries[0][0].kernel == make_average_kernel(5, 5));
    CHECK(house.entries[1][1].kernel == make_average_kernel(7, 7));
    CHECK(house.entries[2][2].kernel == make_average_kernel(9, 9));
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) CHECK(house.entries[i][j].weight == (i == j ? 1.0 / 3 : 0.0));

    const ColorBlurSpec lena = color_preset("lena");
    CHECK(lena.entries[0][0].weight == 0.7);
    CHECK(lena.entries[0][0].kernel == make_average_kernel(15, 15));
    CHECK(lena.entries[2][0].weight == 0.0);
    CHECK(lena.entries[2][0].kernel == make_motion_kernel(41, 90));

    const ColorBlurSpec plate = color_preset("plate");
    const double pw[3][3] = {{0.8, 0.1, 0.1}, {0.15, 0.7, 0.15}, {0.2, 0.2, 0.6}};
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) {
            CHECK(plate.entries[i][j].weight == pw[i][j]);
            CHECK(plate.entries[i][j].kernel == make_motion_kernel(41, 135));
            CHECK(color_preset("peppers").entries[i][j].weight == pw[i][j]);
        }
    CHECK(is_color_preset("peppers-small"));
    CHECK_FALSE(is_color_preset("gaussian:7,4"));
    CHECK_THROWS_AS(color_preset("mandrill"), UsageError);
}

TEST_CASE("colour blur text format") {
    const ColorBlurSpec spec = parse_color_blur("# house\n"
                                                "0.5*average:3,3; 0*identity; 0.25*motion:5,0\n"
                                                "0*identity; 1*gaussian:3,1; 0*identity\n"
                                                "0.1*identity; 0.2*identity; 0.7*identity\n");
    CHECK(spec.entries[0][0].weight == 0.5);
    CHECK(spec.entries[0][2].kernel == make_motion_kernel(5, 0));
    CHECK(spec.entries[1][1].kernel == make_gaussian_kernel(3, 1));
    CHECK(spec.entries[2][2].weight == 0.7);
    CHECK_THROWS_AS(parse_color_blur("1*identity; 1*identity\n"), UsageError);
    CHECK_THROWS_AS(parse_color_blur("1*identity;1*identity;1*identity\n"), UsageError);
}

TEST_CASE("impulse noise") {
    std::mt19937_64 rng(4);
    const PixelGrid u = testing::random_grid(32, 32, 3, rng);
    CHECK(add_impulse_noise(u, {NoiseKind::SaltPepper, 0.0, 9}) == u);
    CHECK(add_impulse_noise(u, {NoiseKind::RandomValued, 0.0, 9}) == u);

    const PixelGrid all = add_impulse_noise(u, {NoiseKind::SaltPepper, 1.0, 9});
    int zeros = 0;
    for (double v : all.data()) {
        CHECK((v == 0.0 || v == 1.0));
        zeros += v == 0.0;
    }
    CHECK(zeros > 0.4 * all.size());
    CHECK(zeros < 0.6 * all.size());

    const PixelGrid rv = add_impulse_noise(u, {NoiseKind::RandomValued, 1.0, 9});
    for (double v : rv.data()) CHECK((v >= 0.0 && v <= 1.0));

    const PixelGrid base(256, 256, 1, 0.5);
    for (NoiseKind kind : {NoiseKind::SaltPepper, NoiseKind::RandomValued}) {
        const PixelGrid n = add_impulse_noise(base, {kind, 0.3, 12345});
        int hit = 0;
        for (double v : n.data()) hit += v != 0.5;
        const double frac = double(hit) / base.size();
        CHECK(frac >= 0.28);
        CHECK(frac <= 0.32);
    }
}

TEST_CASE("impulse noise is reproducible and keyed by seed") {
    std::mt19937_64 rng(5);
    const PixelGrid u = testing::random_grid(40, 30, 3, rng);
    const NoiseSpec spec{NoiseKind::SaltPepper, 0.2, 77};
    CHECK(add_impulse_noise(u, spec) == add_impulse_noise(u, spec));
    CHECK_FALSE(add_impulse_noise(u, spec) == add_impulse_noise(u, {NoiseKind::SaltPepper, 0.2, 78}));
    // Every key component reaches the output.
    CHECK(keyed_hash(1, 0, 0) != keyed_hash(0, 1, 0));
    CHECK(keyed_hash(0, 1, 0) != keyed_hash(0, 0, 1));
    // Channels draw independently.
    const PixelGrid gray3(50, 50, 3, 0.5);
    const PixelGrid n = add_impulse_noise(gray3, {NoiseKind::SaltPepper, 0.5, 3});
    CHECK_FALSE(n.extract_channel(0) == n.extract_channel(1));
}

TEST_CASE("noise spec parsing") {
    const NoiseSpec sp = parse_noise_spec("sp:0.1");
    CHECK(sp.kind == NoiseKind::SaltPepper);
    CHECK(sp.density == 0.1);
    const NoiseSpec rv = parse_noise_spec("rv:0.3");
    CHECK(rv.kind == NoiseKind::RandomValued);
    CHECK(rv.density == 0.3);
    CHECK(to_string(rv) == "rv:0.3");
    CHECK_THROWS_AS(parse_noise_spec("sp:1.5"), UsageError);
    CHECK_THROWS_AS(parse_noise_spec("gauss:0.1"), UsageError);
    CHECK_THROWS_AS(parse_noise_spec("sp"), UsageError);
    CHECK_THROWS_AS(add_impulse_noise(PixelGrid(2, 2), {NoiseKind::SaltPepper, -0.1, 0}), UsageError);
}
