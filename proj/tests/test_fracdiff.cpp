#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "support.hpp"

#include "fracdeblur/errors.hpp"
#include "fracdeblur/fracdiff.hpp"

using namespace fracdeblur;

namespace {

VectorField loop_gradient(const PixelGrid& u, const std::vector<double>& phi) {
    const int H = u.height(), W = u.width();
    VectorField g(H, W, u.channels());
    for (int ch = 0; ch < u.channels(); ++ch)
        for (int i = 0; i < H; ++i)
            for (int j = 0; j < W; ++j) {
                double dx = 0.0, dy = 0.0;
                for (std::size_t l = 0; l < phi.size(); ++l) {
                    dx += phi[l] * u(testing::wrap(i - int(l), H), j, ch);
                    dy += phi[l] * u(i, testing::wrap(j - int(l), W), ch);
                }
                g.px(i, j, ch) = dx;
                g.py(i, j, ch) = dy;
            }
    return g;
}

double field_inner(const VectorField& a, const VectorField& b) { return inner(a.px, b.px) + inner(a.py, b.py); }
double field_norm(const VectorField& a) { return std::sqrt(field_inner(a, a)); }

} // namespace

TEST_CASE("integer orders collapse to finite differences") {
    CHECK(gl_coefficients(1.0, 4).phi == std::vector<double>{1.0, -1.0, 0.0, 0.0});
    CHECK(gl_coefficients(2.0, 4).phi == std::vector<double>{1.0, -2.0, 1.0, 0.0});
}

TEST_CASE("coefficients agree with the Gamma formula") {
    const FracCoeffs c = gl_coefficients(1.5, 3);
    CHECK(c.phi[0] == 1.0);
    CHECK(std::abs(c.phi[1] + 1.5) <= 1e-12);
    CHECK(std::abs(c.phi[2] - 0.375) <= 1e-12);
    for (double a : {0.3, 0.8, 1.3, 1.8, 2.5}) {
        const FracCoeffs k = gl_coefficients(a, 20);
        CHECK(k.phi[0] == 1.0);
        for (int l = 1; l < 20; ++l) {
            CHECK(std::abs(k.phi[l] - testing::gamma_coefficient(a, l)) <= 1e-12);
            CHECK(std::abs(k.phi[l] - k.phi[l - 1] * (l - 1 - a) / l) <= 1e-12);
        }
    }
}

TEST_CASE("truncated coefficient sum shrinks with more taps") {
    double prev = INFINITY;
    for (int K : {4, 8, 16, 32}) {
        double s = 0.0;
        for (double p : gl_coefficients(1.3, K).phi) s += p;
        CHECK(std::abs(s) < prev);
        prev = std::abs(s);
    }
}

TEST_CASE("coefficient arguments are validated") {
    CHECK_THROWS_AS(gl_coefficients(0.0, 4), UsageError);
    CHECK_THROWS_AS(gl_coefficients(-1.0, 4), UsageError);
    CHECK_THROWS_AS(gl_coefficients(1.0, 1), UsageError);
    CHECK_THROWS_AS(grad_alpha(PixelGrid(4, 8), gl_coefficients(1.3, 5)), UsageError);
}

TEST_CASE("grad_alpha") {
    std::mt19937_64 rng(1);
    const VectorField zero = grad_alpha(PixelGrid(6, 7, 1, 0.4), gl_coefficients(1.0, 4));
    CHECK(norm2(zero.px) == 0.0);
    CHECK(norm2(zero.py) == 0.0);

    const PixelGrid u = testing::random_grid(8, 9, 1, rng);
    const VectorField d1 = grad_alpha(u, gl_coefficients(1.0, 5));
    for (int i = 0; i < 8; ++i)
        for (int j = 0; j < 9; ++j) {
            CHECK(std::abs(d1.px(i, j) - (u(i, j) - u(testing::wrap(i - 1, 8), j))) <= 1e-15);
            CHECK(std::abs(d1.py(i, j) - (u(i, j) - u(i, testing::wrap(j - 1, 9)))) <= 1e-15);
        }

    const PixelGrid r = testing::random_grid(8, 8, 3, rng);
    const FracCoeffs c = gl_coefficients(1.3, 8);
    const VectorField fast = grad_alpha(r, c);
    const VectorField slow = loop_gradient(r, c.phi);
    CHECK(testing::max_abs_diff(fast.px, slow.px) <= 1e-12);
    CHECK(testing::max_abs_diff(fast.py, slow.py) <= 1e-12);

    // Linearity.
    const PixelGrid s = testing::random_grid(8, 8, 3, rng);
    const VectorField lin = grad_alpha(axpy(3.0, r, -2.0 * s), c);
    const VectorField gs = grad_alpha(s, c);
    CHECK(testing::max_abs_diff(lin.px, axpy(3.0, fast.px, -2.0 * gs.px)) <= 1e-12);
}

TEST_CASE("grad_alpha_adjoint") {
    const FracCoeffs c1 = gl_coefficients(1.0, 2);
    const PixelGrid z = grad_alpha_adjoint(VectorField(5, 5, 1), c1);
    CHECK(norm2(z) == 0.0);

    // Signal [1, 2, 4, 8] along one row, alpha = 1: (D^T p)_j = p_j - p_{j+1}, periodic.
    PixelGrid px(2, 4), py(2, 4, 1, {1.0, 2.0, 4.0, 8.0, 0.0, 0.0, 0.0, 0.0});
    const PixelGrid t = grad_alpha_adjoint(VectorField(px, py), c1);
    CHECK(t(0, 0) == -1.0);
    CHECK(t(0, 1) == -2.0);
    CHECK(t(0, 2) == -4.0);
    CHECK(t(0, 3) == 7.0);
    for (int j = 0; j < 4; ++j) CHECK(t(1, j) == 0.0);
}

TEST_CASE("adjoint identity over random instances") {
    std::mt19937_64 rng(2);
    for (double a : {0.8, 1.0, 1.3, 1.8})
        for (int K : {4, 15})
            for (int trial = 0; trial < 5; ++trial) {
                const FracCoeffs c = gl_coefficients(a, K);
                const PixelGrid x = testing::random_grid(16, 16, 1, rng, -1, 1);
                const VectorField f(testing::random_grid(16, 16, 1, rng, -1, 1),
                                    testing::random_grid(16, 16, 1, rng, -1, 1));
                const double lhs = field_inner(grad_alpha(x, c), f);
                const double rhs = inner(x, grad_alpha_adjoint(f, c));
                CHECK(std::abs(lhs - rhs) <= 1e-10 * norm2(x) * field_norm(f));
            }
}

TEST_CASE("ftv_norm") {
    std::mt19937_64 rng(3);
    const FracCoeffs c1 = gl_coefficients(1.0, 3);
    CHECK(ftv_norm(PixelGrid(6, 6, 1, 0.8), c1) == 0.0);

    // Rows [0 0 0 0 1 1 1 1]: the step and the periodic wrap give two unit
    // jumps per row; identical rows leave no vertical differences.
    PixelGrid step(2, 8);
    for (int r = 0; r < 2; ++r)
        for (int j = 4; j < 8; ++j) step(r, j) = 1.0;
    CHECK(ftv_norm(step, gl_coefficients(1.0, 2)) == doctest::Approx(4.0).epsilon(1e-15));

    const PixelGrid u = testing::random_grid(10, 10, 3, rng);
    const FracCoeffs c = gl_coefficients(1.3, 6);
    const VectorField g = loop_gradient(u, c.phi);
    double expect = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i) expect += std::sqrt(g.px[i] * g.px[i] + g.py[i] * g.py[i]);
    CHECK(ftv_norm(u, c) == doctest::Approx(expect).epsilon(1e-12));
}

TEST_CASE("gradient operator norm estimate") {
    const double n1 = estimate_grad_norm(gl_coefficients(1.0, 2), 64, 64);
    CHECK(n1 == doctest::Approx(2.0 * std::sqrt(2.0)).epsilon(1e-3));
    const double n2 = estimate_grad_norm(gl_coefficients(2.0, 3), 64, 64);
    CHECK(n2 == doctest::Approx(4.0 * std::sqrt(2.0)).epsilon(1e-3));
    for (double a : {0.5, 1.3, 1.8}) {
        const FracCoeffs c = gl_coefficients(a, 15);
        double l1 = 0.0;
        for (double p : c.phi) l1 += std::abs(p);
        CHECK(estimate_grad_norm(c, 32, 32) <= std::sqrt(2.0) * l1 + 1e-6);
    }
}
