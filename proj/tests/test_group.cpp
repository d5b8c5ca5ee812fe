#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <cstdio>

#include "axb/common.hpp"
#include "axb/group.hpp"

using namespace axb;

TEST_CASE("multiply: Euclidean reduction at u = 0") {
    auto r = multiply(GroupPoint(1.0, 0.0), GroupPoint(2.0, 0.0));
    CHECK(r.x[0] == doctest::Approx(3.0));
    CHECK(r.u == doctest::Approx(0.0));
}

TEST_CASE("multiply: dilation factor e^u") {
    auto r = multiply(GroupPoint(0.0, std::log(2.0)), GroupPoint(1.0, 0.0));
    CHECK(r.x[0] == doctest::Approx(2.0));
    CHECK(r.u == doctest::Approx(std::log(2.0)));
}

TEST_CASE("multiply: n = 2 against direct scalar evaluation") {
    GroupPoint p({1.0, 1.0}, 0.3), q({-1.0, 2.0}, -0.3);
    auto r = multiply(p, q);
    // independent evaluation of (x + e^u x', u + u') componentwise
    const double s = std::exp(0.3);
    CHECK(r.x[0] == doctest::Approx(1.0 + s * -1.0).epsilon(1e-15));
    CHECK(r.x[1] == doctest::Approx(1.0 + s * 2.0).epsilon(1e-15));
    CHECK(r.u == doctest::Approx(0.0));
}

TEST_CASE("multiply: dimension mismatch is rejected") {
    CHECK_THROWS_AS(multiply(GroupPoint({1.0, 2.0}, 0.0), GroupPoint(1.0, 0.0)),
                    std::invalid_argument);
}

TEST_CASE("invert: closed form and group law") {
    auto a = invert(GroupPoint(3.0, 0.0));
    CHECK(a.x[0] == doctest::Approx(-3.0));
    CHECK(a.u == doctest::Approx(0.0));

    auto b = invert(GroupPoint(0.0, 1.7));
    CHECK(b.x[0] == doctest::Approx(0.0));
    CHECK(b.u == doctest::Approx(-1.7));

    auto c = invert(GroupPoint(1.0, std::log(2.0)));
    CHECK(c.x[0] == doctest::Approx(-0.5).epsilon(1e-15));
    CHECK(c.u == doctest::Approx(-std::log(2.0)));

    Rng rng(7);
    for (int i = 0; i < 50; ++i) {
        GroupPoint p({rng.uniform(-3, 3), rng.uniform(-3, 3)}, rng.uniform(-2, 2));
        auto e = multiply(p, invert(p));
        CHECK(std::abs(e.x[0]) < 1e-12);
        CHECK(std::abs(e.x[1]) < 1e-12);
        CHECK(std::abs(e.u) < 1e-12);
    }
}

TEST_CASE("distance: axis values and arccosh oracle") {
    CHECK(distance(GroupPoint(0.0, 2.5)) == doctest::Approx(2.5).epsilon(1e-13));
    CHECK(distance(GroupPoint(0.0, -2.5)) == doctest::Approx(2.5).epsilon(1e-13));
    CHECK(distance(GroupPoint(0.0, 0.0)) == doctest::Approx(0.0));
    // cosh d = 1 + 9/2 = 5.5, d = log(5.5 + sqrt(5.5^2 - 1))
    const double oracle = std::log(5.5 + std::sqrt(5.5 * 5.5 - 1.0));
    CHECK(distance(GroupPoint(3.0, 0.0)) == doctest::Approx(oracle).epsilon(1e-14));
    CHECK(oracle == doctest::Approx(2.38953).epsilon(1e-5));
}

TEST_CASE("modular function") {
    CHECK(modular(GroupPoint({1.0, 2.0, 3.0}, 0.0)) == doctest::Approx(1.0));
    CHECK(modular(GroupPoint(0.0, std::log(2.0))) == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(modular(GroupPoint({0.0, 0.0, 0.0}, 1.0)) ==
          doctest::Approx(std::exp(-3.0)).epsilon(1e-15));
}

TEST_CASE("associativity at 1e-12 on random triples") {
    Rng rng(11);
    for (int i = 0; i < 200; ++i) {
        GroupPoint a({rng.uniform(-2, 2), rng.uniform(-2, 2)}, rng.uniform(-1.5, 1.5));
        GroupPoint b({rng.uniform(-2, 2), rng.uniform(-2, 2)}, rng.uniform(-1.5, 1.5));
        GroupPoint c({rng.uniform(-2, 2), rng.uniform(-2, 2)}, rng.uniform(-1.5, 1.5));
        auto lhs = multiply(multiply(a, b), c);
        auto rhs = multiply(a, multiply(b, c));
        CHECK(std::abs(lhs.u - rhs.u) < 1e-12);
        CHECK(std::abs(lhs.x[0] - rhs.x[0]) < 1e-12);
        CHECK(std::abs(lhs.x[1] - rhs.x[1]) < 1e-12);
    }
}

TEST_CASE("distance symmetry under inversion at 1e-12") {
    Rng rng(13);
    for (int i = 0; i < 200; ++i) {
        GroupPoint p({rng.uniform(-4, 4), rng.uniform(-4, 4)}, rng.uniform(-3, 3));
        CHECK(std::abs(distance(p) - distance(invert(p))) < 1e-12);
    }
}

namespace {

SampledFunction gaussian_bump(const GridSpec& grid, double xw, double uw) {
    SampledFunction f(grid);
    const int n = grid.n();
    f.fill([&](const double* x, double u) {
        double q = u * u / (uw * uw);
        for (int a = 0; a < n; ++a) q += x[a] * x[a] / (xw * xw);
        return std::exp(-q);
    });
    return f;
}

}  // namespace

TEST_CASE("involute: zero map and double involution") {
    auto grid = make_grid(1, 6.0, 129, 4.0, 97);
    SampledFunction z(grid);
    auto zi = involute(z);
    CHECK(zi.max_abs() == 0.0);

    auto f = gaussian_bump(grid, 1.0, 0.8);
    auto ff = involute(involute(f));
    // interior points only; interpolation error is O(h^2)
    double max_err = 0.0;
    f.for_each_node([&](const std::vector<int>& ix, int iu, long flat) {
        if (ix[0] < 16 || ix[0] > 112 || iu < 12 || iu > 84) return;
        max_err = std::max(max_err, std::abs(ff.values()[flat] - f.values()[flat]));
    });
    CHECK(max_err < 1e-2);
}

TEST_CASE("involute: m^{1/2} times radial is a fixed point at symmetric nodes") {
    auto grid = make_grid(1, 6.0, 61, 4.0, 41);  // odd counts: 0 is a node
    SampledFunction f(grid);
    f.fill([&](const double* x, double u) {
        GroupPoint p(x[0], u);
        const double R = distance(p);
        return std::sqrt(modular(p)) * std::exp(-R * R);
    });
    auto g = involute(f);
    // At u = 0 the involution maps (x,0) -> (-x,0): exact grid nodes.
    const int iu0 = 20;
    for (int i = 0; i < 61; ++i) {
        CHECK(g.at({i}, iu0) == doctest::Approx(f.at({i}, iu0)).epsilon(1e-12));
    }
    // At x = 0 it maps (0,u) -> (0,-u): exact grid nodes.
    for (int j = 0; j < 41; ++j) {
        CHECK(g.at({30}, j) == doctest::Approx(f.at({30}, j)).epsilon(1e-12));
    }
}

TEST_CASE("involute: L^1 mass preserved for a box indicator (quadrature oracle)") {
    auto grid = make_grid(1, 8.0, 257, 5.0, 161);
    SampledFunction f(grid);
    f.fill([&](const double* x, double u) {
        return (std::abs(x[0]) < 1.0 && std::abs(u) < 0.5) ? 1.0 : 0.0;
    });
    auto g = involute(f);
    const double m0 = f.integral_abs();
    const double m1 = g.integral_abs();
    CHECK(m1 == doctest::Approx(m0).epsilon(1e-3));
}

TEST_CASE("convolve: discrete delta is an approximate identity") {
    auto grid = make_grid(1, 5.0, 81, 3.0, 49);
    auto f = gaussian_bump(grid, 1.2, 0.9);
    SampledFunction delta(grid);
    const double hx = grid.x[0].spacing(), hu = grid.u.spacing();
    delta.at({40}, 24) = 1.0 / (hx * hu);  // unit quadrature mass at the origin
    auto out = convolve(f, delta, ConvMethod::direct);
    double max_err = 0.0;
    f.for_each_node([&](const std::vector<int>&, int, long flat) {
        max_err = std::max(max_err, std::abs(out.values()[flat] - f.values()[flat]));
    });
    CHECK(max_err < 2e-2);  // <= spacing^2 * ||f''||
}

TEST_CASE("convolve: positivity and mass factorization") {
    // narrow bumps on a wide box so the convolution keeps its mass inside
    auto grid = make_grid(1, 8.0, 161, 3.5, 71);
    auto f = gaussian_bump(grid, 0.8, 0.45);
    auto g = gaussian_bump(grid, 0.8, 0.45);
    auto out = convolve(f, g, ConvMethod::direct);
    double min_v = 0.0;
    for (double v : out.values()) min_v = std::min(min_v, v);
    CHECK(min_v >= -1e-12 * out.max_abs());

    // integral(f * g) = integral(f) integral(g) against right Haar = Lebesgue
    CHECK(out.integral() == doctest::Approx(f.integral() * g.integral()).epsilon(1e-4));
}

TEST_CASE("convolve: fft and direct routes agree on a smooth pair") {
    auto grid = make_grid(1, 6.0, 81, 3.0, 41);
    auto f = gaussian_bump(grid, 1.0, 0.7);
    auto g = gaussian_bump(grid, 0.8, 0.5);
    auto a = convolve(f, g, ConvMethod::direct);
    auto b = convolve(f, g, ConvMethod::fft);
    double gap = 0.0;
    a.for_each_node([&](const std::vector<int>&, int, long flat) {
        gap = std::max(gap, std::abs(a.values()[flat] - b.values()[flat]));
    });
    CHECK(gap < 5e-3 * a.max_abs());
}

TEST_CASE("convolve: grid mismatch is rejected") {
    auto f = gaussian_bump(make_grid(1, 6.0, 61, 4.0, 41), 1.0, 0.8);
    auto g = gaussian_bump(make_grid(1, 5.0, 61, 4.0, 41), 1.0, 0.8);
    CHECK_THROWS_AS(convolve(f, g), std::invalid_argument);
}

TEST_CASE("convolve: linearity in both arguments") {
    auto grid = make_grid(1, 5.0, 41, 3.0, 31);
    auto f = gaussian_bump(grid, 1.0, 0.8);
    auto g = gaussian_bump(grid, 0.7, 0.5);
    SampledFunction g2 = g;
    for (auto& v : g2.values()) v *= 2.5;
    auto a = convolve(f, g2, ConvMethod::direct);
    auto b = convolve(f, g, ConvMethod::direct);
    double gap = 0.0;
    a.for_each_node([&](const std::vector<int>&, int, long flat) {
        gap = std::max(gap, std::abs(a.values()[flat] - 2.5 * b.values()[flat]));
    });
    CHECK(gap < 1e-12);
}

TEST_CASE("sampled function csv round trip") {
    auto grid = make_grid(2, 2.0, 5, 1.0, 4);
    SampledFunction f(grid);
    Rng rng(3);
    for (auto& v : f.values()) v = rng.uniform(-1, 1);
    save_csv(f, "group_io_test.csv");
    auto g = load_csv("group_io_test.csv");
    REQUIRE(g.grid() == f.grid());
    for (std::size_t i = 0; i < f.values().size(); ++i)
        CHECK(g.values()[i] == doctest::Approx(f.values()[i]).epsilon(1e-15));
    std::remove("group_io_test.csv");
}
