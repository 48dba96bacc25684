#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <vector>

#include "bsch/kernels.hpp"
#include "test_util.hpp"

// The OpenMP kernels against their serial reference twins. Stencils must
// agree bit for bit; block-compensated reductions against plain serial
// sums agree to accumulation error.

namespace k = bsch::kernels;

namespace {

std::vector<double> random_field(std::size_t n, std::uint64_t seed) {
    testutil::Rng rng(seed);
    std::vector<double> v(n);
    for (auto& x : v) x = rng.uniform(-1.0, 1.0);
    return v;
}

} // namespace

TEST_CASE("laplace_bulk matches the serial reference bitwise") {
    for (auto [nx, ny] : {std::pair{8, 4}, {33, 17}, {64, 32}, {128, 96}}) {
        const double hx = 2.0 / nx, hy = 1.0 / (ny - 1);
        const auto u = random_field(static_cast<std::size_t>(nx) * ny, 5);
        const auto gb = random_field(nx, 6);
        const auto gt = random_field(nx, 7);
        std::vector<double> a(u.size()), b(u.size());

        k::laplace_bulk(nx, ny, hx, hy, u.data(), nullptr, nullptr, a.data());
        k::serial::laplace_bulk(nx, ny, hx, hy, u.data(), nullptr, nullptr,
                                b.data());
        CHECK(testutil::max_abs_diff(a, b) == 0.0);

        k::laplace_bulk(nx, ny, hx, hy, u.data(), gb.data(), gt.data(),
                        a.data());
        k::serial::laplace_bulk(nx, ny, hx, hy, u.data(), gb.data(), gt.data(),
                                b.data());
        CHECK(testutil::max_abs_diff(a, b) == 0.0);
    }
}

TEST_CASE("ring kernels match bitwise") {
    const int nx = 257;
    const auto v = random_field(nx, 8);
    std::vector<double> a(nx), b(nx);
    k::laplace_ring(nx, 0.01, v.data(), a.data());
    k::serial::laplace_ring(nx, 0.01, v.data(), b.data());
    CHECK(testutil::max_abs_diff(a, b) == 0.0);
}

TEST_CASE("normal derivative matches bitwise") {
    const int nx = 48, ny = 13;
    const auto u = random_field(static_cast<std::size_t>(nx) * ny, 9);
    std::vector<double> ab(nx), at(nx), bb(nx), bt(nx);
    k::normal_derivative(nx, ny, 0.05, u.data(), ab.data(), at.data());
    k::serial::normal_derivative(nx, ny, 0.05, u.data(), bb.data(), bt.data());
    CHECK(testutil::max_abs_diff(ab, bb) == 0.0);
    CHECK(testutil::max_abs_diff(at, bt) == 0.0);
}

TEST_CASE("reductions match the serial reference to accumulation error") {
    for (std::size_t n : {64u, 4095u, 4096u, 4097u, 100000u}) {
        const auto x = random_field(n, n);
        const auto y = random_field(n, n + 1);
        CHECK(testutil::near(k::sum(x.data(), n),
                             k::serial::sum(x.data(), n), 1e-11));
        CHECK(testutil::near(k::dot(x.data(), y.data(), n),
                             k::serial::dot(x.data(), y.data(), n), 1e-11));
        CHECK(k::max_abs(x.data(), n) == k::serial::max_abs(x.data(), n));
    }
}

TEST_CASE("quadrature and dirichlet kernels match the reference") {
    const int nx = 96, ny = 41;
    const double hx = 2.0 / nx, hy = 1.0 / (ny - 1);
    const auto u = random_field(static_cast<std::size_t>(nx) * ny, 77);
    const auto w = random_field(u.size(), 78);
    CHECK(testutil::near(k::bulk_quad_sum(nx, ny, hx, hy, u.data()),
                         k::serial::bulk_quad_sum(nx, ny, hx, hy, u.data()),
                         1e-12));
    CHECK(testutil::near(
        k::bulk_quad_dot(nx, ny, hx, hy, u.data(), w.data()),
        k::serial::bulk_quad_dot(nx, ny, hx, hy, u.data(), w.data()), 1e-12));
    CHECK(testutil::near(k::dirichlet_bulk(nx, ny, hx, hy, u.data()),
                         k::serial::dirichlet_bulk(nx, ny, hx, hy, u.data()),
                         1e-10));
    CHECK(testutil::near(k::dirichlet_ring(nx, hx, u.data()),
                         k::serial::dirichlet_ring(nx, hx, u.data()), 1e-11));
}

TEST_CASE("blocked reduction is invariant to the block boundary shortcut") {
    // one block vs many blocks must agree exactly for identical data
    const auto x = random_field(k::reduce_block, 123);
    const double one_block = k::sum(x.data(), x.size());
    std::vector<double> twice(x);
    twice.insert(twice.end(), x.begin(), x.end());
    const double two_blocks = k::sum(twice.data(), twice.size());
    // the two halves are identical, so partials are equal and the combined
    // sum is exactly twice the one-block value
    CHECK(two_blocks == 2.0 * one_block);
}
