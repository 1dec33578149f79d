#include <cmath>
#include <random>
#include <sstream>

#include "doctest.h"
#include "oracle.hpp"
#include "wvlab/errors.hpp"
#include "wvlab/grid.hpp"

using namespace wvlab;
using doctest::Approx;

namespace {
const PacketRecipe kP1{5.0, 1.0, 0.1, 0.1, 100.0};
}

TEST_CASE("grid spec validation") {
    CHECK_THROWS_AS((GridSpec{0, 10, 1000}.validate()), InvalidArgument);
    CHECK_THROWS_AS((GridSpec{0, 10, 512}.validate()), InvalidArgument);
    CHECK_THROWS_AS((GridSpec{10, 0, 1024}.validate()), InvalidArgument);
    CHECK_NOTHROW(default_grid().validate());
    const GridSpec g{0, 1024, 1024};
    CHECK(g.wavenumber(1) == Approx(2 * std::numbers::pi / 1024));
    CHECK(g.wavenumber(1023) == Approx(-2 * std::numbers::pi / 1024));
}

TEST_CASE("sampled inner products match the closed form") {
    const auto spec = default_grid();
    const auto fp = sample(make_f(kP1, +1), spec);
    const auto fm = sample(make_f(kP1, -1), spec);
    CHECK(fp.norm_squared() == Approx(1.0).epsilon(1e-12));
    CHECK(std::abs(grid_inner_product(fp, fm) - inner_product(make_f(kP1, +1), make_f(kP1, -1))) < 1e-12);
}

TEST_CASE("grid f overlap across random recipes") {
    std::mt19937_64 rng(11);
    for (int i = 0; i < 50; ++i) {
        const auto r = oracle::random_recipe(rng);
        const PacketRecipe recipe{r.k0, r.k1, r.dk_f, r.dk_g, r.x0};
        const auto psi = compose_psi(recipe);
        const SuperposedState* states[] = {&psi};
        const auto spec = auto_grid(states);
        const cplx o = grid_inner_product(sample(make_f(recipe, +1), spec), sample(make_f(recipe, -1), spec));
        CHECK(std::abs(o - cplx{recipe.f_overlap(), 0}) < 1e-8);
    }
}

TEST_CASE("spectral momentum agrees with finite differences") {
    const auto p = gaussian_packet(0.0, 1.5, 0.4);
    const GridSpec spec{-40, 40, 4096};
    const auto w = sample(p, spec);
    const auto pw = apply_momentum(w, 1);
    const auto p2w = apply_momentum(w, 2);
    const auto op = oracle::centered_packet(0.0, 1.5, 0.4);
    const cplx i{0, 1};
    for (std::size_t j : {1800u, 2048u, 2300u}) {
        const double x = spec.x(j);
        CHECK(std::abs(pw.amplitudes()[j] - (-i * oracle::d1(op, x))) < 1e-8);
        CHECK(std::abs(p2w.amplitudes()[j] - (-oracle::d2(op, x, 1e-2))) < 1e-6);
    }
}

TEST_CASE("free evolution on the grid is unitary and matches the closed form") {
    const auto p = gaussian_packet(-50.0, 3.0, 0.2);
    const GridSpec spec{-200, 200, 8192};
    const auto w = sample(p, spec);
    const double t = 25.0;
    const auto evolved = evolve_free(w, t);
    CHECK(std::abs(evolved.norm_squared() - w.norm_squared()) < 1e-12);
    CHECK(std::abs(momentum_norm_squared(w) - w.norm_squared()) < 1e-12);
    const auto exact = free_evolve(p, t);
    double err = 0.0;
    for (std::size_t j = 0; j < spec.n; j += 7) err = std::max(err, std::abs(evolved.amplitudes()[j] - exact(spec.x(j))));
    CHECK(err < 1e-10);
}

TEST_CASE("support checks") {
    const GridSpec spec{-100, 100, 1024};
    CHECK_THROWS_AS(check_support(gaussian_packet(95, 0, 0.1), spec), SupportOverflow);
    CHECK_THROWS_AS(check_support(gaussian_packet(0, 30, 0.1), spec), SupportOverflow);
    CHECK_NOTHROW(check_support(gaussian_packet(0, 3, 0.1), spec));
    const auto w = sample(gaussian_packet(0, 5, 0.5), spec);
    CHECK_THROWS_AS(evolve_free(w, 100.0), SupportOverflow);
}

TEST_CASE("sharp interval projection") {
    const GridSpec spec{-100, 100, 1024};
    const auto w = sample(gaussian_packet(0, 0, 0.1), spec);
    const auto half = project_interval(w, RegionProjector::interval(0, 100));
    // the sample at x = 0 is kept whole, so the sum exceeds 1/2 by about dx |psi(0)|^2 / 2
    CHECK(std::abs(half.norm_squared() - 0.5 - 0.5 * spec.dx() * std::norm(w.amplitudes()[512])) < 1e-6);
    const auto all = project_interval(w, RegionProjector::full_line());
    CHECK(all.norm_squared() == Approx(w.norm_squared()));
}

TEST_CASE("csv output has a header and one row per sample") {
    const GridSpec spec{-10, 10, 1024};
    std::ostringstream os;
    write_csv(os, sample(gaussian_packet(0, 0, 1.0), spec));
    std::istringstream is(os.str());
    std::string line;
    std::getline(is, line);
    CHECK(line == "x,re,im");
    int rows = 0;
    while (std::getline(is, line)) ++rows;
    CHECK(rows == 1024);
}
