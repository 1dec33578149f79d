#include <cmath>
#include <random>

#include "doctest.h"
#include "oracle.hpp"
#include "wvlab/errors.hpp"
#include "wvlab/weak_value.hpp"

using namespace wvlab;
using doctest::Approx;

namespace {

const PacketRecipe kP1{5.0, 1.0, 0.1, 0.1, 100.0};
const PacketRecipe kP2{5.0, 1.0, 0.5, 0.1, 100.0};

const auto kRegionH = RegionProjector::packets({kTermFPlus, kTermFMinus});
const auto kRegionG = RegionProjector::packets({kTermG});
const auto kIntervalH = RegionProjector::interval(-50, 50);
const auto kIntervalG = RegionProjector::interval(50, 150);

bool near(cplx a, cplx b, double tol) { return std::abs(a - b) <= tol; }
bool near_rel(cplx a, cplx b, double tol) { return std::abs(a - b) <= tol * std::max(1.0, std::abs(b)); }

// Weak value from brute-force quadrature of the textbook packets.
cplx oracle_weak_value(const PacketRecipe& r, int n, double lo, double hi) {
    const auto g = oracle::g_packet(r.x0, r.dk_g);
    const auto fp = oracle::f_packet(r.k0, r.k1, r.dk_f, +1);
    const auto fm = oracle::f_packet(r.k0, r.k1, r.dk_f, -1);
    const double np = psi_divisor(r), nf = phi_divisor(r);
    const oracle::Fn psi = [&](double x) { return (g(x) + fp(x) + fm(x)) / np; };
    const oracle::Fn phi = [&](double x) { return (g(x) + fp(x) - fm(x)) / nf; };
    const cplx num = oracle::moment(phi, psi, n, lo, hi, 200000);
    const cplx den = oracle::moment(phi, psi, 0, -150, 250, 400000);
    return (n == 2 ? 0.5 : 1.0) * num / den;
}

}  // namespace

TEST_CASE("headline table is analytic exact") {
    const auto psi = compose_psi(kP1), phi = compose_phi(kP1);
    CHECK(near(weak_value({kRegionG, ObservableKind::presence}, psi, phi).value, 1.0, 1e-12));
    CHECK(near(weak_value({kRegionH, ObservableKind::presence}, psi, phi).value, 0.0, 1e-12));
    CHECK(near(local_momentum(kRegionH, psi, phi).value, 2.0, 1e-12));
    CHECK(near(local_momentum(kRegionG, psi, phi).value, 0.0, 1e-12));
    CHECK(near(local_energy(kRegionH, psi, phi).value, 10.0, 1e-12));
    CHECK(near(local_energy(kRegionG, psi, phi).value, 0.005, 1e-12));
    CHECK(weak_value({kRegionG, ObservableKind::presence}, psi, phi).method == Method::analytic);
}

TEST_CASE("headline table on sharp intervals agrees with the grid and quadrature oracle") {
    const auto psi = compose_psi(kP1), phi = compose_phi(kP1);
    const auto pres_h = weak_value({kIntervalH, ObservableKind::presence}, psi, phi);
    CHECK(pres_h.method == Method::grid);
    CHECK(near(pres_h.value, 0.0, 1e-6));
    CHECK(near_rel(weak_value({kIntervalG, ObservableKind::presence}, psi, phi).value, 1.0, 1e-6));
    CHECK(near_rel(local_momentum(kIntervalH, psi, phi).value, 2.0, 1e-6));
    CHECK(near(local_momentum(kIntervalG, psi, phi).value, 0.0, 1e-6));
    CHECK(near_rel(local_energy(kIntervalH, psi, phi).value, 10.0, 1e-6));
    CHECK(near_rel(local_energy(kIntervalG, psi, phi).value, 0.005, 1e-6));

    CHECK(near_rel(oracle_weak_value(kP1, 1, -50, 50), 2.0, 1e-6));
    CHECK(near_rel(oracle_weak_value(kP1, 2, -50, 50), 10.0, 1e-6));
}

TEST_CASE("region h values hold beyond the orthogonal regime") {
    // Cross terms cancel in the h numerator, so momentum(h) = 2 k1 for any dk_f.
    const auto psi = compose_psi(kP2), phi = compose_phi(kP2);
    CHECK(near(local_momentum(kRegionH, psi, phi).value, 2.0 * kP2.k1, 1e-12));
    CHECK(near(local_energy(kRegionH, psi, phi).value, 2.0 * kP2.k0 * kP2.k1, 1e-12));
}

TEST_CASE("packet projector table") {
    const auto psi = compose_psi(kP1), phi = compose_phi(kP1);
    const auto t = packet_projector_weak_values(psi, phi);
    CHECK(near(t.g().presence, 1.0, 1e-12));
    CHECK(near(t.f_plus().presence, 1.0, 1e-12));
    CHECK(near(t.f_minus().presence, -1.0, 1e-12));
    CHECK(near(t.f_plus().momentum, 6.0, 1e-12));
    CHECK(near(t.f_minus().momentum, -4.0, 1e-12));
    CHECK(near(t.g().energy, 0.005, 1e-12));
    CHECK(near(t.f_plus().energy, 18.005, 1e-12));
    CHECK(near(t.f_minus().energy, -8.005, 1e-12));
    CHECK(near(three_box_summary(psi, phi).sum(), 1.0, 1e-12));
}

TEST_CASE("packet projectors need labels outside the orthogonal regime") {
    CHECK_THROWS_AS(packet_projector_weak_values(compose_psi(kP2), compose_phi(kP2)), NonOrthogonalPackets);
    const auto t = packet_projector_weak_values(compose_psi(kP2, true), compose_phi(kP2, true));
    CHECK(near(t.f_minus().presence, -1.0, 1e-12));
    CHECK(near(t.f_plus().energy, (36.0 + 0.25) / 2.0, 1e-12));
}

TEST_CASE("counterparticle sums match region h across random recipes") {
    std::mt19937_64 rng(3);
    for (int i = 0; i < 50; ++i) {
        const auto s = oracle::random_recipe(rng);
        const PacketRecipe r{s.k0, s.k1, s.dk_f, s.dk_g, s.x0};
        const auto c = counterparticle_decomposition(compose_psi(r, true), compose_phi(r, true));
        const double p0 = r.k0, p1 = r.k1, dp = r.dk_f;
        CHECK(near(c.positive.momentum, p0 + p1, 1e-8));
        CHECK(near(c.negative.momentum, -(p0 - p1), 1e-8));
        CHECK(near(c.positive.energy, ((p0 + p1) * (p0 + p1) + dp * dp) / 2.0, 1e-8));
        CHECK(near(c.negative.energy, -((p0 - p1) * (p0 - p1) + dp * dp) / 2.0, 1e-8));
        CHECK(near(c.momentum_sum, 2 * p1, 1e-8));
        CHECK(near(c.energy_sum, 2 * p0 * p1, 1e-8));
        CHECK(c.momentum_mismatch < 1e-8);
        CHECK(c.energy_mismatch < 1e-8);
    }
}

TEST_CASE("presence weak values sum to one on the full line") {
    std::mt19937_64 rng(5);
    for (int i = 0; i < 50; ++i) {
        const auto s = oracle::random_recipe(rng);
        const PacketRecipe r{s.k0, s.k1, s.dk_f, s.dk_g, s.x0};
        const auto psi = compose_psi(r), phi = compose_phi(r);
        const cplx total = weak_value({kRegionG, ObservableKind::presence}, psi, phi).value +
                           weak_value({kRegionH, ObservableKind::presence}, psi, phi).value;
        CHECK(near(total, 1.0, 1e-10));
        CHECK(near(weak_value({RegionProjector::full_line(), ObservableKind::presence}, psi, phi).value, 1.0, 1e-12));
    }
}

TEST_CASE("linear combinations are linear") {
    const auto psi = compose_psi(kP1), phi = compose_phi(kP1);
    const WeightedObservable combo[] = {{2.0, {kRegionH, ObservableKind::momentum}},
                                        {cplx{0, 1}, {kRegionG, ObservableKind::presence}}};
    CHECK(near(weak_value(combo, psi, phi).value, cplx{4.0, 1.0}, 1e-12));
}

TEST_CASE("symmetrized energy differs from the sandwich only by boundary terms") {
    const auto psi = compose_psi(kP1), phi = compose_phi(kP1);
    const auto sym = local_energy(kRegionH, psi, phi, {}, std::nullopt, EnergyForm::symmetrized);
    const auto grid_sym = weak_value_grid({kRegionH, ObservableKind::kinetic_energy, EnergyForm::symmetrized}, psi, phi);
    CHECK(near_rel(grid_sym.value, sym.value, 1e-8));
}

TEST_CASE("grid route on packet regions reproduces the analytic route") {
    const auto psi = compose_psi(kP1), phi = compose_phi(kP1);
    for (auto kind : {ObservableKind::presence, ObservableKind::momentum, ObservableKind::kinetic_energy}) {
        const auto a = weak_value({kRegionH, kind}, psi, phi);
        const auto g = weak_value_grid({kRegionH, kind}, psi, phi);
        CHECK(near_rel(g.value, a.value, 1e-8));
    }
}

TEST_CASE("orthogonal selections are refused") {
    const SuperposedState orth({{Label::none, 1.0, make_f(kP1, +1)}, {Label::none, -1.0, make_f(kP1, -1)}});
    const SuperposedState pre({{Label::none, 1.0, make_f(kP1, +1)}, {Label::none, 1.0, make_f(kP1, -1)}});
    CHECK_THROWS_AS(weak_value({RegionProjector::packets({0, 1}), ObservableKind::presence}, pre, orth), NearOrthogonalSelection);
}
