// Acceptance suite: one PASS/FAIL line per criterion.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <random>
#include <sstream>
#include <string>

#include "oracle.hpp"
#include "wvlab/grid.hpp"
#include "wvlab/interferometer.hpp"
#include "wvlab/pointer.hpp"
#include "wvlab/weak_value.hpp"

using namespace wvlab;

namespace {

const PacketRecipe kP1{5.0, 1.0, 0.1, 0.1, 100.0};
const PacketRecipe kOverlap{5.0, 1.0, 0.5, 0.5, 100.0};

struct Outcome {
    bool ok;
    std::string detail;
};

int failures = 0;

void report(int id, const std::string& title, const std::function<Outcome()>& body) {
    const auto start = std::chrono::steady_clock::now();
    Outcome out;
    try {
        out = body();
    } catch (const std::exception& e) {
        out = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (!out.ok) ++failures;
    std::printf("%s [%d] %s: %s (%.2f s)\n", out.ok ? "PASS" : "FAIL", id, title.c_str(), out.detail.c_str(), secs);
    std::fflush(stdout);
}

std::string sci(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2e", v);
    return buf;
}

Outcome headline() {
    const auto start = std::chrono::steady_clock::now();
    const auto psi = compose_psi(kP1), phi = compose_phi(kP1);
    const auto g = RegionProjector::packets({kTermG});
    const auto h = RegionProjector::packets({kTermFPlus, kTermFMinus});
    const auto ig = RegionProjector::interval(0.5 * kP1.x0, 1.5 * kP1.x0);
    const auto ih = RegionProjector::interval(-0.5 * kP1.x0, 0.5 * kP1.x0);
    const GridSpec grid = default_grid();
    struct Row {
        ObservableKind kind;
        const RegionProjector *exact, *sampled;
        double expected;
    };
    const Row rows[] = {{ObservableKind::presence, &g, &ig, 1.0},     {ObservableKind::presence, &h, &ih, 0.0},
                        {ObservableKind::momentum, &h, &ih, 2.0},     {ObservableKind::momentum, &g, &ig, 0.0},
                        {ObservableKind::kinetic_energy, &h, &ih, 10.0}, {ObservableKind::kinetic_energy, &g, &ig, 0.005}};
    double analytic_err = 0.0, grid_err = 0.0;
    for (const auto& r : rows) {
        const auto a = weak_value({*r.exact, r.kind}, psi, phi);
        const auto n = weak_value({*r.sampled, r.kind}, psi, phi, {}, grid);
        if (a.method != Method::analytic || n.method != Method::grid) return {false, "wrong evaluation route"};
        analytic_err = std::max(analytic_err, std::abs(a.value - r.expected));
        grid_err = std::max(grid_err, std::abs(n.value - r.expected) / std::max(1.0, std::abs(r.expected)));
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    const bool ok = analytic_err <= 1e-12 && grid_err <= 1e-6 && secs < 10.0;
    return {ok, "analytic max err " + sci(analytic_err) + ", grid max rel err " + sci(grid_err)};
}

Outcome f_overlap() {
    std::mt19937_64 rng(20240611);
    double analytic_err = 0.0, grid_err = 0.0, quad_err = 0.0, h_err = 0.0;
    const int recipes = 60;
    for (int i = 0; i < recipes; ++i) {
        const auto s = oracle::random_recipe(rng);
        const PacketRecipe r{s.k0, s.k1, s.dk_f, s.dk_g, s.x0};
        const double expected = std::exp(-r.k1 * r.k1 / (2.0 * r.dk_f * r.dk_f));
        const auto fp = make_f(r, +1), fm = make_f(r, -1);
        analytic_err = std::max(analytic_err, std::abs(inner_product(fp, fm) - expected));

        const SuperposedState plus({{Label::none, 1.0, fp}}), minus({{Label::none, 1.0, fm}});
        const SuperposedState* states[] = {&plus, &minus};
        const auto spec = auto_grid(states);
        grid_err = std::max(grid_err, std::abs(grid_inner_product(sample(fp, spec), sample(fm, spec)) - expected));

        // Independent quadrature of the textbook packets.
        const auto qp = oracle::f_packet(r.k0, r.k1, r.dk_f, +1), qm = oracle::f_packet(r.k0, r.k1, r.dk_f, -1);
        const double half = 12.0 / r.dk_f;
        const cplx q = oracle::simpson([&](double x) { return std::conj(qp(x)) * qm(x); }, -half, half, 40001);
        quad_err = std::max(quad_err, std::abs(q - expected));

        const SuperposedState hp({{Label::none, 1.0, fp}, {Label::none, 1.0, fm}});
        const SuperposedState hm({{Label::none, 1.0, fp}, {Label::none, -1.0, fm}});
        h_err = std::max(h_err, std::abs(overlap(hp, hm)));
    }
    const bool ok = analytic_err <= 1e-12 && grid_err <= 1e-8 && quad_err <= 1e-8 && h_err <= 1e-12;
    return {ok, std::to_string(recipes) + " recipes: analytic " + sci(analytic_err) + ", grid " + sci(grid_err) +
                    ", quadrature " + sci(quad_err) + ", <h+|h-> " + sci(h_err)};
}

Outcome tuning() {
    TuningReport rep{};
    tune_splitters(nested_scenario(kOverlap), &rep);
    const double e = std::exp(-2.0);
    const double r1 = std::abs(rep.first_reflected_fraction - 1.0 / (3.0 + 2.0 * e));
    const double t4 = std::abs(rep.final_transmitted_fraction - 1.0 / (3.0 - 2.0 * e));
    const double fid = std::min(rep.forward_fidelity, rep.backward_fidelity);
    std::ostringstream o;
    o.precision(15);
    o << "R1 = " << rep.first_reflected_fraction << ", T4 = " << rep.final_transmitted_fraction << " (errors "
      << sci(r1) << ", " << sci(t4) << "), min fidelity 1 - " << sci(1.0 - fid);
    return {r1 <= 1e-12 && t4 <= 1e-12 && fid >= 1.0 - 1e-6, o.str()};
}

Outcome packet_table() {
    double err = 0.0, sum_err = 0.0;
    const auto check = [&](const PacketRecipe& r, bool labeled) {
        const auto psi = compose_psi(r, labeled), phi = compose_phi(r, labeled);
        const auto t = packet_projector_weak_values(psi, phi);
        const double p0 = r.k0, p1 = r.k1, dp = r.dk_f;  // hbar = m = 1
        const double want[2][3] = {{1.0, p0 + p1, ((p0 + p1) * (p0 + p1) + dp * dp) / 2.0},
                                   {-1.0, -(p0 - p1), -((p0 - p1) * (p0 - p1) + dp * dp) / 2.0}};
        const PacketWeakValues* got[] = {&t.f_plus(), &t.f_minus()};
        for (int i = 0; i < 2; ++i) {
            err = std::max(err, std::abs(got[i]->presence - want[i][0]));
            err = std::max(err, std::abs(got[i]->momentum - want[i][1]));
            err = std::max(err, std::abs(got[i]->energy - want[i][2]));
        }
        const auto cp = counterparticle_decomposition(psi, phi);
        sum_err = std::max(sum_err, std::abs(cp.momentum_sum - 2.0 * p1));
        sum_err = std::max(sum_err, std::abs(cp.energy_sum - 2.0 * p0 * p1));
        sum_err = std::max(sum_err, std::abs(cp.momentum_sum - cp.region_h_momentum));
        sum_err = std::max(sum_err, std::abs(cp.energy_sum - cp.region_h_energy));
    };
    check(kP1, false);
    check(kP1, true);
    check(PacketRecipe{5.0, 1.0, 0.5, 0.1, 100.0}, true);
    return {err <= 1e-8 && sum_err <= 1e-8,
            "orthogonal and labeled: table err " + sci(err) + ", counterparticle sums err " + sci(sum_err)};
}

struct Worldline {
    NestedLayout::Point a, b;
    bool covers(double t) const { return t >= a.t && t <= b.t; }
    double x(double t) const { return a.x + (b.x - a.x) * (t - a.t) / (b.t - a.t); }
};

// Packets have finite width, so lines meeting at an element overlap for a while
// around the event. A vertex neighbourhood lasts until lines separating at the
// slowest relative speed 2 hbar k1 / m are two margins apart.
Outcome trace_geometry() {
    NestedLayout L{};
    const auto s = tune_splitters(nested_scenario(kP1, {}, {}, &L));
    const auto bare = without_inner_interferometer(s);
    const double sigma0 = 1.0 / (2.0 * kP1.dk_f);
    const auto margin = [&](double t) {
        const double tau = t / (2.0 * sigma0 * sigma0);
        return 10.0 * sigma0 * std::sqrt(1.0 + tau * tau);
    };
    const double dv_min = 2.0 * kP1.k1;
    const std::vector<Worldline> shared{{L.source, L.bs1}, {L.bs4, L.d2}};
    const std::vector<Worldline> g_line{{L.bs1, L.mg}, {L.mg, L.bs4}};
    const std::vector<Worldline> inner{{L.bs2, L.ma}, {L.ma, L.bs3}, {L.bs2, L.mb}, {L.mb, L.bs3}};
    const std::vector<NestedLayout::Point> all_events{L.source, L.bs1, L.bs2, L.ma, L.mb, L.bs3,
                                                      L.mo,     L.mg,  L.bs4, L.d1, L.d2};
    const std::vector<NestedLayout::Point> bare_events{L.source, L.bs1, L.mo, L.mg, L.bs4, L.d1, L.d2};

    std::vector<double> times, xs;
    for (double t = L.source.t + 0.5; t < L.d2.t; t += 1.5) times.push_back(t);
    for (double x = L.source.x - 300.0; x <= L.d2.x + 300.0; x += 1.25) xs.push_back(x);

    const auto sweep = [&](const Scenario& sc, std::vector<Worldline> allowed,
                           const std::vector<NestedLayout::Point>& events, double& leak, std::size_t& cells) {
        allowed.insert(allowed.end(), shared.begin(), shared.end());
        allowed.insert(allowed.end(), g_line.begin(), g_line.end());
        for (const auto& c : weak_trace_map(sc, sc.find("d2"), times, xs)) {
            const double m = margin(c.t);
            bool near = false;
            for (const auto& w : allowed) near |= w.covers(c.t) && std::abs(c.x - w.x(c.t)) <= m;
            for (const auto& v : events) {
                const double dt = std::abs(c.t - v.t);
                near |= dt <= 2.0 * m / dv_min && std::abs(c.x - v.x) <= L.v_plus * dt + m;
            }
            if (near) continue;
            ++cells;
            leak = std::max(leak, c.overlap);
        }
    };
    double leak = 0.0, bare_leak = 0.0;
    std::size_t cells = 0, bare_cells = 0;
    sweep(s, inner, all_events, leak, cells);
    sweep(bare, {}, bare_events, bare_leak, bare_cells);

    // Every thick worldline carries a trace at its midpoint.
    double weakest = std::numeric_limits<double>::infinity();
    std::vector<Worldline> thick = inner;
    thick.insert(thick.end(), shared.begin(), shared.end());
    thick.insert(thick.end(), g_line.begin(), g_line.end());
    for (const auto& w : thick) {
        const double t = 0.5 * (w.a.t + w.b.t);
        weakest = std::min(weakest, weak_trace_map(s, s.find("d2"), {t}, {w.x(t)}).front().overlap);
    }
    double bare_g = std::numeric_limits<double>::infinity();
    for (const auto& w : g_line) {
        const double t = 0.5 * (w.a.t + w.b.t);
        bare_g = std::min(bare_g, weak_trace_map(bare, bare.find("d2"), {t}, {w.x(t)}).front().overlap);
    }
    const bool ok = leak < 1e-10 && bare_leak < 1e-10 && weakest > 1e-6 && bare_g > 1e-6 && cells > 10000 &&
                    bare_cells > 10000;
    return {ok, "max overlap off the trace " + sci(leak) + " over " + std::to_string(cells) +
                    " cells, without inner interferometer " + sci(bare_leak) + " over " + std::to_string(bare_cells) +
                    "; weakest on-trace overlap " + sci(std::min(weakest, bare_g))};
}

Outcome pointer_convergence() {
    const double wvs[] = {0.0, 0.5, 1.0, -1.0, 2.0};
    const PointerConfig cfg{100.0, 1.0};
    const std::uint64_t n = 1000000;
    const double tol = 3.0 * cfg.width / (cfg.deflection * std::sqrt(static_cast<double>(n)));
    std::ostringstream o;
    bool ok = true;
    o << "within " << tol << ":";
    for (double w : wvs) {
        const auto sel = selection_for_weak_value(w);
        int hits = 0;
        for (std::uint64_t seed = 1; seed <= 100; ++seed)
            hits += std::abs(sample_ensemble(sel, cfg, n, seed).estimated_weak_value - w) <= tol;
        ok &= hits >= 90;
        o << " " << w << "->" << hits << "/100";
    }
    // Order-2 closure of the exact mean onto the weak value.
    o << "; error ratios per halving:";
    for (double w : wvs) {
        const auto err = weak_limit_discrepancy(selection_for_weak_value(w), 1.0, {0.2, 0.1, 0.05});
        if (err[0] < 1e-14) {
            o << " " << w << " exact";
            continue;
        }
        for (std::size_t i = 1; i < err.size(); ++i) {
            const double ratio = err[i - 1] / err[i];
            ok &= std::abs(ratio - 4.0) <= 0.8;
            o << " " << w << ":" << std::round(ratio * 1000.0) / 1000.0;
        }
    }
    return {ok, o.str()};
}

Outcome conservation() {
    double stage_err = 0.0;
    const auto s = tune_splitters(nested_scenario(kP1));
    const auto f = forward_propagate(s);
    for (const auto& st : f.stages)
        stage_err = std::max({stage_err, std::abs(st.coherent - 1.0), std::abs(st.incoherent - 1.0)});

    double unitary_err = 0.0;
    const auto psi = compose_psi(kP1);
    for (const auto& [label, w] : sample(psi, default_grid()))
        for (double t : {5.0, 20.0, -15.0})
            unitary_err = std::max(unitary_err, std::abs(evolve_free(w, t).norm_squared() - w.norm_squared()));

    double detect_err = 0.0;
    for (const auto& sc : {s, tune_splitters(nested_scenario(kOverlap))}) {
        const auto sel = selection_states(sc, sc.find("d2"));
        detect_err = std::max(detect_err, std::abs(sel.detection_probability - sel.expected_probability));
    }
    const bool ok = stage_err <= 1e-10 && unitary_err <= 1e-12 && detect_err <= 1e-6 && f.stages.size() > 5;
    return {ok, std::to_string(f.stages.size()) + " stages: norm err " + sci(stage_err) + ", grid unitarity err " +
                    sci(unitary_err) + ", P(D2) vs |<phi|psi>|^2 err " + sci(detect_err)};
}

}  // namespace

int main() {
    report(1, "headline weak values at P1", headline);
    report(2, "<f+|f-> overlap and <h+|h-> orthogonality", f_overlap);
    report(3, "splitter tuning in the overlapping regime", tuning);
    report(4, "packet weak values and counterparticle sums", packet_table);
    report(5, "weak-trace geometry", trace_geometry);
    report(6, "pointer ensemble convergence", pointer_convergence);
    report(7, "conservation", conservation);
    std::printf("%d of 7 criteria failed\n", failures);
    return failures == 0 ? 0 : 1;
}
