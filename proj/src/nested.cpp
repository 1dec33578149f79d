#include <algorithm>
#include <cmath>
#include <numbers>

#include "wvlab/errors.hpp"
#include "wvlab/interferometer.hpp"

namespace wvlab {

namespace {

constexpr double kMatchTolerance = 1e-6;

Element make(std::string id, ElementKind kind, NestedLayout::Point p, double u, double half_window) {
    Element e;
    e.id = std::move(id);
    e.kind = kind;
    e.x_ref = p.x;
    e.t_ref = p.t;
    e.velocity = u;
    if (kind == ElementKind::mirror || kind == ElementKind::beam_splitter) {
        e.t_on = p.t - half_window;
        e.t_off = p.t + half_window;
    }
    return e;
}

bool matches(const ComplexGaussian& p, const ComplexGaussian& q) {
    return std::abs(p.a() - q.a()) <= kMatchTolerance * std::abs(q.a()) &&
           std::abs(p.b() - q.b()) <= kMatchTolerance * (1.0 + std::abs(q.b()));
}

// Coefficient of each target packet carried by the branches (exact packet match).
std::vector<cplx> coefficients(const std::vector<Branch>& branches, const std::vector<ComplexGaussian>& targets,
                               double t, const PhysicalConstants& consts) {
    std::vector<cplx> c(targets.size());
    std::vector<bool> found(targets.size(), false);
    for (const auto& b : branches) {
        const auto p = free_evolve(b.packet, t - b.time, consts);
        for (std::size_t i = 0; i < targets.size(); ++i) {
            if (!matches(p, targets[i])) continue;
            c[i] += b.amplitude * std::exp(p.c() - targets[i].c());
            found[i] = true;
        }
    }
    for (std::size_t i = 0; i < targets.size(); ++i)
        if (!found[i])
            throw TopologyMismatch("no traced branch reaches target packet " + std::to_string(i) +
                                   " at the focus time");
    return c;
}

SuperposedState compose(const Scenario& s, double sign) {
    const auto p = target_packets(s);
    const double e = s.recipe.f_overlap();
    const double w = 1.0 / std::sqrt(3.0 + 2.0 * sign * e);
    return SuperposedState({{Label::none, w, p[0]}, {Label::none, w, p[1]}, {Label::none, sign * w, p[2]}});
}

// The post-selecting detector: "d2" when present, otherwise the first detector.
std::size_t tuning_detector(const Scenario& s) {
    for (auto i : s.detector_indices())
        if (s.elements[i].id == "d2") return i;
    return s.detector_indices().front();
}

}  // namespace

std::vector<ComplexGaussian> target_packets(const Scenario& s) {
    const auto& r = s.recipe;
    return {gaussian_packet(s.geometry.x_g, 0.0, r.dk_g), gaussian_packet(s.geometry.x_h, r.k0 + r.k1, r.dk_f),
            gaussian_packet(s.geometry.x_h, r.k0 - r.k1, r.dk_f)};
}

SuperposedState target_psi(const Scenario& s) { return compose(s, +1.0); }
SuperposedState target_phi(const Scenario& s) { return compose(s, -1.0); }

double fidelity(const SuperposedState& target, const SuperposedState& state) {
    return std::norm(overlap(target, state)) / (target.norm_squared() * state.norm_squared());
}

std::vector<std::size_t> splitter_order(const Scenario& s) {
    std::vector<std::size_t> idx;
    for (std::size_t i = 0; i < s.elements.size(); ++i)
        if (s.elements[i].kind == ElementKind::beam_splitter) idx.push_back(i);
    if (idx.size() != 4)
        throw TopologyMismatch("tuning needs the four-splitter nested layout, found " + std::to_string(idx.size()) +
                               " splitters");
    std::stable_sort(idx.begin(), idx.end(),
                     [&](std::size_t a, std::size_t b) { return s.elements[a].t_ref < s.elements[b].t_ref; });
    return idx;
}

Scenario tune_splitters(const Scenario& in, TuningReport* report) {
    in.validate();
    Scenario s = in;
    const auto order = splitter_order(s);
    const double e = s.recipe.f_overlap();
    auto& bs1 = s.elements[order[0]].splitter;
    auto& bs2 = s.elements[order[1]].splitter;
    auto& bs3 = s.elements[order[2]].splitter;
    auto& bs4 = s.elements[order[3]].splitter;
    for (auto* sp : {&bs1, &bs2, &bs3, &bs4}) *sp = SplitterParams{};
    bs1.reflectivity = 1.0 / (3.0 + 2.0 * e);
    bs2.interference_phase = 0.0;
    bs3.interference_phase = std::numbers::pi;
    bs4.reflectivity = (2.0 - 2.0 * e) / (3.0 - 2.0 * e);

    const double T = s.geometry.focus_time;
    const auto targets = target_packets(s);
    const auto phase = [](cplx z) { return std::arg(z); };

    // Forward: delta2 turns the reflected inner arm (f+), delta1 the g arm.
    auto c = coefficients(forward_propagate(s, T).branches, targets, T, s.consts);
    const double d2 = -phase(c[1] / c[2]);
    bs2.delta += d2;
    c[1] *= std::polar(1.0, d2);
    bs1.delta += -phase(c[0] / c[1]);

    // Backward: conj(r_R4) carries the h part, conj(r_R3) the f- arm.
    const auto det = tuning_detector(s);
    auto b = coefficients(backward_propagate(s, det, T).branches, targets, T, s.consts);
    const double d4 = phase(b[1] / b[0]);
    bs4.beta += d4;
    b[1] *= std::polar(1.0, -d4);
    b[2] *= std::polar(1.0, -d4);
    bs3.beta += phase(b[2] / b[1]) - std::numbers::pi;

    if (report) {
        const auto sel = selection_states(s, det);
        report->first_reflected_fraction = std::norm(bs1.reflect_left());
        report->final_transmitted_fraction = std::norm(bs4.transmit_left());
        report->reflectivities = {bs1.reflectivity, bs2.reflectivity, bs3.reflectivity, bs4.reflectivity};
        report->forward_fidelity = sel.forward_fidelity;
        report->backward_fidelity = sel.backward_fidelity;
    }
    return s;
}

SelectionStates selection_states(const Scenario& s, std::size_t detector) {
    const double T = s.geometry.focus_time;
    auto pre = branches_as_state(forward_propagate(s, T).branches, T, s.consts);
    auto post = branches_as_state(backward_propagate(s, detector, T).branches, T, s.consts);
    const cplx o = overlap(post, pre);
    const double forward_fidelity = fidelity(target_psi(s), pre);
    const double backward_fidelity = fidelity(target_phi(s), post);
    return {std::move(pre),
            std::move(post),
            forward_fidelity,
            backward_fidelity,
            o,
            std::norm(o),
            std::norm(overlap(target_phi(s), target_psi(s)))};
}

std::vector<TraceCell> weak_trace_map(const Scenario& s, std::size_t detector, const std::vector<double>& times,
                                      const std::vector<double>& xs) {
    const auto fwd = forward_propagate(s).segments;
    const auto bwd = backward_propagate(s, detector).segments;
    std::vector<TraceCell> cells;
    cells.reserve(times.size() * xs.size());
    const auto live = [&](const std::vector<Segment>& segs, double t) {
        std::vector<std::pair<cplx, ComplexGaussian>> out;
        for (const auto& g : segs)
            if (g.covers(t)) out.emplace_back(g.amplitude, free_evolve(g.packet, t - g.t_packet, s.consts));
        return out;
    };
    for (double t : times) {
        const auto f = live(fwd, t);
        const auto b = live(bwd, t);
        for (double x : xs) {
            cplx psi{}, phi{};
            for (const auto& [a, p] : f) psi += a * p(x);
            for (const auto& [a, p] : b) phi += a * p(x);
            cells.push_back({t, x, std::norm(psi), std::norm(phi), std::abs(std::conj(phi) * psi)});
        }
    }
    return cells;
}

Scenario nested_scenario(const PacketRecipe& recipe, const PhysicalConstants& consts, NestedTiming timing,
                         NestedLayout* layout_out) {
    recipe.validate();
    consts.validate();
    for (double tau : {timing.inner, timing.first, timing.approach, timing.outer, timing.detect})
        if (!(tau > 0.0)) throw InvalidArgument("layout time intervals must be positive");
    if (!(recipe.k1 > 0.0) || !(recipe.k0 > recipe.k1))
        throw InvalidArgument("the nested layout needs k0 > k1 > 0 so that v+ > v- > 0");

    NestedLayout L{};
    const double hm = consts.hbar / consts.mass;
    L.v_plus = hm * (recipe.k0 + recipe.k1);
    L.v_minus = hm * (recipe.k0 - recipe.k1);
    L.v0 = hm * recipe.k0;
    L.u_out = L.v_plus / 2.0;
    const double v1 = hm * recipe.k1;
    const double ti = timing.inner;

    L.bs3 = {0.0, 0.0};
    L.bs2 = {-2.0 * ti * L.v0, -2.0 * ti};
    L.ma = {-L.v0 * ti + v1 * ti, -ti};
    L.mb = {-L.v0 * ti - v1 * ti, -ti};
    L.bs1 = {L.bs2.x - L.v_plus * timing.first, L.bs2.t - timing.first};
    L.source = {L.bs1.x - L.v_plus * timing.approach, L.bs1.t - timing.approach};
    L.mo = {L.v_plus * timing.outer, timing.outer};
    L.mg = {L.bs1.x, timing.outer};
    L.bs4 = {L.mo.x, timing.outer + (L.mo.x - L.bs1.x) / L.v_plus};
    L.d2 = {L.bs4.x + L.v_plus * timing.detect, L.bs4.t + timing.detect};
    L.d1 = {L.bs4.x, L.bs4.t + timing.detect};

    const double w = 0.25 * std::min({timing.inner, timing.first, timing.outer});
    Scenario s;
    s.consts = consts;
    s.recipe = recipe;
    s.recipe.x0 = std::abs(L.bs3.x - L.bs1.x);
    s.geometry = {0.0, L.bs1.x, 0.0};
    s.elements = {make("source", ElementKind::source, L.source, L.v_plus, w),
                  make("bs1", ElementKind::beam_splitter, L.bs1, L.u_out, w),
                  make("bs2", ElementKind::beam_splitter, L.bs2, L.v0, w),
                  make("ma", ElementKind::mirror, L.ma, L.v0, w),
                  make("mb", ElementKind::mirror, L.mb, L.v0, w),
                  make("bs3", ElementKind::beam_splitter, L.bs3, L.v0, w),
                  make("mo", ElementKind::mirror, L.mo, L.u_out, w),
                  make("mg", ElementKind::mirror, L.mg, L.u_out, w),
                  make("bs4", ElementKind::beam_splitter, L.bs4, L.u_out, w),
                  make("d1", ElementKind::detector, L.d1, 0.0, w),
                  make("d2", ElementKind::detector, L.d2, L.v_plus, w)};
    s.t_start = L.source.t - timing.span;
    s.t_end = L.d2.t + timing.span;
    s.validate();
    if (layout_out) *layout_out = L;
    return s;
}

Scenario without_inner_interferometer(const Scenario& s) {
    Scenario out = s;
    std::erase_if(out.elements, [](const Element& e) {
        return e.id == "bs2" || e.id == "ma" || e.id == "mb" || e.id == "bs3";
    });
    return out;
}

}  // namespace wvlab
