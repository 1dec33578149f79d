#include <algorithm>
#include <cmath>
#include <optional>
#include <tuple>

#include "wvlab/errors.hpp"
#include "wvlab/interferometer.hpp"

namespace wvlab {

namespace {

constexpr double kParallelTolerance = 1e-12;
constexpr double kMergeTolerance = 1e-9;

double time_tolerance(double t) { return 1e-9 * (1.0 + std::abs(t)); }

bool same_packet(const ComplexGaussian& p, const ComplexGaussian& q) {
    return std::abs(p.a() - q.a()) <= kMergeTolerance * std::abs(p.a()) &&
           std::abs(p.b() - q.b()) <= kMergeTolerance * (1.0 + std::abs(p.b()));
}

ComplexGaussian evolve_to(const Branch& b, double t, const PhysicalConstants& consts) {
    return t == b.time ? b.packet : free_evolve(b.packet, t - b.time, consts);
}

bool interacts(const Element& e) { return e.kind == ElementKind::mirror || e.kind == ElementKind::beam_splitter; }

struct Crossing {
    double t;
    std::size_t element;
};

struct Tracer {
    const Scenario& s;
    Direction dir;
    double until;

    bool forward() const { return dir == Direction::forward; }

    bool in_range(double tc, double t0) const {
        const double eps = time_tolerance(t0);
        const double tol = time_tolerance(until);
        if (forward()) return tc > t0 + eps && tc < until - tol;
        return tc < t0 - eps && tc >= until - tol;
    }

    std::optional<Crossing> next(const Branch& b) const {
        const double v = mean_velocity(b.packet, s.consts);
        const double x0 = b.center();
        // The element that produced this branch is skipped while the branch sits on it.
        std::size_t last = s.elements.size();
        if (!b.history.empty() && std::abs(b.history.back().t - b.time) <= time_tolerance(b.time))
            last = b.history.back().element;
        std::optional<Crossing> best;
        for (std::size_t i = 0; i < s.elements.size(); ++i) {
            const auto& e = s.elements[i];
            if (i == last || !interacts(e)) continue;
            const double dv = v - e.velocity;
            if (std::abs(dv) <= kParallelTolerance * std::max({1.0, std::abs(v), std::abs(e.velocity)})) continue;
            const double tc = b.time + (e.position(b.time) - x0) / dv;
            if (!in_range(tc, b.time) || !e.active(tc)) continue;
            if (!best || (forward() ? tc < best->t : tc > best->t)) best = Crossing{tc, i};
        }
        return best;
    }

    Segment segment(const Branch& b, double t_stop) const {
        const double v = mean_velocity(b.packet, s.consts);
        if (forward()) return {b.packet, b.amplitude, b.time, b.time, t_stop, v, b.history};
        return {b.packet, b.amplitude, b.time, t_stop, b.time, v, b.history};
    }

    // Outputs of one element acting on the incident packet at the crossing time.
    std::vector<Branch> act(const Branch& b, const Crossing& c) const {
        const auto& e = s.elements[c.element];
        const auto chi = evolve_to(b, c.t, s.consts);
        const double v = mean_velocity(chi, s.consts);
        const double pivot = e.position(c.t);
        element_velocity_map(e.velocity, v);
        const auto reflected = reflect_in_moving_frame(chi, pivot, e.velocity, s.consts);
        const auto make = [&](const ComplexGaussian& p, cplx amp, Action action) {
            auto h = b.history;
            h.push_back({c.element, pivot, c.t, action});
            return Branch{p, b.amplitude * amp, c.t, std::move(h)};
        };
        if (e.kind == ElementKind::mirror) return {make(reflected, 1.0, Action::reflect)};

        const auto& sp = e.splitter;
        const bool right_moving = v > e.velocity;
        cplx transmit, reflect;
        if (forward()) {
            transmit = right_moving ? sp.transmit_left() : sp.transmit_right();
            reflect = right_moving ? sp.reflect_left() : sp.reflect_right();
        } else {
            transmit = std::conj(right_moving ? sp.transmit_left() : sp.transmit_right());
            reflect = std::conj(right_moving ? sp.reflect_right() : sp.reflect_left());
        }
        if (sp.interference_phase) {
            const double dk_rel = 2.0 * s.consts.mass * std::abs(v - e.velocity) / s.consts.hbar;
            const double eps = std::exp(-dk_rel * dk_rel / (8.0 * chi.wavenumber_variance()));
            const double norm = std::norm(transmit) + std::norm(reflect) +
                                2.0 * std::abs(transmit) * std::abs(reflect) * eps * std::cos(*sp.interference_phase);
            const double scale = 1.0 / std::sqrt(norm);
            transmit *= scale;
            reflect *= scale;
        }
        return {make(chi, transmit, Action::transmit), make(reflected, reflect, Action::reflect)};
    }

    bool negligible(const Branch& b) const {
        return std::abs(b.amplitude) * std::sqrt(b.packet.norm_squared()) < s.branch_amplitude_floor;
    }

    void merge_into(std::vector<Branch>& out, Branch b) const {
        for (auto& o : out) {
            if (!same_packet(o.packet, b.packet)) continue;
            o.amplitude += b.amplitude * std::exp(b.packet.c() - o.packet.c());
            return;
        }
        out.push_back(std::move(b));
    }

    StageNorm stage(const std::vector<Branch>& active, double t) const {
        std::vector<std::pair<cplx, ComplexGaussian>> evolved;
        for (const auto& b : active) evolved.emplace_back(b.amplitude, evolve_to(b, t, s.consts));
        cplx coherent{};
        double incoherent = 0.0;
        for (std::size_t i = 0; i < evolved.size(); ++i) {
            incoherent += std::norm(evolved[i].first) * evolved[i].second.norm_squared();
            for (std::size_t j = 0; j < evolved.size(); ++j)
                coherent += std::conj(evolved[i].first) * evolved[j].first *
                            inner_product(evolved[i].second, evolved[j].second);
        }
        return {t, coherent.real(), incoherent};
    }
};

bool history_less(const Branch& a, const Branch& b) {
    const auto key = [](const Branch& x) {
        std::vector<std::tuple<std::size_t, int, double>> k;
        for (const auto& h : x.history) k.emplace_back(h.element, static_cast<int>(h.action), h.t);
        return k;
    };
    return key(a) < key(b);
}

}  // namespace

Trace trace(const Scenario& s, std::vector<Branch> initial, Direction direction, double until) {
    s.validate();
    Tracer tr{s, direction, until};
    Trace out;
    std::vector<Branch> active;
    for (auto& b : initial)
        if (!tr.negligible(b)) active.push_back(std::move(b));
    if (!active.empty()) out.stages.push_back(tr.stage(active, active.front().time));

    while (true) {
        std::vector<std::optional<Crossing>> next(active.size());
        std::optional<double> t_next;
        for (std::size_t i = 0; i < active.size(); ++i) {
            next[i] = tr.next(active[i]);
            if (next[i] && (!t_next || (tr.forward() ? next[i]->t < *t_next : next[i]->t > *t_next)))
                t_next = next[i]->t;
        }
        if (!t_next) break;

        const double tol = time_tolerance(*t_next);
        std::vector<Branch> spawned, kept;
        for (std::size_t i = 0; i < active.size(); ++i) {
            if (next[i] && std::abs(next[i]->t - *t_next) <= tol) {
                out.segments.push_back(tr.segment(active[i], next[i]->t));
                for (auto& b : tr.act(active[i], *next[i])) tr.merge_into(spawned, std::move(b));
                ++out.events;
            } else {
                kept.push_back(std::move(active[i]));
            }
        }
        if (out.events > s.max_events)
            throw UnboundedBranch("more than " + std::to_string(s.max_events) +
                                  " element events; a branch appears trapped in the apparatus");
        for (auto& b : spawned)
            if (!tr.negligible(b)) kept.push_back(std::move(b));
        active = std::move(kept);
        out.stages.push_back(tr.stage(active, *t_next));
    }

    for (auto& b : active) {
        out.segments.push_back(tr.segment(b, until));
        b.packet = evolve_to(b, until, s.consts);
        b.time = until;
    }
    std::sort(active.begin(), active.end(), history_less);
    out.branches = std::move(active);
    if (!out.branches.empty()) out.stages.push_back(tr.stage(out.branches, until));
    return out;
}

Trace forward_propagate(const Scenario& s, std::optional<double> until) {
    return trace(s, {source_branch(s)}, Direction::forward, until.value_or(s.t_end));
}

Trace backward_propagate(const Scenario& s, std::size_t detector, std::optional<double> until) {
    return trace(s, {detector_branch(s, detector)}, Direction::backward, until.value_or(s.t_start));
}

SuperposedState branches_as_state(const std::vector<Branch>& branches, double t, const PhysicalConstants& consts) {
    std::vector<Term> terms;
    for (const auto& b : branches) terms.push_back({Label::none, b.amplitude, evolve_to(b, t, consts)});
    if (terms.empty()) throw InvalidArgument("no branches survive at t = " + std::to_string(t));
    return SuperposedState(std::move(terms));
}

}  // namespace wvlab
