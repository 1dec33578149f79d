#include "wvlab/interferometer.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <set>

#include "wvlab/errors.hpp"

namespace wvlab {

namespace {

constexpr double kParallelTolerance = 1e-12;

bool finite(double v) { return std::isfinite(v); }

}  // namespace

std::string_view element_kind_name(ElementKind kind) {
    switch (kind) {
        case ElementKind::mirror: return "mirror";
        case ElementKind::beam_splitter: return "beam_splitter";
        case ElementKind::source: return "source";
        case ElementKind::detector: return "detector";
    }
    return "?";
}

ElementKind parse_element_kind(std::string_view name) {
    for (auto k : {ElementKind::mirror, ElementKind::beam_splitter, ElementKind::source, ElementKind::detector})
        if (element_kind_name(k) == name) return k;
    throw InvalidArgument("unknown element kind '" + std::string(name) + "'");
}

std::string_view action_name(Action action) {
    switch (action) {
        case Action::emit: return "emit";
        case Action::reflect: return "reflect";
        case Action::transmit: return "transmit";
        case Action::detect: return "detect";
    }
    return "?";
}

cplx SplitterParams::transmit_left() const { return std::polar(std::sqrt(1.0 - reflectivity), alpha); }
cplx SplitterParams::reflect_right() const { return std::polar(std::sqrt(reflectivity), beta); }
cplx SplitterParams::reflect_left() const { return -std::polar(1.0, delta) * std::conj(reflect_right()); }
cplx SplitterParams::transmit_right() const { return std::polar(1.0, delta) * std::conj(transmit_left()); }

void SplitterParams::validate() const {
    if (!(reflectivity >= 0.0 && reflectivity <= 1.0))
        throw InvalidArgument("splitter reflectivity must lie in [0, 1]");
    if (!finite(alpha) || !finite(beta) || !finite(delta) || (interference_phase && !finite(*interference_phase)))
        throw InvalidArgument("splitter phases must be finite");
}

void Element::validate() const {
    if (id.empty()) throw InvalidArgument("element without id");
    if (!finite(x_ref) || !finite(t_ref) || !finite(velocity))
        throw InvalidArgument("element '" + id + "' has a non-finite worldline");
    if (std::isnan(t_on) || std::isnan(t_off) || t_on > t_off)
        throw InvalidArgument("element '" + id + "' has an empty activity window");
    if (kind == ElementKind::beam_splitter) splitter.validate();
}

void Scenario::validate() const {
    consts.validate();
    recipe.validate();
    if (!finite(t_start) || !finite(t_end) || t_start >= t_end) throw InvalidArgument("scenario needs t_start < t_end");
    if (!(branch_amplitude_floor >= 0.0)) throw InvalidArgument("branch amplitude floor must be non-negative");
    if (max_events == 0) throw InvalidArgument("max_events must be positive");
    if (!finite(geometry.focus_time) || !finite(geometry.x_g) || !finite(geometry.x_h))
        throw InvalidArgument("selection geometry must be finite");
    std::set<std::string> ids;
    std::size_t sources = 0, detectors = 0;
    for (const auto& e : elements) {
        e.validate();
        if (!ids.insert(e.id).second) throw InvalidArgument("duplicate element id '" + e.id + "'");
        sources += e.kind == ElementKind::source;
        detectors += e.kind == ElementKind::detector;
    }
    if (sources != 1) throw InvalidArgument("scenario needs exactly one source, found " + std::to_string(sources));
    if (detectors == 0) throw InvalidArgument("scenario needs at least one detector");
    const auto& src = elements[source_index()];
    if (src.t_ref < t_start) throw InvalidArgument("source emits before t_start");
}

std::size_t Scenario::source_index() const {
    for (std::size_t i = 0; i < elements.size(); ++i)
        if (elements[i].kind == ElementKind::source) return i;
    throw InvalidArgument("scenario has no source");
}

std::vector<std::size_t> Scenario::detector_indices() const {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < elements.size(); ++i)
        if (elements[i].kind == ElementKind::detector) out.push_back(i);
    return out;
}

std::size_t Scenario::find(std::string_view id) const {
    for (std::size_t i = 0; i < elements.size(); ++i)
        if (elements[i].id == id) return i;
    throw InvalidArgument("no element with id '" + std::string(id) + "'");
}

std::pair<double, double> element_velocity_map(double u, double v_in) {
    if (std::abs(v_in - u) <= kParallelTolerance * std::max({1.0, std::abs(u), std::abs(v_in)}))
        throw NoCrossing("packet velocity equals element velocity; it never crosses the element");
    return {2.0 * u - v_in, v_in};
}

cplx Segment::value(double x, double t, const PhysicalConstants& consts) const {
    return amplitude * free_evolve(packet, t - t_packet, consts)(x);
}

namespace {

Branch endpoint_branch(const Scenario& s, std::size_t index, Action action) {
    const auto& e = s.elements.at(index);
    const double k = s.consts.mass * e.velocity / s.consts.hbar;
    const double T = s.geometry.focus_time;
    const auto focused = gaussian_packet(e.position(T), k, s.recipe.dk_f);
    return {free_evolve(focused, e.t_ref - T, s.consts), cplx{1.0, 0.0}, e.t_ref, {{index, e.x_ref, e.t_ref, action}}};
}

}  // namespace

Branch source_branch(const Scenario& s) {
    s.validate();
    return endpoint_branch(s, s.source_index(), Action::emit);
}

Branch detector_branch(const Scenario& s, std::size_t detector) {
    s.validate();
    if (detector >= s.elements.size() || s.elements[detector].kind != ElementKind::detector)
        throw InvalidArgument("element " + std::to_string(detector) + " is not a detector");
    return endpoint_branch(s, detector, Action::detect);
}

}  // namespace wvlab
