#pragma once

#include <cstddef>
#include <limits>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "wvlab/packet.hpp"
#include "wvlab/state.hpp"

namespace wvlab {

enum class ElementKind { mirror, beam_splitter, source, detector };

std::string_view element_kind_name(ElementKind kind);
ElementKind parse_element_kind(std::string_view name);

/// Two-port splitter in its rest frame, parameterized as
///   U = [[t_L, r_R], [r_L, t_R]],  t_L = sqrt(1-R) e^{i alpha},  r_R = sqrt(R) e^{i beta},
///   r_L = -e^{i delta} conj(r_R),   t_R = e^{i delta} conj(t_L).
/// "L" is a packet arriving from the left (moving right relative to the element),
/// "R" one arriving from the right. Defaults give the symmetric i-convention.
///
/// In one dimension the transmitted and reflected packets are not orthogonal
/// once they recombine (their overlap is exp(-dk_rel^2 / 8 dk^2)). When
/// `interference_phase` is set, both outputs are rescaled so the pair carries
/// the incident intensity assuming they recombine with that relative phase.
struct SplitterParams {
    double reflectivity = 0.5;
    double alpha = 0.0;
    double beta = 1.5707963267948966;
    double delta = 0.0;
    std::optional<double> interference_phase;

    cplx transmit_left() const;
    cplx reflect_right() const;
    cplx reflect_left() const;
    cplx transmit_right() const;
    void validate() const;

    bool operator==(const SplitterParams&) const = default;
};

/// Straight worldline x(t) = x_ref + velocity (t - t_ref), active on [t_on, t_off].
/// For sources and detectors `velocity` is the emitted / detected packet velocity
/// and (x_ref, t_ref) is the emission / detection event.
struct Element {
    std::string id;
    ElementKind kind = ElementKind::mirror;
    double x_ref = 0.0;
    double t_ref = 0.0;
    double velocity = 0.0;
    double t_on = -std::numeric_limits<double>::infinity();
    double t_off = std::numeric_limits<double>::infinity();
    SplitterParams splitter;

    double position(double t) const { return x_ref + velocity * (t - t_ref); }
    bool active(double t) const { return t >= t_on && t <= t_off; }
    void validate() const;

    bool operator==(const Element&) const = default;
};

/// Where the composed states are compared: the focus time (all packets have
/// minimal width there) and the centers of regions g and h at that time.
struct SelectionGeometry {
    double focus_time = 0.0;
    double x_g = 0.0;
    double x_h = 0.0;

    bool operator==(const SelectionGeometry&) const = default;
};

struct Scenario {
    std::vector<Element> elements;
    PhysicalConstants consts;
    PacketRecipe recipe;
    SelectionGeometry geometry;
    double t_start = 0.0;
    double t_end = 0.0;
    double branch_amplitude_floor = 1e-12;
    std::size_t max_events = 4096;

    void validate() const;
    std::size_t source_index() const;
    std::vector<std::size_t> detector_indices() const;
    std::size_t find(std::string_view id) const;

    bool operator==(const Scenario&) const = default;
};

/// Returns (v_reflected, v_transmitted) = (2u - v_in, v_in). Throws NoCrossing when v_in == u.
std::pair<double, double> element_velocity_map(double u, double v_in);

enum class Action { emit, reflect, transmit, detect };
std::string_view action_name(Action action);

struct HistoryEvent {
    std::size_t element;
    double x;
    double t;
    Action action;

    bool operator==(const HistoryEvent&) const = default;
};

struct Branch {
    ComplexGaussian packet;  // at `time`
    cplx amplitude;
    double time;
    std::vector<HistoryEvent> history;

    double center() const { return packet.mean_position(); }
};

/// Free flight of one branch between two events. Valid for t in (t_a, t_b];
/// `packet` is referenced at `t_packet` (t_a forward, t_b backward).
struct Segment {
    ComplexGaussian packet;
    cplx amplitude;
    double t_packet;
    double t_a;
    double t_b;
    double velocity;
    std::vector<HistoryEvent> history;

    bool covers(double t) const { return t > t_a && t <= t_b; }
    cplx value(double x, double t, const PhysicalConstants& consts) const;
};

struct StageNorm {
    double time;
    double coherent;    // ||sum_b a_b chi_b||^2
    double incoherent;  // sum_b |a_b|^2 ||chi_b||^2
};

struct Trace {
    std::vector<Branch> branches;  // at the stop time, order-normalized
    std::vector<Segment> segments;
    std::vector<StageNorm> stages;
    std::size_t events = 0;
};

enum class Direction { forward, backward };

/// Source packet at its emission event (minimal width at the focus time).
Branch source_branch(const Scenario& s);
/// Detector packet at its detection event (minimal width at the focus time).
Branch detector_branch(const Scenario& s, std::size_t detector);

/// Event-driven tracing of arbitrary branches. Forward handles events with
/// t_e < until, backward handles events with t_e >= until.
Trace trace(const Scenario& s, std::vector<Branch> initial, Direction direction, double until);

/// From the source to `until` (defaults to t_end).
Trace forward_propagate(const Scenario& s, std::optional<double> until = std::nullopt);
/// From a detector back to `until` (defaults to t_start).
Trace backward_propagate(const Scenario& s, std::size_t detector, std::optional<double> until = std::nullopt);

/// Coherent superposition sum_b a_b chi_b (all branches brought to `t`).
SuperposedState branches_as_state(const std::vector<Branch>& branches, double t, const PhysicalConstants& consts);

/// Target packets g, f+, f- at the focus time, placed at the scenario's region centers.
std::vector<ComplexGaussian> target_packets(const Scenario& s);
SuperposedState target_psi(const Scenario& s);
SuperposedState target_phi(const Scenario& s);

double fidelity(const SuperposedState& target, const SuperposedState& state);

struct TuningReport {
    double first_reflected_fraction;
    double final_transmitted_fraction;
    std::vector<double> reflectivities;  // splitters in chronological order
    double forward_fidelity;
    double backward_fidelity;
};

/// Splitters sorted by reference time. TopologyMismatch unless there are four.
std::vector<std::size_t> splitter_order(const Scenario& s);

/// Sets the four splitters to the intensity fractions that compose psi and phi
/// at the focus time, then solves the phase parameters against traced branches.
Scenario tune_splitters(const Scenario& s, TuningReport* report = nullptr);

struct SelectionStates {
    SuperposedState pre;
    SuperposedState post;
    double forward_fidelity;
    double backward_fidelity;
    cplx overlap;                  // <post|pre>
    double detection_probability;  // |<post|pre>|^2 with unit-norm detector packet
    double expected_probability;   // |<phi|psi>|^2 of the target states
};

SelectionStates selection_states(const Scenario& s, std::size_t detector);

struct TraceCell {
    double t;
    double x;
    double forward;   // |psi(x,t)|^2
    double backward;  // |phi(x,t)|^2
    double overlap;   // |conj(phi) psi|
};

std::vector<TraceCell> weak_trace_map(const Scenario& s, std::size_t detector, const std::vector<double>& times,
                                      const std::vector<double>& xs);

/// Named events of the generated nested-interferometer layout.
struct NestedLayout {
    struct Point {
        double x, t;
    };
    double v_plus, v_minus, v0, u_out;
    Point source, bs1, bs2, ma, mb, bs3, mo, mg, bs4, d1, d2;
};

struct NestedTiming {
    double inner = 20.0;   // BS2 -> inner mirrors -> BS3 halves
    double first = 30.0;   // BS1 -> BS2
    double approach = 30.0;  // source -> BS1
    double outer = 20.0;   // BS3 -> Mo
    double detect = 20.0;  // BS4 -> detectors
    double span = 40.0;    // margin before the source and after the detectors
};

/// Untuned nested-interferometer scenario, focus time 0 with region h at x = 0.
/// Splitters are left at 50/50; run tune_splitters before use.
Scenario nested_scenario(const PacketRecipe& recipe, const PhysicalConstants& consts = {}, NestedTiming timing = {},
                       NestedLayout* layout = nullptr);
/// Removes BS2, Ma, Mb and BS3 from a nested scenario (elements with ids bs2, ma, mb, bs3).
Scenario without_inner_interferometer(const Scenario& s);

}  // namespace wvlab
