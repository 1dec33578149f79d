#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "wvlab/packet.hpp"

namespace wvlab {

/// Relative floor on |<post|pre>| below which weak values are refused.
inline constexpr double kDenominatorFloor = 1e-10;

/// Spatial region. Interval mode is an honest sharp mask on the x axis.
/// Packet-isolating mode is the idealized projector that keeps a chosen set
/// of terms of the pre- and post-selected states (both states must share the
/// same term layout, e.g. g, f+, f-).
class RegionProjector {
public:
    enum class Mode { interval, packet_isolating };
    using Interval = std::pair<double, double>;

    static RegionProjector intervals(std::vector<Interval> intervals);
    static RegionProjector interval(double lo, double hi) { return intervals({{lo, hi}}); }
    static RegionProjector full_line();
    static RegionProjector packets(std::vector<std::size_t> kept_terms);

    Mode mode() const noexcept { return mode_; }
    const std::vector<Interval>& interval_list() const noexcept { return intervals_; }
    const std::vector<std::size_t>& kept_terms() const noexcept { return kept_; }

    bool contains(double x) const;
    bool keeps(std::size_t term_index) const;
    bool is_full_line() const;

    std::string describe() const;

private:
    RegionProjector() = default;
    Mode mode_ = Mode::interval;
    std::vector<Interval> intervals_;
    std::vector<std::size_t> kept_;
};

enum class ObservableKind { presence, momentum, kinetic_energy };

/// sandwich: Pi p^2 Pi / 2m (default). symmetrized: (Pi p^2 + p^2 Pi) / 4m.
enum class EnergyForm { sandwich, symmetrized };

struct LocalObservable {
    RegionProjector region;
    ObservableKind kind = ObservableKind::presence;
    EnergyForm energy_form = EnergyForm::sandwich;
};

std::string_view kind_name(ObservableKind kind);

enum class Method { analytic, grid };

struct WeakValueReport {
    cplx value;
    cplx numerator;
    cplx denominator;
    Method method = Method::analytic;
};

/// Throws NearOrthogonalSelection when |denominator| < floor * scale.
WeakValueReport make_report(cplx numerator, cplx denominator, double scale, Method method);

}  // namespace wvlab
