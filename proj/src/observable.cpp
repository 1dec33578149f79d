#include "wvlab/observable.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "wvlab/errors.hpp"

namespace wvlab {

RegionProjector RegionProjector::intervals(std::vector<Interval> list) {
    if (list.empty()) throw InvalidArgument("interval region needs at least one interval");
    for (std::size_t i = 0; i < list.size(); ++i) {
        const auto [lo, hi] = list[i];
        if (std::isnan(lo) || std::isnan(hi) || !(lo < hi))
            throw InvalidArgument("interval bounds must satisfy lo < hi");
        if (i > 0 && !(list[i - 1].second <= lo))
            throw InvalidArgument("intervals must be disjoint and ordered");
    }
    RegionProjector r;
    r.mode_ = Mode::interval;
    r.intervals_ = std::move(list);
    return r;
}

RegionProjector RegionProjector::full_line() {
    constexpr double inf = std::numeric_limits<double>::infinity();
    return intervals({{-inf, inf}});
}

RegionProjector RegionProjector::packets(std::vector<std::size_t> kept) {
    if (kept.empty()) throw InvalidArgument("packet-isolating region must keep at least one term");
    std::sort(kept.begin(), kept.end());
    if (std::adjacent_find(kept.begin(), kept.end()) != kept.end())
        throw InvalidArgument("kept term indices must be distinct");
    RegionProjector r;
    r.mode_ = Mode::packet_isolating;
    r.kept_ = std::move(kept);
    return r;
}

// Half-open [lo, hi) so that complementary intervals partition the axis.
bool RegionProjector::contains(double x) const {
    for (const auto& [lo, hi] : intervals_)
        if (x >= lo && x < hi) return true;
    return false;
}

bool RegionProjector::keeps(std::size_t i) const {
    return std::binary_search(kept_.begin(), kept_.end(), i);
}

bool RegionProjector::is_full_line() const {
    return mode_ == Mode::interval && intervals_.size() == 1 && std::isinf(intervals_[0].first) &&
           std::isinf(intervals_[0].second);
}

std::string RegionProjector::describe() const {
    std::ostringstream os;
    if (mode_ == Mode::interval) {
        for (std::size_t i = 0; i < intervals_.size(); ++i)
            os << (i ? "u" : "") << "[" << intervals_[i].first << "," << intervals_[i].second << ")";
    } else {
        os << "terms{";
        for (std::size_t i = 0; i < kept_.size(); ++i) os << (i ? "," : "") << kept_[i];
        os << "}";
    }
    return os.str();
}

std::string_view kind_name(ObservableKind kind) {
    switch (kind) {
        case ObservableKind::presence: return "presence";
        case ObservableKind::momentum: return "momentum";
        case ObservableKind::kinetic_energy: return "energy";
    }
    return "presence";
}

WeakValueReport make_report(cplx numerator, cplx denominator, double scale, Method method) {
    if (!(std::abs(denominator) > kDenominatorFloor * scale)) {
        std::ostringstream os;
        os << "|<post|pre>| = " << std::abs(denominator) << " is below the floor " << kDenominatorFloor * scale;
        throw NearOrthogonalSelection(os.str());
    }
    return {numerator / denominator, numerator, denominator, method};
}

}  // namespace wvlab
