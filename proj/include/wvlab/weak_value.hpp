#pragma once

#include <array>
#include <optional>
#include <span>

#include "wvlab/grid.hpp"
#include "wvlab/observable.hpp"
#include "wvlab/state.hpp"

namespace wvlab {

/// Weak value <post| A |pre> / <post|pre>.
///
/// Packet-isolating regions and the full line are evaluated analytically from
/// closed-form Gaussian moments. Interval regions go through the grid oracle,
/// on `grid` if given or on an automatically sized grid otherwise.
WeakValueReport weak_value(const LocalObservable& obs, const SuperposedState& pre, const SuperposedState& post,
                           const PhysicalConstants& consts = {}, std::optional<GridSpec> grid = std::nullopt);

/// Forces the grid route. Packet-isolating regions sample only the kept terms.
WeakValueReport weak_value_grid(const LocalObservable& obs, const SuperposedState& pre, const SuperposedState& post,
                                const PhysicalConstants& consts = {}, std::optional<GridSpec> grid = std::nullopt);

struct WeightedObservable {
    cplx coefficient;
    LocalObservable observable;
};

/// Weak value of a linear combination sum_i c_i A_i (analytic regions only).
WeakValueReport weak_value(std::span<const WeightedObservable> combination, const SuperposedState& pre,
                           const SuperposedState& post, const PhysicalConstants& consts = {});

WeakValueReport local_momentum(const RegionProjector& region, const SuperposedState& pre, const SuperposedState& post,
                               const PhysicalConstants& consts = {}, std::optional<GridSpec> grid = std::nullopt);
WeakValueReport local_energy(const RegionProjector& region, const SuperposedState& pre, const SuperposedState& post,
                             const PhysicalConstants& consts = {}, std::optional<GridSpec> grid = std::nullopt,
                             EnergyForm form = EnergyForm::sandwich);

/// Term indices of the canonical g, f+, f- layout produced by compose_psi/compose_phi.
inline constexpr std::size_t kTermG = 0;
inline constexpr std::size_t kTermFPlus = 1;
inline constexpr std::size_t kTermFMinus = 2;

/// Threshold on |<f+|f->| above which unlabeled packet projectors are ill-defined.
inline constexpr double kPacketOverlapThreshold = 1e-6;

struct PacketWeakValues {
    cplx presence;
    cplx momentum;
    cplx energy;
};

/// Rows ordered g, f+, f-.
struct PacketProjectorTable {
    std::array<PacketWeakValues, 3> rows;
    const PacketWeakValues& g() const { return rows[kTermG]; }
    const PacketWeakValues& f_plus() const { return rows[kTermFPlus]; }
    const PacketWeakValues& f_minus() const { return rows[kTermFMinus]; }
};

/// Throws NonOrthogonalPackets when the states are unlabeled and |<f+|f->| exceeds the threshold.
PacketProjectorTable packet_projector_weak_values(const SuperposedState& pre, const SuperposedState& post,
                                                  const PhysicalConstants& consts = {});

struct CounterparticleReport {
    PacketWeakValues positive;  // f+
    PacketWeakValues negative;  // f-
    cplx momentum_sum;
    cplx energy_sum;
    cplx region_h_momentum;
    cplx region_h_energy;
    /// |sum - region h| for momentum and energy.
    double momentum_mismatch;
    double energy_mismatch;
};

CounterparticleReport counterparticle_decomposition(const SuperposedState& pre, const SuperposedState& post,
                                                    const PhysicalConstants& consts = {});

struct ThreeBoxSummary {
    cplx g, f_plus, f_minus;
    cplx sum() const { return g + f_plus + f_minus; }
};

ThreeBoxSummary three_box_summary(const SuperposedState& pre, const SuperposedState& post);

}  // namespace wvlab
