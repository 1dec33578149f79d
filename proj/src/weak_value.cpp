#include "wvlab/weak_value.hpp"

#include <cmath>
#include <sstream>

#include "wvlab/errors.hpp"

namespace wvlab {

namespace {

bool analytic_region(const RegionProjector& region) {
    return region.mode() == RegionProjector::Mode::packet_isolating || region.is_full_line();
}

bool kept(const RegionProjector& region, std::size_t i) {
    return region.is_full_line() || region.keeps(i);
}

void check_indices(const RegionProjector& region, const SuperposedState& pre, const SuperposedState& post) {
    if (region.mode() != RegionProjector::Mode::packet_isolating) return;
    for (auto i : region.kept_terms())
        if (i >= pre.size() || i >= post.size())
            throw InvalidArgument("packet-isolating region keeps term " + std::to_string(i) +
                                  " which the states do not have");
}

cplx element(ObservableKind kind, const ComplexGaussian& bra, const ComplexGaussian& ket,
             const PhysicalConstants& consts) {
    switch (kind) {
        case ObservableKind::presence: return inner_product(bra, ket);
        case ObservableKind::momentum: return momentum_moment(bra, ket, 1, consts);
        case ObservableKind::kinetic_energy: return momentum_moment(bra, ket, 2, consts) / (2.0 * consts.mass);
    }
    return {};
}

// sum over (post term j, pre term i) with matching labels, restricted by the two filters.
template <class BraFilter, class KetFilter>
cplx restricted_sum(ObservableKind kind, const SuperposedState& pre, const SuperposedState& post,
                    const PhysicalConstants& consts, BraFilter bra_in, KetFilter ket_in) {
    cplx sum{};
    for (std::size_t j = 0; j < post.size(); ++j) {
        if (!bra_in(j)) continue;
        for (std::size_t i = 0; i < pre.size(); ++i) {
            if (!ket_in(i) || post[j].label != pre[i].label) continue;
            sum += std::conj(post[j].weight) * pre[i].weight * element(kind, post[j].packet, pre[i].packet, consts);
        }
    }
    return sum;
}

cplx analytic_numerator(const LocalObservable& obs, const SuperposedState& pre, const SuperposedState& post,
                        const PhysicalConstants& consts) {
    check_indices(obs.region, pre, post);
    const auto in = [&](std::size_t i) { return kept(obs.region, i); };
    const auto all = [](std::size_t) { return true; };
    if (obs.kind == ObservableKind::kinetic_energy && obs.energy_form == EnergyForm::symmetrized)
        return 0.5 * (restricted_sum(obs.kind, pre, post, consts, all, in) +
                      restricted_sum(obs.kind, pre, post, consts, in, all));
    return restricted_sum(obs.kind, pre, post, consts, in, in);
}

double norm_scale(const SuperposedState& pre, const SuperposedState& post) {
    return std::sqrt(pre.norm_squared() * post.norm_squared());
}

SuperposedState kept_substate(const SuperposedState& s, const RegionProjector& region) {
    std::vector<Term> terms;
    for (std::size_t i = 0; i < s.size(); ++i)
        if (region.keeps(i)) terms.push_back(s[i]);
    return SuperposedState(std::move(terms));
}

void require_three_terms(const SuperposedState& pre, const SuperposedState& post) {
    if (pre.size() != 3 || post.size() != 3)
        throw InvalidArgument("packet projector tables need the g, f+, f- term layout");
}

bool labeled(const SuperposedState& s) {
    return s[kTermFPlus].label != s[kTermFMinus].label;
}

}  // namespace

WeakValueReport weak_value(const LocalObservable& obs, const SuperposedState& pre, const SuperposedState& post,
                           const PhysicalConstants& consts, std::optional<GridSpec> grid) {
    consts.validate();
    if (!analytic_region(obs.region)) return weak_value_grid(obs, pre, post, consts, grid);
    return make_report(analytic_numerator(obs, pre, post, consts), overlap(post, pre), norm_scale(pre, post),
                       Method::analytic);
}

WeakValueReport weak_value_grid(const LocalObservable& obs, const SuperposedState& pre, const SuperposedState& post,
                                const PhysicalConstants& consts, std::optional<GridSpec> grid) {
    consts.validate();
    const SuperposedState* states[] = {&pre, &post};
    const GridSpec spec = grid ? *grid : auto_grid(states);
    const auto pre_grid = sample(pre, spec);
    const auto post_grid = sample(post, spec);
    if (obs.region.mode() == RegionProjector::Mode::interval) return grid_weak_value(obs, pre_grid, post_grid, consts);

    // Packet-isolating: the idealized projector maps each state onto its kept
    // terms, after which the observable is a full-line sandwich.
    check_indices(obs.region, pre, post);
    const auto pre_kept = sample(kept_substate(pre, obs.region), spec);
    const auto post_kept = sample(kept_substate(post, obs.region), spec);
    const auto full_line_element = [&](const GridState& bras, const GridState& kets, ObservableKind kind) {
        cplx num{};
        for (const auto& [label, ket] : kets) {
            auto it = bras.find(label);
            if (it == bras.end()) continue;
            switch (kind) {
                case ObservableKind::presence: num += grid_inner_product(it->second, ket); break;
                case ObservableKind::momentum: num += grid_inner_product(it->second, apply_momentum(ket, 1, consts)); break;
                case ObservableKind::kinetic_energy:
                    num += grid_inner_product(it->second, apply_momentum(ket, 2, consts)) / (2.0 * consts.mass);
                    break;
            }
        }
        return num;
    };
    cplx numerator;
    if (obs.kind == ObservableKind::kinetic_energy && obs.energy_form == EnergyForm::symmetrized)
        numerator = 0.5 * (full_line_element(post_kept, pre_grid, obs.kind) +
                           full_line_element(post_grid, pre_kept, obs.kind));
    else
        numerator = full_line_element(post_kept, pre_kept, obs.kind);
    const cplx denominator = grid_inner_product(post_grid, pre_grid);
    return make_report(numerator, denominator, std::sqrt(norm_squared(pre_grid) * norm_squared(post_grid)),
                       Method::grid);
}

WeakValueReport weak_value(std::span<const WeightedObservable> combination, const SuperposedState& pre,
                           const SuperposedState& post, const PhysicalConstants& consts) {
    consts.validate();
    cplx numerator{};
    for (const auto& [coefficient, obs] : combination) {
        if (!analytic_region(obs.region))
            throw InvalidArgument("linear combinations are evaluated on analytic regions only");
        numerator += coefficient * analytic_numerator(obs, pre, post, consts);
    }
    return make_report(numerator, overlap(post, pre), norm_scale(pre, post), Method::analytic);
}

WeakValueReport local_momentum(const RegionProjector& region, const SuperposedState& pre, const SuperposedState& post,
                               const PhysicalConstants& consts, std::optional<GridSpec> grid) {
    return weak_value({region, ObservableKind::momentum}, pre, post, consts, grid);
}

WeakValueReport local_energy(const RegionProjector& region, const SuperposedState& pre, const SuperposedState& post,
                             const PhysicalConstants& consts, std::optional<GridSpec> grid, EnergyForm form) {
    return weak_value({region, ObservableKind::kinetic_energy, form}, pre, post, consts, grid);
}

PacketProjectorTable packet_projector_weak_values(const SuperposedState& pre, const SuperposedState& post,
                                                  const PhysicalConstants& consts) {
    require_three_terms(pre, post);
    if (!(labeled(pre) && labeled(post))) {
        const double o = std::abs(inner_product(pre[kTermFPlus].packet, pre[kTermFMinus].packet));
        if (o > kPacketOverlapThreshold) {
            std::ostringstream os;
            os << "|<f+|f->| = " << o << " exceeds " << kPacketOverlapThreshold
               << "; packet projectors need labels or the orthogonal regime";
            throw NonOrthogonalPackets(os.str());
        }
    }
    PacketProjectorTable table{};
    for (std::size_t i = 0; i < 3; ++i) {
        const auto region = RegionProjector::packets({i});
        table.rows[i] = {weak_value({region, ObservableKind::presence}, pre, post, consts).value,
                         weak_value({region, ObservableKind::momentum}, pre, post, consts).value,
                         weak_value({region, ObservableKind::kinetic_energy}, pre, post, consts).value};
    }
    return table;
}

CounterparticleReport counterparticle_decomposition(const SuperposedState& pre, const SuperposedState& post,
                                                    const PhysicalConstants& consts) {
    const auto table = packet_projector_weak_values(pre, post, consts);
    const auto region_h = RegionProjector::packets({kTermFPlus, kTermFMinus});
    CounterparticleReport r{};
    r.positive = table.f_plus();
    r.negative = table.f_minus();
    r.momentum_sum = r.positive.momentum + r.negative.momentum;
    r.energy_sum = r.positive.energy + r.negative.energy;
    r.region_h_momentum = local_momentum(region_h, pre, post, consts).value;
    r.region_h_energy = local_energy(region_h, pre, post, consts).value;
    r.momentum_mismatch = std::abs(r.momentum_sum - r.region_h_momentum);
    r.energy_mismatch = std::abs(r.energy_sum - r.region_h_energy);
    return r;
}

ThreeBoxSummary three_box_summary(const SuperposedState& pre, const SuperposedState& post) {
    const auto table = packet_projector_weak_values(pre, post);
    return {table.g().presence, table.f_plus().presence, table.f_minus().presence};
}

}  // namespace wvlab
