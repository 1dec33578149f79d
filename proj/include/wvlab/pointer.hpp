#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "wvlab/observable.hpp"
#include "wvlab/packet.hpp"
#include "wvlab/state.hpp"

namespace wvlab {

/// Gaussian pointer G(x) = (2 pi w^2)^(-1/4) exp(-x^2 / 4w^2) displaced by d
/// when the probe is present.
struct PointerConfig {
    double width = 1.0;
    double deflection = 0.0;

    void validate() const;
    /// w / d (infinite when d = 0).
    double weakness() const;
    bool weak_regime() const { return weakness() >= 20.0; }

    bool operator==(const PointerConfig&) const = default;
};

/// Two-state probe: pre = a|present> + b|absent>, post = c|present> + d_post|absent>.
struct ProbeSelection {
    cplx a{1.0, 0.0};
    cplx b{0.0, 0.0};
    cplx c{1.0, 0.0};
    cplx d_post{0.0, 0.0};

    void validate() const;
    /// Presence weak value a c* / (a c* + b d_post*).
    cplx weak_value() const;

    bool operator==(const ProbeSelection&) const = default;
};

/// Selection with the given presence weak value: pre (1,1)/sqrt2, post proportional to (w*, (1-w)*).
ProbeSelection selection_for_weak_value(cplx weak_value);

struct PointerState {
    /// (a c* G(x-d) + b d_post* G(x)) / (a c* + b d_post*); terms ordered (present, absent).
    SuperposedState pointer;
    double probability;  // || a c* G(x-d) + b d_post* G(x) ||^2
    cplx weak_value;
    double mean;  // exact post-selected pointer mean
};

PointerState exact_pointer_state(const ProbeSelection& sel, const PointerConfig& cfg);

/// G(x - d Re(A_w)). Meaningful in the weak regime only.
ComplexGaussian first_order_pointer(cplx weak_value, const PointerConfig& cfg);

/// Post-selected pointer density as a signed three-Gaussian mixture:
/// weights |ac*|^2, |bd*|^2, 2 Re(conj(ac*) bd*) e^{-d^2/8w^2} at centers d, 0, d/2 (all variance w^2).
struct PointerDensity {
    std::vector<std::pair<double, double>> components;  // (weight, center)
    double width;
    double probability;  // sum of weights

    double operator()(double x) const;
    double mean() const;
};

PointerDensity post_selected_density(const ProbeSelection& sel, const PointerConfig& cfg);

struct EnsembleResult {
    std::uint64_t n_samples;       // trials including failed post-selections
    std::uint64_t n_postselected;  // accepted pointer readings
    double mean;
    double std_error;
    double estimated_weak_value;
    std::pair<double, double> ci95;
    double exact_mean;
    double probability;
    std::uint64_t seed;
};

/// Number of post-selected readings per independently seeded block.
inline constexpr std::uint64_t kEnsembleBlock = 65536;

/// Draws n post-selected pointer readings from the exact density (rejection
/// sampling against the positive mixture components). Blocks are seeded from
/// (seed, block index) and merged in order, so the result does not depend on
/// the number of worker threads.
EnsembleResult sample_ensemble(const ProbeSelection& sel, const PointerConfig& cfg, std::uint64_t n,
                               std::uint64_t seed, unsigned threads = 0);

/// |exact mean / d - Re A_w| for each deflection d = width / ratio.
std::vector<double> weak_limit_discrepancy(const ProbeSelection& sel, double width, const std::vector<double>& ratios);

struct MomentumPointerShift {
    double shift;  // coupling * Re(local momentum weak value)
    cplx weak_value;
    bool weak;  // |shift| <= width / 20
};

/// Ideal impulsive coupling of strength `coupling` between the local momentum and a pointer of the given width.
MomentumPointerShift momentum_pointer_shift(const RegionProjector& region, const SuperposedState& pre,
                                            const SuperposedState& post, double coupling, const PointerConfig& cfg,
                                            const PhysicalConstants& consts = {});

}  // namespace wvlab
