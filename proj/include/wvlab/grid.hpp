#pragma once

#include <cstddef>
#include <iosfwd>
#include <map>
#include <span>
#include <vector>

#include "wvlab/observable.hpp"
#include "wvlab/state.hpp"

namespace wvlab {

/// Uniform periodic grid x_j = x_min + j dx, dx = (x_max - x_min) / n.
struct GridSpec {
    double x_min = 0.0;
    double x_max = 0.0;
    std::size_t n = 0;

    static constexpr std::size_t kMinPoints = std::size_t{1} << 10;

    void validate() const;
    double length() const { return x_max - x_min; }
    double dx() const { return length() / static_cast<double>(n); }
    double x(std::size_t j) const { return x_min + static_cast<double>(j) * dx(); }
    double nyquist() const;
    /// Angular wavenumber of FFT bin j (negative frequencies in the upper half).
    double wavenumber(std::size_t j) const;

    bool operator==(const GridSpec&) const = default;
};

/// Default spec for the P1 parameter set: [-400, 500] with 2^15 points.
GridSpec default_grid();

class GridWavefunction {
public:
    GridWavefunction(GridSpec spec, std::vector<cplx> amplitudes);
    explicit GridWavefunction(GridSpec spec);

    const GridSpec& spec() const noexcept { return spec_; }
    std::span<const cplx> amplitudes() const noexcept { return amp_; }
    std::span<cplx> amplitudes() noexcept { return amp_; }

    double norm_squared() const;
    double mean_position() const;

    GridWavefunction& operator+=(const GridWavefunction& other);
    GridWavefunction& operator*=(cplx factor);

private:
    GridSpec spec_;
    std::vector<cplx> amp_;
};

/// One sampled component per internal label.
using GridState = std::map<Label, GridWavefunction>;

/// Throws SupportOverflow unless the packet lies inside the 8-sigma guard band
/// and its wavenumber content sits below the Nyquist limit with 8 spreads to spare.
void check_support(const ComplexGaussian& packet, const GridSpec& spec);

GridWavefunction sample(const ComplexGaussian& packet, const GridSpec& spec);
GridState sample(const SuperposedState& state, const GridSpec& spec);

/// Smallest power-of-two grid covering every packet with guard and Nyquist margin.
GridSpec auto_grid(std::span<const SuperposedState* const> states, double points_per_wavelength = 16.0);

cplx grid_inner_product(const GridWavefunction& bra, const GridWavefunction& ket);
cplx grid_inner_product(const GridState& bra, const GridState& ket);
double norm_squared(const GridState& state);

/// Spectral (P)^power with P = -i hbar d/dx, power in {1, 2}.
GridWavefunction apply_momentum(const GridWavefunction& w, int power, const PhysicalConstants& consts = {});
/// Sharp mask: samples outside the region's intervals are set to zero.
GridWavefunction project_interval(const GridWavefunction& w, const RegionProjector& region);
/// Exact free propagation by the momentum-space phase exp(-i hbar k^2 t / 2m).
GridWavefunction evolve_free(const GridWavefunction& w, double t, const PhysicalConstants& consts = {});

/// Samples of the continuum transform (2 pi)^(-1/2) \int psi e^{-ikx} dx at the FFT wavenumbers.
std::vector<cplx> momentum_amplitudes(const GridWavefunction& w);
double momentum_norm_squared(const GridWavefunction& w);

/// Sandwich Pi O Pi evaluated by project -> momentum power -> project -> quadrature.
WeakValueReport grid_weak_value(const LocalObservable& obs, const GridState& pre, const GridState& post,
                                const PhysicalConstants& consts = {});

/// x, Re, Im per line with a header row.
void write_csv(std::ostream& out, const GridWavefunction& w);

}  // namespace wvlab
