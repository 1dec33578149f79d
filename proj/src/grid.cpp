#include "wvlab/grid.hpp"

#include <fftw3.h>

#include <algorithm>
#include <bit>
#include <cmath>
#include <mutex>
#include <numbers>
#include <ostream>
#include <sstream>

#include "wvlab/errors.hpp"

namespace wvlab {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kGuardSigmas = 8.0;

// The FFTW planner is not reentrant; execution is.
std::mutex& planner_mutex() {
    static std::mutex m;
    return m;
}

class FftPlan {
public:
    FftPlan(std::vector<cplx>& data, int sign) {
        auto* p = reinterpret_cast<fftw_complex*>(data.data());
        std::lock_guard lock(planner_mutex());
        plan_ = fftw_plan_dft_1d(static_cast<int>(data.size()), p, p, sign, FFTW_ESTIMATE);
    }
    ~FftPlan() {
        std::lock_guard lock(planner_mutex());
        fftw_destroy_plan(plan_);
    }
    FftPlan(const FftPlan&) = delete;
    FftPlan& operator=(const FftPlan&) = delete;

    void execute() const { fftw_execute(plan_); }

private:
    fftw_plan plan_;
};

void fft_in_place(std::vector<cplx>& data, int sign) { FftPlan(data, sign).execute(); }

void require_same_spec(const GridWavefunction& a, const GridWavefunction& b) {
    if (!(a.spec() == b.spec())) throw InvalidArgument("grid wavefunctions live on different grids");
}

double edge_fraction(const GridWavefunction& w) {
    const auto amp = w.amplitudes();
    const std::size_t band = amp.size() / 64;
    double edge = 0.0, total = 0.0;
    for (std::size_t j = 0; j < amp.size(); ++j) {
        const double d = std::norm(amp[j]);
        total += d;
        if (j < band || j >= amp.size() - band) edge += d;
    }
    return total > 0.0 ? edge / total : 0.0;
}

}  // namespace

void GridSpec::validate() const {
    if (!std::isfinite(x_min) || !std::isfinite(x_max) || !(x_max > x_min))
        throw InvalidArgument("grid requires finite x_min < x_max");
    if (n < kMinPoints) throw InvalidArgument("grid needs at least 2^10 points");
    if (!std::has_single_bit(n)) throw InvalidArgument("grid point count must be a power of two");
}

double GridSpec::nyquist() const { return kPi * static_cast<double>(n) / length(); }

double GridSpec::wavenumber(std::size_t j) const {
    const auto s = static_cast<double>(j < n / 2 ? static_cast<long long>(j)
                                                 : static_cast<long long>(j) - static_cast<long long>(n));
    return 2.0 * kPi * s / length();
}

GridSpec default_grid() { return {-400.0, 500.0, std::size_t{1} << 15}; }

GridWavefunction::GridWavefunction(GridSpec spec, std::vector<cplx> amplitudes)
    : spec_(spec), amp_(std::move(amplitudes)) {
    spec_.validate();
    if (amp_.size() != spec_.n) throw InvalidArgument("amplitude count does not match grid size");
    for (auto z : amp_)
        if (!std::isfinite(z.real()) || !std::isfinite(z.imag()))
            throw InvalidArgument("grid amplitudes must be finite");
}

GridWavefunction::GridWavefunction(GridSpec spec) : spec_(spec), amp_(spec.n) { spec_.validate(); }

double GridWavefunction::norm_squared() const {
    double s = 0.0;
    for (auto z : amp_) s += std::norm(z);
    return s * spec_.dx();
}

double GridWavefunction::mean_position() const {
    double s = 0.0, w = 0.0;
    for (std::size_t j = 0; j < amp_.size(); ++j) {
        const double d = std::norm(amp_[j]);
        s += d * spec_.x(j);
        w += d;
    }
    return s / w;
}

GridWavefunction& GridWavefunction::operator+=(const GridWavefunction& other) {
    require_same_spec(*this, other);
    for (std::size_t j = 0; j < amp_.size(); ++j) amp_[j] += other.amp_[j];
    return *this;
}

GridWavefunction& GridWavefunction::operator*=(cplx factor) {
    for (auto& z : amp_) z *= factor;
    return *this;
}

void check_support(const ComplexGaussian& packet, const GridSpec& spec) {
    spec.validate();
    const double mu = packet.mean_position();
    const double sigma = packet.position_spread();
    if (mu - kGuardSigmas * sigma < spec.x_min || mu + kGuardSigmas * sigma > spec.x_max) {
        std::ostringstream os;
        os << "packet at " << mu << " (sigma " << sigma << ") leaks past the guard band of [" << spec.x_min << ", "
           << spec.x_max << "]";
        throw SupportOverflow(os.str());
    }
    const double k_reach = std::abs(packet.mean_wavenumber()) + kGuardSigmas * std::sqrt(packet.wavenumber_variance());
    if (k_reach >= spec.nyquist()) {
        std::ostringstream os;
        os << "packet wavenumber reach " << k_reach << " exceeds the Nyquist limit " << spec.nyquist();
        throw SupportOverflow(os.str());
    }
}

GridWavefunction sample(const ComplexGaussian& packet, const GridSpec& spec) {
    check_support(packet, spec);
    std::vector<cplx> amp(spec.n);
    for (std::size_t j = 0; j < spec.n; ++j) amp[j] = packet(spec.x(j));
    return {spec, std::move(amp)};
}

GridState sample(const SuperposedState& state, const GridSpec& spec) {
    GridState out;
    for (const auto& term : state.terms()) {
        auto w = sample(term.packet, spec);
        w *= term.weight;
        auto it = out.find(term.label);
        if (it == out.end())
            out.emplace(term.label, std::move(w));
        else
            it->second += w;
    }
    return out;
}

GridSpec auto_grid(std::span<const SuperposedState* const> states, double points_per_wavelength) {
    double lo = INFINITY, hi = -INFINITY, k_reach = 0.0;
    for (const auto* s : states) {
        for (const auto& t : s->terms()) {
            const double mu = t.packet.mean_position();
            const double sigma = t.packet.position_spread();
            lo = std::min(lo, mu - 12.0 * sigma);
            hi = std::max(hi, mu + 12.0 * sigma);
            k_reach = std::max(k_reach, std::abs(t.packet.mean_wavenumber()) +
                                            kGuardSigmas * std::sqrt(t.packet.wavenumber_variance()));
        }
    }
    if (!(hi > lo)) throw InvalidArgument("auto_grid needs at least one packet");
    const double length = hi - lo;
    // Nyquist with a factor-2 margin, and a floor on points per shortest wavelength.
    const double need_nyquist = 2.0 * k_reach * length / kPi;
    const double need_ppw = points_per_wavelength * k_reach * length / (2.0 * kPi);
    const auto need = static_cast<std::size_t>(std::ceil(std::max({need_nyquist, need_ppw, 1.0})));
    return {lo, hi, std::max(GridSpec::kMinPoints, std::bit_ceil(need))};
}

cplx grid_inner_product(const GridWavefunction& bra, const GridWavefunction& ket) {
    require_same_spec(bra, ket);
    const auto a = bra.amplitudes();
    const auto b = ket.amplitudes();
    cplx s{};
    for (std::size_t j = 0; j < a.size(); ++j) s += std::conj(a[j]) * b[j];
    return s * bra.spec().dx();
}

cplx grid_inner_product(const GridState& bra, const GridState& ket) {
    cplx s{};
    for (const auto& [label, w] : bra) {
        auto it = ket.find(label);
        if (it != ket.end()) s += grid_inner_product(w, it->second);
    }
    return s;
}

double norm_squared(const GridState& state) {
    double s = 0.0;
    for (const auto& [label, w] : state) s += w.norm_squared();
    return s;
}

GridWavefunction apply_momentum(const GridWavefunction& w, int power, const PhysicalConstants& consts) {
    consts.validate();
    if (power != 1 && power != 2) throw InvalidArgument("apply_momentum supports power 1 or 2");
    const auto& spec = w.spec();
    std::vector<cplx> data(w.amplitudes().begin(), w.amplitudes().end());
    fft_in_place(data, FFTW_FORWARD);
    const double inv_n = 1.0 / static_cast<double>(spec.n);
    for (std::size_t j = 0; j < spec.n; ++j) {
        const double p = consts.hbar * spec.wavenumber(j);
        data[j] *= (power == 1 ? p : p * p) * inv_n;
    }
    fft_in_place(data, FFTW_BACKWARD);
    return {spec, std::move(data)};
}

GridWavefunction project_interval(const GridWavefunction& w, const RegionProjector& region) {
    if (region.mode() != RegionProjector::Mode::interval)
        throw InvalidArgument("project_interval needs an interval-mode region");
    const auto& spec = w.spec();
    std::vector<cplx> data(w.amplitudes().begin(), w.amplitudes().end());
    for (std::size_t j = 0; j < spec.n; ++j)
        if (!region.contains(spec.x(j))) data[j] = cplx{};
    return {spec, std::move(data)};
}

GridWavefunction evolve_free(const GridWavefunction& w, double t, const PhysicalConstants& consts) {
    consts.validate();
    if (!std::isfinite(t)) throw InvalidArgument("evolution time must be finite");
    if (t == 0.0) return w;
    const auto& spec = w.spec();
    std::vector<cplx> data(w.amplitudes().begin(), w.amplitudes().end());
    fft_in_place(data, FFTW_FORWARD);
    const double inv_n = 1.0 / static_cast<double>(spec.n);
    const double rate = consts.hbar * t / (2.0 * consts.mass);
    for (std::size_t j = 0; j < spec.n; ++j) {
        const double k = spec.wavenumber(j);
        data[j] *= std::polar(inv_n, -rate * k * k);
    }
    fft_in_place(data, FFTW_BACKWARD);
    GridWavefunction out{spec, std::move(data)};
    if (edge_fraction(out) > 1e-12)
        throw SupportOverflow("free evolution pushed probability into the grid edge band");
    return out;
}

std::vector<cplx> momentum_amplitudes(const GridWavefunction& w) {
    const auto& spec = w.spec();
    std::vector<cplx> data(w.amplitudes().begin(), w.amplitudes().end());
    fft_in_place(data, FFTW_FORWARD);
    const double scale = spec.dx() / std::sqrt(2.0 * kPi);
    for (std::size_t j = 0; j < spec.n; ++j) data[j] *= std::polar(scale, -spec.wavenumber(j) * spec.x_min);
    return data;
}

double momentum_norm_squared(const GridWavefunction& w) {
    double s = 0.0;
    for (auto z : momentum_amplitudes(w)) s += std::norm(z);
    return s * 2.0 * kPi / w.spec().length();
}

WeakValueReport grid_weak_value(const LocalObservable& obs, const GridState& pre, const GridState& post,
                                const PhysicalConstants& consts) {
    consts.validate();
    const auto& region = obs.region;
    cplx numerator{};
    for (const auto& [label, ket] : pre) {
        auto it = post.find(label);
        if (it == post.end()) continue;
        const auto& bra = it->second;
        const auto inside = project_interval(ket, region);
        switch (obs.kind) {
            case ObservableKind::presence:
                numerator += grid_inner_product(bra, project_interval(inside, region));
                break;
            case ObservableKind::momentum:
                numerator += grid_inner_product(bra, project_interval(apply_momentum(inside, 1, consts), region));
                break;
            case ObservableKind::kinetic_energy: {
                const double inv_2m = 1.0 / (2.0 * consts.mass);
                if (obs.energy_form == EnergyForm::sandwich) {
                    numerator += inv_2m * grid_inner_product(bra, project_interval(apply_momentum(inside, 2, consts), region));
                } else {
                    const cplx left = grid_inner_product(bra, project_interval(apply_momentum(ket, 2, consts), region));
                    const cplx right = grid_inner_product(bra, apply_momentum(inside, 2, consts));
                    numerator += inv_2m * 0.5 * (left + right);
                }
                break;
            }
        }
    }
    const cplx denominator = grid_inner_product(post, pre);
    const double scale = std::sqrt(norm_squared(pre) * norm_squared(post));
    return make_report(numerator, denominator, scale, Method::grid);
}

void write_csv(std::ostream& out, const GridWavefunction& w) {
    const auto amp = w.amplitudes();
    out << "x,re,im\n";
    out.precision(17);
    for (std::size_t j = 0; j < amp.size(); ++j)
        out << w.spec().x(j) << ',' << amp[j].real() << ',' << amp[j].imag() << '\n';
}

}  // namespace wvlab
