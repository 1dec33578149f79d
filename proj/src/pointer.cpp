#include "wvlab/pointer.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <limits>
#include <numbers>
#include <random>
#include <thread>

#include "wvlab/errors.hpp"
#include "wvlab/weak_value.hpp"

namespace wvlab {

namespace {

constexpr double kNormTolerance = 1e-12;
constexpr double kAmplitudeFloor = 1e-12;

double normal_pdf(double x, double mu, double sigma) {
    const double z = (x - mu) / sigma;
    return std::exp(-0.5 * z * z) / (sigma * std::sqrt(2.0 * std::numbers::pi));
}

struct Moments {
    std::uint64_t n = 0;
    double mean = 0.0;
    double m2 = 0.0;

    void add(double x) {
        ++n;
        const double delta = x - mean;
        mean += delta / static_cast<double>(n);
        m2 += delta * (x - mean);
    }

    void merge(const Moments& o) {
        if (o.n == 0) return;
        const double na = static_cast<double>(n), nb = static_cast<double>(o.n);
        const double delta = o.mean - mean;
        mean += delta * nb / (na + nb);
        m2 += o.m2 + delta * delta * na * nb / (na + nb);
        n += o.n;
    }
};

struct BlockResult {
    Moments moments;
    std::uint64_t trials = 0;
};

BlockResult sample_block(const PointerDensity& rho, std::uint64_t seed, std::uint64_t block, std::uint64_t count) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(block), static_cast<std::uint32_t>(block >> 32)};
    std::mt19937_64 rng(seq);
    std::vector<double> env_weights;
    for (const auto& [w, mu] : rho.components) env_weights.push_back(std::max(w, 0.0));
    std::discrete_distribution<std::size_t> pick(env_weights.begin(), env_weights.end());
    std::normal_distribution<double> normal(0.0, rho.width);
    std::uniform_real_distribution<double> uniform(0.0, 1.0);

    BlockResult r;
    while (r.moments.n < count) {
        ++r.trials;
        const double x = rho.components[pick(rng)].second + normal(rng);
        double target = 0.0, envelope = 0.0;
        for (const auto& [w, mu] : rho.components) {
            const double g = normal_pdf(x, mu, rho.width);
            target += w * g;
            envelope += std::max(w, 0.0) * g;
        }
        if (uniform(rng) * envelope <= target) r.moments.add(x);
    }
    return r;
}

}  // namespace

void PointerConfig::validate() const {
    if (!(width > 0.0) || !std::isfinite(width)) throw InvalidArgument("pointer width must be positive");
    if (!(deflection >= 0.0) || !std::isfinite(deflection)) throw InvalidArgument("deflection must be non-negative");
}

double PointerConfig::weakness() const {
    return deflection == 0.0 ? std::numeric_limits<double>::infinity() : width / deflection;
}

void ProbeSelection::validate() const {
    if (std::abs(std::norm(a) + std::norm(b) - 1.0) > kNormTolerance)
        throw InvalidArgument("pre-selection amplitudes (a, b) are not normalized");
    if (std::abs(std::norm(c) + std::norm(d_post) - 1.0) > kNormTolerance)
        throw InvalidArgument("post-selection amplitudes (c, d_post) are not normalized");
}

cplx ProbeSelection::weak_value() const {
    const cplx alpha = a * std::conj(c), beta = b * std::conj(d_post);
    if (std::abs(alpha + beta) < kAmplitudeFloor)
        throw PostSelectionImpossible("pre- and post-selection are orthogonal; the weak value is undefined");
    return alpha / (alpha + beta);
}

ProbeSelection selection_for_weak_value(cplx w) {
    const double s = 1.0 / std::sqrt(2.0);
    const double norm = std::sqrt(std::norm(w) + std::norm(1.0 - w));
    return {s, s, std::conj(w) / norm, std::conj(1.0 - w) / norm};
}

PointerDensity post_selected_density(const ProbeSelection& sel, const PointerConfig& cfg) {
    sel.validate();
    cfg.validate();
    const cplx alpha = sel.a * std::conj(sel.c), beta = sel.b * std::conj(sel.d_post);
    const double d = cfg.deflection, w = cfg.width;
    const double cross = 2.0 * std::real(std::conj(alpha) * beta) * std::exp(-d * d / (8.0 * w * w));
    PointerDensity rho{{{std::norm(alpha), d}, {std::norm(beta), 0.0}, {cross, 0.5 * d}}, w, 0.0};
    for (const auto& [weight, mu] : rho.components) rho.probability += weight;
    if (rho.probability < kAmplitudeFloor * kAmplitudeFloor)
        throw PostSelectionImpossible("post-selection probability vanishes");
    return rho;
}

double PointerDensity::operator()(double x) const {
    double s = 0.0;
    for (const auto& [weight, mu] : components) s += weight * normal_pdf(x, mu, width);
    return s / probability;
}

double PointerDensity::mean() const {
    double s = 0.0;
    for (const auto& [weight, mu] : components) s += weight * mu;
    return s / probability;
}

PointerState exact_pointer_state(const ProbeSelection& sel, const PointerConfig& cfg) {
    const cplx wv = sel.weak_value();
    const auto rho = post_selected_density(sel, cfg);
    const cplx alpha = sel.a * std::conj(sel.c), beta = sel.b * std::conj(sel.d_post);
    const double dk = 1.0 / (2.0 * cfg.width);
    SuperposedState pointer({{Label::none, alpha / (alpha + beta), gaussian_packet(cfg.deflection, 0.0, dk)},
                             {Label::none, beta / (alpha + beta), gaussian_packet(0.0, 0.0, dk)}});
    return {std::move(pointer), rho.probability, wv, rho.mean()};
}

ComplexGaussian first_order_pointer(cplx weak_value, const PointerConfig& cfg) {
    cfg.validate();
    return gaussian_packet(cfg.deflection * weak_value.real(), 0.0, 1.0 / (2.0 * cfg.width));
}

EnsembleResult sample_ensemble(const ProbeSelection& sel, const PointerConfig& cfg, std::uint64_t n,
                               std::uint64_t seed, unsigned threads) {
    if (n == 0) throw InvalidArgument("ensemble size must be at least 1");
    cfg.validate();
    if (cfg.deflection == 0.0) throw RegimeError("deflection d = 0: the pointer does not couple, estimate undefined");
    sel.weak_value();
    const auto rho = post_selected_density(sel, cfg);

    const std::uint64_t blocks = (n + kEnsembleBlock - 1) / kEnsembleBlock;
    const auto block_size = [&](std::uint64_t k) { return std::min(kEnsembleBlock, n - k * kEnsembleBlock); };
    if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
    threads = static_cast<unsigned>(std::min<std::uint64_t>(threads, blocks));

    std::vector<BlockResult> results(blocks);
    std::vector<std::future<void>> workers;
    for (unsigned w = 0; w < threads; ++w)
        workers.push_back(std::async(std::launch::async, [&, w] {
            for (std::uint64_t k = w; k < blocks; k += threads) results[k] = sample_block(rho, seed, k, block_size(k));
        }));
    for (auto& f : workers) f.get();

    Moments total;
    std::uint64_t trials = 0;
    for (const auto& r : results) {
        total.merge(r.moments);
        trials += r.trials;
    }
    const double sample_std = total.n > 1 ? std::sqrt(total.m2 / static_cast<double>(total.n - 1)) : 0.0;
    const double se = sample_std / std::sqrt(static_cast<double>(total.n));
    const double estimate = total.mean / cfg.deflection;
    const double half = 1.96 * se / cfg.deflection;
    return {trials, total.n, total.mean, se, estimate, {estimate - half, estimate + half}, rho.mean(),
            rho.probability, seed};
}

std::vector<double> weak_limit_discrepancy(const ProbeSelection& sel, double width, const std::vector<double>& ratios) {
    const double target = sel.weak_value().real();
    std::vector<double> out;
    for (double r : ratios) {
        if (!(r > 0.0)) throw InvalidArgument("d/w ratios must be positive");
        const PointerConfig cfg{width, r * width};
        out.push_back(std::abs(post_selected_density(sel, cfg).mean() / cfg.deflection - target));
    }
    return out;
}

MomentumPointerShift momentum_pointer_shift(const RegionProjector& region, const SuperposedState& pre,
                                            const SuperposedState& post, double coupling, const PointerConfig& cfg,
                                            const PhysicalConstants& consts) {
    cfg.validate();
    if (!std::isfinite(coupling)) throw InvalidArgument("coupling must be finite");
    const cplx wv = local_momentum(region, pre, post, consts).value;
    const double shift = coupling * wv.real();
    return {shift, wv, std::abs(shift) * 20.0 <= cfg.width};
}

}  // namespace wvlab
