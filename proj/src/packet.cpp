#include "wvlab/packet.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include "wvlab/errors.hpp"

namespace wvlab {

namespace {

constexpr double kPi = std::numbers::pi;

bool finite(cplx z) { return std::isfinite(z.real()) && std::isfinite(z.imag()); }

// \int exp(A x^2 + B x + C) dx and the first two raw moments, Re(A) < 0.
struct GaussMoments {
    cplx m0, m1, m2;
};

GaussMoments gauss_moments(cplx A, cplx B, cplx C) {
    const cplx m0 = std::sqrt(kPi / (-A)) * std::exp(C - B * B / (4.0 * A));
    const cplx mu = -B / (2.0 * A);
    return {m0, m0 * mu, m0 * (mu * mu - 1.0 / (2.0 * A))};
}

}  // namespace

void PhysicalConstants::validate() const {
    if (!(hbar > 0.0) || !std::isfinite(hbar)) throw InvalidArgument("hbar must be positive");
    if (!(mass > 0.0) || !std::isfinite(mass)) throw InvalidArgument("mass must be positive");
}

ComplexGaussian::ComplexGaussian(cplx a, cplx b, cplx c) : a_(a), b_(b), c_(c) {
    if (!finite(a) || !finite(b) || !finite(c))
        throw InvalidArgument("Gaussian coefficients must be finite");
    if (!(a.real() < 0.0)) throw InvalidArgument("Gaussian is not normalizable (Re(a) >= 0)");
}

cplx ComplexGaussian::operator()(double x) const { return std::exp(a_ * x * x + b_ * x + c_); }

double ComplexGaussian::norm_squared() const { return inner_product(*this, *this).real(); }

double ComplexGaussian::mean_position() const { return -b_.real() / (2.0 * a_.real()); }

double ComplexGaussian::position_variance() const { return -1.0 / (4.0 * a_.real()); }

double ComplexGaussian::position_spread() const { return std::sqrt(position_variance()); }

double ComplexGaussian::mean_wavenumber() const {
    return 2.0 * a_.imag() * mean_position() + b_.imag();
}

double ComplexGaussian::wavenumber_variance() const {
    const PhysicalConstants unit{};
    const double n = norm_squared();
    const double k2 = momentum_moment(*this, *this, 2, unit).real() / n;
    const double k1 = mean_wavenumber();
    return k2 - k1 * k1;
}

ComplexGaussian ComplexGaussian::translated(double s) const {
    return {a_, b_ - 2.0 * a_ * s, a_ * s * s - b_ * s + c_};
}

ComplexGaussian ComplexGaussian::mirrored(double pivot) const {
    const double X = pivot;
    return {a_, -(4.0 * a_ * X + b_), 4.0 * a_ * X * X + 2.0 * b_ * X + c_};
}

ComplexGaussian ComplexGaussian::scaled(cplx factor) const {
    if (factor == cplx{}) throw InvalidArgument("cannot scale a Gaussian by zero");
    return {a_, b_, c_ + std::log(factor)};
}

ComplexGaussian ComplexGaussian::normalized() const {
    return scaled(1.0 / std::sqrt(norm_squared()));
}

void PacketRecipe::validate() const {
    for (double v : {k0, k1, dk_f, dk_g, x0})
        if (!std::isfinite(v)) throw InvalidArgument("recipe parameters must be finite");
    if (!(dk_f > 0.0)) throw InvalidArgument("dk_f must be positive");
    if (!(dk_g > 0.0)) throw InvalidArgument("dk_g must be positive");
    if (!(x0 > 0.0)) throw InvalidArgument("x0 must be positive");
}

double PacketRecipe::separation_ratio() const { return x0 * 2.0 * std::min(dk_f, dk_g); }

double PacketRecipe::f_overlap() const { return std::exp(-k1 * k1 / (2.0 * dk_f * dk_f)); }

ComplexGaussian gaussian_packet(double center, double k_mean, double dk) {
    if (!(dk > 0.0)) throw InvalidArgument("wavenumber spread must be positive");
    const double d2 = dk * dk;
    const cplx i{0.0, 1.0};
    return {cplx{-d2}, 2.0 * d2 * center + i * k_mean,
            -d2 * center * center - i * k_mean * center + 0.25 * std::log(2.0 * d2 / kPi)};
}

ComplexGaussian make_f(const PacketRecipe& recipe, int sign) {
    recipe.validate();
    if (sign != 1 && sign != -1) throw InvalidArgument("make_f sign must be +1 or -1");
    return gaussian_packet(0.0, recipe.k0 + sign * recipe.k1, recipe.dk_f);
}

ComplexGaussian make_g(const PacketRecipe& recipe) {
    recipe.validate();
    return gaussian_packet(recipe.x0, 0.0, recipe.dk_g);
}

ComplexGaussian fourier_transform(const ComplexGaussian& p) {
    const cplx a = p.a(), b = p.b(), c = p.c();
    const cplx i{0.0, 1.0};
    return {1.0 / (4.0 * a), i * b / (2.0 * a), c - b * b / (4.0 * a) + 0.5 * std::log(-1.0 / (2.0 * a))};
}

ComplexGaussian inverse_fourier_transform(const ComplexGaussian& p) {
    const cplx a = p.a(), b = p.b(), c = p.c();
    const cplx i{0.0, 1.0};
    return {1.0 / (4.0 * a), -i * b / (2.0 * a), c - b * b / (4.0 * a) + 0.5 * std::log(-1.0 / (2.0 * a))};
}

cplx inner_product(const ComplexGaussian& p, const ComplexGaussian& q) {
    return gauss_moments(std::conj(p.a()) + q.a(), std::conj(p.b()) + q.b(), std::conj(p.c()) + q.c()).m0;
}

cplx momentum_moment(const ComplexGaussian& p, const ComplexGaussian& q, int n, const PhysicalConstants& consts) {
    consts.validate();
    const auto m = gauss_moments(std::conj(p.a()) + q.a(), std::conj(p.b()) + q.b(), std::conj(p.c()) + q.c());
    const cplx a = q.a(), b = q.b();
    const cplx i{0.0, 1.0};
    const double h = consts.hbar;
    switch (n) {
        case 0:
            return m.m0;
        case 1:
            // -i hbar q' = -i hbar (2 a x + b) q
            return -i * h * (2.0 * a * m.m1 + b * m.m0);
        case 2:
            // -hbar^2 q'' = -hbar^2 (2a + (2ax + b)^2) q
            return -h * h * ((2.0 * a + b * b) * m.m0 + 4.0 * a * b * m.m1 + 4.0 * a * a * m.m2);
        default:
            throw InvalidArgument("momentum_moment supports n = 0, 1, 2");
    }
}

ComplexGaussian free_evolve(const ComplexGaussian& p, double t, const PhysicalConstants& consts) {
    consts.validate();
    if (!std::isfinite(t)) throw InvalidArgument("evolution time must be finite");
    if (t == 0.0) return p;
    const auto pk = fourier_transform(p);
    const cplx i{0.0, 1.0};
    const ComplexGaussian evolved{pk.a() - i * consts.hbar * t / (2.0 * consts.mass), pk.b(), pk.c()};
    return inverse_fourier_transform(evolved);
}

ComplexGaussian galilean_boost(const ComplexGaussian& p, double u, const PhysicalConstants& consts) {
    consts.validate();
    const cplx i{0.0, 1.0};
    return {p.a(), p.b() - i * consts.mass * u / consts.hbar, p.c()};
}

ComplexGaussian reflect_in_moving_frame(const ComplexGaussian& p, double pivot, double u,
                                        const PhysicalConstants& consts) {
    return galilean_boost(galilean_boost(p, u, consts).mirrored(pivot), -u, consts);
}

double mean_velocity(const ComplexGaussian& p, const PhysicalConstants& consts) {
    return consts.hbar * p.mean_wavenumber() / consts.mass;
}

std::string to_string(const ComplexGaussian& p) {
    std::ostringstream os;
    os.precision(17);
    os << "exp(" << p.a() << " x^2 + " << p.b() << " x + " << p.c() << ")";
    return os.str();
}

}  // namespace wvlab
