#pragma once

#include <complex>
#include <string>

namespace wvlab {

using cplx = std::complex<double>;

struct PhysicalConstants {
    double hbar = 1.0;
    double mass = 1.0;

    void validate() const;
    bool operator==(const PhysicalConstants&) const = default;
};

/// One-dimensional complex Gaussian chi(x) = exp(a x^2 + b x + c).
///
/// Every operation in this module maps (a, b, c) to new coefficients in
/// closed form, so no quadrature is involved anywhere on the analytic path.
/// Re(a) < 0 is enforced at construction.
class ComplexGaussian {
public:
    ComplexGaussian(cplx a, cplx b, cplx c);

    cplx a() const noexcept { return a_; }
    cplx b() const noexcept { return b_; }
    cplx c() const noexcept { return c_; }

    cplx operator()(double x) const;

    double norm_squared() const;
    double mean_position() const;
    double position_variance() const;
    double position_spread() const;
    /// Expectation of k = -i d/dx (normalized).
    double mean_wavenumber() const;
    double wavenumber_variance() const;

    ComplexGaussian translated(double shift) const;
    /// Spatial mirror image about x = pivot.
    ComplexGaussian mirrored(double pivot) const;
    /// Multiply by a constant complex factor.
    ComplexGaussian scaled(cplx factor) const;
    ComplexGaussian normalized() const;

private:
    cplx a_, b_, c_;
};

struct PacketRecipe {
    double k0 = 0.0;
    double k1 = 0.0;
    double dk_f = 0.0;
    double dk_g = 0.0;
    double x0 = 0.0;

    void validate() const;
    /// x0 * 2 * min(dk_f, dk_g); the closed-form idealizations need this >> 1.
    double separation_ratio() const;
    /// <f+|f-> = exp(-k1^2 / (2 dk_f^2)).
    double f_overlap() const;

    bool operator==(const PacketRecipe&) const = default;
};

/// Unit-norm minimum-uncertainty packet centered at `center` with mean
/// wavenumber `k_mean` and wavenumber spread `dk` (position spread 1/(2 dk)).
/// The plane-wave phase is referenced to the center: exp(i k (x - center)).
ComplexGaussian gaussian_packet(double center, double k_mean, double dk);

ComplexGaussian make_f(const PacketRecipe& recipe, int sign);
ComplexGaussian make_g(const PacketRecipe& recipe);

/// chi~(k) = (2 pi)^(-1/2) \int chi(x) e^{-ikx} dx, returned as a Gaussian in k.
ComplexGaussian fourier_transform(const ComplexGaussian& p);
ComplexGaussian inverse_fourier_transform(const ComplexGaussian& p);

/// <p|q> = \int conj(p) q dx.
cplx inner_product(const ComplexGaussian& p, const ComplexGaussian& q);

/// <p| P^n |q> with P = -i hbar d/dx, n in {0, 1, 2}.
cplx momentum_moment(const ComplexGaussian& p, const ComplexGaussian& q, int n,
                     const PhysicalConstants& consts = {});

/// Exact free-particle propagation by time t (negative t propagates backward).
ComplexGaussian free_evolve(const ComplexGaussian& p, double t, const PhysicalConstants& consts = {});

/// Change to a frame moving with velocity u: multiplies by exp(-i m u x / hbar),
/// so every velocity component shifts by -u. |chi|^2 is unchanged.
ComplexGaussian galilean_boost(const ComplexGaussian& p, double u, const PhysicalConstants& consts = {});

/// Reflection off an ideal element passing through `pivot` with velocity u:
/// boost into the element frame, mirror about the pivot, boost back.
/// A packet with velocity v leaves with 2u - v.
ComplexGaussian reflect_in_moving_frame(const ComplexGaussian& p, double pivot, double u,
                                        const PhysicalConstants& consts = {});

double mean_velocity(const ComplexGaussian& p, const PhysicalConstants& consts = {});

std::string to_string(const ComplexGaussian& p);

}  // namespace wvlab
