#pragma once

#include <string_view>
#include <vector>

#include "wvlab/packet.hpp"

namespace wvlab {

/// Orthonormal internal tag. Distinct labels never interfere.
enum class Label { none, up, right, left };

std::string_view label_name(Label label);
Label parse_label(std::string_view name);

struct Term {
    Label label = Label::none;
    cplx weight{1.0, 0.0};
    ComplexGaussian packet;
};

/// Weighted superposition of (label, packet) terms. Weights are kept as given;
/// the norm is reported separately, so unnormalized compositions are allowed.
class SuperposedState {
public:
    explicit SuperposedState(std::vector<Term> terms);

    const std::vector<Term>& terms() const noexcept { return terms_; }
    std::size_t size() const noexcept { return terms_.size(); }
    const Term& operator[](std::size_t i) const { return terms_.at(i); }

    double norm_squared() const;
    SuperposedState normalized() const;
    SuperposedState scaled(cplx factor) const;

    /// Amplitude carried by one label at x.
    cplx operator()(double x, Label label = Label::none) const;

private:
    std::vector<Term> terms_;
};

/// Divisors that normalize g + f+ + f- and g + f+ - f- respectively.
double psi_divisor(const PacketRecipe& recipe);
double phi_divisor(const PacketRecipe& recipe);

/// (g + f+ + f-)/sqrt(3 + 2 e^{-k1^2/2dk_f^2}); labeled: (g|up> + f+|right> + f-|left>)/sqrt(3).
/// Term order is always g, f+, f-.
SuperposedState compose_psi(const PacketRecipe& recipe, bool labeled = false);
/// (g + f+ - f-)/sqrt(3 - 2 e^{-k1^2/2dk_f^2}); labeled variant divides by sqrt(3).
SuperposedState compose_phi(const PacketRecipe& recipe, bool labeled = false);
SuperposedState compose_custom(std::vector<Term> terms);

/// <s1|s2>, full double sum over term overlaps with label orthogonality.
cplx overlap(const SuperposedState& s1, const SuperposedState& s2);

}  // namespace wvlab
