#include "wvlab/state.hpp"

#include <cmath>
#include <string>

#include "wvlab/errors.hpp"

namespace wvlab {

std::string_view label_name(Label label) {
    switch (label) {
        case Label::none: return "none";
        case Label::up: return "up";
        case Label::right: return "right";
        case Label::left: return "left";
    }
    return "none";
}

Label parse_label(std::string_view name) {
    if (name == "none") return Label::none;
    if (name == "up") return Label::up;
    if (name == "right") return Label::right;
    if (name == "left") return Label::left;
    throw InvalidArgument("unknown label '" + std::string(name) + "'");
}

SuperposedState::SuperposedState(std::vector<Term> terms) : terms_(std::move(terms)) {
    if (terms_.empty()) throw InvalidArgument("a superposed state needs at least one term");
    for (const auto& t : terms_)
        if (!std::isfinite(t.weight.real()) || !std::isfinite(t.weight.imag()))
            throw InvalidArgument("term weights must be finite");
}

double SuperposedState::norm_squared() const { return overlap(*this, *this).real(); }

SuperposedState SuperposedState::normalized() const { return scaled(1.0 / std::sqrt(norm_squared())); }

SuperposedState SuperposedState::scaled(cplx factor) const {
    auto terms = terms_;
    for (auto& t : terms) t.weight *= factor;
    return SuperposedState(std::move(terms));
}

cplx SuperposedState::operator()(double x, Label label) const {
    cplx sum{};
    for (const auto& t : terms_)
        if (t.label == label) sum += t.weight * t.packet(x);
    return sum;
}

double psi_divisor(const PacketRecipe& recipe) { return std::sqrt(3.0 + 2.0 * recipe.f_overlap()); }

double phi_divisor(const PacketRecipe& recipe) { return std::sqrt(3.0 - 2.0 * recipe.f_overlap()); }

namespace {

SuperposedState compose(const PacketRecipe& recipe, bool labeled, double minus_sign, double divisor) {
    recipe.validate();
    const double w = 1.0 / (labeled ? std::sqrt(3.0) : divisor);
    return SuperposedState({
        {labeled ? Label::up : Label::none, w, make_g(recipe)},
        {labeled ? Label::right : Label::none, w, make_f(recipe, +1)},
        {labeled ? Label::left : Label::none, minus_sign * w, make_f(recipe, -1)},
    });
}

}  // namespace

SuperposedState compose_psi(const PacketRecipe& recipe, bool labeled) {
    return compose(recipe, labeled, +1.0, psi_divisor(recipe));
}

SuperposedState compose_phi(const PacketRecipe& recipe, bool labeled) {
    return compose(recipe, labeled, -1.0, phi_divisor(recipe));
}

SuperposedState compose_custom(std::vector<Term> terms) { return SuperposedState(std::move(terms)); }

cplx overlap(const SuperposedState& s1, const SuperposedState& s2) {
    cplx sum{};
    for (const auto& t1 : s1.terms())
        for (const auto& t2 : s2.terms())
            if (t1.label == t2.label) sum += std::conj(t1.weight) * t2.weight * inner_product(t1.packet, t2.packet);
    return sum;
}

}  // namespace wvlab
