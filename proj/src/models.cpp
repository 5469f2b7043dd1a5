#include "epifit/models.hpp"

#include <cmath>

namespace epifit::models {

std::string to_string(ModelKind kind) { return kind == ModelKind::sir ? "sir" : "irsir"; }

ModelKind model_kind_from_string(const std::string& name) {
    if (name == "sir") return ModelKind::sir;
    if (name == "irsir") return ModelKind::irsir;
    throw DataError("unknown model kind '" + name + "' (expected sir or irsir)");
}

void SirParams::validate() const {
    if (!(beta >= 0) || !(gamma >= 0) || !(s0 > 0) || !(i0 > 0) || !(r0 >= 0))
        throw DataError("invalid SIR parameters: need beta,gamma >= 0, S0,I0 > 0, R0 >= 0");
    if (!std::isfinite(total())) throw DataError("non-finite SIR population");
}

void IrSirParams::validate() const {
    if (!(beta >= 0) || !(nu >= 0) || !(s0 > 0) || !(i0 > 0) || !(r0 >= 0))
        throw DataError("invalid irSIR parameters: need beta,nu >= 0, S0,I0 > 0, R0 >= 0");
    if (!std::isfinite(total())) throw DataError("non-finite irSIR population");
}

ode::StateVector sir_rhs(const ode::StateVector& y, const SirParams& p) {
    double n = p.total();
    double infection = p.beta * y.i * y.s / n;
    double recovery = p.gamma * y.i;
    return {-infection, infection - recovery, recovery};
}

ode::StateVector irsir_rhs(const ode::StateVector& y, const IrSirParams& p) {
    double n = p.total();
    double infection = p.beta * y.i * y.s / n;
    double recovery = p.nu * y.i * y.r / n;
    return {-infection, infection - recovery, recovery};
}

ode::StateVector initial_state(const SirParams& p) { return {p.s0, p.i0, p.r0}; }
ode::StateVector initial_state(const IrSirParams& p) { return {p.s0, p.i0, p.r0}; }

ode::Rhs make_rhs(const SirParams& p) {
    return [p](double, const ode::StateVector& y) { return sir_rhs(y, p); };
}

ode::Rhs make_rhs(const IrSirParams& p) {
    return [p](double, const ode::StateVector& y) { return irsir_rhs(y, p); };
}

bool sir_immunization_satisfied(const SirParams& p) {
    if (p.beta == 0.0) return true;
    return p.s0 / p.total() < p.gamma / p.beta;
}

bool irsir_immunization_satisfied(const IrSirParams& p) {
    if (p.r0 == 0.0) return false;
    if (p.beta == 0.0) return true;
    return p.s0 / p.r0 < p.nu / p.beta;
}

}  // namespace epifit::models
