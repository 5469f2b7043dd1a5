#pragma once

#include <string>

#include "epifit/ode.hpp"

namespace epifit::models {

enum class ModelKind { sir, irsir };

std::string to_string(ModelKind kind);
ModelKind model_kind_from_string(const std::string& name);

/// SIR parameters. Fits conventionally fix r0 = 0: its magnitude only
/// contributes to N, so it is a redundant degree of freedom.
struct SirParams {
    double beta = 0.0;   // infection rate, 1/week
    double gamma = 0.0;  // recovery rate, 1/week
    double s0 = 0.0;
    double i0 = 0.0;
    double r0 = 0.0;

    double total() const { return s0 + i0 + r0; }
    void validate() const;
};

/// irSIR parameters: recovery requires contact with the recovered
/// compartment, so r0's magnitude matters. Fitted values are always > 0;
/// r0 == 0 is accepted for trajectory studies (recovery frozen).
struct IrSirParams {
    double beta = 0.0;  // infection rate, 1/week
    double nu = 0.0;    // infectious recovery rate, 1/week
    double s0 = 0.0;
    double i0 = 0.0;
    double r0 = 0.0;

    double total() const { return s0 + i0 + r0; }
    void validate() const;
};

/// d/dt (S, I, R) = (-bIS/N, bIS/N - gI, gI). N comes from the parameter
/// bundle, never from the state. Components sum to zero.
ode::StateVector sir_rhs(const ode::StateVector& y, const SirParams& p);

/// d/dt (S, I, R) = (-bIS/N, bIS/N - vIR/N, vIR/N).
ode::StateVector irsir_rhs(const ode::StateVector& y, const IrSirParams& p);

ode::StateVector initial_state(const SirParams& p);
ode::StateVector initial_state(const IrSirParams& p);

ode::Rhs make_rhs(const SirParams& p);
ode::Rhs make_rhs(const IrSirParams& p);

/// True iff S0/N < gamma/beta (strict): I can then never increase.
/// beta == 0 counts as satisfied (I only decays).
bool sir_immunization_satisfied(const SirParams& p);

/// True iff S0/R0 < nu/beta (strict). R0 == 0 is never immunized: with no
/// recovered seed, I can only grow. beta == 0 with R0 > 0 counts as
/// satisfied.
bool irsir_immunization_satisfied(const IrSirParams& p);

}  // namespace epifit::models
