/// @file euler.hpp
/// @brief Pseudo-spectral incompressible Euler solver on the periodic box.
///
/// 2D advances the vorticity ω = ∂x u₂ − ∂y u₁ by ∂t ω + u·∇ω = 0 and rebuilds
/// u from the stream function (mean velocity kept). 3D advances u in rotation
/// form ∂t u = P(u × ω). Both use classical RK4 with dealiased products.
#pragma once

#include "nsk/field.hpp"

namespace nsk {

struct EulerState {
    VectorField u;
    ScalarField pi;  ///< pressure, zero mean
    double t = 0.0;
};

/// Leray projection of u0 plus the matching pressure.
EulerState project_initial(const VectorField& u0);

/// Dealiased convective term u·∇u.
VectorField convective_term(const VectorField& u);
/// Π solving ΔΠ = −div(u·∇u), zero mean.
ScalarField euler_pressure(const VectorField& u);
/// L² norm of ΔΠ + div(u·∇u).
double pressure_residual(const EulerState& state);
/// ∂t u = −P(u·∇u).
VectorField euler_time_derivative(const VectorField& u);

/// Δt · Σ_j max|u_j| / Δx.
double euler_courant(const VectorField& u, double dt);

/// One RK4 step. Throws NumericalAbort when the Courant number exceeds
/// `courant_abort` or the result is not finite. In 2D the Nyquist modes of
/// u, which carry no vorticity, are dropped.
EulerState euler_step(const EulerState& state, double dt, double courant_abort = 0.9);

double kinetic_energy(const VectorField& u);
/// ½∫ω², 2D only.
double enstrophy(const VectorField& u);
/// ‖div u‖ / ‖u‖ (0 for u = 0).
double divergence_ratio(const VectorField& u);

}  // namespace nsk
