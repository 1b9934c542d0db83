/// @file state.hpp
/// @brief Physical parameters and the compressible fluid state.
#pragma once

#include "nsk/field.hpp"

namespace nsk {

/// Mach number ε, viscosity ν, capillarity κ, adiabatic exponent γ.
struct PhysParams {
    double epsilon = 0.1;
    double nu = 0.0;
    double kappa = 0.5;
    double gamma = 2.0;

    /// Throws ConfigError unless ε > 0, ν >= 0, κ >= 0, γ > 1.
    void validate() const;
};

/// Density and momentum m = ϱu of the Navier–Stokes–Korteweg system.
struct FluidState {
    ScalarField rho;
    VectorField m;
    PhysParams params;
    double t = 0.0;

    FluidState(ScalarField rho_, VectorField m_, PhysParams params_, double t_ = 0.0);

    /// Build from density and velocity.
    static FluidState from_velocity(ScalarField rho, const VectorField& u, PhysParams params,
                                    double t = 0.0);

    /// u = m / ϱ. Throws DomainError on nonpositive density.
    VectorField velocity() const;
    const Grid& grid() const { return rho.grid(); }
};

}  // namespace nsk
