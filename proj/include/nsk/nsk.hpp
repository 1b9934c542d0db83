/// @file nsk.hpp
/// @brief Pseudo-spectral time integration of the scaled Navier–Stokes–Korteweg
///        system
///
///   ∂t ϱ + div m = 0,
///   ∂t m + div(m ⊗ u) + ∇p(ϱ)/ε² − 2ν div(ϱ D(u)) − 2κ² ϱ∇Δϱ = 0,
///
/// with m = ϱu and p(ϱ) = ϱ^γ on a periodic box.
///
/// The linearization around (1, 0) is integrated exactly per mode (its
/// longitudinal part rotates with Ω² = |k|²(γ/ε² + 2κ²|k|²)); the remainder is
/// advanced by a three-stage strong-stability-preserving Runge–Kutta scheme in
/// integrating-factor form. The state is kept inside the 2/3 dealiasing band,
/// and every nonlinear term is truncated to that band.
#pragma once

#include <functional>
#include <optional>
#include <vector>

#include "nsk/field.hpp"
#include "nsk/state.hpp"

namespace nsk {

/// p(ϱ) = ϱ^γ. Throws DomainError on ϱ ≤ 0.
ScalarField pressure(const ScalarField& rho, double gamma);

/// 2κ² ϱ∇Δϱ, product dealiased.
VectorField korteweg_force(const ScalarField& rho, double kappa);

/// Row-major d×d components of 2κ²K with
/// K = (ϱΔϱ + ½|∇ϱ|²) I − ∇ϱ ⊗ ∇ϱ, so that div(2κ²K) = 2κ²ϱ∇Δϱ.
std::vector<ScalarField> korteweg_tensor(const ScalarField& rho, double kappa);

/// Row divergence of a row-major d×d tensor, (div T)_i = Σ_j ∂_j T_ij.
VectorField tensor_divergence(const std::vector<ScalarField>& t);

/// Full right-hand side ∂t m = −div(m⊗u) − ∇p/ε² + 2ν div(ϱD(u)) + 2κ²ϱ∇Δϱ,
/// every product dealiased.
VectorField momentum_rhs(const FluidState& state);

/// Angular frequency of the exact linearization at wavenumber |k|.
double nsk_linear_frequency(double kmag, const PhysParams& p);

struct StepLimits {
    double cfl = 0.4;        ///< target Courant number used to pick Δt
    double cfl_abort = 1.2;  ///< a step whose Courant number exceeds this aborts
    double rho_min = 0.05;
};

/// Courant rate of the explicit remainder: Δt · rate is the Courant number.
double explicit_rate(const FluidState& state);

/// Instantaneous dissipation rates at one state.
struct DissipationRates {
    double viscous = 0.0;      ///< 2ν∫ϱ|D(u)|²
    double antisym = 0.0;      ///< 2ν∫ϱ|A(u)|², A the antisymmetric part of ∇u
    double pressure_bd = 0.0;  ///< (8ν/γ²ε²)∫|∇ϱ^{γ/2}|²
    double capillary_bd = 0.0; ///< 4νκ²∫|Δϱ|²
};

DissipationRates dissipation_rates(const FluidState& state);

/// Stateful stepper: caches the linear propagator tables for the last Δt.
class NskStepper {
public:
    NskStepper(GridPtr grid, PhysParams params, StepLimits limits = {});

    /// Advance one step. Throws NumericalAbort on density-floor or Courant
    /// violation and on non-finite values.
    FluidState step(const FluidState& state, double dt);

    const PhysParams& params() const { return params_; }

private:
    struct Tables {
        double h = 0.0;
        std::vector<double> c, s;  // cos(Ωh), sin(Ωh)
    };
    struct SpecState {
        Spectrum rho;
        SpectralVector m;
    };

    const Tables& tables(double h);
    void apply_linear(SpecState& u, double h);
    SpectralVector nonlinear(const SpecState& u) const;
    void check(const FluidState& st, double dt) const;

    GridPtr grid_;
    PhysParams params_;
    StepLimits limits_;
    std::vector<double> omega_;
    std::vector<Tables> cache_;
};

/// Truncate ϱ and m to the 2/3 band (mean untouched).
FluidState band_limit(const FluidState& state);

/// One step with a fresh stepper.
FluidState step(const FluidState& state, double dt, const StepLimits& limits = {});

struct Snapshot {
    double t = 0.0;
    std::optional<FluidState> state;
    double energy = 0.0;
    double bd_entropy = 0.0;
    double mass = 0.0;
    /// Time integrals over [0, t] of the DissipationRates (trapezoid per step).
    DissipationRates integrated;
};

struct Trajectory {
    std::vector<Snapshot> snapshots;
    double dt = 0.0;
    long steps = 0;

    /// max over snapshots of |E(t) + 2ν∫∫ϱ|D(u)|² − E(0)| / E(0) (E(0) > 0).
    double energy_balance_drift() const;
    bool energy_monotone(double tol) const;
};

struct SimulationConfig {
    double t_end = 1.0;
    double dt = 0.0;  ///< 0 picks Δt from the Courant target of the initial state
    double dt_max = 1e-2;
    int stride = 1;   ///< snapshot every `stride` steps (plus the final time)
    bool keep_states = true;
    StepLimits limits;
    /// Called on the initial state and after every step.
    std::function<void(const FluidState&, long)> on_step;
};

/// Integrate from the (band-limited) initial state to t_end.
Trajectory simulate(const FluidState& initial, const SimulationConfig& config);

/// Δt used by simulate for the given initial state and config.
double choose_dt(const FluidState& initial, const SimulationConfig& config);

}  // namespace nsk
