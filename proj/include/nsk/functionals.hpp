/// @file functionals.hpp
/// @brief Scalar diagnostics: energies, entropies, norms, exponent algebra,
///        relative energy and its five-term budget.
///
/// Every spatial integral is the uniform-grid quadrature mean × volume, which
/// is spectrally accurate for smooth periodic integrands. Energies carry the
/// internal-energy term as H(ϱ)/ε², consistent with the ∇p/ε² scaling of the
/// momentum equation; at ε = 1 this is the unscaled form.
#pragma once

#include <array>
#include <optional>
#include <span>
#include <vector>

#include "nsk/field.hpp"
#include "nsk/state.hpp"

namespace nsk {

// --- internal energy -------------------------------------------------------

/// H(ϱ) = (ϱ^γ − 1 − γ(ϱ − 1)) / (γ − 1).
double internal_energy_H(double rho, double gamma);
double internal_energy_H_prime(double rho, double gamma);
double internal_energy_H_second(double rho, double gamma);
/// p(ϱ) = ϱ^γ.
double pressure_law(double rho, double gamma);

/// Pointwise H. Throws DomainError naming the offending minimum if ϱ ≤ 0.
ScalarField internal_energy_H(const ScalarField& rho, double gamma);

/// Throws DomainError if min ϱ ≤ 0.
void require_positive(const ScalarField& rho, const char* what);

// --- energies ---------------------------------------------------------------

struct EnergyParts {
    double kinetic = 0.0;
    double internal = 0.0;  ///< ∫H(ϱ)/ε²
    double capillary = 0.0; ///< κ²∫|∇ϱ|²
    double total() const { return kinetic + internal + capillary; }
};

EnergyParts energy_parts(const FluidState& state);
/// E = ∫ ϱ|u|²/2 + H(ϱ)/ε² + κ²|∇ϱ|².
double total_energy(const FluidState& state);
/// B = ∫ ½|√ϱ u + 2ν∇√ϱ|² + κ²|∇ϱ|² + H(ϱ)/ε².
double bd_entropy(const FluidState& state);

struct OrliczBound {
    double value = 0.0;
    double ratio_to_eps2 = 0.0;
};

/// ∫ |ϱ−1|² 1{|ϱ−1| ≤ ½} + |ϱ−1|^γ 1{|ϱ−1| > ½} and its ratio to ε².
OrliczBound orlicz_bound(const ScalarField& rho, double gamma, double epsilon);

// --- exponent algebra -----------------------------------------------------

/// β(q) = 4/5 (1 − 3(½ − 1/q)), for 2 ≤ q < 6.
double beta_exponent(double q);

struct Admissibility {
    bool admissible = false;
    double alpha_max = 0.0;  ///< 3D: ½(½ − 1/q)
    double s0 = 0.0;         ///< 2D: 3β(r)θ with β(r) = ½ − 1/r
};

/// 3D: Schrödinger admissible if 2 ≤ p,q ≤ ∞ and 2/p + 3/q = 3/2.
/// 2D: (p,q) must be θ'-admissible with θ' = (2−θ)/2 and θ in [0,1).
/// Infinite exponents are passed as std::numeric_limits<double>::infinity().
Admissibility admissible_check(double p, double q, int dim, std::optional<double> theta = {});

/// 2 ≤ q, r ≤ ∞, 1/q + θ/r = θ/2 and (q, r, θ) ≠ (2, ∞, 1).
bool theta_admissible(double q, double r, double theta);

// --- norms ------------------------------------------------------------------

/// Axis-aligned observation sub-box [lo_j, hi_j) in physical coordinates.
struct Window {
    std::array<double, 3> lo{0.0, 0.0, 0.0};
    std::array<double, 3> hi{0.0, 0.0, 0.0};

    /// Centered sub-box of side fraction·L.
    static Window centered(const Grid& grid, double fraction);
    bool contains(const std::array<double, 3>& x, int dim) const;
    /// Distance from the sub-box to the box boundary (smallest gap over axes).
    double distance_to_boundary(const Grid& grid) const;
    void validate(const Grid& grid) const;
};

/// Time exponent p, space exponent q, smoothness s, optional window K.
struct NormSpec {
    double p = 2.0;
    double q = 2.0;
    double s = 0.0;
    std::optional<Window> window;
};

/// Discrete L^q norm (q = ∞ is the grid max), optionally restricted to a window.
double lebesgue_norm(const ScalarField& f, double q, const std::optional<Window>& window = {});
/// Pointwise Euclidean magnitude of the components, then L^q.
double lebesgue_norm(const VectorField& v, double q, const std::optional<Window>& window = {});
/// ‖(f, v)‖ for a scalar/vector pair, pointwise magnitude over all components.
double lebesgue_norm(const ScalarField& f, const VectorField& v, double q,
                     const std::optional<Window>& window = {});

/// W^{s,q} as the L^q norm of the Bessel-filtered field.
double sobolev_norm(const ScalarField& f, double s, double q, const std::optional<Window>& window = {});
double sobolev_norm(const VectorField& v, double s, double q, const std::optional<Window>& window = {});

/// (∫₀^T g(t)^p dt)^{1/p} by composite trapezoid over uniformly spaced samples;
/// p = ∞ is the max. Throws InsufficientData with fewer than two samples and
/// ConfigError when spacing is not uniform.
double strichartz_norm(std::span<const double> times, std::span<const double> spatial_norms, double p);

/// Strichartz norm of a scalar/vector trajectory per NormSpec.
double strichartz_norm(std::span<const double> times, const std::vector<ScalarField>& s,
                       const std::vector<VectorField>& v, const NormSpec& spec);

// --- relative energy ----------------------------------------------------------

struct RelativeEnergyParts {
    double kinetic = 0.0;    ///< ½∫ϱ|u − U|²
    double capillary = 0.0;  ///< κ²∫|∇ϱ − ∇r|²
    double internal = 0.0;   ///< ε⁻²∫ H(ϱ) − H(r) − H′(r)(ϱ − r)
    double total() const { return kinetic + capillary + internal; }
};

RelativeEnergyParts relative_energy_parts(const FluidState& state, const ScalarField& r,
                                          const VectorField& U, const PhysParams& params);
double relative_energy(const FluidState& state, const ScalarField& r, const VectorField& U,
                       const PhysParams& params);

/// One checkpoint of the budget: the solution, the test pair and (optionally)
/// the test pair's time derivatives.
struct BudgetSample {
    double t = 0.0;
    ScalarField rho;
    VectorField m;
    ScalarField r;
    VectorField U;
    std::optional<ScalarField> dt_r;
    std::optional<VectorField> dt_U;
};

/// Cumulative budget at one checkpoint τ.
struct BudgetRow {
    double t = 0.0;
    std::array<double, 5> I{};        ///< I₁ … I₅ over [0, τ]
    double relative_energy = 0.0;     ///< E(τ)
    double dissipation = 0.0;         ///< ν∫∫ϱ|D(u)|²
    double lhs = 0.0;                 ///< E(τ) − E(0) + ν∫∫ϱ|D(u)|²
    double rhs = 0.0;                 ///< ΣI_j
    double slack() const { return rhs - lhs; }
    /// lhs + ν∫∫ϱ|D(u)|² − rhs: zero for exact smooth solutions.
    double identity_defect() const { return lhs + dissipation - rhs; }
};

/// Instantaneous integrands of I₁ … I₅ and of ν∫ϱ|D(u)|² at one sample.
struct BudgetIntegrands {
    std::array<double, 5> I{};
    double dissipation = 0.0;
    double relative_energy = 0.0;
};

BudgetIntegrands budget_integrands(const BudgetSample& sample, const PhysParams& params);

/// Evaluate the budget at every checkpoint. Missing time derivatives are
/// filled by second-order finite differences (needs ≥ 3 samples).
std::vector<BudgetRow> rei_budget(std::vector<BudgetSample> samples, const PhysParams& params);

/// Accumulates budget integrands one sample at a time (trapezoid in time).
class BudgetAccumulator {
public:
    void add(double t, const BudgetIntegrands& in);
    const std::vector<BudgetRow>& rows() const { return rows_; }

private:
    std::vector<BudgetRow> rows_;
    BudgetIntegrands last_{};
    double last_t_ = 0.0;
    double e0_ = 0.0;
};

// --- support inequality (2D) -------------------------------------------------

struct SupportCheck {
    double lhs = 0.0;  ///< ‖f‖_{L^p}
    double rhs = 0.0;  ///< ‖∇f‖_{L²} · |supp f|^{1/p}
    bool holds = false;
};

/// Support measured as {|f| > 1e−14}.
SupportCheck support_inequality_check(const ScalarField& f, double p);

/// sup over a, b in [lo, hi] of |H(a) − H(b) − H′(b)(a − b)| / |a − b|²,
/// measured on a uniform sample grid.
double measure_h_quadratic_constant(double gamma, double lo, double hi, int samples = 200);

}  // namespace nsk
