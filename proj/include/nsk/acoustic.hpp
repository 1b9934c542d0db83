/// @file acoustic.hpp
/// @brief Exact Fourier-multiplier solver for the homogeneous capillary
///        acoustic system
///
///   ∂t s + (1/ε) div ∇Φ = 0,   ∂t ∇Φ + (γ/ε) ∇(s − 2κ²ε²Δs) = 0.
///
/// Each mode k ≠ 0 rotates the symmetrized pair
///   σ̃ = √γ (1 + 2ε²κ²|k|²)^{1/2} ŝ,   m̃ = |k|⁻¹ i k·∇Φ̂
/// with angular frequency ω = √γ φ_ε(|k|). The mean and the Nyquist modes
/// (which have no odd-derivative representation) are frozen, and so is any
/// solenoidal part of the ∇Φ input.
#pragma once

#include <functional>
#include <optional>
#include <vector>

#include "nsk/field.hpp"
#include "nsk/fit.hpp"
#include "nsk/functionals.hpp"
#include "nsk/state.hpp"

namespace nsk {

struct AcousticState {
    ScalarField s;
    VectorField grad_phi;
    PhysParams params;
    double t = 0.0;
};

struct SymmetrizedState {
    ScalarField sigma;
    ScalarField m;
    /// Means removed by (−Δ)^{−1/2}: the mean of s and of each ∇Φ component.
    double mean_s = 0.0;
    std::vector<double> mean_grad_phi;
};

/// φ_ε(|k|) = |k|/ε · √(1 + 2ε²κ²|k|²). Throws DomainError unless ε > 0, κ ≥ 0.
double multiplier_phi(double kmag, double epsilon, double kappa);
/// dφ_ε/d|k|.
double multiplier_phi_derivative(double kmag, double epsilon, double kappa);
/// √γ φ_ε(|k|).
double acoustic_frequency(double kmag, const PhysParams& p);

/// Precomputes the spectrum of an initial state so that evaluation at many
/// times costs one multiply and d + 1 inverse transforms each.
class AcousticPropagator {
public:
    explicit AcousticPropagator(const AcousticState& initial);

    AcousticState at(double t) const;
    /// Time derivatives (∂t s, ∂t ∇Φ) at time t.
    std::pair<ScalarField, VectorField> time_derivative(double t) const;
    /// ŝ(t) only (spectral), used by the density-only consumers.
    Spectrum s_hat(double t) const;
    const AcousticState& initial() const { return init_; }

private:
    void rotate(double t, Spectrum& s, SpectralVector& g, bool derivative) const;

    AcousticState init_;
    Spectrum s0_;
    SpectralVector g0_;
    std::vector<double> omega_;
    std::vector<double> weight_;  // √γ (1 + 2ε²κ²|k|²)^{1/2}
};

/// state evolved by t (any sign).
AcousticState propagate(const AcousticState& state, double t);

SymmetrizedState symmetrize(const AcousticState& state);
/// Rebuilds (s, ∇Φ); the means stored in the symmetrized state are restored.
/// Nyquist modes of m̃ are dropped in both directions.
AcousticState desymmetrize(const SymmetrizedState& sym, const PhysParams& params, double t = 0.0);

/// ‖σ̃‖² + ‖∇Φ‖² (the quantity the group conserves).
double acoustic_energy(const AcousticState& state);

/// Relative residual of ∂²t s = (γ/ε²) Δ(1 − 2ε²κ²Δ) s with ∂²t s taken by a
/// central difference of the propagated states at t − Δt, t, t + Δt. The
/// operator side omits the frozen Nyquist modes. γ = 1 gives the
/// density-fluctuation equation verbatim.
double dispersion_residual(const AcousticState& state, double t, double dt);

struct DecayRow {
    double epsilon = 0.0;
    double horizon = 0.0;
    double norm = 0.0;
};

struct DecayExperiment {
    std::vector<DecayRow> rows;
    RateFit fit;
    double alpha_max = 0.0;  ///< 3D ceiling or 2D s/3
};

struct DecayConfig {
    NormSpec spec;
    /// Time horizon per ε. Must lie within the wave-escape window.
    std::function<double(double)> horizon;
    int time_samples = 41;
    /// 2D only: θ of the admissibility condition.
    std::optional<double> theta;
};

/// Space-time norm of the evolved pair on the window for each ε and the
/// log-log slope of norm versus ε. Rejects non-admissible (p, q) with a
/// ConfigError that reports α_max.
DecayExperiment strichartz_decay_experiment(const std::function<AcousticState(double)>& family,
                                            const std::vector<double>& epsilons, const DecayConfig& config);

}  // namespace nsk
