/// @file harness.hpp
/// @brief Ill-prepared data families, the Euler + acoustic test pair, and the
///        ε-sweep that measures the low-Mach limit.
#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "nsk/acoustic.hpp"
#include "nsk/euler.hpp"
#include "nsk/fit.hpp"
#include "nsk/functionals.hpp"
#include "nsk/nsk.hpp"

namespace nsk {

/// Sharp spectral cutoff: keeps the modes with |k| ≤ 1/δ. Throws ConfigError
/// unless δ > 0.
ScalarField mollify(const ScalarField& f, double delta);
VectorField mollify(const VectorField& v, double delta);

/// Seeded smooth field: random Fourier coefficients on the modes with every
/// |n_j| ≤ nmax, scaled to max |f| = amp. Deterministic for a given seed.
ScalarField random_band_limited(const GridPtr& grid, unsigned long seed, int nmax, double amp);

/// Named initial profiles, centered in the box.
///
/// s profiles: "zero", "gaussian" (A·exp(−r²/2w²)), "random", and "spike".
/// "spike" is ε-dependent: ϱ⁰ − 1 = A h G(r/ρ) with ρ = w ε^{4/(6−γ)},
/// h = (ρ/w)^{−1/2} in 3D and ρ = w ε, h = 1 in 2D. It keeps ∫|∇ϱ⁰|² and
/// the Orlicz integral over ε² bounded while concentrating, so the
/// ‖ϱ⁰ − 1‖_{L²} rate of the initial-data lemma is attained. Its weak limit is 0.
///
/// u profiles: "zero", "vortex" (stream function U w G), "gradient"
/// (∇(U w G)), "vortex+gradient", "shear" (U sin(2πy/L) e_x), "random"
/// (projected random field).
struct DataFamily {
    std::string s_profile = "gaussian";
    std::string u_profile = "vortex+gradient";
    double width = 2.0;
    double amplitude = 1.0;    ///< A
    double u_amplitude = 1.0;  ///< U
    double delta = 0.25;       ///< mollification scale of the acoustic data
    /// σ⁰_ε = s⁰ + c√ε η_s and u⁰_ε = u⁰ + c√ε η_u with seeded smooth η.
    double perturbation = 0.0;
    unsigned long seed = 1;
    int random_modes = 3;

    void validate() const;
};

/// Rate exponent of ‖ϱ⁰ − 1‖_{L²}: 4/(6−γ) for 3D with γ < 2, else 1.
double initial_l2_rate(int dim, double gamma);

struct LemmaRow {
    double epsilon = 0.0;
    double rho_l2 = 0.0;        ///< ‖ϱ⁰ − 1‖_{L²}
    double rho_l2_ratio = 0.0;  ///< over ε^{initial_l2_rate}
    double sqrt_l2 = 0.0;       ///< ‖√ϱ⁰ − 1‖_{L²}
    double sqrt_l2_ratio = 0.0;
    double orlicz_ratio = 0.0;  ///< Orlicz integral over ε²
    double grad_l2 = 0.0;       ///< ‖∇ϱ⁰‖_{L²}
    double sigma_l2 = 0.0;      ///< ‖σ⁰_ε‖_{L²}
    double pointwise_sqrt_gap = 0.0;  ///< max(|√ϱ⁰ − 1| − |ϱ⁰ − 1|), ≤ 0
    /// (q, ‖ϱ⁰ − 1‖_{L^q} / ε^{rate(q)}) with rate β(q) in 3D, 2/q in 2D.
    std::vector<std::pair<double, double>> lq_ratios;
};

struct IllPrepared {
    FluidState state;        ///< ϱ⁰ = 1 + εσ⁰_ε, m⁰ = ϱ⁰u⁰_ε
    ScalarField sigma;       ///< σ⁰_ε
    ScalarField s_limit;     ///< s⁰
    VectorField u_limit;     ///< u⁰
    LemmaRow lemma;
};

/// Throws DomainError when min ϱ⁰ < rho_min (vacuum).
IllPrepared make_ill_prepared(const GridPtr& grid, const DataFamily& family, const PhysParams& params,
                              double rho_min = 0.05);

/// Acoustic data (s⁰_δ, ∇Φ⁰_δ) = (mollify(s⁰), mollify(Q u⁰)).
AcousticState acoustic_initial_data(const ScalarField& s_limit, const VectorField& u_limit, double delta,
                                    const PhysParams& params);

struct EulerSample {
    VectorField u;
    VectorField du;  ///< ∂t u
};

/// Euler reference sampled at nondecreasing times: advances RK4 on a node
/// spacing h and interpolates u by cubic Hermite between nodes (error O(h⁴)).
class EulerTracker {
public:
    EulerTracker(const EulerState& initial, double h);
    EulerSample at(double t);
    double node_spacing() const { return h_; }

private:
    struct Node {
        EulerState state;
        VectorField du;
    };
    Node make_node(EulerState st) const;

    double h_;
    Node a_, b_;
};

struct AnsatzPair {
    ScalarField r;
    VectorField U;
    ScalarField dt_r;
    VectorField dt_U;
    VectorField u_euler;
    AcousticState acoustic;  ///< (s, ∇Φ) at t
};

/// r = 1 + εs, U = u^E + ∇Φ, and their time derivatives (acoustic side exact).
AnsatzPair ansatz_pair(double t, const EulerSample& euler, const AcousticPropagator& acoustic);

/// Bundles the Euler tracker and the acoustic propagator of one data set.
class Ansatz {
public:
    Ansatz(const ScalarField& s_limit, const VectorField& u_limit, double delta, const PhysParams& params,
           double euler_spacing = 1e-2);
    /// Times must be nondecreasing across calls.
    AnsatzPair at(double t);
    const AcousticPropagator& acoustic() const { return acoustic_; }

private:
    AcousticPropagator acoustic_;
    EulerTracker euler_;
};

/// Largest time before waves leaving the data can cross dist:
/// dist / max_{0<|k|≤k_max} |ω′(|k|)| with ω = √γ φ_ε.
double wave_escape_window(double dist, const PhysParams& params, double k_max);
/// Same with dist = distance from the window to the box boundary.
double wave_escape_window(const Grid& grid, const Window& window, const PhysParams& params, double k_max);
/// Throws ConfigError (advising a larger box) when horizon > t_max.
void require_within_window(double horizon, double t_max);

/// E(0) against the three data distances of the convergence identity.
struct ConvergenceAudit {
    double initial_rel_energy = 0.0;
    double velocity_term = 0.0;   ///< ‖√ϱ⁰(u⁰_ε − u⁰)‖²
    double gradient_term = 0.0;   ///< ε²‖∇σ⁰_ε − ∇s⁰_δ‖²
    double density_term = 0.0;    ///< ‖σ⁰_ε − s⁰_δ‖²
    double constant = 0.0;        ///< E(0) / (sum of terms), 0 if the terms vanish
};

struct SweepConfig {
    int dim = 2;
    int n = 256;
    double length = 64.0;
    double gamma = 1.5;
    double kappa = 0.5;
    std::vector<double> epsilons{0.2, 0.1, 0.05, 0.025};
    double nu_coeff = 1.0;  ///< ν = nu_coeff·ε^{nu_power}
    double nu_power = 1.0;
    double t_end = 1.0;
    double dt_factor = 0.04;  ///< Δt = dt_factor·ε (then rounded to the end time)
    int checkpoint_stride = 10;
    double euler_spacing = 1e-2;
    double window_fraction = 0.25;
    double hs_index = 0.5;    ///< s of ‖ϱ − 1‖_{L^∞H^s}
    double strichartz_q = 6.0;
    std::optional<double> strichartz_p;  ///< default 2 in 3D, 4 in 2D
    DataFamily family;
    StepLimits limits;
    int threads = 1;

    void validate() const;
    double nu(double eps) const;
    double time_exponent() const;
};

struct SweepRow {
    double epsilon = 0.0;
    double nu = 0.0;
    double dt = 0.0;
    long steps = 0;
    bool ok = false;
    std::string error;

    double sup_rel_energy = 0.0;
    double final_rel_energy = 0.0;
    double l2loc_vel_err = 0.0;  ///< ‖√ϱu − u^E‖_{L²(0,T;L²(K))}
    double strichartz = 0.0;     ///< ‖(s,∇Φ)‖_{L^p(0,T*;L^q(K))}, T* = min(T, escape window)
    double strichartz_horizon = 0.0;
    double rho_hs = 0.0;         ///< ‖ϱ − 1‖_{L^∞(0,T;H^s)}
    double rei_slack = 0.0;      ///< min over τ > 0 of ΣI − lhs
    double max_identity_defect = 0.0;
    LemmaRow lemma;
    ConvergenceAudit audit;
    std::vector<BudgetRow> checkpoints;
};

struct MetricFit {
    std::string metric;
    RateFit fit;
    std::vector<std::pair<double, double>> points;
};

struct SweepResult {
    std::vector<SweepRow> rows;  ///< decreasing ε
    std::vector<MetricFit> fits;
    int failures = 0;
};

/// One sweep member.
SweepRow run_member(const SweepConfig& config, double epsilon);

/// All members (in parallel up to config.threads); failed members are kept
/// with ok = false and excluded from the fits.
SweepResult run_sweep(const SweepConfig& config);

/// NSK_THREADS from the environment (default 1, at least 1).
int threads_from_env();

}  // namespace nsk
