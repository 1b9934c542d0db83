#include "nsk/acoustic.hpp"

#include <cmath>
#include <sstream>

#include "nsk/errors.hpp"
#include "nsk/spectral.hpp"

namespace nsk {

namespace {

const Complex kI(0.0, 1.0);

bool moves(const Grid& g, std::size_t s) { return s != 0 && !g.is_nyquist(s) && g.k2(s) > 0.0; }

}  // namespace

double multiplier_phi(double kmag, double epsilon, double kappa) {
    if (!(epsilon > 0.0)) throw DomainError("multiplier_phi: epsilon must be > 0");
    if (!(kappa >= 0.0)) throw DomainError("multiplier_phi: kappa must be >= 0");
    const double k = std::abs(kmag);
    return k / epsilon * std::sqrt(1.0 + 2.0 * epsilon * epsilon * kappa * kappa * k * k);
}

double multiplier_phi_derivative(double kmag, double epsilon, double kappa) {
    if (!(epsilon > 0.0)) throw DomainError("multiplier_phi: epsilon must be > 0");
    const double c = 2.0 * epsilon * epsilon * kappa * kappa;
    const double k = std::abs(kmag);
    return (1.0 + 2.0 * c * k * k) / (epsilon * std::sqrt(1.0 + c * k * k));
}

double acoustic_frequency(double kmag, const PhysParams& p) {
    return std::sqrt(p.gamma) * multiplier_phi(kmag, p.epsilon, p.kappa);
}

AcousticPropagator::AcousticPropagator(const AcousticState& initial)
    : init_(initial), s0_(forward(initial.s)), g0_(forward(initial.grad_phi)) {
    const Grid& g = initial.s.grid();
    require_same_grid(g, initial.grad_phi.grid(), "acoustic state");
    const auto& p = initial.params;
    if (!(p.epsilon > 0.0)) throw DomainError("acoustic: epsilon must be > 0");
    omega_.resize(g.spectral_size());
    weight_.resize(g.spectral_size());
    for (std::size_t s = 0; s < g.spectral_size(); ++s) {
        omega_[s] = acoustic_frequency(g.kmag(s), p);
        weight_[s] = std::sqrt(p.gamma * (1.0 + 2.0 * p.epsilon * p.epsilon * p.kappa * p.kappa * g.k2(s)));
    }
}

void AcousticPropagator::rotate(double t, Spectrum& sh, SpectralVector& gh, bool derivative) const {
    const Grid& g = init_.s.grid();
    const int d = g.dim();
    for (std::size_t s = 0; s < g.spectral_size(); ++s) {
        if (!moves(g, s)) {
            if (derivative) {
                sh[s] = 0.0;
                for (int j = 0; j < d; ++j) gh[static_cast<std::size_t>(j)][s] = 0.0;
            }
            continue;
        }
        const auto& k = g.k(s);
        const double km = g.kmag(s);
        Complex kg = 0.0;
        for (int j = 0; j < d; ++j) kg += k[static_cast<std::size_t>(j)] * g0_[static_cast<std::size_t>(j)][s];
        const Complex m0 = kI * kg / km;
        const Complex sig0 = weight_[s] * s0_[s];
        const double c = std::cos(omega_[s] * t), sn = std::sin(omega_[s] * t);
        Complex sig = c * sig0 - sn * m0;
        Complex m = sn * sig0 + c * m0;
        if (derivative) {
            const Complex dsig = -omega_[s] * m;
            const Complex dm = omega_[s] * sig;
            sh[s] = dsig / weight_[s];
            for (int j = 0; j < d; ++j) {
                gh[static_cast<std::size_t>(j)][s] = -kI * (k[static_cast<std::size_t>(j)] / km) * dm;
            }
        } else {
            sh[s] = sig / weight_[s];
            const Complex dm = m - m0;
            for (int j = 0; j < d; ++j) {
                gh[static_cast<std::size_t>(j)][s] += -kI * (k[static_cast<std::size_t>(j)] / km) * dm;
            }
        }
    }
}

AcousticState AcousticPropagator::at(double t) const {
    Spectrum sh = s0_;
    SpectralVector gh = g0_;
    rotate(t, sh, gh, false);
    return AcousticState{inverse(sh), inverse(gh), init_.params, init_.t + t};
}

std::pair<ScalarField, VectorField> AcousticPropagator::time_derivative(double t) const {
    Spectrum sh = s0_;
    SpectralVector gh = g0_;
    rotate(t, sh, gh, true);
    return {inverse(sh), inverse(gh)};
}

Spectrum AcousticPropagator::s_hat(double t) const {
    Spectrum sh = s0_;
    SpectralVector gh = g0_;
    rotate(t, sh, gh, false);
    return sh;
}

AcousticState propagate(const AcousticState& state, double t) { return AcousticPropagator(state).at(t); }

SymmetrizedState symmetrize(const AcousticState& state) {
    const Grid& g = state.s.grid();
    const auto& p = state.params;
    Spectrum sh = forward(state.s);
    SpectralVector gh = forward(state.grad_phi);
    Spectrum sig(state.s.grid_ptr()), m(state.s.grid_ptr());
    for (std::size_t s = 0; s < g.spectral_size(); ++s) {
        sig[s] = std::sqrt(p.gamma * (1.0 + 2.0 * p.epsilon * p.epsilon * p.kappa * p.kappa * g.k2(s))) * sh[s];
        if (!moves(g, s)) continue;
        Complex kg = 0.0;
        const auto& k = g.k(s);
        for (int j = 0; j < g.dim(); ++j) kg += k[static_cast<std::size_t>(j)] * gh[static_cast<std::size_t>(j)][s];
        m[s] = kI * kg / g.kmag(s);
    }
    SymmetrizedState out{inverse(sig), inverse(m), state.s.mean(), {}};
    for (int j = 0; j < g.dim(); ++j) out.mean_grad_phi.push_back(state.grad_phi[j].mean());
    return out;
}

AcousticState desymmetrize(const SymmetrizedState& sym, const PhysParams& p, double t) {
    const Grid& g = sym.sigma.grid();
    const int d = g.dim();
    Spectrum sig = forward(sym.sigma);
    Spectrum m = forward(sym.m);
    Spectrum sh(sym.sigma.grid_ptr());
    SpectralVector gh(static_cast<std::size_t>(d), Spectrum(sym.sigma.grid_ptr()));
    for (std::size_t s = 0; s < g.spectral_size(); ++s) {
        sh[s] = sig[s] / std::sqrt(p.gamma * (1.0 + 2.0 * p.epsilon * p.epsilon * p.kappa * p.kappa * g.k2(s)));
        if (!moves(g, s)) continue;
        const auto& k = g.k(s);
        for (int j = 0; j < d; ++j) {
            gh[static_cast<std::size_t>(j)][s] = -kI * (k[static_cast<std::size_t>(j)] / g.kmag(s)) * m[s];
        }
    }
    const double n = static_cast<double>(g.size());
    sh[0] = sym.mean_s * n;
    for (int j = 0; j < d && static_cast<std::size_t>(j) < sym.mean_grad_phi.size(); ++j) {
        gh[static_cast<std::size_t>(j)][0] = sym.mean_grad_phi[static_cast<std::size_t>(j)] * n;
    }
    return AcousticState{inverse(sh), inverse(gh), p, t};
}

double acoustic_energy(const AcousticState& state) {
    const Grid& g = state.s.grid();
    const auto& p = state.params;
    Spectrum sh = forward(state.s);
    for (std::size_t s = 0; s < g.spectral_size(); ++s) {
        sh[s] *= std::sqrt(p.gamma * (1.0 + 2.0 * p.epsilon * p.epsilon * p.kappa * p.kappa * g.k2(s)));
    }
    const double a = spectral_l2_norm(sh);
    return a * a + state.grad_phi.norm2().integral();
}

double dispersion_residual(const AcousticState& state, double t, double dt) {
    if (!(dt > 0.0)) throw ConfigError("dispersion_residual: dt must be > 0");
    const AcousticPropagator prop(state);
    const Spectrum sm = prop.s_hat(t - dt), s0 = prop.s_hat(t), sp = prop.s_hat(t + dt);
    const Grid& g = state.s.grid();
    const auto& p = state.params;
    Spectrum res(state.s.grid_ptr()), op(state.s.grid_ptr());
    for (std::size_t s = 0; s < g.spectral_size(); ++s) {
        const double k2 = g.k2(s);
        if (moves(g, s)) {
            op[s] = -(p.gamma / (p.epsilon * p.epsilon)) * k2 * (1.0 + 2.0 * p.epsilon * p.epsilon * p.kappa * p.kappa * k2) * s0[s];
        }
        res[s] = (sp[s] - 2.0 * s0[s] + sm[s]) / (dt * dt) - op[s];
    }
    const double on = spectral_l2_norm(op);
    const double rn = spectral_l2_norm(res);
    if (on == 0.0) return rn;
    return rn / on;
}

DecayExperiment strichartz_decay_experiment(const std::function<AcousticState(double)>& family,
                                            const std::vector<double>& epsilons, const DecayConfig& cfg) {
    DecayExperiment out;
    const NormSpec& spec = cfg.spec;
    if (epsilons.empty()) throw InsufficientData("decay experiment: empty epsilon list");
    if (!cfg.horizon) throw ConfigError("decay experiment: horizon not set");
    if (cfg.time_samples < 2) throw ConfigError("decay experiment: need at least two time samples");
    for (double eps : epsilons) {
        AcousticState init = family(eps);
        const int dim = init.s.grid().dim();
        if (out.rows.empty()) {
            const Admissibility a = admissible_check(spec.p, spec.q, dim, cfg.theta);
            const double amax = dim == 3 ? 0.5 * (0.5 - (std::isinf(spec.q) ? 0.0 : 1.0 / spec.q)) : a.s0 / 3.0;
            if (!a.admissible) {
                std::ostringstream os;
                os << "pair (p, q) = (" << spec.p << ", " << spec.q << ") is not admissible in " << dim
                   << "D; alpha_max would be " << amax;
                throw ConfigError(os.str());
            }
            out.alpha_max = amax;
        }
        const double T = cfg.horizon(eps);
        if (!(T > 0.0)) throw ConfigError("decay experiment: horizon must be > 0");
        const AcousticPropagator prop(init);
        std::vector<double> times, g;
        for (int i = 0; i < cfg.time_samples; ++i) {
            const double t = T * i / (cfg.time_samples - 1);
            const AcousticState st = prop.at(t);
            times.push_back(t);
            if (spec.s == 0.0) {
                g.push_back(lebesgue_norm(st.s, st.grad_phi, spec.q, spec.window));
            } else {
                VectorField w(st.grad_phi.grid_ptr());
                for (int j = 0; j < w.dim(); ++j) w[j] = bessel_filter(st.grad_phi[j], spec.s);
                g.push_back(lebesgue_norm(bessel_filter(st.s, spec.s), w, spec.q, spec.window));
            }
        }
        out.rows.push_back({eps, T, strichartz_norm(times, g, spec.p)});
    }
    std::vector<std::pair<double, double>> pts;
    for (const auto& r : out.rows) pts.emplace_back(r.epsilon, r.norm);
    if (pts.size() >= 3) out.fit = fit_rate(pts);
    return out;
}

}  // namespace nsk
