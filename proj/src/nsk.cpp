#include "nsk/nsk.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "nsk/errors.hpp"
#include "nsk/functionals.hpp"
#include "nsk/spectral.hpp"

namespace nsk {

namespace {

const Complex kI(0.0, 1.0);

bool linear_mode(const Grid& g, std::size_t s) {
    return s != 0 && g.keeps_dealiased(s) && !g.is_nyquist(s) && g.k2(s) > 0.0;
}

ScalarField divide(const ScalarField& a, const ScalarField& b) {
    ScalarField out(a.grid_ptr());
    for (std::size_t i = 0; i < a.size(); ++i) out[i] = a[i] / b[i];
    return out;
}

bool all_finite(const ScalarField& f) {
    for (double v : f.values()) {
        if (!std::isfinite(v)) return false;
    }
    return true;
}

}  // namespace

ScalarField pressure(const ScalarField& rho, double gamma) {
    require_positive(rho, "pressure");
    return map(rho, [gamma](double r) { return std::pow(r, gamma); });
}

VectorField korteweg_force(const ScalarField& rho, double kappa) {
    const Spectrum rh = forward(rho);
    const VectorField glap = inverse(gradient(laplacian(rh)));
    VectorField out(rho.grid_ptr());
    for (int j = 0; j < out.dim(); ++j) {
        Spectrum c = forward(rho * glap[j]);
        dealias(c);
        out[j] = (2.0 * kappa * kappa) * inverse(c);
    }
    return out;
}

std::vector<ScalarField> korteweg_tensor(const ScalarField& rho, double kappa) {
    const int d = rho.grid().dim();
    const VectorField gr = gradient(rho);
    const ScalarField lap = laplacian(rho);
    const ScalarField diag = rho * lap + 0.5 * gr.norm2();
    std::vector<ScalarField> t;
    const double c = 2.0 * kappa * kappa;
    for (int i = 0; i < d; ++i) {
        for (int j = 0; j < d; ++j) {
            ScalarField e = (-1.0) * (gr[i] * gr[j]);
            if (i == j) e += diag;
            t.push_back(c * dealias(e));
        }
    }
    return t;
}

VectorField tensor_divergence(const std::vector<ScalarField>& t) {
    const auto& gp = t.front().grid_ptr();
    const int d = gp->dim();
    if (t.size() != static_cast<std::size_t>(d * d)) throw ConfigError("tensor_divergence: expected d*d components");
    VectorField out(gp);
    for (int i = 0; i < d; ++i) {
        SpectralVector row;
        for (int j = 0; j < d; ++j) row.push_back(forward(t[static_cast<std::size_t>(i * d + j)]));
        out[i] = inverse(divergence(row));
    }
    return out;
}

VectorField momentum_rhs(const FluidState& st) {
    const auto& p = st.params;
    const Grid& g = st.grid();
    const int d = g.dim();
    require_positive(st.rho, "momentum_rhs");
    const VectorField u = st.velocity();
    std::vector<VectorField> gu;
    for (int i = 0; i < d; ++i) gu.push_back(gradient(u[i]));
    SpectralVector out(static_cast<std::size_t>(d), Spectrum(st.rho.grid_ptr()));
    for (int i = 0; i < d; ++i) {
        SpectralVector row;
        for (int j = 0; j < d; ++j) {
            ScalarField tij = (-1.0) * (st.m[i] * u[j]);
            tij += (p.nu) * (st.rho * (gu[i][j] + gu[j][i]));
            row.push_back(forward(tij));
        }
        out[static_cast<std::size_t>(i)] = divergence(row);
    }
    const ScalarField pr = pressure(st.rho, p.gamma);
    const SpectralVector gp = gradient(forward(pr));
    const VectorField kf = korteweg_force(st.rho, p.kappa);
    VectorField res(st.rho.grid_ptr());
    for (int i = 0; i < d; ++i) {
        Spectrum c = out[static_cast<std::size_t>(i)];
        Spectrum q = gp[static_cast<std::size_t>(i)];
        q *= 1.0 / (p.epsilon * p.epsilon);
        c -= q;
        dealias(c);
        res[i] = inverse(c) + kf[i];
    }
    return res;
}

double nsk_linear_frequency(double kmag, const PhysParams& p) {
    const double k2 = kmag * kmag;
    return std::sqrt(k2 * (p.gamma / (p.epsilon * p.epsilon) + 2.0 * p.kappa * p.kappa * k2));
}

double explicit_rate(const FluidState& st) {
    const auto& p = st.params;
    const Grid& g = st.grid();
    const double k = g.dealiased_kmax() * std::sqrt(static_cast<double>(g.dim()));
    double umax = 0.0, dp = 0.0, dr = 0.0, rmax = 0.0;
    for (std::size_t i = 0; i < st.rho.size(); ++i) {
        const double r = st.rho[i];
        double u2 = 0.0;
        for (int j = 0; j < st.m.dim(); ++j) u2 += (st.m[j][i] / r) * (st.m[j][i] / r);
        umax = std::max(umax, std::sqrt(u2));
        dp = std::max(dp, std::abs(p.gamma * std::pow(r, p.gamma - 1.0) - p.gamma));
        dr = std::max(dr, std::abs(r - 1.0));
        rmax = std::max(rmax, r);
    }
    return k * umax + k * dp / (std::sqrt(p.gamma) * p.epsilon) + std::sqrt(2.0) * p.kappa * k * k * dr +
           2.0 * p.nu * k * k * rmax;
}

DissipationRates dissipation_rates(const FluidState& st) {
    const auto& p = st.params;
    DissipationRates r;
    const Grid& g = st.grid();
    const int d = g.dim();
    const double dv = g.cell_volume();
    if (p.nu == 0.0) return r;
    const VectorField u = st.velocity();
    std::vector<VectorField> gu;
    for (int i = 0; i < d; ++i) gu.push_back(gradient(u[i]));
    double sym = 0.0, anti = 0.0;
    for (std::size_t n = 0; n < g.size(); ++n) {
        double s2 = 0.0, a2 = 0.0;
        for (int i = 0; i < d; ++i) {
            for (int j = 0; j < d; ++j) {
                const double s = 0.5 * (gu[i][j][n] + gu[j][i][n]);
                const double a = 0.5 * (gu[i][j][n] - gu[j][i][n]);
                s2 += s * s;
                a2 += a * a;
            }
        }
        sym += st.rho[n] * s2;
        anti += st.rho[n] * a2;
    }
    r.viscous = 2.0 * p.nu * sym * dv;
    r.antisym = 2.0 * p.nu * anti * dv;
    const ScalarField rg = map(st.rho, [&](double x) { return std::pow(x, 0.5 * p.gamma); });
    r.pressure_bd = 8.0 * p.nu / (p.gamma * p.gamma * p.epsilon * p.epsilon) * gradient(rg).norm2().integral();
    const ScalarField lap = laplacian(st.rho);
    r.capillary_bd = 4.0 * p.nu * p.kappa * p.kappa * (lap * lap).integral();
    return r;
}

FluidState band_limit(const FluidState& st) {
    FluidState out = st;
    out.rho = dealias(st.rho);
    for (int j = 0; j < out.m.dim(); ++j) out.m[j] = dealias(st.m[j]);
    return out;
}

NskStepper::NskStepper(GridPtr grid, PhysParams params, StepLimits limits)
    : grid_(std::move(grid)), params_(params), limits_(limits) {
    params_.validate();
    omega_.resize(grid_->spectral_size());
    for (std::size_t s = 0; s < grid_->spectral_size(); ++s) omega_[s] = nsk_linear_frequency(grid_->kmag(s), params_);
}

const NskStepper::Tables& NskStepper::tables(double h) {
    for (const auto& t : cache_) {
        if (t.h == h) return t;
    }
    if (cache_.size() >= 6) cache_.erase(cache_.begin());
    Tables t;
    t.h = h;
    t.c.resize(omega_.size());
    t.s.resize(omega_.size());
    for (std::size_t i = 0; i < omega_.size(); ++i) {
        t.c[i] = std::cos(omega_[i] * h);
        t.s[i] = std::sin(omega_[i] * h);
    }
    cache_.push_back(std::move(t));
    return cache_.back();
}

void NskStepper::apply_linear(SpecState& u, double h) {
    const Tables& t = tables(h);
    const Grid& g = *grid_;
    const int d = g.dim();
    for (std::size_t s = 0; s < g.spectral_size(); ++s) {
        if (!linear_mode(g, s)) continue;
        const double km = g.kmag(s);
        const auto& k = g.k(s);
        Complex mu = 0.0;
        for (int j = 0; j < d; ++j) mu += k[static_cast<std::size_t>(j)] * u.m[static_cast<std::size_t>(j)][s];
        mu /= km;
        const Complex a = u.rho[s];
        const double w = omega_[s];
        const Complex a1 = t.c[s] * a - kI * (km / w) * t.s[s] * mu;
        const Complex mu1 = -kI * (w / km) * t.s[s] * a + t.c[s] * mu;
        u.rho[s] = a1;
        const Complex dmu = mu1 - mu;
        for (int j = 0; j < d; ++j) u.m[static_cast<std::size_t>(j)][s] += (k[static_cast<std::size_t>(j)] / km) * dmu;
    }
}

SpectralVector NskStepper::nonlinear(const SpecState& st) const {
    const auto& p = params_;
    const Grid& g = *grid_;
    const int d = g.dim();
    const ScalarField rho = inverse(st.rho);
    const VectorField m = inverse(st.m);
    if (!(rho.min() > 0.0)) {
        std::ostringstream os;
        os << "density became nonpositive inside a stage (min = " << rho.min() << ")";
        throw NumericalAbort(os.str());
    }
    VectorField u(grid_);
    for (int j = 0; j < d; ++j) u[j] = divide(m[j], rho);
    std::vector<VectorField> gu;
    for (int i = 0; i < d; ++i) gu.push_back(gradient(u[i]));

    SpectralVector out(static_cast<std::size_t>(d), Spectrum(grid_));
    for (int i = 0; i < d; ++i) {
        SpectralVector row;
        for (int j = 0; j < d; ++j) {
            ScalarField tij = (-1.0) * (m[i] * u[j]);
            if (p.nu != 0.0) tij += p.nu * (rho * (gu[i][j] + gu[j][i]));
            row.push_back(forward(tij));
        }
        out[static_cast<std::size_t>(i)] = divergence(row);
    }
    // ∇((γ − 1) H(ϱ)) / ε² is the pressure gradient minus its linear part.
    const ScalarField q = map(rho, [&](double r) { return (p.gamma - 1.0) * internal_energy_H(r, p.gamma); });
    const SpectralVector gq = gradient(forward(q));
    const double ie2 = 1.0 / (p.epsilon * p.epsilon);
    const double k2c = 2.0 * p.kappa * p.kappa;
    VectorField glap(grid_);
    if (p.kappa != 0.0) glap = inverse(gradient(laplacian(st.rho)));
    ScalarField drho = rho;
    drho += -1.0;
    for (int i = 0; i < d; ++i) {
        auto& c = out[static_cast<std::size_t>(i)];
        const auto& gqi = gq[static_cast<std::size_t>(i)];
        for (std::size_t s = 0; s < c.size(); ++s) c[s] -= ie2 * gqi[s];
        if (p.kappa != 0.0) {
            const Spectrum kc = forward(drho * glap[i]);
            for (std::size_t s = 0; s < c.size(); ++s) c[s] += k2c * kc[s];
        }
    }
    dealias(out);
    return out;
}

void NskStepper::check(const FluidState& st, double dt) const {
    const double lo = st.rho.min();
    if (!(lo >= limits_.rho_min)) {
        std::ostringstream os;
        os << "density floor violated at t = " << st.t << ": min rho = " << lo << " < " << limits_.rho_min;
        throw NumericalAbort(os.str());
    }
    if (!all_finite(st.rho)) throw NumericalAbort("non-finite density");
    for (int j = 0; j < st.m.dim(); ++j) {
        if (!all_finite(st.m[j])) throw NumericalAbort("non-finite momentum");
    }
    const double c = dt * explicit_rate(st);
    if (c > limits_.cfl_abort) {
        std::ostringstream os;
        os << "Courant number " << c << " exceeds " << limits_.cfl_abort << " at t = " << st.t << " (dt = " << dt
           << ")";
        throw NumericalAbort(os.str());
    }
}

FluidState NskStepper::step(const FluidState& state, double h) {
    if (!(h > 0.0)) throw ConfigError("step: dt must be > 0");
    require_same_grid(*grid_, state.grid(), "step");
    check(state, h);
    SpecState u0{forward(state.rho), forward(state.m)};
    dealias(u0.rho);
    dealias(u0.m);

    auto axpy = [](SpecState a, double h2, const SpectralVector& n) {
        for (std::size_t j = 0; j < a.m.size(); ++j) {
            for (std::size_t s = 0; s < n[j].size(); ++s) a.m[j][s] += h2 * n[j][s];
        }
        return a;
    };
    auto combine = [](double wa, const SpecState& a, double wb, const SpecState& b) {
        SpecState r = a;
        for (std::size_t s = 0; s < r.rho.size(); ++s) r.rho[s] = wa * a.rho[s] + wb * b.rho[s];
        for (std::size_t j = 0; j < r.m.size(); ++j) {
            for (std::size_t s = 0; s < r.rho.size(); ++s) r.m[j][s] = wa * a.m[j][s] + wb * b.m[j][s];
        }
        return r;
    };

    SpecState u1 = axpy(u0, h, nonlinear(u0));
    apply_linear(u1, h);

    SpecState a = u0;
    apply_linear(a, 0.5 * h);
    SpecState b = axpy(u1, h, nonlinear(u1));
    apply_linear(b, -0.5 * h);
    SpecState u2 = combine(0.75, a, 0.25, b);

    SpecState c = u0;
    apply_linear(c, h);
    SpecState e = axpy(u2, h, nonlinear(u2));
    apply_linear(e, 0.5 * h);
    SpecState u3 = combine(1.0 / 3.0, c, 2.0 / 3.0, e);

    FluidState out(inverse(u3.rho), inverse(u3.m), state.params, state.t + h);
    const double lo = out.rho.min();
    if (!(lo >= limits_.rho_min) || !all_finite(out.rho)) {
        std::ostringstream os;
        os << "density floor violated at t = " << out.t << ": min rho = " << lo << " < " << limits_.rho_min;
        throw NumericalAbort(os.str());
    }
    for (int j = 0; j < out.m.dim(); ++j) {
        if (!all_finite(out.m[j])) throw NumericalAbort("non-finite momentum");
    }
    return out;
}

FluidState step(const FluidState& state, double dt, const StepLimits& limits) {
    NskStepper s(state.rho.grid_ptr(), state.params, limits);
    return s.step(state, dt);
}

double Trajectory::energy_balance_drift() const {
    if (snapshots.empty()) return 0.0;
    const double e0 = snapshots.front().energy;
    double m = 0.0;
    for (const auto& s : snapshots) m = std::max(m, std::abs(s.energy + s.integrated.viscous - e0));
    return e0 > 0.0 ? m / e0 : m;
}

bool Trajectory::energy_monotone(double tol) const {
    for (std::size_t i = 1; i < snapshots.size(); ++i) {
        if (snapshots[i].energy > snapshots[i - 1].energy + tol) return false;
    }
    return true;
}

double choose_dt(const FluidState& initial, const SimulationConfig& cfg) {
    if (!(cfg.t_end > 0.0)) throw ConfigError("t_end must be > 0");
    double dt = cfg.dt;
    if (dt <= 0.0) {
        const double rate = explicit_rate(initial);
        dt = rate > 0.0 ? cfg.limits.cfl / rate : cfg.dt_max;
        dt = std::min(dt, cfg.dt_max);
    }
    const double n = std::ceil(cfg.t_end / dt - 1e-9);
    return cfg.t_end / std::max(1.0, n);
}

Trajectory simulate(const FluidState& initial, const SimulationConfig& cfg) {
    initial.params.validate();
    if (cfg.stride < 1) throw ConfigError("stride must be >= 1");
    FluidState st = band_limit(initial);
    Trajectory tr;
    tr.dt = choose_dt(st, cfg);
    const long nsteps = std::lround(cfg.t_end / tr.dt);
    NskStepper stepper(st.rho.grid_ptr(), st.params, cfg.limits);

    DissipationRates acc, prev = dissipation_rates(st);
    auto record = [&](const FluidState& s) {
        Snapshot snap;
        snap.t = s.t;
        snap.energy = total_energy(s);
        snap.bd_entropy = bd_entropy(s);
        snap.mass = s.rho.integral();
        snap.integrated = acc;
        if (cfg.keep_states) snap.state = s;
        tr.snapshots.push_back(std::move(snap));
    };
    record(st);
    if (cfg.on_step) cfg.on_step(st, 0);
    for (long n = 1; n <= nsteps; ++n) {
        st = stepper.step(st, tr.dt);
        if (n == nsteps) st.t = initial.t + cfg.t_end;
        const DissipationRates cur = dissipation_rates(st);
        const double h = 0.5 * tr.dt;
        acc.viscous += h * (prev.viscous + cur.viscous);
        acc.antisym += h * (prev.antisym + cur.antisym);
        acc.pressure_bd += h * (prev.pressure_bd + cur.pressure_bd);
        acc.capillary_bd += h * (prev.capillary_bd + cur.capillary_bd);
        prev = cur;
        tr.steps = n;
        if (cfg.on_step) cfg.on_step(st, n);
        if (n % cfg.stride == 0 || n == nsteps) record(st);
    }
    return tr;
}

}  // namespace nsk
