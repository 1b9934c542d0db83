#include "nsk/functionals.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "nsk/errors.hpp"
#include "nsk/spectral.hpp"

namespace nsk {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

bool near(double a, double b) { return std::abs(a - b) <= 1e-12 * std::max(1.0, std::abs(b)); }

double inv(double x) { return std::isinf(x) ? 0.0 : 1.0 / x; }

// Sum of |f_i|^q (or max for q = ∞) over the window, scaled to an L^q norm.
template <class Abs>
double lq_impl(const Grid& g, std::size_t n, Abs abs_at, double q, const std::optional<Window>& w) {
    if (!(q >= 1.0)) throw ConfigError("norm exponent q must be >= 1");
    if (w) w->validate(g);
    double acc = 0.0;
    const bool is_inf = std::isinf(q);
    for (std::size_t i = 0; i < n; ++i) {
        if (w && !w->contains(g.coords(i), g.dim())) continue;
        const double a = abs_at(i);
        if (is_inf) {
            acc = std::max(acc, a);
        } else {
            acc += std::pow(a, q);
        }
    }
    if (is_inf) return acc;
    return std::pow(acc * g.cell_volume(), 1.0 / q);
}

// Weights of the derivative at t of the quadratic interpolant through t0, t1, t2.
std::array<double, 3> quad_deriv_weights(double t0, double t1, double t2, double t) {
    return {((t - t1) + (t - t2)) / ((t0 - t1) * (t0 - t2)),
            ((t - t0) + (t - t2)) / ((t1 - t0) * (t1 - t2)),
            ((t - t0) + (t - t1)) / ((t2 - t0) * (t2 - t1))};
}

// (∇v)_{ij} = ∂_j v_i
std::vector<VectorField> jacobian(const VectorField& v) {
    std::vector<VectorField> out;
    out.reserve(static_cast<std::size_t>(v.dim()));
    for (int i = 0; i < v.dim(); ++i) out.push_back(gradient(v[i]));
    return out;
}

}  // namespace

// --- internal energy ---------------------------------------------------------

double internal_energy_H(double rho, double gamma) {
    return (std::pow(rho, gamma) - 1.0 - gamma * (rho - 1.0)) / (gamma - 1.0);
}

double internal_energy_H_prime(double rho, double gamma) {
    return gamma * (std::pow(rho, gamma - 1.0) - 1.0) / (gamma - 1.0);
}

double internal_energy_H_second(double rho, double gamma) { return gamma * std::pow(rho, gamma - 2.0); }

double pressure_law(double rho, double gamma) { return std::pow(rho, gamma); }

void require_positive(const ScalarField& rho, const char* what) {
    const double lo = rho.min();
    if (!(lo > 0.0)) {
        std::ostringstream os;
        os << what << ": nonpositive density, min = " << lo;
        throw DomainError(os.str());
    }
}

ScalarField internal_energy_H(const ScalarField& rho, double gamma) {
    require_positive(rho, "internal energy");
    return map(rho, [gamma](double r) { return internal_energy_H(r, gamma); });
}

// --- energies ----------------------------------------------------------------

EnergyParts energy_parts(const FluidState& state) {
    const auto& p = state.params;
    const ScalarField h = internal_energy_H(state.rho, p.gamma);
    EnergyParts e;
    // ϱ|u|² = |m|²/ϱ
    const ScalarField m2 = state.m.norm2();
    double kin = 0.0;
    for (std::size_t i = 0; i < m2.size(); ++i) kin += m2[i] / state.rho[i];
    e.kinetic = 0.5 * kin * state.grid().cell_volume();
    e.internal = h.integral() / (p.epsilon * p.epsilon);
    e.capillary = p.kappa * p.kappa * gradient(state.rho).norm2().integral();
    return e;
}

double total_energy(const FluidState& state) { return energy_parts(state).total(); }

double bd_entropy(const FluidState& state) {
    const auto& p = state.params;
    EnergyParts e = energy_parts(state);
    if (p.nu == 0.0) return e.total();
    const ScalarField sq = map(state.rho, [](double r) { return std::sqrt(r); });
    const VectorField gsq = gradient(sq);
    double acc = 0.0;
    for (std::size_t i = 0; i < sq.size(); ++i) {
        double s2 = 0.0;
        for (int j = 0; j < state.m.dim(); ++j) {
            const double c = state.m[j][i] / sq[i] + 2.0 * p.nu * gsq[j][i];
            s2 += c * c;
        }
        acc += 0.5 * s2;
    }
    return acc * state.grid().cell_volume() + e.internal + e.capillary;
}

OrliczBound orlicz_bound(const ScalarField& rho, double gamma, double epsilon) {
    double acc = 0.0;
    for (std::size_t i = 0; i < rho.size(); ++i) {
        const double d = std::abs(rho[i] - 1.0);
        acc += d <= 0.5 ? d * d : std::pow(d, gamma);
    }
    OrliczBound b;
    b.value = acc * rho.grid().cell_volume();
    b.ratio_to_eps2 = b.value / (epsilon * epsilon);
    return b;
}

// --- exponent algebra --------------------------------------------------------

double beta_exponent(double q) {
    if (!(q >= 2.0 && q < 6.0)) {
        std::ostringstream os;
        os << "beta_exponent: q = " << q << " outside [2, 6)";
        throw DomainError(os.str());
    }
    return 0.8 * (1.0 - 3.0 * (0.5 - 1.0 / q));
}

bool theta_admissible(double q, double r, double theta) {
    if (!(q >= 2.0 && r >= 2.0)) return false;
    if (near(q, 2.0) && std::isinf(r) && near(theta, 1.0)) return false;
    return near(inv(q) + theta * inv(r), 0.5 * theta);
}

Admissibility admissible_check(double p, double q, int dim, std::optional<double> theta) {
    Admissibility a;
    if (!(p >= 2.0 && q >= 2.0)) return a;
    if (dim == 3) {
        a.admissible = near(2.0 * inv(p) + 3.0 * inv(q), 1.5);
        if (a.admissible) a.alpha_max = 0.5 * (0.5 - inv(q));
        return a;
    }
    if (dim == 2) {
        const double th = theta.value_or(0.0);
        if (!(th >= 0.0 && th < 1.0)) return a;
        a.admissible = theta_admissible(p, q, 0.5 * (2.0 - th));
        if (a.admissible) a.s0 = 3.0 * (0.5 - inv(q)) * th;
        return a;
    }
    return a;
}

// --- windows and norms -----------------------------------------------------

Window Window::centered(const Grid& grid, double fraction) {
    if (!(fraction > 0.0 && fraction <= 1.0)) throw ConfigError("window fraction must be in (0, 1]");
    Window w;
    const double l = grid.length();
    for (int j = 0; j < grid.dim(); ++j) {
        w.lo[static_cast<std::size_t>(j)] = 0.5 * l * (1.0 - fraction);
        w.hi[static_cast<std::size_t>(j)] = 0.5 * l * (1.0 + fraction);
    }
    return w;
}

bool Window::contains(const std::array<double, 3>& x, int dim) const {
    for (std::size_t j = 0; j < static_cast<std::size_t>(dim); ++j) {
        if (x[j] < lo[j] || x[j] >= hi[j]) return false;
    }
    return true;
}

double Window::distance_to_boundary(const Grid& grid) const {
    double d = kInf;
    for (std::size_t j = 0; j < static_cast<std::size_t>(grid.dim()); ++j) {
        d = std::min({d, lo[j], grid.length() - hi[j]});
    }
    return d;
}

void Window::validate(const Grid& grid) const {
    for (std::size_t j = 0; j < static_cast<std::size_t>(grid.dim()); ++j) {
        if (!(lo[j] >= 0.0 && hi[j] <= grid.length() && lo[j] < hi[j])) {
            throw ConfigError("observation window is not inside the grid box");
        }
    }
}

double lebesgue_norm(const ScalarField& f, double q, const std::optional<Window>& window) {
    return lq_impl(f.grid(), f.size(), [&](std::size_t i) { return std::abs(f[i]); }, q, window);
}

double lebesgue_norm(const VectorField& v, double q, const std::optional<Window>& window) {
    const ScalarField mag = v.magnitude();
    return lebesgue_norm(mag, q, window);
}

double lebesgue_norm(const ScalarField& f, const VectorField& v, double q,
                     const std::optional<Window>& window) {
    require_same_grid(f.grid(), v.grid(), "lebesgue_norm");
    const ScalarField v2 = v.norm2();
    return lq_impl(f.grid(), f.size(), [&](std::size_t i) { return std::sqrt(f[i] * f[i] + v2[i]); }, q,
                   window);
}

double sobolev_norm(const ScalarField& f, double s, double q, const std::optional<Window>& window) {
    if (s == 0.0) return lebesgue_norm(f, q, window);
    return lebesgue_norm(bessel_filter(f, s), q, window);
}

double sobolev_norm(const VectorField& v, double s, double q, const std::optional<Window>& window) {
    if (s == 0.0) return lebesgue_norm(v, q, window);
    VectorField w(v.grid_ptr());
    for (int j = 0; j < v.dim(); ++j) w[j] = bessel_filter(v[j], s);
    return lebesgue_norm(w, q, window);
}

double strichartz_norm(std::span<const double> times, std::span<const double> g, double p) {
    if (times.size() != g.size()) throw ConfigError("strichartz_norm: times and norms differ in length");
    if (times.size() < 2) throw InsufficientData("strichartz_norm needs at least two snapshots");
    if (!(p >= 1.0)) throw ConfigError("time exponent p must be >= 1");
    const double dt = (times.back() - times.front()) / static_cast<double>(times.size() - 1);
    if (!(dt > 0.0)) throw ConfigError("strichartz_norm: snapshot times must increase");
    for (std::size_t i = 1; i < times.size(); ++i) {
        if (std::abs((times[i] - times[i - 1]) - dt) > 1e-9 * dt) {
            throw ConfigError("strichartz_norm: snapshots are not uniformly spaced");
        }
    }
    if (std::isinf(p)) return *std::max_element(g.begin(), g.end());
    double acc = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i) {
        const double w = (i == 0 || i + 1 == g.size()) ? 0.5 : 1.0;
        acc += w * std::pow(std::abs(g[i]), p);
    }
    return std::pow(acc * dt, 1.0 / p);
}

double strichartz_norm(std::span<const double> times, const std::vector<ScalarField>& s,
                       const std::vector<VectorField>& v, const NormSpec& spec) {
    const std::size_t n = times.size();
    if (!s.empty() && s.size() != n) throw ConfigError("strichartz_norm: scalar trajectory length mismatch");
    if (!v.empty() && v.size() != n) throw ConfigError("strichartz_norm: vector trajectory length mismatch");
    std::vector<double> g(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        if (!s.empty() && !v.empty()) {
            if (spec.s == 0.0) {
                g[i] = lebesgue_norm(s[i], v[i], spec.q, spec.window);
            } else {
                VectorField w(v[i].grid_ptr());
                for (int j = 0; j < w.dim(); ++j) w[j] = bessel_filter(v[i][j], spec.s);
                g[i] = lebesgue_norm(bessel_filter(s[i], spec.s), w, spec.q, spec.window);
            }
        } else if (!s.empty()) {
            g[i] = sobolev_norm(s[i], spec.s, spec.q, spec.window);
        } else if (!v.empty()) {
            g[i] = sobolev_norm(v[i], spec.s, spec.q, spec.window);
        }
    }
    return strichartz_norm(times, g, spec.p);
}

// --- relative energy ---------------------------------------------------------

RelativeEnergyParts relative_energy_parts(const FluidState& state, const ScalarField& r,
                                          const VectorField& U, const PhysParams& params) {
    require_positive(state.rho, "relative energy (rho)");
    require_positive(r, "relative energy (r)");
    require_same_grid(state.grid(), r.grid(), "relative energy");
    const double g = params.gamma;
    const VectorField dgrad = gradient(state.rho - r);
    const ScalarField d2 = dgrad.norm2();
    double kin = 0.0, cap = 0.0, in = 0.0;
    for (std::size_t i = 0; i < r.size(); ++i) {
        const double rho = state.rho[i];
        double w2 = 0.0;
        for (int j = 0; j < U.dim(); ++j) {
            const double w = state.m[j][i] / rho - U[j][i];
            w2 += w * w;
        }
        kin += 0.5 * rho * w2;
        cap += d2[i];
        in += internal_energy_H(rho, g) - internal_energy_H(r[i], g) -
              internal_energy_H_prime(r[i], g) * (rho - r[i]);
    }
    const double dv = state.grid().cell_volume();
    RelativeEnergyParts e;
    e.kinetic = kin * dv;
    e.capillary = params.kappa * params.kappa * cap * dv;
    e.internal = in * dv / (params.epsilon * params.epsilon);
    return e;
}

double relative_energy(const FluidState& state, const ScalarField& r, const VectorField& U,
                       const PhysParams& params) {
    return relative_energy_parts(state, r, U, params).total();
}

// --- budget --------------------------------------------------------------------

BudgetIntegrands budget_integrands(const BudgetSample& smp, const PhysParams& params) {
    if (!smp.dt_r || !smp.dt_U) throw InsufficientData("budget sample lacks time derivatives of (r, U)");
    const Grid& grid = smp.rho.grid();
    const int d = grid.dim();
    const double g = params.gamma;
    const double k2 = params.kappa * params.kappa;
    const double ie2 = 1.0 / (params.epsilon * params.epsilon);

    const FluidState st(smp.rho, smp.m, params, smp.t);
    const VectorField u = st.velocity();
    require_positive(smp.r, "budget (r)");

    const auto gu = jacobian(u);
    const auto gU = jacobian(smp.U);
    const ScalarField divU = divergence(smp.U);
    const VectorField grho = gradient(smp.rho);
    const ScalarField lap_r = laplacian(smp.r);
    const VectorField glap_r = gradient(lap_r);
    const ScalarField lap_dtr = laplacian(*smp.dt_r);
    const VectorField g_rho_divU = gradient(smp.rho * divU);
    const ScalarField hp = map(smp.r, [g](double x) { return internal_energy_H_prime(x, g); });
    const VectorField ghp = gradient(hp);
    const ScalarField& dtr = *smp.dt_r;
    const VectorField& dtU = *smp.dt_U;

    std::array<double, 5> acc{};
    double diss = 0.0;
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const double rho = smp.rho[i];
        double i1 = 0.0, i2u = 0.0, i3 = 0.0, i4 = 0.0, d2 = 0.0, gr2 = 0.0, i5u = 0.0;
        for (int a = 0; a < d; ++a) {
            const double w = smp.U[a][i] - u[a][i];
            double adv = 0.0;  // ((u·∇)U)_a
            for (int b = 0; b < d; ++b) adv += u[b][i] * gU[a][b][i];
            i1 += (dtU[a][i] + adv) * rho * w;
            i2u += u[a][i] * glap_r[a][i];
            i3 += grho[a][i] * g_rho_divU[a][i];
            gr2 += grho[a][i] * grho[a][i];
            i5u += u[a][i] * ghp[a][i];
            for (int b = 0; b < d; ++b) {
                const double dab = 0.5 * (gu[a][b][i] + gu[b][a][i]);
                i4 += dab * gU[a][b][i];
                d2 += dab * dab;
                i3 += grho[a][i] * grho[b][i] * gU[a][b][i];
            }
        }
        i3 -= 0.5 * gr2 * divU[i];
        acc[0] += i1;
        acc[1] += rho * lap_dtr[i] + rho * i2u - dtr[i] * lap_r[i];
        acc[2] += i3;
        acc[3] += rho * i4;
        acc[4] += internal_energy_H_second(smp.r[i], g) * dtr[i] * (rho - smp.r[i]) + rho * i5u +
                  pressure_law(rho, g) * divU[i];
        diss += rho * d2;
    }
    const double dv = grid.cell_volume();
    BudgetIntegrands out;
    out.I[0] = acc[0] * dv;
    out.I[1] = 2.0 * k2 * acc[1] * dv;
    out.I[2] = -2.0 * k2 * acc[2] * dv;
    out.I[3] = 2.0 * params.nu * acc[3] * dv;
    out.I[4] = -ie2 * acc[4] * dv;
    out.dissipation = params.nu * diss * dv;
    out.relative_energy = relative_energy(st, smp.r, smp.U, params);
    return out;
}

void BudgetAccumulator::add(double t, const BudgetIntegrands& in) {
    BudgetRow row;
    row.t = t;
    row.relative_energy = in.relative_energy;
    if (rows_.empty()) {
        e0_ = in.relative_energy;
    } else {
        const BudgetRow& prev = rows_.back();
        const double h = t - last_t_;
        if (!(h > 0.0)) throw ConfigError("budget samples must have increasing times");
        for (std::size_t j = 0; j < 5; ++j) row.I[j] = prev.I[j] + 0.5 * h * (last_.I[j] + in.I[j]);
        row.dissipation = prev.dissipation + 0.5 * h * (last_.dissipation + in.dissipation);
    }
    row.lhs = row.relative_energy - e0_ + row.dissipation;
    row.rhs = row.I[0] + row.I[1] + row.I[2] + row.I[3] + row.I[4];
    rows_.push_back(row);
    last_ = in;
    last_t_ = t;
}

std::vector<BudgetRow> rei_budget(std::vector<BudgetSample> samples, const PhysParams& params) {
    const std::size_t n = samples.size();
    if (n == 0) throw InsufficientData("rei_budget: empty trajectory");
    bool missing = false;
    for (const auto& s : samples) missing = missing || !s.dt_r || !s.dt_U;
    if (missing) {
        if (n < 3) throw InsufficientData("rei_budget: time derivatives missing and fewer than 3 snapshots");
        for (std::size_t i = 0; i < n; ++i) {
            if (samples[i].dt_r && samples[i].dt_U) continue;
            const std::size_t c = std::clamp<std::size_t>(i, 1, n - 2);
            const auto w = quad_deriv_weights(samples[c - 1].t, samples[c].t, samples[c + 1].t, samples[i].t);
            ScalarField dr = w[0] * samples[c - 1].r + w[1] * samples[c].r + w[2] * samples[c + 1].r;
            VectorField dU = w[0] * samples[c - 1].U + w[1] * samples[c].U + w[2] * samples[c + 1].U;
            if (!samples[i].dt_r) samples[i].dt_r = std::move(dr);
            if (!samples[i].dt_U) samples[i].dt_U = std::move(dU);
        }
    }
    BudgetAccumulator acc;
    for (const auto& s : samples) acc.add(s.t, budget_integrands(s, params));
    return acc.rows();
}

// --- support inequality -----------------------------------------------------------

SupportCheck support_inequality_check(const ScalarField& f, double p) {
    if (f.grid().dim() != 2) throw ConfigError("support inequality is two-dimensional");
    std::size_t count = 0;
    for (std::size_t i = 0; i < f.size(); ++i) count += std::abs(f[i]) > 1e-14 ? 1 : 0;
    const double measure = static_cast<double>(count) * f.grid().cell_volume();
    SupportCheck c;
    c.lhs = lebesgue_norm(f, p);
    c.rhs = std::sqrt(gradient(f).norm2().integral()) * std::pow(measure, 1.0 / p);
    c.holds = c.lhs <= c.rhs * (1.0 + 1e-12) + 1e-300;
    return c;
}

double measure_h_quadratic_constant(double gamma, double lo, double hi, int samples) {
    double c = 0.0;
    for (int i = 0; i <= samples; ++i) {
        const double a = lo + (hi - lo) * i / samples;
        for (int j = 0; j <= samples; ++j) {
            if (i == j) continue;
            const double b = lo + (hi - lo) * j / samples;
            const double num = internal_energy_H(a, gamma) - internal_energy_H(b, gamma) -
                               internal_energy_H_prime(b, gamma) * (a - b);
            c = std::max(c, std::abs(num) / ((a - b) * (a - b)));
        }
    }
    return c;
}

}  // namespace nsk
