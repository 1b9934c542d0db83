// Acceptance run: one PASS/FAIL line per criterion.
//
//   acceptance [criterion numbers...]     (default: all)
//
// NSK_THREADS sets the parallelism of the sweep in criteria 7 and 8.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <numbers>
#include <set>
#include <sstream>
#include <string>
#include <sys/wait.h>
#include <unistd.h>

#include "nsk/acoustic.hpp"
#include "nsk/errors.hpp"
#include "nsk/euler.hpp"
#include "nsk/harness.hpp"
#include "nsk/io.hpp"
#include "nsk/nsk.hpp"
#include "nsk/spectral.hpp"

using namespace nsk;
namespace fs = std::filesystem;

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

struct Verdict {
    bool pass = false;
    std::string detail;
};

std::string num(double v, int prec = 4) {
    char b[64];
    std::snprintf(b, sizeof b, "%.*g", prec, v);
    return b;
}

PhysParams params(double eps, double nu, double kappa, double gamma) {
    PhysParams p;
    p.epsilon = eps;
    p.nu = nu;
    p.kappa = kappa;
    p.gamma = gamma;
    return p;
}

double max_abs_diff(const ScalarField& a, const ScalarField& b) {
    double m = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
    return m;
}

double max_abs(const ScalarField& a) {
    double m = 0.0;
    for (double v : a.values()) m = std::max(m, std::abs(v));
    return m;
}

// Symmetrized pair norm ‖(σ̃, m̃)‖_{H^s}.
double pair_hs(const AcousticState& st, double s) {
    const SymmetrizedState y = symmetrize(st);
    return std::hypot(sobolev_norm(y.sigma, s, 2.0), sobolev_norm(y.m, s, 2.0));
}

// --- 1 ------------------------------------------------------------------------

Verdict acoustic_unitarity() {
    double worst = 0.0, worst_plain = 0.0;
    int runs = 0;
    for (int dim : {2, 3}) {
        auto g = make_grid(dim, dim == 2 ? 128 : 64, kTwoPi);
        const int nmax = dim == 2 ? 8 : 4;
        const ScalarField s0 = random_band_limited(g, 17, nmax, 0.5);
        const VectorField gp = gradient(random_band_limited(g, 18, nmax, 0.5));
        for (double eps : {0.5, 0.1}) {
            for (double kappa : {0.5, 1.0}) {
                for (double gamma : {1.0, 2.0}) {
                    const AcousticState init{s0, gp, params(eps, 0.0, kappa, gamma), 0.0};
                    const AcousticPropagator prop(init);
                    const double n0 = pair_hs(init, 0.0), h0 = pair_hs(init, 1.0);
                    const double plain0 = std::hypot(lebesgue_norm(init.s, 2.0), lebesgue_norm(init.grad_phi, 2.0));
                    for (int i = 1; i <= 10; ++i) {
                        const AcousticState st = prop.at(static_cast<double>(i));
                        worst = std::max(worst, std::abs(pair_hs(st, 0.0) / n0 - 1.0));
                        worst = std::max(worst, std::abs(pair_hs(st, 1.0) / h0 - 1.0));
                        const double plain = std::hypot(lebesgue_norm(st.s, 2.0), lebesgue_norm(st.grad_phi, 2.0));
                        worst_plain = std::max(worst_plain, std::abs(plain / plain0 - 1.0));
                    }
                    ++runs;
                }
            }
        }
    }
    return {worst <= 1e-10, std::to_string(runs) + " runs, max rel. change of symmetrized L2/H1 = " + num(worst) +
                                " (plain L2 of (s, grad Phi), informational: " + num(worst_plain) + ")"};
}

// --- 2 ------------------------------------------------------------------------

// Per-mode oracle for s = a sin(k·x), ∇Φ = b k cos(k·x):
//   a' = |k|² b / ε,  b' = −(γ/ε)(1 + 2κ²ε²|k|²) a.
std::pair<double, double> mode_ode(double k2, const PhysParams& p, double t, int steps) {
    const double c1 = k2 / p.epsilon;
    const double c2 = -(p.gamma / p.epsilon) * (1.0 + 2.0 * p.kappa * p.kappa * p.epsilon * p.epsilon * k2);
    double a = 1.0, b = 0.0;
    const double h = t / steps;
    auto f = [&](double x, double y) { return std::make_pair(c1 * y, c2 * x); };
    for (int i = 0; i < steps; ++i) {
        auto [a1, b1] = f(a, b);
        auto [a2, b2] = f(a + 0.5 * h * a1, b + 0.5 * h * b1);
        auto [a3, b3] = f(a + 0.5 * h * a2, b + 0.5 * h * b2);
        auto [a4, b4] = f(a + h * a3, b + h * b3);
        a += h / 6.0 * (a1 + 2 * a2 + 2 * a3 + a4);
        b += h / 6.0 * (b1 + 2 * b2 + 2 * b3 + b4);
    }
    return {a, b};
}

Verdict dispersion_relation() {
    auto g = make_grid(2, 16, kTwoPi);
    double phase_err = 0.0;
    for (auto [kx, ky] : {std::pair{0, 1}, std::pair{2, 1}, std::pair{3, -2}}) {
        for (const PhysParams& p : {params(0.5, 0, 1.0, 1.0), params(0.1, 0, 0.5, 2.0), params(0.3, 0, 0.8, 1.4)}) {
            const double k2 = kx * kx + ky * ky;
            const ScalarField s0 = sample(g, [&](double x, double y, double) { return std::sin(kx * x + ky * y); });
            const AcousticState init{s0, VectorField(g), p, 0.0};
            const double t = 1.3;
            const AcousticState out = propagate(init, t);
            const auto [a, b] = mode_ode(k2, p, t, 200000);
            const ScalarField se = sample(g, [&](double x, double y, double) { return a * std::sin(kx * x + ky * y); });
            const ScalarField gx = sample(g, [&](double x, double y, double) { return b * kx * std::cos(kx * x + ky * y); });
            const ScalarField gy = sample(g, [&](double x, double y, double) { return b * ky * std::cos(kx * x + ky * y); });
            phase_err = std::max({phase_err, max_abs_diff(out.s, se), max_abs_diff(out.grad_phi[0], gx) / std::sqrt(k2),
                                  max_abs_diff(out.grad_phi[1], gy) / std::sqrt(k2)});
        }
    }
    // Richardson slope of the residual of the fourth-order wave equation.
    auto g2 = make_grid(2, 64, kTwoPi);
    const PhysParams p = params(0.2, 0, 0.5, 1.0);
    const AcousticState st{random_band_limited(g2, 5, 6, 1.0), gradient(random_band_limited(g2, 6, 6, 1.0)), p, 0.0};
    std::vector<std::pair<double, double>> pts;
    for (double dt : {4e-3, 2e-3, 1e-3, 5e-4}) pts.emplace_back(dt, dispersion_residual(st, 0.7, dt));
    const RateFit fit = fit_rate(pts);
    const bool ok = phase_err <= 1e-10 && std::abs(fit.slope - 2.0) <= 0.1;
    return {ok, "max single-mode error vs ODE oracle = " + num(phase_err) + ", residual slope = " + num(fit.slope, 5)};
}

// --- 3 ------------------------------------------------------------------------

AcousticState localized(const GridPtr& g, double sigma, const PhysParams& p) {
    const double c = 0.5 * g->length();
    const int dim = g->dim();
    const ScalarField s = sample(g, [&](double x, double y, double z) {
        double r2 = (x - c) * (x - c) + (y - c) * (y - c);
        if (dim == 3) r2 += (z - c) * (z - c);
        return std::exp(-r2 / (2.0 * sigma * sigma));
    });
    return AcousticState{s, VectorField(g), p, 0.0};
}

DecayExperiment decay_run(int dim, int n, double length, double p_time, double q, std::optional<double> theta,
                          int samples, double& horizon) {
    auto g = make_grid(dim, n, length);
    const Window K = Window::centered(*g, 0.25);
    const std::vector<double> eps{0.2, 0.1, 0.05, 0.025};
    const PhysParams base = params(eps.back(), 0.0, 0.5, 1.0);
    // escape window of the fastest member over every represented mode
    const double k_nyq = std::numbers::pi * n / length;
    horizon = wave_escape_window(*g, K, base, k_nyq);
    DecayConfig cfg;
    cfg.spec.p = p_time;
    cfg.spec.q = q;
    cfg.spec.window = K;
    cfg.theta = theta;
    cfg.time_samples = samples;
    const double T = horizon;
    cfg.horizon = [T](double) { return T; };
    auto family = [&](double e) { return localized(g, 0.5, params(e, 0.0, 0.5, 1.0)); };
    return strichartz_decay_experiment(family, eps, cfg);
}

Verdict strichartz_decay() {
    double h3 = 0.0, h2 = 0.0;
    const DecayExperiment d3 = decay_run(3, 64, 16.0, 2.0, 6.0, std::nullopt, 81, h3);
    // θ = 0.4 and r = 4 give s₀ = 3β(r)θ = 0.3 with the 0.8-admissible pair (5, 4).
    const DecayExperiment d2 = decay_run(2, 256, 32.0, 5.0, 4.0, 0.4, 161, h2);
    const bool ok3 = d3.fit.slope >= 0.10 && d3.fit.residual <= 0.05;
    const bool ok2 = d2.fit.slope >= 0.5 * (0.3 / 3.0);
    std::ostringstream os;
    os << "3D (2,6): slope " << num(d3.fit.slope) << " resid " << num(d3.fit.residual) << " (T=" << num(h3)
       << ", ceiling " << num(d3.alpha_max) << "); 2D (5,4), theta 0.4: slope " << num(d2.fit.slope) << " resid "
       << num(d2.fit.residual) << " (T=" << num(h2) << ", need >= 0.05)";
    return {ok3 && ok2, os.str()};
}

// --- 4 ------------------------------------------------------------------------

Verdict nsk_conservation() {
    auto g = make_grid(2, 128, kTwoPi);
    const PhysParams p = params(0.3, 0.01, 0.5, 2.0);
    ScalarField rho = random_band_limited(g, 11, 4, 0.1);
    rho += 1.0;
    VectorField u(g);
    u[0] = random_band_limited(g, 12, 4, 0.3);
    u[1] = random_band_limited(g, 13, 4, 0.3);
    const FluidState init = FluidState::from_velocity(rho, u, p);
    std::vector<double> bal;
    double mass = 0.0;
    for (double dt : {2e-3, 1e-3, 5e-4}) {
        SimulationConfig c;
        c.t_end = 1.0;
        c.dt = dt;
        c.stride = 50;
        c.keep_states = false;
        const Trajectory tr = simulate(init, c);
        const auto& a = tr.snapshots.front();
        const auto& b = tr.snapshots.back();
        bal.push_back(std::abs(b.energy - a.energy + b.integrated.viscous) / a.energy);
        for (const auto& s : tr.snapshots) mass = std::max(mass, std::abs(s.mass - a.mass) / a.mass);
    }
    const double o1 = std::log2(bal[0] / bal[1]), o2 = std::log2(bal[1] / bal[2]);
    const bool ok = mass <= 1e-12 && bal[1] <= 1e-6 && o1 >= 2.0 && o2 >= 2.0;
    return {ok, "mass drift " + num(mass) + "; balance residual at t=1: " + num(bal[0]) + ", " + num(bal[1]) + ", " +
                    num(bal[2]) + " for dt = 2e-3, 1e-3, 5e-4 (orders " + num(o1, 3) + ", " + num(o2, 3) + ")"};
}

// --- 5 ------------------------------------------------------------------------

// Least-squares frequency of c(t) ≈ cos(ω t) by golden-section search.
double fit_frequency(const std::vector<double>& t, const std::vector<double>& c, double lo, double hi) {
    auto cost = [&](double w) {
        double e = 0.0;
        for (std::size_t i = 0; i < t.size(); ++i) e += std::pow(c[i] - std::cos(w * t[i]), 2);
        return e;
    };
    const double r = (std::sqrt(5.0) - 1.0) / 2.0;
    double a = lo, b = hi;
    for (int i = 0; i < 200; ++i) {
        const double x1 = b - r * (b - a), x2 = a + r * (b - a);
        if (cost(x1) < cost(x2)) b = x2; else a = x1;
    }
    return 0.5 * (a + b);
}

Verdict linearization() {
    const double amp = 1e-4;
    auto g = make_grid(2, 32, kTwoPi);
    // γ = 1 (up to the strict γ > 1 of the solver), where the two linear symbols agree
    const PhysParams p = params(0.5, 0.0, 0.6, 1.0 + 1e-12);
    const int kx = 2, ky = 1;
    const ScalarField mode = sample(g, [&](double x, double y, double) { return std::cos(kx * x + ky * y); });
    FluidState st(ScalarField(g, 1.0) + amp * mode, VectorField(g), p);
    const double w = acoustic_frequency(std::sqrt(kx * kx + ky * ky), p);
    NskStepper stepper(g, p);
    const double dt = 1e-3;
    std::vector<double> ts, cs;
    const double norm = (mode * mode).integral();
    for (int i = 0; i <= 3000; ++i) {
        if (i % 10 == 0) {
            ScalarField f = st.rho;
            f += -1.0;
            ts.push_back(st.t);
            cs.push_back((f * mode).integral() / norm / amp);
        }
        if (i < 3000) st = stepper.step(st, dt);
    }
    const double wf = fit_frequency(ts, cs, 0.95 * w, 1.05 * w);
    const double rel = std::abs(wf - w) / w;
    return {rel <= 1e-3, "fitted " + num(wf, 8) + " vs omega_gamma(k) " + num(w, 8) + ", rel. error " + num(rel)};
}

// --- 6 ------------------------------------------------------------------------

Verdict lemma_rates() {
    auto g = make_grid(3, 64, 1.0);
    const std::vector<double> eps{0.2, 0.1, 0.05, 0.025};
    auto slope_of = [&](const DataFamily& f, double gamma, std::vector<double>& orlicz) {
        std::vector<std::pair<double, double>> pts;
        for (double e : eps) {
            const IllPrepared d = make_ill_prepared(g, f, params(e, 0.0, 0.5, gamma));
            pts.emplace_back(e, d.lemma.rho_l2);
            orlicz.push_back(d.lemma.orlicz_ratio);
        }
        return fit_rate(pts).slope;
    };
    DataFamily gauss;
    gauss.u_profile = "zero";
    gauss.width = 0.1;
    gauss.amplitude = 0.5;
    DataFamily spike = gauss;
    spike.s_profile = "spike";
    spike.width = 0.5;

    std::vector<double> o25, o15g, o15s;
    const double s25 = slope_of(gauss, 2.5, o25);
    const double s15g = slope_of(gauss, 1.5, o15g);
    const double s15s = slope_of(spike, 1.5, o15s);
    const double need = 4.0 / (6.0 - 1.5) - 0.05;
    auto spread = [](const std::vector<double>& o) {
        const auto [mn, mx] = std::minmax_element(o.begin(), o.end());
        return *mx / *mn;
    };
    const double sp = std::max({spread(o25), spread(o15g), spread(o15s)});
    const bool ok = std::abs(s25 - 1.0) <= 0.05 && s15g >= need && s15s >= need && sp <= 2.0;
    return {ok, "gamma 2.5 slope " + num(s25) + "; gamma 1.5 slopes " + num(s15g) + " (fixed profile), " + num(s15s) +
                    " (concentrating spike), need >= " + num(need) + "; Orlicz ratio max/min over eps " + num(sp)};
}

// --- 7 and 8 ------------------------------------------------------------------

SweepConfig limit_config() {
    SweepConfig c;
    c.dim = 2;
    c.n = 256;
    c.length = 64.0;
    c.gamma = 1.5;
    c.kappa = 0.5;
    c.epsilons = {0.2, 0.1, 0.05, 0.025};
    c.nu_coeff = 1.0;
    c.nu_power = 1.0;
    c.t_end = 1.0;
    c.dt_factor = 0.04;
    c.hs_index = 0.5;
    c.threads = threads_from_env();
    return c;
}

const SweepResult& limit_sweep() {
    static const SweepResult res = run_sweep(limit_config());
    return res;
}

bool strictly_decreasing(const std::vector<double>& v) {
    for (std::size_t i = 1; i < v.size(); ++i) {
        if (!(v[i] < v[i - 1])) return false;
    }
    return true;
}

Verdict relative_energy_limit() {
    const SweepResult& r = limit_sweep();
    if (r.failures > 0) return {false, std::to_string(r.failures) + " sweep member(s) failed: " + r.rows.front().error};
    std::vector<double> sup, loc;
    std::vector<std::pair<double, double>> hs;
    std::ostringstream os;
    for (const auto& row : r.rows) {
        sup.push_back(row.sup_rel_energy);
        loc.push_back(row.l2loc_vel_err);
        hs.emplace_back(row.epsilon, row.rho_hs);
        os << "eps " << num(row.epsilon) << ": supE " << num(row.sup_rel_energy) << ", L2loc " << num(row.l2loc_vel_err)
           << ", Hs " << num(row.rho_hs) << "; ";
    }
    const double slope = fit_rate(hs).slope;
    const bool ok = strictly_decreasing(sup) && sup.back() <= 0.5 * sup.front() && strictly_decreasing(loc) &&
                    slope >= (1.0 - 0.5) - 0.1;
    os << "Hs slope " << num(slope) << " (need >= 0.4)";
    return {ok, os.str()};
}

Verdict budget_inequality() {
    const SweepResult& r = limit_sweep();
    // lhs <= ΣI + tol at every checkpoint; tol is 1e-3 of the member's sup relative energy
    double worst = std::numeric_limits<double>::infinity();
    bool ok = r.failures == 0;
    for (const auto& row : r.rows) {
        const double tol = 1e-3 * row.sup_rel_energy;
        worst = std::min(worst, row.rei_slack / row.sup_rel_energy);
        ok = ok && row.rei_slack >= -tol;
        for (const auto& b : row.checkpoints) ok = ok && b.slack() >= -tol;
    }
    // designated configuration: identity defect under Δt halving
    SweepConfig c;
    c.n = 64;
    c.length = 16.0;
    c.t_end = 0.5;
    std::vector<double> defect;
    for (double f : {0.04, 0.02, 0.01}) {
        c.dt_factor = f;
        defect.push_back(run_member(c, 0.2).max_identity_defect);
    }
    const double o1 = std::log2(defect[0] / defect[1]), o2 = std::log2(defect[1] / defect[2]);
    ok = ok && o1 >= 1.9 && o2 >= 1.9;
    return {ok, "min slack/supE over the sweep " + num(worst) + "; designated defect " + num(defect[0]) + ", " +
                    num(defect[1]) + ", " + num(defect[2]) + " (orders " + num(o1, 3) + ", " + num(o2, 3) + ")"};
}

// --- 9 ------------------------------------------------------------------------

Verdict euler_reference() {
    auto g = make_grid(2, 32, kTwoPi);
    VectorField u(g);
    u[0] = sample(g, [](double x, double y, double) { return -std::cos(x) * std::sin(y); });
    u[1] = sample(g, [](double x, double y, double) { return std::sin(x) * std::cos(y); });
    EulerState st = project_initial(u);
    const double e0 = kinetic_energy(st.u);
    double dev = 0.0;
    for (int i = 0; i < 100; ++i) {
        st = euler_step(st, 0.01);
        dev = std::max({dev, max_abs_diff(st.u[0], u[0]), max_abs_diff(st.u[1], u[1])});
    }
    const double drift = std::abs(kinetic_energy(st.u) / e0 - 1.0);
    return {dev <= 1e-8 && drift <= 1e-9, "max deviation " + num(dev) + ", energy drift " + num(drift)};
}

// --- 10 -----------------------------------------------------------------------

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

Verdict determinism() {
    const fs::path root = fs::temp_directory_path() / ("nsk_accept_" + std::to_string(::getpid()));
    const std::string sets =
        " --set n=32 --set length=16 --set epsilon_list=0.4,0.2,0.1 --set t_end=0.2 --set seed=3";
    const char* files[] = {"sweep.csv", "sweep_fits.json", "lemma.csv", "budget.csv"};
    for (const char* run : {"a", "b"}) {
        const std::string cmd =
            std::string(NSK_CLI_PATH) + " limit-sweep" + sets + " --out " + (root / run).string() + " > /dev/null";
        const int rc = std::system(cmd.c_str());
        if (!WIFEXITED(rc) || WEXITSTATUS(rc) != 0) return {false, "limit-sweep exited with status " + std::to_string(rc)};
    }
    bool same = true;
    std::size_t bytes = 0;
    for (const char* f : files) {
        const std::string a = slurp(root / "a" / f), b = slurp(root / "b" / f);
        same = same && !a.empty() && a == b;
        bytes += a.size();
    }
    fs::remove_all(root);
    return {same, std::string(same ? "identical" : "different") + " output over 4 files (" + std::to_string(bytes) +
                      " bytes)"};
}

}  // namespace

int main(int argc, char** argv) {
    const std::vector<std::pair<const char*, std::function<Verdict()>>> criteria = {
        {"acoustic unitarity", acoustic_unitarity},
        {"dispersion relation", dispersion_relation},
        {"Strichartz decay", strichartz_decay},
        {"NSK conservation audits", nsk_conservation},
        {"linearization consistency", linearization},
        {"initial-data rates", lemma_rates},
        {"relative-energy limit", relative_energy_limit},
        {"budget inequality", budget_inequality},
        {"Euler reference", euler_reference},
        {"determinism", determinism},
    };
    std::set<int> pick;
    for (int i = 1; i < argc; ++i) pick.insert(std::atoi(argv[i]));
    int failed = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        const int id = static_cast<int>(i) + 1;
        if (!pick.empty() && !pick.count(id)) continue;
        const auto t0 = std::chrono::steady_clock::now();
        Verdict v;
        try {
            v = criteria[i].second();
        } catch (const std::exception& e) {
            v = {false, std::string("exception: ") + e.what()};
        }
        const double sec = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        std::printf("[%s] %2d %s: %s (%.1f s)\n", v.pass ? "PASS" : "FAIL", id, criteria[i].first, v.detail.c_str(), sec);
        std::fflush(stdout);
        failed += v.pass ? 0 : 1;
    }
    return failed == 0 ? 0 : 1;
}
