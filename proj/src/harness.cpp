#include "nsk/harness.hpp"

#include <algorithm>
#include <atomic>
#include <limits>
#include <cmath>
#include <cstdlib>
#include <numbers>
#include <random>
#include <sstream>
#include <thread>

#include "nsk/errors.hpp"
#include "nsk/spectral.hpp"

namespace nsk {

namespace {

// Signed minimum-image offset from the box center along each axis.
std::array<double, 3> centered_offset(const Grid& g, std::size_t i) {
    auto x = g.coords(i);
    const double L = g.length();
    for (int j = 0; j < g.dim(); ++j) {
        double d = x[static_cast<std::size_t>(j)] - 0.5 * L;
        d -= L * std::round(d / L);
        x[static_cast<std::size_t>(j)] = d;
    }
    if (g.dim() == 2) x[2] = 0.0;
    return x;
}

ScalarField gaussian(const GridPtr& g, double w) {
    ScalarField out(g);
    for (std::size_t i = 0; i < out.size(); ++i) {
        const auto d = centered_offset(*g, i);
        out[i] = std::exp(-(d[0] * d[0] + d[1] * d[1] + d[2] * d[2]) / (2.0 * w * w));
    }
    return out;
}

// U w ∇⊥G in the (x, y) plane and U w ∇G.
VectorField vortex(const GridPtr& g, double w, double amp) {
    VectorField u(g);
    const ScalarField G = gaussian(g, w);
    for (std::size_t i = 0; i < G.size(); ++i) {
        const auto d = centered_offset(*g, i);
        u[0][i] = -amp * d[1] / w * G[i];
        u[1][i] = amp * d[0] / w * G[i];
    }
    return u;
}

VectorField gradient_profile(const GridPtr& g, double w, double amp) {
    VectorField u(g);
    const ScalarField G = gaussian(g, w);
    for (std::size_t i = 0; i < G.size(); ++i) {
        const auto d = centered_offset(*g, i);
        for (int j = 0; j < g->dim(); ++j) u[j][i] = -amp * d[static_cast<std::size_t>(j)] / w * G[i];
    }
    return u;
}

VectorField random_vector(const GridPtr& g, unsigned long seed, int nmax, double amp) {
    VectorField v(g);
    for (int j = 0; j < g->dim(); ++j) v[j] = random_band_limited(g, seed + 1000ul * static_cast<unsigned long>(j + 1), nmax, amp);
    return v;
}

double l2(const ScalarField& f) { return std::sqrt((f * f).integral()); }
double l2(const VectorField& v) { return std::sqrt(v.norm2().integral()); }

ScalarField s_profile(const GridPtr& g, const DataFamily& f, double eps, double gamma) {
    const std::string& id = f.s_profile;
    if (id == "zero") return ScalarField(g);
    if (id == "gaussian") return f.amplitude * gaussian(g, f.width);
    if (id == "random") return random_band_limited(g, f.seed, f.random_modes, f.amplitude);
    if (id == "spike") {
        const double rate = g->dim() == 3 ? 4.0 / (6.0 - gamma) : 1.0;
        const double radius = f.width * std::pow(eps, rate);
        const double height = g->dim() == 3 ? std::pow(radius / f.width, -0.5) : 1.0;
        return (f.amplitude * height / eps) * gaussian(g, radius);
    }
    throw ConfigError("unknown s profile '" + id + "'");
}

VectorField u_profile(const GridPtr& g, const DataFamily& f) {
    const std::string& id = f.u_profile;
    const double U = f.u_amplitude;
    if (id == "zero") return VectorField(g);
    if (id == "vortex") return vortex(g, f.width, U);
    if (id == "gradient") return gradient_profile(g, f.width, U);
    if (id == "vortex+gradient") return vortex(g, f.width, U) + gradient_profile(g, f.width, U);
    if (id == "shear") {
        VectorField u(g);
        const double L = g->length();
        u[0] = sample(g, [&](double, double y, double) { return U * std::sin(2.0 * std::numbers::pi * y / L); });
        return u;
    }
    if (id == "random") return helmholtz_p(random_vector(g, f.seed + 7ul, f.random_modes, U));
    throw ConfigError("unknown u profile '" + id + "'");
}

LemmaRow lemma_row(const ScalarField& rho, const ScalarField& sigma, double eps, double gamma) {
    const Grid& g = rho.grid();
    LemmaRow row;
    row.epsilon = eps;
    ScalarField f = rho;
    f += -1.0;
    const ScalarField sq = map(rho, [](double r) { return std::sqrt(r) - 1.0; });
    const double rate = initial_l2_rate(g.dim(), gamma);
    const double scale = std::pow(eps, rate);
    row.rho_l2 = l2(f);
    row.rho_l2_ratio = row.rho_l2 / scale;
    row.sqrt_l2 = l2(sq);
    row.sqrt_l2_ratio = row.sqrt_l2 / scale;
    row.orlicz_ratio = orlicz_bound(rho, gamma, eps).ratio_to_eps2;
    row.grad_l2 = l2(gradient(rho));
    row.sigma_l2 = l2(sigma);
    row.pointwise_sqrt_gap = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < f.size(); ++i)
        row.pointwise_sqrt_gap = std::max(row.pointwise_sqrt_gap, std::abs(sq[i]) - std::abs(f[i]));
    const std::vector<double> qs = g.dim() == 3 ? std::vector<double>{2.0, 3.0, 4.0, 5.0}
                                                : std::vector<double>{2.0, 4.0, 8.0, 16.0};
    for (double q : qs) {
        const double r = g.dim() == 3 ? beta_exponent(q) : 2.0 / q;
        row.lq_ratios.emplace_back(q, lebesgue_norm(f, q) / std::pow(eps, r));
    }
    return row;
}

}  // namespace

ScalarField mollify(const ScalarField& f, double delta) {
    if (!(delta > 0.0)) throw ConfigError("mollify: delta must be > 0");
    return inverse(apply_radial_multiplier(forward(f), [delta](double k) { return k * delta <= 1.0 ? 1.0 : 0.0; }));
}

VectorField mollify(const VectorField& v, double delta) {
    VectorField out(v.grid_ptr());
    for (int j = 0; j < v.dim(); ++j) out[j] = mollify(v[j], delta);
    return out;
}

ScalarField random_band_limited(const GridPtr& g, unsigned long seed, int nmax, double amp) {
    // Integer draws mapped to [−1, 1) by hand so the stream is portable.
    std::mt19937_64 rng(seed);
    auto draw = [&rng]() { return std::ldexp(static_cast<double>(rng() >> 11), -52) - 1.0; };
    const Grid& grid = *g;
    const double k0 = 2.0 * std::numbers::pi / grid.length();
    const int nz = grid.dim() == 3 ? nmax : 0;
    ScalarField out(g);
    for (int a = 0; a <= nmax; ++a) {
        for (int b = -nmax; b <= nmax; ++b) {
            for (int c = -nz; c <= nz; ++c) {
                if (a == 0 && (b < 0 || (b == 0 && c <= 0))) continue;
                const double ca = draw(), cb = draw();
                for (std::size_t i = 0; i < out.size(); ++i) {
                    const auto x = grid.coords(i);
                    const double ph = k0 * (a * x[0] + b * x[1] + c * x[2]);
                    out[i] += ca * std::cos(ph) + cb * std::sin(ph);
                }
            }
        }
    }
    double m = 0.0;
    for (double v : out.values()) m = std::max(m, std::abs(v));
    if (m > 0.0) out *= amp / m;
    return out;
}

void DataFamily::validate() const {
    if (!(width > 0.0)) throw ConfigError("family: width must be > 0");
    if (!(delta > 0.0)) throw ConfigError("family: delta must be > 0");
    if (perturbation < 0.0) throw ConfigError("family: perturbation must be >= 0");
    if (random_modes < 1) throw ConfigError("family: random_modes must be >= 1");
    static const std::vector<std::string> ss{"zero", "gaussian", "random", "spike"};
    static const std::vector<std::string> us{"zero", "vortex", "gradient", "vortex+gradient", "shear", "random"};
    if (std::find(ss.begin(), ss.end(), s_profile) == ss.end())
        throw ConfigError("family: unknown s profile '" + s_profile + "'");
    if (std::find(us.begin(), us.end(), u_profile) == us.end())
        throw ConfigError("family: unknown u profile '" + u_profile + "'");
}

double initial_l2_rate(int dim, double gamma) { return dim == 3 && gamma < 2.0 ? 4.0 / (6.0 - gamma) : 1.0; }

IllPrepared make_ill_prepared(const GridPtr& g, const DataFamily& f, const PhysParams& p, double rho_min) {
    f.validate();
    p.validate();
    const double eps = p.epsilon;
    ScalarField sigma = s_profile(g, f, eps, p.gamma);
    ScalarField s_lim = f.s_profile == "spike" ? ScalarField(g) : sigma;
    VectorField u_lim = u_profile(g, f);
    VectorField u_eps = u_lim;
    if (f.perturbation > 0.0) {
        const double c = f.perturbation * std::sqrt(eps);
        sigma += random_band_limited(g, f.seed + 11ul, f.random_modes, c);
        u_eps += random_vector(g, f.seed + 13ul, f.random_modes, c);
    }
    ScalarField rho = eps * sigma;
    rho += 1.0;
    if (rho.min() < rho_min) {
        std::ostringstream os;
        os << "make_ill_prepared: vacuum, min rho = " << rho.min() << " < " << rho_min;
        throw DomainError(os.str());
    }
    LemmaRow lemma = lemma_row(rho, sigma, eps, p.gamma);
    FluidState st = FluidState::from_velocity(rho, u_eps, p);
    return {std::move(st), std::move(sigma), std::move(s_lim), std::move(u_lim), std::move(lemma)};
}

AcousticState acoustic_initial_data(const ScalarField& s_limit, const VectorField& u_limit, double delta,
                                    const PhysParams& params) {
    return {mollify(s_limit, delta), mollify(helmholtz_q(u_limit), delta), params, 0.0};
}

EulerTracker::EulerTracker(const EulerState& initial, double h)
    : h_(h), a_(make_node(initial)), b_(make_node(euler_step(initial, h))) {
    if (!(h > 0.0)) throw ConfigError("EulerTracker: spacing must be > 0");
}

EulerTracker::Node EulerTracker::make_node(EulerState st) const {
    VectorField du = euler_time_derivative(st.u);
    return {std::move(st), std::move(du)};
}

EulerSample EulerTracker::at(double t) {
    if (t < a_.state.t - 1e-12 * std::max(1.0, std::abs(t))) throw ConfigError("EulerTracker: times must not decrease");
    while (t > b_.state.t) {
        EulerState next = euler_step(b_.state, h_);
        a_ = std::move(b_);
        b_ = make_node(std::move(next));
    }
    const double h = b_.state.t - a_.state.t;
    const double x = std::clamp((t - a_.state.t) / h, 0.0, 1.0);
    const double x2 = x * x, x3 = x2 * x;
    const double h00 = 2 * x3 - 3 * x2 + 1, h10 = x3 - 2 * x2 + x, h01 = -2 * x3 + 3 * x2, h11 = x3 - x2;
    const double d00 = (6 * x2 - 6 * x) / h, d10 = 3 * x2 - 4 * x + 1, d01 = (-6 * x2 + 6 * x) / h, d11 = 3 * x2 - 2 * x;
    EulerSample s{VectorField(a_.state.u.grid_ptr()), VectorField(a_.state.u.grid_ptr())};
    for (int j = 0; j < s.u.dim(); ++j) {
        const auto& ua = a_.state.u[j];
        const auto& ub = b_.state.u[j];
        const auto& da = a_.du[j];
        const auto& db = b_.du[j];
        for (std::size_t i = 0; i < ua.size(); ++i) {
            s.u[j][i] = h00 * ua[i] + h * h10 * da[i] + h01 * ub[i] + h * h11 * db[i];
            s.du[j][i] = d00 * ua[i] + d10 * da[i] + d01 * ub[i] + d11 * db[i];
        }
    }
    return s;
}

AnsatzPair ansatz_pair(double t, const EulerSample& e, const AcousticPropagator& acoustic) {
    const double eps = acoustic.initial().params.epsilon;
    AcousticState a = acoustic.at(t);
    auto [ds, dg] = acoustic.time_derivative(t);
    ScalarField r = eps * a.s;
    r += 1.0;
    VectorField U = e.u + a.grad_phi;
    return {std::move(r), std::move(U), eps * ds, e.du + dg, e.u, std::move(a)};
}

Ansatz::Ansatz(const ScalarField& s_limit, const VectorField& u_limit, double delta, const PhysParams& params,
               double euler_spacing)
    : acoustic_(acoustic_initial_data(s_limit, u_limit, delta, params)),
      euler_(project_initial(u_limit), euler_spacing) {}

AnsatzPair Ansatz::at(double t) { return ansatz_pair(t, euler_.at(t), acoustic_); }

double wave_escape_window(double dist, const PhysParams& p, double k_max) {
    if (!(dist > 0.0)) throw ConfigError("wave_escape_window: window must lie strictly inside the box");
    if (!(k_max > 0.0)) throw ConfigError("wave_escape_window: k_max must be > 0");
    // |ω′| is nondecreasing in |k| for κ ≥ 0; the scan guards the claim.
    double vmax = 0.0;
    const int samples = 256;
    for (int i = 1; i <= samples; ++i) {
        const double k = k_max * i / samples;
        vmax = std::max(vmax, std::sqrt(p.gamma) * std::abs(multiplier_phi_derivative(k, p.epsilon, p.kappa)));
    }
    vmax = std::max(vmax, std::sqrt(p.gamma) / p.epsilon);
    return dist / vmax;
}

double wave_escape_window(const Grid& g, const Window& w, const PhysParams& p, double k_max) {
    w.validate(g);
    return wave_escape_window(w.distance_to_boundary(g), p, k_max);
}

void require_within_window(double horizon, double t_max) {
    if (horizon > t_max) {
        std::ostringstream os;
        os << "observation horizon " << horizon << " exceeds the wave-escape window " << t_max
           << "; use a larger box length L";
        throw ConfigError(os.str());
    }
}

void SweepConfig::validate() const {
    if (dim != 2 && dim != 3) throw ConfigError("dimension must be 2 or 3");
    if (epsilons.empty()) throw ConfigError("epsilon list is empty");
    for (std::size_t i = 0; i < epsilons.size(); ++i) {
        if (!(epsilons[i] > 0.0)) throw ConfigError("epsilon values must be > 0");
        if (i > 0 && !(epsilons[i] < epsilons[i - 1])) throw ConfigError("epsilon list must be strictly decreasing");
    }
    if (nu_coeff < 0.0) throw ConfigError("nu coefficient must be >= 0");
    if (!(nu_power > 0.0)) throw ConfigError("nu power must be > 0");
    if (!(t_end > 0.0)) throw ConfigError("t_end must be > 0");
    if (!(dt_factor > 0.0)) throw ConfigError("dt_factor must be > 0");
    if (checkpoint_stride < 1) throw ConfigError("checkpoint stride must be >= 1");
    if (!(window_fraction > 0.0 && window_fraction < 1.0)) throw ConfigError("window fraction must be in (0,1)");
    if (hs_index < 0.0) throw ConfigError("hs_index must be >= 0");
    if (threads < 1) throw ConfigError("threads must be >= 1");
    family.validate();
    PhysParams p;
    p.gamma = gamma;
    p.kappa = kappa;
    p.validate();
}

double SweepConfig::nu(double eps) const { return nu_coeff * std::pow(eps, nu_power); }

double SweepConfig::time_exponent() const {
    if (strichartz_p) return *strichartz_p;
    return dim == 3 ? 2.0 : 4.0;
}

SweepRow run_member(const SweepConfig& cfg, double eps) {
    SweepRow row;
    row.epsilon = eps;
    row.nu = cfg.nu(eps);
    PhysParams p;
    p.epsilon = eps;
    p.nu = row.nu;
    p.kappa = cfg.kappa;
    p.gamma = cfg.gamma;
    p.validate();

    auto g = make_grid(cfg.dim, cfg.n, cfg.length);
    const Window K = Window::centered(*g, cfg.window_fraction);
    IllPrepared data = make_ill_prepared(g, cfg.family, p, cfg.limits.rho_min);
    row.lemma = data.lemma;
    Ansatz ansatz(data.s_limit, data.u_limit, cfg.family.delta, p, cfg.euler_spacing);

    // Audit terms against the mollified acoustic data.
    {
        const AcousticState a0 = ansatz.acoustic().initial();
        const ScalarField ds = data.sigma - a0.s;
        const VectorField du = data.state.velocity() - data.u_limit;
        const ScalarField sr = map(data.state.rho, [](double r) { return std::sqrt(r); });
        row.audit.velocity_term = (sr * sr * du.norm2()).integral();
        row.audit.gradient_term = eps * eps * gradient(ds).norm2().integral();
        row.audit.density_term = (ds * ds).integral();
    }

    const double p_t = cfg.time_exponent();
    const double t_star = std::min(cfg.t_end, wave_escape_window(*g, K, p, 1.0 / cfg.family.delta));
    row.strichartz_horizon = t_star;

    SimulationConfig sc;
    sc.t_end = cfg.t_end;
    sc.dt = cfg.dt_factor * eps;
    sc.stride = std::numeric_limits<int>::max();
    sc.keep_states = false;
    sc.limits = cfg.limits;

    BudgetAccumulator acc;
    double prev_t = 0.0, prev_loc = 0.0, loc_int = 0.0;
    double prev_str = 0.0, str_int = 0.0;
    bool str_open = true;
    sc.on_step = [&](const FluidState& st, long n) {
        const double t = st.t;
        AnsatzPair a = ansatz.at(t);
        BudgetSample bs{t, st.rho, st.m, a.r, a.U, a.dt_r, a.dt_U};
        const BudgetIntegrands in = budget_integrands(bs, p);
        acc.add(t, in);
        row.sup_rel_energy = std::max(row.sup_rel_energy, in.relative_energy);
        row.final_rel_energy = in.relative_energy;
        if (n == 0) {
            const double denom = row.audit.velocity_term + p.kappa * p.kappa * row.audit.gradient_term +
                                 row.audit.density_term;
            row.audit.initial_rel_energy = in.relative_energy;
            row.audit.constant = denom > 0.0 ? in.relative_energy / denom : 0.0;
        }

        const ScalarField sr = map(st.rho, [](double r) { return std::sqrt(r); });
        VectorField diff = st.m;
        for (int j = 0; j < diff.dim(); ++j) {
            for (std::size_t i = 0; i < sr.size(); ++i) diff[j][i] /= sr[i];
        }
        diff -= a.u_euler;
        const double lv = lebesgue_norm(diff, 2.0, K);
        const double loc = lv * lv;

        ScalarField fl = st.rho;
        fl += -1.0;
        row.rho_hs = std::max(row.rho_hs, sobolev_norm(fl, cfg.hs_index, 2.0));

        double str = 0.0;
        if (str_open) str = std::pow(lebesgue_norm(a.acoustic.s, a.acoustic.grad_phi, cfg.strichartz_q, K), p_t);
        if (n > 0) {
            const double h = t - prev_t;
            loc_int += 0.5 * h * (prev_loc + loc);
            if (str_open) {
                if (t <= t_star * (1.0 + 1e-12)) {
                    str_int += 0.5 * h * (prev_str + str);
                } else {
                    str_open = false;
                }
            }
        }
        prev_t = t;
        prev_loc = loc;
        prev_str = str;
    };

    Trajectory tr = simulate(data.state, sc);
    row.dt = tr.dt;
    row.steps = tr.steps;
    row.l2loc_vel_err = std::sqrt(loc_int);
    row.strichartz = std::pow(str_int, 1.0 / p_t);

    const auto& rows = acc.rows();
    row.rei_slack = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < rows.size(); ++i) {
        if (i > 0) row.rei_slack = std::min(row.rei_slack, rows[i].slack());
        row.max_identity_defect = std::max(row.max_identity_defect, std::abs(rows[i].identity_defect()));
        if (i % static_cast<std::size_t>(cfg.checkpoint_stride) == 0 || i + 1 == rows.size())
            row.checkpoints.push_back(rows[i]);
    }
    row.ok = true;
    return row;
}

int threads_from_env() {
    const char* v = std::getenv("NSK_THREADS");
    if (v == nullptr) return 1;
    const int n = std::atoi(v);
    return std::max(1, n);
}

SweepResult run_sweep(const SweepConfig& cfg) {
    cfg.validate();
    SweepResult res;
    res.rows.resize(cfg.epsilons.size());
    std::atomic<std::size_t> next{0};
    auto worker = [&]() {
        for (std::size_t i = next++; i < cfg.epsilons.size(); i = next++) {
            const double eps = cfg.epsilons[i];
            try {
                res.rows[i] = run_member(cfg, eps);
            } catch (const std::exception& e) {
                SweepRow r;
                r.epsilon = eps;
                r.nu = cfg.nu(eps);
                r.ok = false;
                r.error = e.what();
                res.rows[i] = std::move(r);
            }
        }
    };
    const int nt = std::min<int>(cfg.threads, static_cast<int>(cfg.epsilons.size()));
    if (nt <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (int i = 0; i < nt; ++i) pool.emplace_back(worker);
        for (auto& t : pool) t.join();
    }

    for (const auto& r : res.rows) {
        if (!r.ok) ++res.failures;
    }
    auto add_fit = [&](const std::string& name, double SweepRow::*field) {
        MetricFit mf;
        mf.metric = name;
        for (const auto& r : res.rows) {
            if (r.ok) mf.points.emplace_back(r.epsilon, r.*field);
        }
        std::size_t positive = 0;
        for (const auto& pt : mf.points) positive += pt.second > 0.0 ? 1 : 0;
        if (positive < 3) return;
        mf.fit = fit_rate(mf.points);
        res.fits.push_back(std::move(mf));
    };
    add_fit("sup_rel_energy", &SweepRow::sup_rel_energy);
    add_fit("l2loc_vel_err", &SweepRow::l2loc_vel_err);
    add_fit("strichartz_q6", &SweepRow::strichartz);
    add_fit("rho_h_s_err", &SweepRow::rho_hs);
    return res;
}

}  // namespace nsk
