// nsk: command-line driver for the solver, the acoustic propagator and the
// low-Mach sweep harness.
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"
#include "nsk/errors.hpp"
#include "nsk/io.hpp"

namespace fs = std::filesystem;
using namespace nsk;

namespace {

struct Common {
    std::string config;
    std::vector<std::string> sets;
    std::string out;
};

RunConfig load(const Common& c) {
    RunConfig cfg = c.config.empty() ? parse_config_text("", c.sets) : parse_config(c.config, c.sets);
    if (!c.out.empty()) cfg.out = c.out;
    return cfg;
}

fs::path out_dir(const RunConfig& cfg) {
    fs::path d(cfg.out);
    std::error_code ec;
    fs::create_directories(d, ec);
    if (ec) throw IoError("cannot create output directory " + d.string() + ": " + ec.message());
    return d;
}

void save(const fs::path& path, const std::string& text) {
    write_text_file(path, text);
    std::cout << "wrote " << path.string() << '\n';
}

std::string dump(const nlohmann::ordered_json& j) { return j.dump(2) + "\n"; }

std::string fmt(double v) { return format_double(v); }

// --- simulate ----------------------------------------------------------------

int cmd_simulate(const RunConfig& cfg) {
    const PhysParams p = cfg.params(cfg.epsilon);
    auto g = make_grid(cfg.dim, cfg.n, cfg.length);
    IllPrepared data = make_ill_prepared(g, cfg.family, p);
    SimulationConfig sc;
    sc.t_end = cfg.t_end;
    sc.dt = cfg.dt;
    sc.stride = cfg.stride;
    sc.limits.cfl = cfg.cfl;
    Trajectory tr = simulate(data.state, sc);

    std::ostringstream os;
    os << "t,energy,bd_entropy,mass,viscous_dissipation,energy_balance\n";
    for (const auto& s : tr.snapshots) {
        os << fmt(s.t) << ',' << fmt(s.energy) << ',' << fmt(s.bd_entropy) << ',' << fmt(s.mass) << ','
           << fmt(s.integrated.viscous) << ',' << fmt(s.energy + s.integrated.viscous) << '\n';
    }
    const fs::path dir = out_dir(cfg);
    save(dir / "simulate.csv", os.str());
    nlohmann::ordered_json j;
    j["dt"] = tr.dt;
    j["steps"] = tr.steps;
    j["energy_balance_drift"] = tr.energy_balance_drift();
    save(dir / "simulate.json", dump(j));
    write_snapshot(dir / "final.nsksnap", to_snapshot(*tr.snapshots.back().state));
    std::cout << "wrote " << (dir / "final.nsksnap").string() << '\n';
    return 0;
}

// --- acoustic-decay ----------------------------------------------------------

int cmd_decay(const RunConfig& cfg) {
    if (cfg.epsilon_list.empty()) throw ConfigError("config key 'epsilon_list': must not be empty");
    auto g = make_grid(cfg.dim, cfg.n, cfg.length);
    const Window K = Window::centered(*g, cfg.window_fraction);
    const double k_max = 1.0 / cfg.family.delta;
    const PhysParams pmin = cfg.params(cfg.epsilon_list.back());
    const double t_max = wave_escape_window(*g, K, pmin, k_max);
    const double horizon = cfg.horizon > 0.0 ? cfg.horizon : t_max;
    require_within_window(horizon, t_max);

    auto family = [&](double eps) {
        const PhysParams p = cfg.params(eps);
        IllPrepared d = make_ill_prepared(g, cfg.family, p);
        return acoustic_initial_data(d.s_limit, d.u_limit, cfg.family.delta, p);
    };
    DecayConfig dc;
    const bool d3 = cfg.dim == 3;
    dc.spec.p = cfg.decay_p > 0.0 ? cfg.decay_p : (d3 ? 2.0 : 5.0);
    dc.spec.q = cfg.decay_q > 0.0 ? cfg.decay_q : (d3 ? 6.0 : 4.0);
    dc.spec.s = cfg.norm_s;
    dc.spec.window = K;
    dc.horizon = [horizon](double) { return horizon; };
    dc.time_samples = cfg.time_samples;
    dc.theta = cfg.theta;
    if (!d3 && !dc.theta && cfg.decay_p == 0.0 && cfg.decay_q == 0.0) dc.theta = 0.4;
    DecayExperiment ex = strichartz_decay_experiment(family, cfg.epsilon_list, dc);

    std::ostringstream os;
    os << "epsilon,horizon,norm\n";
    for (const auto& r : ex.rows) os << fmt(r.epsilon) << ',' << fmt(r.horizon) << ',' << fmt(r.norm) << '\n';
    const fs::path dir = out_dir(cfg);
    save(dir / "decay.csv", os.str());
    nlohmann::ordered_json j;
    j["metric"] = "strichartz";
    j["slope"] = ex.fit.slope;
    j["residual"] = ex.fit.residual;
    j["alpha_max"] = ex.alpha_max;
    j["horizon"] = horizon;
    nlohmann::ordered_json pts = nlohmann::ordered_json::array();
    for (const auto& r : ex.rows) pts.push_back({r.epsilon, r.norm});
    j["points"] = pts;
    save(dir / "decay.json", dump(j));
    return 0;
}

// --- limit-sweep -------------------------------------------------------------

int cmd_sweep(const RunConfig& cfg) {
    const SweepResult res = run_sweep(cfg.sweep());
    const fs::path dir = out_dir(cfg);
    std::ostringstream a, b, c, d;
    write_sweep_csv(a, res);
    write_fits_json(b, res.fits);
    write_lemma_csv(c, res);
    write_budget_csv(d, res);
    save(dir / "sweep.csv", a.str());
    save(dir / "sweep_fits.json", b.str());
    save(dir / "lemma.csv", c.str());
    save(dir / "budget.csv", d.str());
    for (const auto& r : res.rows) {
        if (!r.ok) std::cerr << "member epsilon=" << fmt(r.epsilon) << " failed: " << r.error << '\n';
    }
    return res.failures > 0 ? 1 : 0;
}

// --- dispersion-check --------------------------------------------------------

int cmd_dispersion(const RunConfig& cfg) {
    const PhysParams p = cfg.params(cfg.epsilon);
    auto g = make_grid(cfg.dim, cfg.n, cfg.length);
    IllPrepared d = make_ill_prepared(g, cfg.family, p);
    const AcousticState st = acoustic_initial_data(d.s_limit, d.u_limit, cfg.family.delta, p);
    // Base step: one tenth of the fastest represented period.
    const double omega = acoustic_frequency(1.0 / cfg.family.delta, p);
    const double dt0 = cfg.dt > 0.0 ? cfg.dt : 0.1 / omega;
    std::vector<std::pair<double, double>> pts;
    std::ostringstream os;
    os << "dt,residual\n";
    for (int i = 0; i < 4; ++i) {
        const double h = dt0 / std::pow(2.0, i);
        const double r = dispersion_residual(st, cfg.t_end, h);
        pts.emplace_back(h, r);
        os << fmt(h) << ',' << fmt(r) << '\n';
    }
    const RateFit fit = fit_rate(pts);
    const fs::path dir = out_dir(cfg);
    save(dir / "dispersion.csv", os.str());
    nlohmann::ordered_json j;
    j["metric"] = "dispersion_residual";
    j["slope"] = fit.slope;
    j["residual"] = fit.residual;
    nlohmann::ordered_json arr = nlohmann::ordered_json::array();
    for (const auto& [h, r] : pts) arr.push_back({h, r});
    j["points"] = arr;
    save(dir / "dispersion.json", dump(j));
    std::cout << "slope " << fmt(fit.slope) << '\n';
    return 0;
}

// --- norms -------------------------------------------------------------------

int cmd_norms(const RunConfig& cfg) {
    if (cfg.snapshot.empty()) throw ConfigError("config key 'snapshot': norms needs an input snapshot");
    const SnapshotFile snap = read_snapshot(cfg.snapshot);
    std::optional<Window> K;
    if (cfg.use_window) K = Window::centered(snap.fields.front().grid(), cfg.window_fraction);
    std::ostringstream os;
    os << "field,s,q,norm\n";
    for (std::size_t i = 0; i < snap.fields.size(); ++i) {
        const double v = sobolev_norm(snap.fields[i], cfg.norm_s, cfg.norm_q, K);
        os << snap.header.names[i] << ',' << fmt(cfg.norm_s) << ',' << fmt(cfg.norm_q) << ',' << fmt(v) << '\n';
    }
    save(out_dir(cfg) / "norms.csv", os.str());
    return 0;
}

// --- euler -------------------------------------------------------------------

int cmd_euler(const RunConfig& cfg) {
    auto g = make_grid(cfg.dim, cfg.n, cfg.length);
    IllPrepared d = make_ill_prepared(g, cfg.family, cfg.params(cfg.epsilon));
    EulerState st = project_initial(d.u_limit);
    double dt = cfg.dt;
    if (dt <= 0.0) {
        const double rate = euler_courant(st.u, 1.0);
        dt = rate > 0.0 ? std::min(cfg.euler_spacing, cfg.cfl / rate) : cfg.euler_spacing;
    }
    const long steps = std::max(1L, static_cast<long>(std::ceil(cfg.t_end / dt - 1e-9)));
    dt = cfg.t_end / static_cast<double>(steps);

    std::ostringstream os;
    os << "t,kinetic_energy,enstrophy,divergence_ratio,pressure_residual\n";
    auto row = [&](const EulerState& s) {
        os << fmt(s.t) << ',' << fmt(kinetic_energy(s.u)) << ',' << fmt(cfg.dim == 2 ? enstrophy(s.u) : 0.0) << ','
           << fmt(divergence_ratio(s.u)) << ',' << fmt(pressure_residual(s)) << '\n';
    };
    row(st);
    for (long i = 1; i <= steps; ++i) {
        st = euler_step(st, dt);
        if (i % cfg.stride == 0 || i == steps) row(st);
    }
    const fs::path dir = out_dir(cfg);
    save(dir / "euler.csv", os.str());
    write_snapshot(dir / "euler_final.nsksnap", to_snapshot(st));
    std::cout << "wrote " << (dir / "euler_final.nsksnap").string() << '\n';
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Navier-Stokes-Korteweg low-Mach toolkit"};
    app.require_subcommand(1);
    Common common;
    app.add_option("--config", common.config, "key=value config file");
    app.add_option("--set", common.sets, "override a config key (key=value), repeatable");
    app.add_option("--out", common.out, "output directory");

    struct Cmd {
        const char* name;
        const char* help;
        int (*run)(const RunConfig&);
    };
    const Cmd cmds[] = {
        {"simulate", "run the NSK solver on one data set", cmd_simulate},
        {"acoustic-decay", "Strichartz norm of the acoustic waves across epsilon", cmd_decay},
        {"limit-sweep", "low-Mach sweep against the Euler + acoustic ansatz", cmd_sweep},
        {"dispersion-check", "residual of the fourth-order wave equation vs dt", cmd_dispersion},
        {"norms", "Lebesgue/Sobolev norms of the fields of a snapshot", cmd_norms},
        {"euler", "incompressible Euler reference run", cmd_euler},
    };
    std::vector<CLI::App*> subs;
    for (const auto& c : cmds) {
        auto* s = app.add_subcommand(c.name, c.help);
        // Options are accepted before or after the subcommand name.
        s->add_option("--config", common.config, "key=value config file");
        s->add_option("--set", common.sets, "override a config key (key=value), repeatable");
        s->add_option("--out", common.out, "output directory");
        subs.push_back(s);
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    }

    try {
        const RunConfig cfg = load(common);
        for (std::size_t i = 0; i < subs.size(); ++i) {
            if (subs[i]->parsed()) return cmds[i].run(cfg);
        }
        return 2;
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return 2;
    } catch (const IoError& e) {
        std::cerr << "i/o error: " << e.what() << '\n';
        return 3;
    } catch (const NumericalAbort& e) {
        std::cerr << "numerical abort: " << e.what() << '\n';
        return 1;
    } catch (const DomainError& e) {
        std::cerr << "domain error: " << e.what() << '\n';
        return 1;
    } catch (const InsufficientData& e) {
        std::cerr << "insufficient data: " << e.what() << '\n';
        return 1;
    }
}
