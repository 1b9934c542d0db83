#include <cmath>
#include <cstdlib>
#include <numbers>

#include "doctest.h"
#include "nsk/errors.hpp"
#include "nsk/harness.hpp"
#include "nsk/spectral.hpp"
#include "test_util.hpp"

using namespace nsk;

namespace {
constexpr double kTwoPi = 2.0 * std::numbers::pi;

PhysParams params(double eps, double nu, double kappa, double gamma) {
    PhysParams p;
    p.epsilon = eps;
    p.nu = nu;
    p.kappa = kappa;
    p.gamma = gamma;
    return p;
}

double hs(const ScalarField& f, double s) { return spectral_l2_norm(bessel_filter(forward(f), s)); }

SweepConfig small_sweep() {
    SweepConfig c;
    c.n = 32;
    c.length = 16.0;
    c.epsilons = {0.2, 0.1};
    c.t_end = 0.2;
    c.dt_factor = 0.05;
    c.family.width = 1.5;
    c.family.delta = 0.5;
    return c;
}
}  // namespace

TEST_CASE("mollify") {
    auto g = make_grid(2, 64, kTwoPi);
    SUBCASE("band-limited input is unchanged") {
        auto f = sample(g, [](double x, double y, double) { return std::cos(2 * x) * std::sin(y) + 0.3 * std::sin(3 * y); });
        // max |k| = 3 ≤ 1/δ
        CHECK(test::max_abs_diff(mollify(f, 0.3), f) < 1e-14);
    }
    SUBCASE("converges in L2 as delta -> 0 and contracts every H^s norm") {
        auto f = sample(g, [](double x, double y, double) {
            return std::exp(-((x - 3) * (x - 3) + (y - 3) * (y - 3)) / (2 * 0.3 * 0.3));
        });
        double prev = 1e300;
        for (double delta : {0.5, 0.25, 0.125, 0.0625, 0.04}) {
            auto m = mollify(f, delta);
            const double err = test::l2(m - f);
            CHECK(err < prev);
            prev = err;
            for (double s : {0.0, 0.5, 1.0, 2.0}) CHECK(hs(m, s) <= hs(f, s) * (1 + 1e-14));
        }
        CHECK(prev < 1e-6);
    }
    CHECK_THROWS_AS(mollify(ScalarField(g), 0.0), ConfigError);
}

TEST_CASE("random_band_limited is seeded and band-limited") {
    auto g = make_grid(2, 32, kTwoPi);
    auto a = random_band_limited(g, 42, 3, 0.5);
    auto b = random_band_limited(g, 42, 3, 0.5);
    CHECK(test::max_abs_diff(a, b) == 0.0);
    CHECK(test::max_abs(a) == doctest::Approx(0.5));
    CHECK(test::max_abs_diff(mollify(a, 1.0 / (3.0 * std::sqrt(2.0))), a) < 1e-13);
    CHECK(test::max_abs_diff(a, random_band_limited(g, 43, 3, 0.5)) > 1e-3);
}

TEST_CASE("ill-prepared data and the initial-data table") {
    auto g2 = make_grid(2, 64, 16.0);
    SUBCASE("zero density profile") {
        DataFamily f;
        f.s_profile = "zero";
        auto d = make_ill_prepared(g2, f, params(0.1, 0.0, 0.5, 2.0));
        CHECK(test::max_abs_diff(d.state.rho, ScalarField(g2, 1.0)) == 0.0);
        CHECK(d.lemma.rho_l2 == 0.0);
        CHECK(d.lemma.sqrt_l2 == 0.0);
        CHECK(d.lemma.orlicz_ratio == 0.0);
        for (auto [q, r] : d.lemma.lq_ratios) CHECK(r == 0.0);
    }
    SUBCASE("gamma = 2.5: L2 norm of the fluctuation halves with epsilon") {
        DataFamily f;
        std::vector<std::pair<double, double>> pts;
        double prev = 0.0;
        for (double eps : {0.2, 0.1, 0.05, 0.025}) {
            auto d = make_ill_prepared(g2, f, params(eps, 0.0, 0.5, 2.5));
            if (prev > 0.0) CHECK(prev / d.lemma.rho_l2 == doctest::Approx(2.0).epsilon(1e-12));
            prev = d.lemma.rho_l2;
            pts.emplace_back(eps, d.lemma.rho_l2);
            CHECK(d.lemma.pointwise_sqrt_gap <= 0.0);
            CHECK(d.state.rho.min() > 0.0);
            // ϱ⁰ = 1 + εσ⁰ exactly
            CHECK(test::max_abs_diff(d.state.rho - ScalarField(g2, 1.0), eps * d.sigma) < 1e-15);
        }
        CHECK(fit_rate(pts).slope == doctest::Approx(1.0).epsilon(1e-10));
    }
    SUBCASE("vacuum is rejected") {
        DataFamily f;
        f.amplitude = -8.0;
        CHECK_THROWS_AS(make_ill_prepared(g2, f, params(0.2, 0.0, 0.5, 2.0)), DomainError);
        CHECK_NOTHROW(make_ill_prepared(g2, f, params(0.05, 0.0, 0.5, 2.0)));
    }
    SUBCASE("unknown profile") {
        DataFamily f;
        f.u_profile = "swirl";
        CHECK_THROWS_AS(make_ill_prepared(g2, f, params(0.1, 0.0, 0.5, 2.0)), ConfigError);
    }
    SUBCASE("velocity profiles") {
        DataFamily f;
        f.width = 1.2;
        for (const char* id : {"vortex", "shear", "random"}) {
            f.u_profile = id;
            auto d = make_ill_prepared(g2, f, params(0.1, 0.0, 0.5, 2.0));
            CHECK(divergence_ratio(d.u_limit) < 1e-6);
        }
        f.u_profile = "gradient";
        auto d = make_ill_prepared(g2, f, params(0.1, 0.0, 0.5, 2.0));
        CHECK(test::l2(helmholtz_p(d.u_limit)) < 1e-6 * test::l2(d.u_limit));
    }
}

TEST_CASE("concentrating spike family attains the 3D rate for gamma < 2") {
    // radius w ε^{4/(6−γ)} must stay resolved: w = 0.5 on a unit box, N = 64
    auto g = make_grid(3, 64, 1.0);
    DataFamily f;
    f.s_profile = "spike";
    f.u_profile = "zero";
    f.width = 0.5;
    f.amplitude = 0.5;
    const double gamma = 1.5;
    std::vector<std::pair<double, double>> pts;
    std::vector<double> orlicz, grad;
    for (double eps : {0.2, 0.1, 0.05, 0.025}) {
        auto d = make_ill_prepared(g, f, params(eps, 0.0, 0.5, gamma));
        pts.emplace_back(eps, d.lemma.rho_l2);
        orlicz.push_back(d.lemma.orlicz_ratio);
        grad.push_back(d.lemma.grad_l2);
        CHECK(d.lemma.pointwise_sqrt_gap <= 0.0);
    }
    const auto fit = fit_rate(pts);
    MESSAGE("spike slope " << fit.slope);
    // Gaussian spike: ‖ϱ⁰ − 1‖ = A h ρ^{3/2}(π)^{3/4} with h = (ρ/w)^{−1/2}, exactly ∝ ε^{4/(6−γ)}
    CHECK(fit.slope == doctest::Approx(4.0 / (6.0 - gamma)).epsilon(1e-3));
    for (std::size_t i = 1; i < grad.size(); ++i) {
        CHECK(grad[i] == doctest::Approx(grad[0]).epsilon(1e-3));
        CHECK(orlicz[i] < 2.0 * orlicz[0]);
        CHECK(orlicz[i] > 0.5 * orlicz[0]);
    }
}

TEST_CASE("EulerTracker interpolates the stepped solution") {
    auto g = make_grid(2, 32, kTwoPi);
    auto u0 = helmholtz_p(test::random_smooth_vector(g, 4u, 4, 0.5));
    auto init = project_initial(u0);
    EulerTracker tr(init, 0.05);
    auto fine = init;
    for (int i = 0; i < 8; ++i) fine = euler_step(fine, 0.0125);  // t = 0.1 is a node
    auto s = tr.at(0.1);
    auto node = euler_step(euler_step(init, 0.05), 0.05);
    CHECK(test::max_abs_diff(s.u, node.u) < 1e-14);
    CHECK(test::max_abs_diff(s.du, euler_time_derivative(node.u)) < 1e-13);
    CHECK(test::max_abs_diff(s.u, fine.u) < 1e-7);

    // between nodes
    auto mid = tr.at(0.125);
    auto ref = fine;
    for (int i = 0; i < 2; ++i) ref = euler_step(ref, 0.0125);
    CHECK(test::max_abs_diff(mid.u, ref.u) < 1e-7);
    CHECK(test::max_abs_diff(mid.du, euler_time_derivative(ref.u)) < 1e-5);
    CHECK(divergence_ratio(mid.u) < 1e-12);
    CHECK_THROWS_AS(tr.at(0.0), ConfigError);
}

TEST_CASE("ansatz pair") {
    auto g = make_grid(2, 64, 16.0);
    DataFamily f;
    f.width = 1.2;
    SUBCASE("r -> 1 uniformly as epsilon -> 0") {
        double prev = 1e300;
        for (double eps : {0.2, 0.1, 0.05}) {
            auto p = params(eps, 0.0, 0.5, 2.0);
            auto d = make_ill_prepared(g, f, p);
            Ansatz a(d.s_limit, d.u_limit, f.delta, p);
            const double dev = test::max_abs_diff(a.at(0.3).r, ScalarField(g, 1.0));
            CHECK(dev < prev);
            prev = dev;
        }
        CHECK(prev < 0.06);
    }
    SUBCASE("initial pair converges to the unmollified data as delta -> 0") {
        auto p = params(0.1, 0.0, 0.5, 2.0);
        auto d = make_ill_prepared(g, f, p);
        ScalarField r_exact = p.epsilon * d.s_limit;
        r_exact += 1.0;
        const VectorField U_exact = helmholtz_p(d.u_limit) + helmholtz_q(d.u_limit);
        double prev = 1e300;
        for (double delta : {1.0, 0.5, 0.25, 0.125}) {
            Ansatz a(d.s_limit, d.u_limit, delta, p);
            auto pr = a.at(0.0);
            const double err = test::l2(pr.r - r_exact) + test::l2(pr.U - U_exact);
            CHECK(err < prev);
            prev = err;
        }
        CHECK(prev < 1e-6);
    }
    SUBCASE("Helmholtz split of U") {
        auto p = params(0.1, 0.0, 0.5, 2.0);
        auto d = make_ill_prepared(g, f, p);
        Ansatz a(d.s_limit, d.u_limit, f.delta, p);
        auto pr = a.at(0.4);
        CHECK(test::max_abs_diff(helmholtz_p(pr.U), pr.u_euler) < 1e-11);
        CHECK(test::max_abs_diff(helmholtz_q(pr.U), pr.acoustic.grad_phi) < 1e-11);
    }
    SUBCASE("time derivatives match centered differences") {
        auto p = params(0.2, 0.0, 0.5, 2.0);
        auto d = make_ill_prepared(g, f, p);
        const double t = 0.3, h = 1e-4;
        Ansatz a1(d.s_limit, d.u_limit, f.delta, p, 0.01), a2(d.s_limit, d.u_limit, f.delta, p, 0.01),
            a0(d.s_limit, d.u_limit, f.delta, p, 0.01);
        auto lo = a1.at(t - h);
        auto hi = a2.at(t + h);
        auto mid = a0.at(t);
        CHECK(test::max_abs_diff((1.0 / (2 * h)) * (hi.r - lo.r), mid.dt_r) < 1e-5 * test::max_abs(mid.dt_r));
        CHECK(test::max_abs_diff((1.0 / (2 * h)) * (hi.U - lo.U), mid.dt_U) < 1e-5 * test::max_abs(mid.dt_U));
    }
}

TEST_CASE("wave-escape window") {
    auto p = params(0.1, 0.0, 0.0, 1.0);
    CHECK(wave_escape_window(3.0, p, 5.0) == doctest::Approx(0.1 * 3.0));

    auto pk = params(0.1, 0.0, 0.5, 2.0);
    auto g1 = make_grid(2, 32, 32.0);
    auto g2 = make_grid(2, 32, 64.0);
    const double t1 = wave_escape_window(*g1, Window::centered(*g1, 0.25), pk, 2.0);
    const double t2 = wave_escape_window(*g2, Window::centered(*g2, 0.25), pk, 2.0);
    CHECK(t2 == doctest::Approx(2.0 * t1));

    // κ > 0: the group speed grows with |k| and peaks at k_max
    const double kmax = 4.0;
    const double vg = std::sqrt(pk.gamma) * multiplier_phi_derivative(kmax, pk.epsilon, pk.kappa);
    CHECK(vg > std::sqrt(pk.gamma) / pk.epsilon);
    for (double k = 0.1; k < kmax; k += 0.1)
        CHECK(multiplier_phi_derivative(k, pk.epsilon, pk.kappa) <= multiplier_phi_derivative(kmax, pk.epsilon, pk.kappa));
    CHECK(wave_escape_window(5.0, pk, kmax) == doctest::Approx(5.0 / vg));

    CHECK_THROWS_AS(require_within_window(1.0, 0.5), ConfigError);
    CHECK_NOTHROW(require_within_window(0.5, 0.5));
    CHECK_THROWS_AS(wave_escape_window(0.0, p, 1.0), ConfigError);
}

TEST_CASE("sweep configuration validation") {
    SweepConfig c = small_sweep();
    CHECK_NOTHROW(c.validate());
    c.epsilons = {0.1, 0.2};
    CHECK_THROWS_AS(c.validate(), ConfigError);
    c.epsilons = {0.1, 0.1};
    CHECK_THROWS_AS(c.validate(), ConfigError);
    c = small_sweep();
    c.gamma = 0.5;
    CHECK_THROWS_AS(c.validate(), ConfigError);
    c = small_sweep();
    CHECK(c.nu(0.1) == doctest::Approx(0.1));
    c.nu_power = 0.5;
    c.nu_coeff = 2.0;
    CHECK(c.nu(0.04) == doctest::Approx(0.4));
    CHECK(c.time_exponent() == 4.0);
    c.dim = 3;
    CHECK(c.time_exponent() == 2.0);
}

TEST_CASE("sweep: well-prepared degenerate family stays at the ansatz") {
    // a periodic shear is steady for both systems at ϱ = 1, ν = 0
    SweepConfig c = small_sweep();
    c.family.s_profile = "zero";
    c.family.u_profile = "shear";
    c.nu_coeff = 0.0;
    c.epsilons = {0.1};
    auto res = run_sweep(c);
    REQUIRE(res.rows.size() == 1);
    const auto& r = res.rows[0];
    REQUIRE(r.ok);
    CHECK(res.fits.empty());
    CHECK(std::abs(r.audit.initial_rel_energy) < 1e-10);
    MESSAGE("degenerate sup relative energy " << r.sup_rel_energy);
    CHECK(r.sup_rel_energy < 1e-20);
    CHECK(r.sup_rel_energy >= 0.0);
}

TEST_CASE("sweep: ill-prepared members, quarantine and determinism") {
    SweepConfig c = small_sweep();
    c.epsilons = {0.4, 0.2, 0.1};
    c.family.amplitude = -3.0;  // 1 − 0.4·3 < 0: the first member hits vacuum
    auto res = run_sweep(c);
    REQUIRE(res.rows.size() == 3);
    CHECK(res.failures == 1);
    CHECK_FALSE(res.rows[0].ok);
    CHECK(res.rows[0].error.find("vacuum") != std::string::npos);
    REQUIRE(res.rows[1].ok);
    REQUIRE(res.rows[2].ok);
    CHECK(res.fits.empty());  // two usable members
    for (std::size_t i = 1; i < 3; ++i) {
        const auto& r = res.rows[i];
        CHECK(r.sup_rel_energy > 0.0);
        CHECK(r.rei_slack > -1e-6);
        CHECK(r.checkpoints.front().t == 0.0);
        CHECK(r.checkpoints.back().t == doctest::Approx(c.t_end));
        CHECK(r.strichartz > 0.0);
        CHECK(r.strichartz_horizon <= c.t_end);
    }
    CHECK(res.rows[2].sup_rel_energy < res.rows[1].sup_rel_energy);
    CHECK(res.rows[2].rho_hs < res.rows[1].rho_hs);

    c.threads = 2;
    auto again = run_sweep(c);
    for (std::size_t i = 1; i < 3; ++i) {
        CHECK(again.rows[i].sup_rel_energy == res.rows[i].sup_rel_energy);
        CHECK(again.rows[i].l2loc_vel_err == res.rows[i].l2loc_vel_err);
        CHECK(again.rows[i].rei_slack == res.rows[i].rei_slack);
    }
}
