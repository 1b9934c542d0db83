#include <cmath>
#include <numbers>

#include "doctest.h"
#include "nsk/errors.hpp"
#include "nsk/euler.hpp"
#include "nsk/spectral.hpp"
#include "test_util.hpp"

using namespace nsk;

namespace {
constexpr double kTwoPi = 2.0 * std::numbers::pi;

VectorField taylor_green(const GridPtr& g) {
    VectorField u(g);
    u[0] = sample(g, [](double x, double y, double) { return -std::cos(x) * std::sin(y); });
    u[1] = sample(g, [](double x, double y, double) { return std::sin(x) * std::cos(y); });
    return u;
}

VectorField band_limited_solenoidal(const GridPtr& g, unsigned seed, int nmax, double amp) {
    return helmholtz_p(test::random_smooth_vector(g, seed, nmax, amp));
}

EulerState run(EulerState st, double dt, int steps) {
    for (int i = 0; i < steps; ++i) st = euler_step(st, dt);
    return st;
}
}  // namespace

TEST_CASE("euler: rest state is unchanged") {
    auto g = make_grid(2, 16, kTwoPi);
    auto st = project_initial(VectorField(g));
    auto out = euler_step(st, 0.1);
    CHECK(test::max_abs(out.u) == 0.0);
    CHECK(test::max_abs(out.pi) == 0.0);
    CHECK(out.t == doctest::Approx(0.1));
}

TEST_CASE("euler: Taylor-Green vortex") {
    auto g = make_grid(2, 32, kTwoPi);
    auto u = taylor_green(g);

    // residual substitution: u·∇u = −∇Π with Π = −(cos 2x + cos 2y)/4
    auto pi_exact = sample(g, [](double x, double y, double) { return -0.25 * (std::cos(2 * x) + std::cos(2 * y)); });
    CHECK(test::max_abs_diff(convective_term(u) + gradient(pi_exact), VectorField(g)) < 1e-14);
    CHECK(test::max_abs_diff(euler_pressure(u), pi_exact) < 1e-14);
    CHECK(test::max_abs(euler_time_derivative(u)) < 1e-14);

    auto st = project_initial(u);
    const double e0 = kinetic_energy(st.u);
    double worst = 0.0;
    for (int i = 0; i < 100; ++i) {
        st = euler_step(st, 1e-2);
        worst = std::max(worst, test::max_abs_diff(st.u, u));
        CHECK(pressure_residual(st) <= 1e-10);
    }
    CHECK(st.t == doctest::Approx(1.0));
    CHECK(worst < 1e-8);
    CHECK(std::abs(kinetic_energy(st.u) - e0) < 1e-9 * e0);
}

TEST_CASE("euler: ABC flow is a steady 3D solution") {
    auto g = make_grid(3, 16, kTwoPi);
    const double a = 1.0, b = 0.7, c = 0.4;
    VectorField u(g);
    u[0] = sample(g, [&](double, double y, double z) { return a * std::sin(z) + c * std::cos(y); });
    u[1] = sample(g, [&](double x, double, double z) { return b * std::sin(x) + a * std::cos(z); });
    u[2] = sample(g, [&](double x, double y, double) { return c * std::sin(y) + b * std::cos(x); });
    auto st = run(project_initial(u), 1e-2, 50);
    CHECK(test::max_abs_diff(st.u, u) < 1e-10);
    CHECK(pressure_residual(st) <= 1e-10);
}

TEST_CASE("euler: invariants on generic band-limited data") {
    for (int dim : {2, 3}) {
        CAPTURE(dim);
        auto g = make_grid(dim, dim == 2 ? 32 : 16, kTwoPi);
        auto st0 = project_initial(band_limited_solenoidal(g, 5u, dim == 2 ? 6 : 3, 0.5));
        const double e0 = kinetic_energy(st0.u);
        auto st = st0;
        for (int i = 0; i < 40; ++i) {
            st = euler_step(st, 1e-2);
            CHECK(divergence_ratio(st.u) <= 1e-11);
            CHECK(pressure_residual(st) <= 1e-10 * std::max(1.0, test::l2(st.pi)));
        }
        CHECK(std::abs(st.pi.mean()) < 1e-14);
        const double drift = std::abs(kinetic_energy(st.u) - e0) / e0;
        MESSAGE("energy drift " << drift);
        CHECK(drift < 1e-6);

        // drift falls at least like Δt³ (RK4 is fourth order)
        auto strong = st0;
        strong.u *= 4.0;
        const double es = kinetic_energy(strong.u);
        const double coarse = std::abs(kinetic_energy(run(strong, 5e-2, 4).u) - es);
        const double fine = std::abs(kinetic_energy(run(strong, 2.5e-2, 8).u) - es);
        MESSAGE("refinement " << coarse << " " << fine);
        CHECK(coarse / fine > 8.0);
    }
}

TEST_CASE("euler: 2D enstrophy conservation") {
    auto g = make_grid(2, 32, kTwoPi);
    auto st = project_initial(band_limited_solenoidal(g, 9u, 5, 0.5));
    const double z0 = enstrophy(st.u);
    st = run(st, 1e-2, 50);
    CHECK(std::abs(enstrophy(st.u) - z0) < 1e-7 * z0);
}

TEST_CASE("euler: time derivative matches a centered difference of the stepper") {
    auto g = make_grid(2, 32, kTwoPi);
    auto st = project_initial(band_limited_solenoidal(g, 11u, 5, 0.5));
    const double h = 1e-3;
    auto fd = (1.0 / (2 * h)) * (euler_step(st, h).u - euler_step(st, -h).u);
    auto du = euler_time_derivative(st.u);
    CHECK(test::max_abs_diff(fd, du) < 1e-5 * test::max_abs(du));
}

TEST_CASE("project_initial") {
    auto g = make_grid(2, 32, kTwoPi);
    SUBCASE("divergence-free input is unchanged") {
        auto u = taylor_green(g);
        CHECK(test::max_abs_diff(project_initial(u).u, u) < 1e-14);
    }
    SUBCASE("gradient input leaves only the mean") {
        auto phi = sample(g, [](double x, double y, double) { return std::sin(2 * x) * std::cos(y); });
        auto u = gradient(phi);
        u[0] += 0.3;
        auto p = project_initial(u).u;
        CHECK(test::max_abs_diff(p[0], ScalarField(g, 0.3)) < 1e-14);
        CHECK(test::max_abs(p[1]) < 1e-14);
    }
    SUBCASE("mixed input recovers the solenoidal part") {
        auto sol = taylor_green(g);
        auto phi = sample(g, [](double x, double y, double) { return std::cos(3 * x + y) + 0.5 * std::sin(y); });
        auto p = project_initial(sol + gradient(phi)).u;
        CHECK(test::max_abs_diff(p, sol) < 1e-13);
        CHECK(divergence_ratio(p) < 1e-14);
    }
}

TEST_CASE("euler: Courant abort") {
    auto g = make_grid(2, 32, kTwoPi);
    auto st = project_initial(taylor_green(g));
    CHECK(euler_courant(st.u, 0.1) == doctest::Approx(0.1 * 2.0 / g->dx()).epsilon(1e-3));
    CHECK_THROWS_AS(euler_step(st, 0.5), NumericalAbort);
}
