#include "nsk/euler.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "nsk/errors.hpp"
#include "nsk/spectral.hpp"

namespace nsk {

namespace {

const Complex kI(0.0, 1.0);

Spectrum vorticity(const SpectralVector& u) {
    const Grid& g = u[0].grid();
    Spectrum w(u[0].grid_ptr());
    for (std::size_t s = 0; s < w.size(); ++s) {
        const auto k = g.k_odd(s);
        w[s] = kI * (k[0] * u[1][s] - k[1] * u[0][s]);
    }
    return w;
}

// u from ω through Δψ = −ω, u = (∂yψ, −∂xψ); `mean` fills k = 0.
SpectralVector velocity_from_vorticity(const Spectrum& w, const std::array<double, 2>& mean) {
    const Grid& g = w.grid();
    SpectralVector u(2, Spectrum(w.grid_ptr()));
    for (std::size_t s = 1; s < w.size(); ++s) {
        if (g.k2(s) == 0.0) continue;
        const auto k = g.k_odd(s);
        const Complex psi = w[s] / g.k2(s);
        u[0][s] = kI * k[1] * psi;
        u[1][s] = -kI * k[0] * psi;
    }
    const double nd = static_cast<double>(g.size());
    u[0][0] = mean[0] * nd;
    u[1][0] = mean[1] * nd;
    return u;
}

// −u·∇ω, dealiased.
Spectrum vorticity_rhs(const Spectrum& w, const std::array<double, 2>& mean) {
    const VectorField u = inverse(velocity_from_vorticity(w, mean));
    const VectorField gw = inverse(gradient(w));
    Spectrum out = forward((-1.0) * dot(u, gw));
    dealias(out);
    return out;
}

// P(u × ω), dealiased.
SpectralVector rotation_rhs(const SpectralVector& uh) {
    const VectorField u = inverse(uh);
    const VectorField w = curl(u);
    VectorField c(u.grid_ptr());
    c[0] = u[1] * w[2] - u[2] * w[1];
    c[1] = u[2] * w[0] - u[0] * w[2];
    c[2] = u[0] * w[1] - u[1] * w[0];
    SpectralVector out = forward(c);
    dealias(out);
    return helmholtz_p(out);
}

template <class T, class F>
T rk4(const T& y, double h, F&& f, const std::function<void(T&, const T&, double)>& axpy) {
    T k1 = f(y);
    T y2 = y;
    axpy(y2, k1, 0.5 * h);
    T k2 = f(y2);
    T y3 = y;
    axpy(y3, k2, 0.5 * h);
    T k3 = f(y3);
    T y4 = y;
    axpy(y4, k3, h);
    T k4 = f(y4);
    T out = y;
    axpy(out, k1, h / 6.0);
    axpy(out, k2, h / 3.0);
    axpy(out, k3, h / 3.0);
    axpy(out, k4, h / 6.0);
    return out;
}

void axpy_spec(Spectrum& y, const Spectrum& x, double a) {
    for (std::size_t s = 0; s < y.size(); ++s) y[s] += a * x[s];
}

void axpy_vec(SpectralVector& y, const SpectralVector& x, double a) {
    for (std::size_t j = 0; j < y.size(); ++j) axpy_spec(y[j], x[j], a);
}

bool finite(const VectorField& u) {
    for (int j = 0; j < u.dim(); ++j) {
        for (double v : u[j].values()) {
            if (!std::isfinite(v)) return false;
        }
    }
    return true;
}

}  // namespace

EulerState project_initial(const VectorField& u0) {
    VectorField u = helmholtz_p(u0);
    ScalarField pi = euler_pressure(u);
    return {std::move(u), std::move(pi), 0.0};
}

VectorField convective_term(const VectorField& u) {
    const int d = u.dim();
    VectorField out(u.grid_ptr());
    for (int i = 0; i < d; ++i) {
        const VectorField gi = gradient(u[i]);
        out[i] = dealias(dot(u, gi));
    }
    return out;
}

ScalarField euler_pressure(const VectorField& u) {
    Spectrum rhs = divergence(forward(convective_term(u)));
    rhs *= -1.0;
    return inverse(inverse_laplacian(rhs));
}

double pressure_residual(const EulerState& st) {
    Spectrum r = laplacian(forward(st.pi));
    r += divergence(forward(convective_term(st.u)));
    return spectral_l2_norm(r);
}

VectorField euler_time_derivative(const VectorField& u) {
    SpectralVector c = forward(convective_term(u));
    SpectralVector p = helmholtz_p(c);
    for (auto& x : p) x *= -1.0;
    return inverse(p);
}

double euler_courant(const VectorField& u, double dt) {
    double sum = 0.0;
    for (int j = 0; j < u.dim(); ++j) sum += std::max(std::abs(u[j].max()), std::abs(u[j].min()));
    return dt * sum / u.grid().dx();
}

EulerState euler_step(const EulerState& st, double dt, double courant_abort) {
    const double c = euler_courant(st.u, dt);
    if (c > courant_abort) {
        std::ostringstream os;
        os << "euler_step: Courant number " << c << " exceeds " << courant_abort << " at t=" << st.t;
        throw NumericalAbort(os.str());
    }
    const SpectralVector uh = forward(st.u);
    VectorField u(st.u.grid_ptr());
    if (st.u.dim() == 2) {
        const std::array<double, 2> mean{st.u[0].mean(), st.u[1].mean()};
        const Spectrum w = vorticity(uh);
        const Spectrum w1 = rk4<Spectrum>(w, dt, [&](const Spectrum& x) { return vorticity_rhs(x, mean); },
                                          axpy_spec);
        u = inverse(velocity_from_vorticity(w1, mean));
    } else {
        u = inverse(rk4<SpectralVector>(uh, dt, rotation_rhs, axpy_vec));
    }
    if (!finite(u)) throw NumericalAbort("euler_step: non-finite velocity");
    ScalarField pi = euler_pressure(u);
    return {std::move(u), std::move(pi), st.t + dt};
}

double kinetic_energy(const VectorField& u) { return 0.5 * u.norm2().integral(); }

double enstrophy(const VectorField& u) {
    if (u.dim() != 2) throw ConfigError("enstrophy: 2D only");
    const ScalarField w = curl_magnitude(u);
    return 0.5 * (w * w).integral();
}

double divergence_ratio(const VectorField& u) {
    const double n = std::sqrt(u.norm2().integral());
    if (n == 0.0) return 0.0;
    const ScalarField d = divergence(u);
    return std::sqrt((d * d).integral()) / n;
}

}  // namespace nsk
