#include "nsk/spectral.hpp"

#include <fftw3.h>

#include <cmath>
#include <map>
#include <mutex>
#include <tuple>

#include "nsk/errors.hpp"

namespace nsk {

namespace {

struct PlanPair {
    fftw_plan r2c = nullptr;
    fftw_plan c2r = nullptr;
};

/// Plans are created once per (d, N) and reused through the new-array
/// execute interface. Planning is serialized; execution is thread safe.
class PlanCache {
public:
    ~PlanCache() {
        for (auto& [key, p] : plans_) {
            fftw_destroy_plan(p.r2c);
            fftw_destroy_plan(p.c2r);
        }
    }

    const PlanPair& get(int dim, int n) {
        std::lock_guard lock(mutex_);
        auto key = std::make_pair(dim, n);
        auto it = plans_.find(key);
        if (it != plans_.end()) return it->second;

        std::vector<int> dims(static_cast<std::size_t>(dim), n);
        std::size_t real_size = 1;
        for (int d : dims) real_size *= static_cast<std::size_t>(d);
        const std::size_t cplx_size = real_size / static_cast<std::size_t>(n) *
                                      (static_cast<std::size_t>(n) / 2 + 1);
        double* in = fftw_alloc_real(real_size);
        fftw_complex* out = fftw_alloc_complex(cplx_size);
        const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
        PlanPair p;
        p.r2c = fftw_plan_dft_r2c(dim, dims.data(), in, out, flags);
        p.c2r = fftw_plan_dft_c2r(dim, dims.data(), out, in, flags | FFTW_DESTROY_INPUT);
        fftw_free(in);
        fftw_free(out);
        if (p.r2c == nullptr || p.c2r == nullptr) {
            throw ConfigError("FFTW planning failed");
        }
        return plans_.emplace(key, p).first->second;
    }

private:
    std::mutex mutex_;
    std::map<std::pair<int, int>, PlanPair> plans_;
};

PlanCache& plan_cache() {
    static PlanCache cache;
    return cache;
}

Spectrum multiply(const Spectrum& f, const std::function<Complex(std::size_t)>& m) {
    Spectrum out(f.grid_ptr());
    for (std::size_t s = 0; s < f.size(); ++s) out[s] = m(s) * f[s];
    return out;
}

}  // namespace

Spectrum forward(const ScalarField& f) {
    const Grid& g = f.grid();
    Spectrum out(f.grid_ptr());
    const auto& plan = plan_cache().get(g.dim(), g.n());
    // r2c does not modify its input, but the interface is non-const.
    fftw_execute_dft_r2c(plan.r2c, const_cast<double*>(f.values().data()),
                         reinterpret_cast<fftw_complex*>(out.coeffs().data()));
    enforce_hermitian(out);
    return out;
}

ScalarField inverse(const Spectrum& f) {
    const Grid& g = f.grid();
    const auto& plan = plan_cache().get(g.dim(), g.n());
    std::vector<Complex> scratch(f.coeffs().begin(), f.coeffs().end());
    ScalarField out(f.grid_ptr());
    fftw_execute_dft_c2r(plan.c2r, reinterpret_cast<fftw_complex*>(scratch.data()),
                         out.values().data());
    out *= 1.0 / static_cast<double>(g.size());
    return out;
}

SpectralVector forward(const VectorField& v) {
    SpectralVector out;
    out.reserve(static_cast<std::size_t>(v.dim()));
    for (int j = 0; j < v.dim(); ++j) out.push_back(forward(v[j]));
    return out;
}

VectorField inverse(const SpectralVector& v) {
    std::vector<ScalarField> comps;
    comps.reserve(v.size());
    for (const auto& c : v) comps.push_back(inverse(c));
    return VectorField(std::move(comps));
}

void enforce_hermitian(Spectrum& f) {
    const Grid& g = f.grid();
    for (std::size_t s = 0; s < f.size(); ++s) {
        const int mx = g.mode(s)[0];
        if (mx != 0 && mx != -g.n() / 2) continue;  // interior planes carry no redundancy
        const std::size_t p = g.conjugate_partner(s);
        if (p < s) continue;
        if (p == s) {
            // Self-conjugate modes (k = -k modulo N) must be real.
            f[s] = Complex(f[s].real(), 0.0);
            continue;
        }
        const Complex avg = 0.5 * (f[s] + std::conj(f[p]));
        f[s] = avg;
        f[p] = std::conj(avg);
    }
}

SpectralVector gradient(const Spectrum& f) {
    const Grid& g = f.grid();
    SpectralVector out;
    for (int j = 0; j < g.dim(); ++j) {
        out.push_back(multiply(f, [&](std::size_t s) { return Complex(0.0, g.k_odd(s)[j]); }));
    }
    return out;
}

Spectrum divergence(const SpectralVector& v) {
    const Grid& g = v.front().grid();
    Spectrum out(v.front().grid_ptr());
    for (std::size_t s = 0; s < out.size(); ++s) {
        const auto k = g.k_odd(s);
        Complex acc = 0.0;
        for (int j = 0; j < g.dim(); ++j) acc += Complex(0.0, k[j]) * v[j][s];
        out[s] = acc;
    }
    return out;
}

Spectrum laplacian(const Spectrum& f) {
    const Grid& g = f.grid();
    return multiply(f, [&](std::size_t s) { return Complex(-g.k2(s), 0.0); });
}

Spectrum bilaplacian(const Spectrum& f) {
    const Grid& g = f.grid();
    return multiply(f, [&](std::size_t s) { return Complex(g.k2(s) * g.k2(s), 0.0); });
}

Spectrum inverse_laplacian(const Spectrum& f) {
    const Grid& g = f.grid();
    return multiply(f, [&](std::size_t s) {
        return g.k2(s) > 0.0 ? Complex(-1.0 / g.k2(s), 0.0) : Complex(0.0, 0.0);
    });
}

SpectralVector helmholtz_q(const SpectralVector& v) {
    const Grid& g = v.front().grid();
    SpectralVector out;
    for (std::size_t j = 0; j < v.size(); ++j) out.emplace_back(v.front().grid_ptr());
    for (std::size_t s = 0; s < g.spectral_size(); ++s) {
        const auto k = g.k_odd(s);
        double kk = 0.0;
        for (int j = 0; j < g.dim(); ++j) kk += k[j] * k[j];
        if (kk == 0.0) continue;  // k=0 (and pure-Nyquist) content belongs to P
        Complex kv = 0.0;
        for (int j = 0; j < g.dim(); ++j) kv += k[j] * v[static_cast<std::size_t>(j)][s];
        for (int j = 0; j < g.dim(); ++j) out[static_cast<std::size_t>(j)][s] = k[j] * kv / kk;
    }
    return out;
}

SpectralVector helmholtz_p(const SpectralVector& v) {
    SpectralVector q = helmholtz_q(v);
    SpectralVector out = v;
    for (std::size_t j = 0; j < v.size(); ++j) out[j] -= q[j];
    return out;
}

Spectrum bessel_filter(const Spectrum& f, double s) {
    const Grid& g = f.grid();
    if (s == 0.0) return f;
    return multiply(f, [&](std::size_t m) { return Complex(std::pow(1.0 + g.k2(m), 0.5 * s), 0.0); });
}

void dealias(Spectrum& f) {
    const Grid& g = f.grid();
    for (std::size_t s = 0; s < f.size(); ++s) {
        if (!g.keeps_dealiased(s)) f[s] = 0.0;
    }
}

void dealias(SpectralVector& v) {
    for (auto& c : v) dealias(c);
}

Spectrum apply_radial_multiplier(const Spectrum& f, const std::function<double(double)>& m) {
    const Grid& g = f.grid();
    return multiply(f, [&](std::size_t s) { return Complex(m(g.kmag(s)), 0.0); });
}

VectorField gradient(const ScalarField& f) { return inverse(gradient(forward(f))); }

ScalarField divergence(const VectorField& v) { return inverse(divergence(forward(v))); }

ScalarField laplacian(const ScalarField& f) { return inverse(laplacian(forward(f))); }

ScalarField bilaplacian(const ScalarField& f) { return inverse(bilaplacian(forward(f))); }

VectorField helmholtz_q(const VectorField& v) { return inverse(helmholtz_q(forward(v))); }

VectorField helmholtz_p(const VectorField& v) { return inverse(helmholtz_p(forward(v))); }

ScalarField bessel_filter(const ScalarField& f, double s) {
    if (s == 0.0) return f;
    return inverse(bessel_filter(forward(f), s));
}

ScalarField dealias(const ScalarField& f) {
    Spectrum c = forward(f);
    dealias(c);
    return inverse(c);
}

ScalarField curl_magnitude(const VectorField& v) {
    if (v.dim() == 2) {
        const auto c = forward(v);
        const auto gx = gradient(c[1]);
        const auto gy = gradient(c[0]);
        Spectrum w = gx[0];
        w -= gy[1];
        return inverse(w);
    }
    return curl(v).magnitude();
}

VectorField curl(const VectorField& v) {
    if (v.dim() != 3) throw ConfigError("curl() requires a 3D vector field");
    const auto c = forward(v);
    const auto g0 = gradient(c[0]);
    const auto g1 = gradient(c[1]);
    const auto g2 = gradient(c[2]);
    SpectralVector w{g2[1], g0[2], g1[0]};
    w[0] -= g1[2];
    w[1] -= g2[0];
    w[2] -= g0[1];
    return inverse(w);
}

double spectral_l2_norm(const Spectrum& f) {
    const Grid& g = f.grid();
    const std::size_t nh = static_cast<std::size_t>(g.n()) / 2 + 1;
    double acc = 0.0;
    for (std::size_t s = 0; s < f.size(); ++s) {
        const std::size_t ix = s % nh;
        // Interior x-planes stand for both k and -k.
        const double w = (ix == 0 || ix == static_cast<std::size_t>(g.n()) / 2) ? 1.0 : 2.0;
        acc += w * std::norm(f[s]);
    }
    const double nd = static_cast<double>(g.size());
    return std::sqrt(acc * g.volume() / (nd * nd));
}

}  // namespace nsk
