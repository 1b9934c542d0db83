// Shared helpers for the unit suites: deterministic random fields and norms.
#pragma once

#include <cmath>
#include <random>

#include "nsk/spectral.hpp"

namespace nsk::test {

inline ScalarField random_field(const GridPtr& g, unsigned seed, double amp = 1.0) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(-amp, amp);
    ScalarField f(g);
    for (double& x : f.values()) x = u(rng);
    return f;
}

/// Random field with spectral support |n_j| <= nmax (no Nyquist content).
inline ScalarField random_smooth_field(const GridPtr& g, unsigned seed, int nmax, double amp = 1.0) {
    Spectrum c = forward(random_field(g, seed, amp));
    for (std::size_t s = 0; s < c.size(); ++s) {
        for (int j = 0; j < g->dim(); ++j) {
            if (std::abs(g->mode(s)[j]) > nmax) c[s] = 0.0;
        }
    }
    return inverse(c);
}

inline VectorField random_smooth_vector(const GridPtr& g, unsigned seed, int nmax, double amp = 1.0) {
    VectorField v(g);
    for (int j = 0; j < g->dim(); ++j) v[j] = random_smooth_field(g, seed + 101u * (j + 1), nmax, amp);
    return v;
}

inline double max_abs_diff(const ScalarField& a, const ScalarField& b) {
    double m = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
    return m;
}

inline double max_abs(const ScalarField& a) {
    double m = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i]));
    return m;
}

inline double max_abs_diff(const VectorField& a, const VectorField& b) {
    double m = 0.0;
    for (int j = 0; j < a.dim(); ++j) m = std::max(m, max_abs_diff(a[j], b[j]));
    return m;
}

inline double max_abs(const VectorField& a) {
    double m = 0.0;
    for (int j = 0; j < a.dim(); ++j) m = std::max(m, max_abs(a[j]));
    return m;
}

inline double l2(const ScalarField& f) { return std::sqrt((f * f).integral()); }

inline double l2(const VectorField& v) { return std::sqrt(v.norm2().integral()); }

}  // namespace nsk::test
