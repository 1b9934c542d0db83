/// @file spectral.hpp
/// @brief Fourier-side calculus on the periodic grid.
///
/// Transform convention: the forward transform is unnormalized,
/// coeff(k) = sum_x f(x) exp(-i k.x), so a constant c maps to c*N^d at k=0.
/// The inverse carries the 1/N^d factor. Odd-order derivative multipliers
/// drop the Nyquist component so real fields stay real.
#pragma once

#include "nsk/field.hpp"

namespace nsk {

Spectrum forward(const ScalarField& f);
ScalarField inverse(const Spectrum& f);
SpectralVector forward(const VectorField& v);
VectorField inverse(const SpectralVector& v);

/// Symmetrize the redundant planes of the half spectrum so that
/// coeff(-k) = conj(coeff(k)) holds exactly.
void enforce_hermitian(Spectrum& f);

// Spectral-side operators. All are pure and return fresh spectra.
SpectralVector gradient(const Spectrum& f);
Spectrum divergence(const SpectralVector& v);
Spectrum laplacian(const Spectrum& f);
Spectrum bilaplacian(const Spectrum& f);
/// Δ⁻¹ with the k=0 mode set to zero.
Spectrum inverse_laplacian(const Spectrum& f);
SpectralVector helmholtz_q(const SpectralVector& v);
SpectralVector helmholtz_p(const SpectralVector& v);
Spectrum bessel_filter(const Spectrum& f, double s);
/// Zero every mode with some |n_j| > N/3 (in place).
void dealias(Spectrum& f);
void dealias(SpectralVector& v);
/// Multiply each mode by m(|k|).
Spectrum apply_radial_multiplier(const Spectrum& f, const std::function<double(double)>& m);

// Physical-space conveniences (transform, operate, transform back).
VectorField gradient(const ScalarField& f);
ScalarField divergence(const VectorField& v);
ScalarField laplacian(const ScalarField& f);
ScalarField bilaplacian(const ScalarField& f);
VectorField helmholtz_q(const VectorField& v);
VectorField helmholtz_p(const VectorField& v);
ScalarField bessel_filter(const ScalarField& f, double s);
ScalarField dealias(const ScalarField& f);
/// Scalar vorticity in 2D (∂x v - ∂y u); in 3D returns |curl v|.
ScalarField curl_magnitude(const VectorField& v);
/// Full curl, 3D only.
VectorField curl(const VectorField& v);

/// Spectral ℓ² norm normalized to equal the physical L² norm (Parseval).
double spectral_l2_norm(const Spectrum& f);

}  // namespace nsk
