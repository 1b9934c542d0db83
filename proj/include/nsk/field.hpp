/// @file field.hpp
/// @brief Real scalar/vector fields on a periodic grid and their spectra.
#pragma once

#include <array>
#include <complex>
#include <functional>
#include <span>
#include <vector>

#include "nsk/grid.hpp"

namespace nsk {

using Complex = std::complex<double>;

/// Physical-space real field.
class ScalarField {
public:
    explicit ScalarField(GridPtr grid, double value = 0.0);
    ScalarField(GridPtr grid, std::vector<double> values);

    const Grid& grid() const { return *grid_; }
    const GridPtr& grid_ptr() const { return grid_; }
    std::size_t size() const { return v_.size(); }

    std::span<double> values() { return v_; }
    std::span<const double> values() const { return v_; }
    double& operator[](std::size_t i) { return v_[i]; }
    double operator[](std::size_t i) const { return v_[i]; }

    double mean() const;
    double min() const;
    double max() const;
    /// Uniform-grid quadrature: mean times box volume.
    double integral() const;

    ScalarField& operator+=(const ScalarField& o);
    ScalarField& operator-=(const ScalarField& o);
    ScalarField& operator*=(double a);
    ScalarField& operator+=(double a);

private:
    GridPtr grid_;
    std::vector<double> v_;
};

ScalarField operator+(ScalarField a, const ScalarField& b);
ScalarField operator-(ScalarField a, const ScalarField& b);
ScalarField operator*(double a, ScalarField f);
/// Pointwise product.
ScalarField operator*(const ScalarField& a, const ScalarField& b);

/// Fill a field from f(x, y, z) at the grid points (z = 0 in 2D).
ScalarField sample(const GridPtr& grid, const std::function<double(double, double, double)>& f);

/// Apply a pointwise map.
ScalarField map(const ScalarField& f, const std::function<double(double)>& fn);

/// Complex coefficients of the unnormalized forward transform (half spectrum).
class Spectrum {
public:
    explicit Spectrum(GridPtr grid);

    const Grid& grid() const { return *grid_; }
    const GridPtr& grid_ptr() const { return grid_; }
    std::size_t size() const { return c_.size(); }

    std::span<Complex> coeffs() { return c_; }
    std::span<const Complex> coeffs() const { return c_; }
    Complex& operator[](std::size_t s) { return c_[s]; }
    const Complex& operator[](std::size_t s) const { return c_[s]; }

    Spectrum& operator+=(const Spectrum& o);
    Spectrum& operator-=(const Spectrum& o);
    Spectrum& operator*=(double a);

private:
    GridPtr grid_;
    std::vector<Complex> c_;
};

/// d real components on one grid.
class VectorField {
public:
    explicit VectorField(GridPtr grid);
    explicit VectorField(std::vector<ScalarField> components);

    int dim() const { return static_cast<int>(c_.size()); }
    const Grid& grid() const { return c_.front().grid(); }
    const GridPtr& grid_ptr() const { return c_.front().grid_ptr(); }

    ScalarField& operator[](int j) { return c_[static_cast<std::size_t>(j)]; }
    const ScalarField& operator[](int j) const { return c_[static_cast<std::size_t>(j)]; }

    VectorField& operator+=(const VectorField& o);
    VectorField& operator-=(const VectorField& o);
    VectorField& operator*=(double a);

    /// Pointwise Euclidean magnitude.
    ScalarField magnitude() const;
    /// Pointwise |v|^2.
    ScalarField norm2() const;

private:
    std::vector<ScalarField> c_;
};

VectorField operator+(VectorField a, const VectorField& b);
VectorField operator-(VectorField a, const VectorField& b);
VectorField operator*(double a, VectorField v);
/// Scalar times vector, pointwise.
VectorField operator*(const ScalarField& f, const VectorField& v);
/// Pointwise dot product.
ScalarField dot(const VectorField& a, const VectorField& b);

using SpectralVector = std::vector<Spectrum>;

}  // namespace nsk
