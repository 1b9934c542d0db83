#include "nsk/field.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "nsk/errors.hpp"

namespace nsk {

ScalarField::ScalarField(GridPtr grid, double value)
    : grid_(std::move(grid)), v_(grid_->size(), value) {}

ScalarField::ScalarField(GridPtr grid, std::vector<double> values)
    : grid_(std::move(grid)), v_(std::move(values)) {
    if (v_.size() != grid_->size()) {
        throw ConfigError("field size " + std::to_string(v_.size()) +
                          " does not match grid size " + std::to_string(grid_->size()));
    }
}

double ScalarField::mean() const {
    return std::accumulate(v_.begin(), v_.end(), 0.0) / static_cast<double>(v_.size());
}

double ScalarField::min() const { return *std::min_element(v_.begin(), v_.end()); }

double ScalarField::max() const { return *std::max_element(v_.begin(), v_.end()); }

double ScalarField::integral() const { return mean() * grid_->volume(); }

ScalarField& ScalarField::operator+=(const ScalarField& o) {
    require_same_grid(*grid_, o.grid(), "field addition");
    for (std::size_t i = 0; i < v_.size(); ++i) v_[i] += o.v_[i];
    return *this;
}

ScalarField& ScalarField::operator-=(const ScalarField& o) {
    require_same_grid(*grid_, o.grid(), "field subtraction");
    for (std::size_t i = 0; i < v_.size(); ++i) v_[i] -= o.v_[i];
    return *this;
}

ScalarField& ScalarField::operator*=(double a) {
    for (double& x : v_) x *= a;
    return *this;
}

ScalarField& ScalarField::operator+=(double a) {
    for (double& x : v_) x += a;
    return *this;
}

ScalarField operator+(ScalarField a, const ScalarField& b) { return a += b; }
ScalarField operator-(ScalarField a, const ScalarField& b) { return a -= b; }
ScalarField operator*(double a, ScalarField f) { return f *= a; }

ScalarField operator*(const ScalarField& a, const ScalarField& b) {
    require_same_grid(a.grid(), b.grid(), "pointwise product");
    ScalarField out(a.grid_ptr());
    for (std::size_t i = 0; i < a.size(); ++i) out[i] = a[i] * b[i];
    return out;
}

ScalarField sample(const GridPtr& grid, const std::function<double(double, double, double)>& f) {
    ScalarField out(grid);
    for (std::size_t i = 0; i < out.size(); ++i) {
        const auto x = grid->coords(i);
        out[i] = f(x[0], x[1], x[2]);
    }
    return out;
}

ScalarField map(const ScalarField& f, const std::function<double(double)>& fn) {
    ScalarField out(f.grid_ptr());
    for (std::size_t i = 0; i < f.size(); ++i) out[i] = fn(f[i]);
    return out;
}

Spectrum::Spectrum(GridPtr grid) : grid_(std::move(grid)), c_(grid_->spectral_size()) {}

Spectrum& Spectrum::operator+=(const Spectrum& o) {
    require_same_grid(*grid_, o.grid(), "spectrum addition");
    for (std::size_t s = 0; s < c_.size(); ++s) c_[s] += o.c_[s];
    return *this;
}

Spectrum& Spectrum::operator-=(const Spectrum& o) {
    require_same_grid(*grid_, o.grid(), "spectrum subtraction");
    for (std::size_t s = 0; s < c_.size(); ++s) c_[s] -= o.c_[s];
    return *this;
}

Spectrum& Spectrum::operator*=(double a) {
    for (auto& z : c_) z *= a;
    return *this;
}

VectorField::VectorField(GridPtr grid) {
    const int d = grid->dim();
    c_.reserve(static_cast<std::size_t>(d));
    for (int j = 0; j < d; ++j) c_.emplace_back(grid);
}

VectorField::VectorField(std::vector<ScalarField> components) : c_(std::move(components)) {
    if (c_.empty()) throw ConfigError("vector field needs at least one component");
    if (static_cast<int>(c_.size()) != c_.front().grid().dim()) {
        throw ConfigError("vector field component count must equal grid dimension");
    }
    for (const auto& c : c_) require_same_grid(c_.front().grid(), c.grid(), "vector field");
}

VectorField& VectorField::operator+=(const VectorField& o) {
    for (int j = 0; j < dim(); ++j) (*this)[j] += o[j];
    return *this;
}

VectorField& VectorField::operator-=(const VectorField& o) {
    for (int j = 0; j < dim(); ++j) (*this)[j] -= o[j];
    return *this;
}

VectorField& VectorField::operator*=(double a) {
    for (auto& c : c_) c *= a;
    return *this;
}

ScalarField VectorField::norm2() const {
    ScalarField out(grid_ptr());
    for (const auto& c : c_) {
        for (std::size_t i = 0; i < out.size(); ++i) out[i] += c[i] * c[i];
    }
    return out;
}

ScalarField VectorField::magnitude() const {
    ScalarField out = norm2();
    for (double& x : out.values()) x = std::sqrt(x);
    return out;
}

VectorField operator+(VectorField a, const VectorField& b) { return a += b; }
VectorField operator-(VectorField a, const VectorField& b) { return a -= b; }
VectorField operator*(double a, VectorField v) { return v *= a; }

VectorField operator*(const ScalarField& f, const VectorField& v) {
    VectorField out(v.grid_ptr());
    for (int j = 0; j < v.dim(); ++j) out[j] = f * v[j];
    return out;
}

ScalarField dot(const VectorField& a, const VectorField& b) {
    ScalarField out(a.grid_ptr());
    for (int j = 0; j < a.dim(); ++j) {
        for (std::size_t i = 0; i < out.size(); ++i) out[i] += a[j][i] * b[j][i];
    }
    return out;
}

}  // namespace nsk
