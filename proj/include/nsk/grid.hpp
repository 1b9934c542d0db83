/// @file grid.hpp
/// @brief Periodic box descriptor and wavenumber tables.
///
/// Physical layout is row-major with x fastest: index = x + N*(y + N*z).
/// The spectral layout is the FFTW real-to-complex half spectrum over the
/// x axis: index = ix + (N/2+1)*(iy + N*iz), ix in [0, N/2].
#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <memory>
#include <vector>

namespace nsk {

class Grid {
public:
    /// Throws ConfigError unless dim in {2,3}, N >= 8 is a power of two and L > 0.
    Grid(int dim, int n, double length);

    int dim() const { return dim_; }
    int n() const { return n_; }
    double length() const { return length_; }
    double dx() const { return length_ / n_; }

    std::size_t size() const { return size_; }
    std::size_t spectral_size() const { return spectral_size_; }
    double volume() const;
    double cell_volume() const;

    /// Integer mode numbers (nx, ny, nz) of a spectral index; unused axes are 0.
    const std::array<int, 3>& mode(std::size_t s) const { return modes_[s]; }
    /// Physical wavenumber components k_j = 2π n_j / L.
    const std::array<double, 3>& k(std::size_t s) const { return k_[s]; }
    /// Wavenumbers for odd-order derivatives: Nyquist components zeroed.
    std::array<double, 3> k_odd(std::size_t s) const;
    double k2(std::size_t s) const { return k2_[s]; }
    double kmag(std::size_t s) const;
    /// True when any axis sits on the Nyquist index -N/2.
    bool is_nyquist(std::size_t s) const { return nyquist_[s] != 0; }
    /// 2/3 rule: every |n_j| <= N/3.
    bool keeps_dealiased(std::size_t s) const { return dealias_keep_[s] != 0; }
    /// Largest |k| retained by the 2/3 rule along an axis.
    double dealiased_kmax() const;

    /// Coordinates of a physical point.
    std::array<double, 3> coords(std::size_t i) const;

    /// Partner index of spectral mode s under k -> -k when it is stored in
    /// the half spectrum (ix == 0 or ix == N/2 planes), otherwise s itself.
    std::size_t conjugate_partner(std::size_t s) const;

    bool operator==(const Grid& o) const {
        return dim_ == o.dim_ && n_ == o.n_ && length_ == o.length_;
    }
    bool operator!=(const Grid& o) const { return !(*this == o); }

private:
    int dim_;
    int n_;
    double length_;
    std::size_t size_;
    std::size_t spectral_size_;
    std::vector<std::array<int, 3>> modes_;
    std::vector<std::array<double, 3>> k_;
    std::vector<double> k2_;
    std::vector<std::uint8_t> nyquist_;
    std::vector<std::uint8_t> dealias_keep_;
};

using GridPtr = std::shared_ptr<const Grid>;

inline GridPtr make_grid(int dim, int n, double length) {
    return std::make_shared<const Grid>(dim, n, length);
}

/// Throws ConfigError when two grids differ in (d, N, L).
void require_same_grid(const Grid& a, const Grid& b, const char* what);

}  // namespace nsk
