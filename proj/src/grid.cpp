#include "nsk/grid.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include "nsk/errors.hpp"

namespace nsk {

namespace {

bool is_pow2(int n) { return n > 0 && (n & (n - 1)) == 0; }

int signed_mode(int i, int n) { return i < n / 2 ? i : i - n; }

}  // namespace

Grid::Grid(int dim, int n, double length) : dim_(dim), n_(n), length_(length) {
    if (dim != 2 && dim != 3) {
        throw ConfigError("grid dimension must be 2 or 3, got " + std::to_string(dim));
    }
    if (n < 8 || !is_pow2(n)) {
        throw ConfigError("grid points per axis must be a power of two >= 8, got " +
                          std::to_string(n));
    }
    if (!(length > 0.0) || !std::isfinite(length)) {
        throw ConfigError("box length must be positive");
    }

    const std::size_t nn = static_cast<std::size_t>(n);
    const std::size_t nh = nn / 2 + 1;
    size_ = dim == 2 ? nn * nn : nn * nn * nn;
    spectral_size_ = dim == 2 ? nh * nn : nh * nn * nn;

    modes_.resize(spectral_size_);
    k_.resize(spectral_size_);
    k2_.resize(spectral_size_);
    nyquist_.resize(spectral_size_);
    dealias_keep_.resize(spectral_size_);

    const double dk = 2.0 * std::numbers::pi / length;
    const int nz = dim == 3 ? n : 1;
    std::size_t s = 0;
    for (int iz = 0; iz < nz; ++iz) {
        for (int iy = 0; iy < n; ++iy) {
            for (int ix = 0; ix <= n / 2; ++ix, ++s) {
                std::array<int, 3> m{signed_mode(ix, n), signed_mode(iy, n),
                                     dim == 3 ? signed_mode(iz, n) : 0};
                // In 2D the second array slot is y; the third stays zero.
                modes_[s] = m;
                bool nyq = false;
                bool keep = true;
                double k2 = 0.0;
                for (int j = 0; j < 3; ++j) {
                    k_[s][j] = dk * m[j];
                    k2 += k_[s][j] * k_[s][j];
                    if (j < dim && m[j] == -n / 2) nyq = true;
                    if (3 * std::abs(m[j]) > n) keep = false;
                }
                k2_[s] = k2;
                nyquist_[s] = nyq ? 1 : 0;
                dealias_keep_[s] = keep ? 1 : 0;
            }
        }
    }
}

double Grid::volume() const { return std::pow(length_, dim_); }

double Grid::cell_volume() const { return std::pow(dx(), dim_); }

std::array<double, 3> Grid::k_odd(std::size_t s) const {
    std::array<double, 3> out = k_[s];
    for (int j = 0; j < dim_; ++j) {
        if (modes_[s][j] == -n_ / 2) out[j] = 0.0;
    }
    return out;
}

double Grid::kmag(std::size_t s) const { return std::sqrt(k2_[s]); }

double Grid::dealiased_kmax() const {
    return 2.0 * std::numbers::pi / length_ * static_cast<double>(n_ / 3);
}

std::array<double, 3> Grid::coords(std::size_t i) const {
    const std::size_t nn = static_cast<std::size_t>(n_);
    const double h = dx();
    std::array<double, 3> x{0.0, 0.0, 0.0};
    x[0] = h * static_cast<double>(i % nn);
    x[1] = h * static_cast<double>((i / nn) % nn);
    if (dim_ == 3) x[2] = h * static_cast<double>(i / (nn * nn));
    return x;
}

std::size_t Grid::conjugate_partner(std::size_t s) const {
    const std::size_t nn = static_cast<std::size_t>(n_);
    const std::size_t nh = nn / 2 + 1;
    const std::size_t ix = s % nh;
    if (ix != 0 && ix != nn / 2) return s;
    const std::size_t iy = (s / nh) % nn;
    const std::size_t iz = dim_ == 3 ? s / (nh * nn) : 0;
    const std::size_t jy = (nn - iy) % nn;
    const std::size_t jz = (nn - iz) % nn;
    return ix + nh * (jy + nn * jz);
}

void require_same_grid(const Grid& a, const Grid& b, const char* what) {
    if (a != b) {
        std::ostringstream os;
        os << what << ": grid mismatch (d=" << a.dim() << ", N=" << a.n() << ", L=" << a.length()
           << ") vs (d=" << b.dim() << ", N=" << b.n() << ", L=" << b.length() << ")";
        throw ConfigError(os.str());
    }
}

}  // namespace nsk
