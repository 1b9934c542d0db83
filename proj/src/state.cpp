#include "nsk/state.hpp"

#include <cmath>
#include <sstream>

#include "nsk/errors.hpp"

namespace nsk {

void PhysParams::validate() const {
    if (!(epsilon > 0.0) || !std::isfinite(epsilon)) throw ConfigError("epsilon must be > 0");
    if (!(nu >= 0.0) || !std::isfinite(nu)) throw ConfigError("nu must be >= 0");
    if (!(kappa >= 0.0) || !std::isfinite(kappa)) throw ConfigError("kappa must be >= 0");
    if (!(gamma > 1.0) || !std::isfinite(gamma)) throw ConfigError("gamma must be > 1");
}

FluidState::FluidState(ScalarField rho_, VectorField m_, PhysParams params_, double t_)
    : rho(std::move(rho_)), m(std::move(m_)), params(params_), t(t_) {
    require_same_grid(rho.grid(), m.grid(), "fluid state");
}

FluidState FluidState::from_velocity(ScalarField rho, const VectorField& u, PhysParams params,
                                     double t) {
    VectorField m = rho * u;
    return FluidState(std::move(rho), std::move(m), params, t);
}

VectorField FluidState::velocity() const {
    const double lo = rho.min();
    if (!(lo > 0.0)) {
        std::ostringstream os;
        os << "nonpositive density: min rho = " << lo;
        throw DomainError(os.str());
    }
    VectorField u(rho.grid_ptr());
    for (int j = 0; j < m.dim(); ++j) {
        for (std::size_t i = 0; i < rho.size(); ++i) u[j][i] = m[j][i] / rho[i];
    }
    return u;
}

}  // namespace nsk
