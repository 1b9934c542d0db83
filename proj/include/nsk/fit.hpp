/// @file fit.hpp
/// @brief Log-log least-squares rate fits.
#pragma once

#include <string>
#include <utility>
#include <vector>

namespace nsk {

struct RateFit {
    double slope = 0.0;
    double intercept = 0.0;
    double residual = 0.0;  ///< RMS of log-space residuals
    std::size_t used = 0;
    std::vector<std::string> warnings;
};

/// Fit log(value) = intercept + slope·log(ε). Nonpositive values are dropped
/// with a warning; fewer than three usable points throws InsufficientData.
RateFit fit_rate(const std::vector<std::pair<double, double>>& points);

}  // namespace nsk
