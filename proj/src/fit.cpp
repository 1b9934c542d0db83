#include "nsk/fit.hpp"

#include <cmath>
#include <sstream>

#include "nsk/errors.hpp"

namespace nsk {

RateFit fit_rate(const std::vector<std::pair<double, double>>& points) {
    RateFit f;
    std::vector<double> x, y;
    for (const auto& [eps, v] : points) {
        if (!(eps > 0.0) || !(v > 0.0) || !std::isfinite(v)) {
            std::ostringstream os;
            os << "excluded point (" << eps << ", " << v << ")";
            f.warnings.push_back(os.str());
            continue;
        }
        x.push_back(std::log(eps));
        y.push_back(std::log(v));
    }
    f.used = x.size();
    if (f.used < 3) throw InsufficientData("fit_rate needs at least three positive points");
    const double n = static_cast<double>(f.used);
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= n;
    my /= n;
    double sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
    }
    if (!(sxx > 0.0)) throw InsufficientData("fit_rate needs at least two distinct epsilon values");
    f.slope = sxy / sxx;
    f.intercept = my - f.slope * mx;
    double ss = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double r = y[i] - (f.intercept + f.slope * x[i]);
        ss += r * r;
    }
    f.residual = std::sqrt(ss / n);
    return f;
}

}  // namespace nsk
