#include "defaultgap/quadrature.hpp"

#include <cmath>
#include <stdexcept>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "defaultgap/errors.hpp"

namespace defaultgap {

double integrate(const std::function<double(double)>& f, double a, double b,
                 double abs_tol) {
    if (!(b >= a)) throw std::invalid_argument("integrate: b < a");
    if (a == b) return 0.0;
    double error = 0.0;
    const double value = boost::math::quadrature::gauss_kronrod<double, 31>::integrate(
        f, a, b, 15, 1e-14, &error);
    if (!(error <= abs_tol + 1e-14 * std::fabs(value)) || !std::isfinite(value)) {
        throw QuadratureFailure("integrate: error estimate " + std::to_string(error) +
                                " exceeds tolerance");
    }
    return value;
}

std::vector<std::pair<double, double>> gauss_laguerre(int n) {
    if (n < 2 || n > 400) throw std::invalid_argument("gauss_laguerre: bad order");
    std::vector<std::pair<double, double>> nodes(n);
    double z = 0.0;
    for (int i = 0; i < n; ++i) {
        if (i == 0) {
            z = 3.0 / (1.0 + 2.4 * n);
        } else if (i == 1) {
            z += 15.0 / (1.0 + 2.5 * n);
        } else {
            const double ai = i - 1;
            z += ((1.0 + 2.55 * ai) / (1.9 * ai)) * (z - nodes[i - 2].first);
        }
        double p1 = 0.0, p2 = 0.0, pp = 0.0;
        for (int it = 0; it < 100; ++it) {
            p1 = 1.0;
            p2 = 0.0;
            for (int j = 1; j <= n; ++j) {
                const double p3 = p2;
                p2 = p1;
                p1 = ((2.0 * j - 1.0 - z) * p2 - (j - 1.0) * p3) / j;
            }
            pp = n * (p1 - p2) / z;
            const double z1 = z;
            z = z1 - p1 / pp;
            if (std::fabs(z - z1) <= 1e-15 * std::fabs(z)) break;
        }
        nodes[i].first = z;
        nodes[i].second = -1.0 / (pp * n * p2);
    }
    return nodes;
}

} // namespace defaultgap
