#include "thermalink/special_functions.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace thermalink {

namespace {

constexpr double EULER_GAMMA = 0.57721566490153286;

// Power series E1(z) = -gamma - ln z + sum_{k>=1} (-1)^{k+1} z^k / (k k!),
// accurate and fast for z < 1.
double exp1_series(double z) {
    double sum = 0.0;
    double term = 1.0;
    for (int k = 1; k < 64; ++k) {
        term *= -z / k;
        const double add = -term / k;
        sum += add;
        if (std::abs(add) < 1e-17 * std::abs(sum)) break;
    }
    return -EULER_GAMMA - std::log(z) + sum;
}

// Modified Lentz evaluation of the even continued fraction
//   e^z E1(z) = 1 / (z+1 - 1^2 / (z+3 - 2^2 / (z+5 - 3^2 / (z+7 - ...))))
// which stays well scaled for large z.
double exp1_cf_scaled(double z) {
    const double tiny = 1e-290;
    double b = z + 1.0;
    double c = 1.0 / tiny;
    double d = 1.0 / b;
    double f = d;
    for (int k = 1; k <= 400; ++k) {
        const double a = -static_cast<double>(k) * k;
        b += 2.0;
        d = a * d + b;
        if (std::abs(d) < tiny) d = tiny;
        c = b + a / c;
        if (std::abs(c) < tiny) c = tiny;
        d = 1.0 / d;
        const double delta = d * c;
        f *= delta;
        if (std::abs(delta - 1.0) < 1e-16) break;
    }
    return f;
}

}  // namespace

double exp1(double z) {
    if (!(z > 0.0)) throw std::domain_error("exp1: argument must be positive");
    if (z < 1.0) return exp1_series(z);
    return std::exp(-z) * exp1_cf_scaled(z);
}

double exp1_scaled(double z) {
    if (!(z > 0.0)) throw std::domain_error("exp1_scaled: argument must be positive");
    if (z < 1.0) return std::exp(z) * exp1_series(z);
    return exp1_cf_scaled(z);
}

double upsilon(double x) {
    if (!(x > 0.0)) throw std::domain_error("upsilon: argument must be positive");
    const double z = 1.0 / (8.0 * x);
    return z * exp1_scaled(z);
}

}  // namespace thermalink
