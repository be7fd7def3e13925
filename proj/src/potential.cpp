#include "ratchet/potential.hpp"

#include <cmath>
#include <numbers>

#include "ratchet/errors.hpp"

namespace ratchet {

namespace {
constexpr double two_pi = 2.0 * std::numbers::pi;
}

PeriodicPotential::PeriodicPotential(std::vector<double> cos_coeffs,
                                     std::vector<double> sin_coeffs)
    : cos_(std::move(cos_coeffs)), sin_(std::move(sin_coeffs)) {
    if (cos_.size() != sin_.size())
        throw InvalidInputError("potential: cos/sin coefficient lists must have equal length");
    for (double a : cos_)
        if (!std::isfinite(a)) throw InvalidInputError("potential: non-finite cos coefficient");
    for (double b : sin_)
        if (!std::isfinite(b)) throw InvalidInputError("potential: non-finite sin coefficient");
}

double PeriodicPotential::value(double x) const {
    double s = 0.0;
    for (std::size_t k = 0; k < cos_.size(); ++k) {
        const double arg = two_pi * static_cast<double>(k + 1) * x;
        s += cos_[k] * std::cos(arg) + sin_[k] * std::sin(arg);
    }
    return s;
}

double PeriodicPotential::derivative(double x) const {
    double s = 0.0;
    for (std::size_t k = 0; k < cos_.size(); ++k) {
        const double w = two_pi * static_cast<double>(k + 1);
        const double arg = w * x;
        s += w * (-cos_[k] * std::sin(arg) + sin_[k] * std::cos(arg));
    }
    return s;
}

double PeriodicPotential::moment(int j, int n_points) const {
    if (j < 0) throw InvalidInputError("moment: order j must be non-negative");
    if (j == 0) return 1.0;
    const long needed = 4L * bandwidth() * j;
    if (n_points < needed || n_points < 1)
        throw InvalidInputError("moment: n_points too small to resolve psi^j (need >= 4*K*j)");
    // Trapezoid over one period of a periodic integrand = plain mean;
    // exact for trig polynomials once n_points exceeds the degree K*j.
    double s = 0.0;
    for (int i = 0; i < n_points; ++i) {
        const double v = value(static_cast<double>(i) / n_points);
        double p = 1.0;
        for (int m = 0; m < j; ++m) p *= v;
        s += p;
    }
    return s / n_points;
}

bool PeriodicPotential::is_antisymmetric(double tol) const {
    if (tol <= 0.0) throw InvalidInputError("is_antisymmetric: tol must be positive");
    double worst = 0.0;
    for (int i = 0; i < 256; ++i) {
        const double x = static_cast<double>(i) / 256.0;
        worst = std::max(worst, std::abs(value(x) + value(-x)));
    }
    return worst <= tol;
}

bool PeriodicPotential::is_zero() const {
    for (double a : cos_)
        if (a != 0.0) return false;
    for (double b : sin_)
        if (b != 0.0) return false;
    return true;
}

PeriodicPotential PeriodicPotential::mirrored() const {
    std::vector<double> s(sin_);
    for (double& b : s) b = -b;
    return PeriodicPotential(cos_, std::move(s));
}

double PeriodicPotential::coeff_l1_norm() const {
    double s = 0.0;
    for (double a : cos_) s += std::abs(a);
    for (double b : sin_) s += std::abs(b);
    return s;
}

PeriodicPotential make_trig_potential(const std::vector<double>& cos_coeffs,
                                      const std::vector<double>& sin_coeffs) {
    return PeriodicPotential(cos_coeffs, sin_coeffs);
}

}  // namespace ratchet
