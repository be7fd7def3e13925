#include "ratchet/particles.hpp"

#include <cmath>
#include <string>

#include "ratchet/errors.hpp"

namespace ratchet {

PeriodicCubic::PeriodicCubic(std::vector<double> values, double offset)
    : v_(std::move(values)), offset_(offset), n_(static_cast<int>(v_.size())) {
    if (n_ < 8) throw InvalidInputError("PeriodicCubic: need at least 8 samples");
    const double h = 1.0 / n_;
    m_.resize(n_);
    for (int i = 0; i < n_; ++i) {
        const double vm2 = v_[(i - 2 + n_) % n_], vm1 = v_[(i - 1 + n_) % n_];
        const double vp1 = v_[(i + 1) % n_], vp2 = v_[(i + 2) % n_];
        m_[i] = (-vp2 + 8.0 * vp1 - 8.0 * vm1 + vm2) / (12.0 * h);
    }
}

double PeriodicCubic::value(double x) const {
    double u = (x - offset_) * n_;
    u -= std::floor(u / n_) * n_;  // wrap into [0, n)
    int i = static_cast<int>(u);
    if (i >= n_) i = n_ - 1;
    const double t = u - i;
    const int j = (i + 1) % n_;
    const double h = 1.0 / n_;
    const double t2 = t * t, t3 = t2 * t;
    return v_[i] * (2 * t3 - 3 * t2 + 1) + m_[i] * h * (t3 - 2 * t2 + t) +
           v_[j] * (-2 * t3 + 3 * t2) + m_[j] * h * (t3 - t2);
}

double PeriodicCubic::derivative(double x) const {
    double u = (x - offset_) * n_;
    u -= std::floor(u / n_) * n_;
    int i = static_cast<int>(u);
    if (i >= n_) i = n_ - 1;
    const double t = u - i;
    const int j = (i + 1) % n_;
    const double t2 = t * t;
    return n_ * (v_[i] * (6 * t2 - 6 * t) + v_[j] * (-6 * t2 + 6 * t)) +
           m_[i] * (3 * t2 - 4 * t + 1) + m_[j] * (3 * t2 - 2 * t);
}

VelocityField::VelocityField(const SteadyState& ss, const PeriodicPotential& p)
    : psi_(p), rho_(ss.rho, 0.0), sigma_(ss.params.sigma), v_(ss.params.v), traveling_(true) {}

VelocityField::VelocityField(const DensityField& f, const PeriodicPotential& p,
                             const ChannelParams& c)
    : psi_(p), rho_(f.values, 0.5 / f.grid_n), sigma_(c.sigma), v_(c.v), traveling_(false) {}

double VelocityField::operator()(double x, double t) const {
    // Traveling source: both density and potential ride at speed v, so
    // everything is evaluated in the co-moving phase zeta = x - v t.
    const double zeta = x - v_ * t;
    const double xr = traveling_ ? zeta : x;
    const double rho = rho_.value(xr);
    if (!(rho > 1e-300))
        throw DegenerateDensityError("velocity_field: interpolated density vanished");
    return -psi_.derivative(zeta) - sigma_ * rho_.derivative(xr) / rho;
}

double velocity_field(const SteadyState& ss, const PeriodicPotential& p, double x, double t) {
    return VelocityField(ss, p)(x, t);
}

double velocity_field(const DensityField& f, const PeriodicPotential& p,
                      const ChannelParams& c, double x, double t) {
    return VelocityField(f, p, c)(x, t);
}

namespace {

template <typename Rhs>
OrbitPath run_rk4(const Rhs& rhs, double x0, double t_end, double dt) {
    if (!(dt > 0.0) || t_end < dt)
        throw InvalidInputError("orbit: need dt > 0 and t_end >= dt");
    const int steps = static_cast<int>(std::ceil(t_end / dt - 1e-12));
    OrbitPath path;
    path.times.reserve(steps + 1);
    path.positions.reserve(steps + 1);
    double t = 0.0, x = x0;
    path.times.push_back(t);
    path.positions.push_back(x);
    for (int s = 0; s < steps; ++s) {
        const double step = std::min(dt, t_end - t);
        const double k1 = rhs(x, t);
        const double k2 = rhs(x + 0.5 * step * k1, t + 0.5 * step);
        const double k3 = rhs(x + 0.5 * step * k2, t + 0.5 * step);
        const double k4 = rhs(x + step * k3, t + step);
        for (double k : {k1, k2, k3, k4})
            if (std::abs(k) * step > 0.25)
                throw StepRejectionError(
                    "orbit: |v| dt exceeds a quarter period at step " + std::to_string(s) +
                        "; reduce dt",
                    s);
        x += step / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        t += step;
        path.times.push_back(t);
        path.positions.push_back(x);
    }
    return path;
}

}  // namespace

OrbitPath integrate_orbit(const VelocityField& vf, double x0, double t_end, double dt) {
    return run_rk4([&vf](double x, double t) { return vf(x, t); }, x0, t_end, dt);
}

OrbitPath integrate_orbit(const SteadyState& ss, const PeriodicPotential& p, double x0,
                          double t_end, double dt) {
    return integrate_orbit(VelocityField(ss, p), x0, t_end, dt);
}

OrbitPath moving_frame_orbit(const SteadyState& ss, double z0, double t_end, double dt) {
    const PeriodicCubic rho(ss.rho, 0.0);
    const double current = ss.current;
    auto rhs = [&rho, current](double z, double) {
        const double r = rho.value(z);
        if (!(r > 1e-300))
            throw DegenerateDensityError("moving_frame_orbit: interpolated density vanished");
        return -current / r;
    };
    return run_rk4(rhs, z0, t_end, dt);
}

double empirical_mean_velocity(const OrbitPath& path, double burn_in_fraction) {
    if (!(burn_in_fraction >= 0.0 && burn_in_fraction < 1.0))
        throw InvalidInputError("empirical_mean_velocity: burn-in must lie in [0,1)");
    const std::size_t m = path.times.size();
    if (m < 16 || path.positions.size() != m)
        throw InvalidInputError("empirical_mean_velocity: need at least 16 samples");
    const std::size_t start = static_cast<std::size_t>(burn_in_fraction * m);
    const std::size_t cnt = m - start;
    if (cnt < 2) throw InvalidInputError("empirical_mean_velocity: too few points after burn-in");
    double tbar = 0.0, xbar = 0.0;
    for (std::size_t i = start; i < m; ++i) {
        tbar += path.times[i];
        xbar += path.positions[i];
    }
    tbar /= cnt;
    xbar /= cnt;
    double num = 0.0, den = 0.0;
    for (std::size_t i = start; i < m; ++i) {
        const double dt = path.times[i] - tbar;
        num += dt * (path.positions[i] - xbar);
        den += dt * dt;
    }
    if (den == 0.0) throw InvalidInputError("empirical_mean_velocity: degenerate time window");
    return num / den;
}

}  // namespace ratchet
