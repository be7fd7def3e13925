#pragma once

#include <stdexcept>
#include <vector>

#include "ratchet/evolve.hpp"
#include "ratchet/potential.hpp"
#include "ratchet/steady.hpp"

namespace ratchet {

/// Deterministic particle orbit: strictly increasing times and UNWRAPPED
/// positions on the real line (not reduced mod 1).
struct OrbitPath {
    std::vector<double> times;
    std::vector<double> positions;
};

/// Thrown when an integrator step would move a particle by more than a
/// quarter period; carries the offending step so the caller can shrink dt.
class StepRejectionError : public std::runtime_error {
public:
    StepRejectionError(const std::string& msg, int step) : std::runtime_error(msg), step_index(step) {}
    int step_index = 0;
};

/// C^1 periodic piecewise-cubic Hermite interpolant of uniform samples
/// (fourth-order slopes). `offset` is the x of sample 0; spacing is 1/n.
class PeriodicCubic {
public:
    PeriodicCubic(std::vector<double> values, double offset = 0.0);
    double value(double x) const;
    double derivative(double x) const;

private:
    std::vector<double> v_, m_;
    double offset_;
    int n_;
};

/// The probability velocity field v = -Psi_x - sigma rho_x / rho evaluated
/// from a discrete density. A SteadyState source is the traveling
/// moving-frame profile (density and potential both ride at speed v);
/// a DensityField source is a frozen lab-frame snapshot under the traveling
/// potential. Throws DegenerateDensityError if the interpolated density
/// falls below 1e-300.
class VelocityField {
public:
    VelocityField(const SteadyState& ss, const PeriodicPotential& p);
    VelocityField(const DensityField& f, const PeriodicPotential& p, const ChannelParams& c);
    double operator()(double x, double t) const;

private:
    PeriodicPotential psi_;
    PeriodicCubic rho_;
    double sigma_, v_;
    bool traveling_;
};

/// One-shot pointwise evaluations of the velocity field.
double velocity_field(const SteadyState& ss, const PeriodicPotential& p, double x, double t);
double velocity_field(const DensityField& f, const PeriodicPotential& p,
                      const ChannelParams& c, double x, double t);

/// Classical fourth-order one-step integration of dx/dt = v(x,t) from x0 to
/// t_end; rejects any stage moving faster than a quarter period per step.
OrbitPath integrate_orbit(const VelocityField& vf, double x0, double t_end, double dt);
OrbitPath integrate_orbit(const SteadyState& ss, const PeriodicPotential& p, double x0,
                          double t_end, double dt);

/// Autonomous moving-frame orbit dz/dt = -I / rho(z) with the physical
/// current I of the steady state; positions are unwrapped z values.
OrbitPath moving_frame_orbit(const SteadyState& ss, double z0, double t_end, double dt);

/// Least-squares slope of positions vs times over the post-burn-in window;
/// the regression is far more stable than the endpoint ratio x(t)/t.
double empirical_mean_velocity(const OrbitPath& path, double burn_in_fraction);

}  // namespace ratchet
