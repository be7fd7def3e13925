#pragma once

#include <utility>
#include <vector>

#include "ratchet/potential.hpp"
#include "ratchet/quadrature.hpp"

namespace ratchet {

/// Diffusivity (temperature) sigma and traveling-potential speed
/// (applied voltage) v of the channel.
struct ChannelParams {
    double sigma = 1.0;
    double v = 0.0;

    /// Throws InvalidInputError unless sigma > 0 and both entries are finite.
    void validate() const;
};

/// Raw exponential weight tables on the uniform grid z_i = i/n, i = 0..n:
///
///   f+-(z) = exp(+-(v z + psi(z)) / sigma),   F+-(z) = int_0^z f+-.
///
/// F+- are trapezoid prefix sums on the same grid. These tables are the
/// unscaled path: construction refuses inputs whose exponent range could
/// overflow (see weight_tables).
struct WeightTables {
    int n = 0;                    // number of intervals; n+1 samples
    std::vector<double> z;        // grid points, 0..1 inclusive
    std::vector<double> f_plus;
    std::vector<double> f_minus;
    std::vector<double> F_plus;   // nondecreasing, F(0) = 0
    std::vector<double> F_minus;
};

/// Moving-frame steady state on the uniform grid z_i = i/n, i = 0..n-1.
///
/// `current` is the physical constant flux I of the moving-frame balance
/// sigma rho_z + psi_z rho + v rho = I; `beta_reduced` is the integration
/// constant of the quadrature ansatz rho = f-(z) (beta + J F+(z)), stored in
/// the reduced convention J = I / sigma. kappa = v - current always.
struct SteadyState {
    ChannelParams params;
    int n = 0;
    std::vector<double> grid;
    std::vector<double> rho;      // strictly positive, unit mass
    double current = 0.0;
    double beta_reduced = 0.0;
    double kappa = 0.0;
};

/// Build the raw weight tables. Throws OverflowRiskError when
/// (|v| + 2 sum|coeffs|) / sigma > 700; steady_current / steady_density
/// rescale exponents internally and stay usable in that regime.
WeightTables weight_tables(const PeriodicPotential& p, const ChannelParams& c,
                           const QuadratureSpec& q);

/// Physical steady current
///
///   I = sigma (1 - e^{-v/sigma}) / (e^{-v/sigma} H- + H+),
///   H+ = int_0^1 F+ f-,  H- = int_0^1 F- f+.
///
/// Exactly zero at v = 0. All exponentials are shifted by their maximum and
/// the shifts cancel in the final ratio, so no overflow guard is needed here.
double steady_current(const PeriodicPotential& p, const ChannelParams& c,
                      const QuadratureSpec& q);

/// Steady density at arbitrary points via the periodic representation
///
///   rho(z) ∝ int_0^1 exp((-v w + psi(z-w) - psi(z)) / sigma) dw,
///
/// normalized to unit mass. Used by steady_density and by the evolution
/// solver for reference profiles on its own (cell-centered) grid.
std::vector<double> steady_profile(const PeriodicPotential& p, const ChannelParams& c,
                                   const QuadratureSpec& q, const std::vector<double>& z);

/// Full steady state on the q grid: density, current, beta, kappa.
/// Throws InternalConsistencyError if assembly produces a non-positive
/// density (never expected).
SteadyState steady_density(const PeriodicPotential& p, const ChannelParams& c,
                           const QuadratureSpec& q);

/// (kappa, kappa_harmonic): kappa = v - I by construction and the
/// harmonic-mean form v (1 - 1 / int rho^{-1}); the two agree to
/// quadrature accuracy.
std::pair<double, double> mean_velocity(const SteadyState& ss);

/// Max pointwise residual |sigma rho_z + (psi_z + v) rho - I| with rho_z
/// from spectral differentiation of the stored grid values.
double flux_residual(const SteadyState& ss, const PeriodicPotential& p);

/// Independent oracle for the steady problem: solves the (n+1)-unknown
/// linear system collocating sigma rho_z + (psi_z + v) rho - I = 0 at n
/// periodic grid points (spectral differentiation matrix) plus the unit-mass
/// row. Shares no code with steady_current beyond the potential itself.
/// Returns (current, rho at z_i = i/n). Throws NumericalFailureError if the
/// system is singular. Requires n >= 128.
std::pair<double, std::vector<double>> ode_oracle_current(const PeriodicPotential& p,
                                                          const ChannelParams& c, int n);

}  // namespace ratchet
