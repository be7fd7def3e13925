#pragma once

#include <vector>

#include "ratchet/potential.hpp"
#include "ratchet/steady.hpp"

namespace ratchet {

/// Time-dependent discrete density: cell averages of rho on grid_n uniform
/// cells over [0,1), periodic, cell centers at (i + 1/2)/grid_n. Mass,
/// i.e. the mean of `values`, is 1.
struct DensityField {
    int grid_n = 0;
    std::vector<double> values;
    double time = 0.0;
    bool renormalized = false;  // input mass was rescaled to 1 on construction

    /// Uniform density, mass one.
    static DensityField uniform(int grid_n);

    /// Gaussian-like bump centered at `center` with width `width`, periodic,
    /// normalized to unit mass.
    static DensityField bump(int grid_n, double center, double width);

    /// Adopt any nonnegative samples; renormalizes to unit mass and flags
    /// the result when the input mass deviated from 1.
    static DensityField from_values(std::vector<double> values, double time = 0.0);

    double mass() const;
};

enum class Frame { lab, moving };

/// Implicit theta-scheme configuration: theta = 1 is backward Euler
/// (positivity-preserving at any dt), theta = 1/2 is trapezoidal.
struct EvolveConfig {
    double dt = 1e-3;
    Frame frame = Frame::moving;
    double theta = 1.0;

    void validate() const;
};

/// One theta-step of the finite-volume discretization of
/// rho_t = (sigma rho_z + (psi_z + v) rho)_z with exponential-fitted
/// (Scharfetter-Gummel) face fluxes and periodic closure. Conserves mass
/// exactly up to solver roundoff; preserves positivity for theta = 1.
DensityField step_moving_frame(const DensityField& field, const PeriodicPotential& p,
                               const ChannelParams& c, const EvolveConfig& cfg);

/// Same scheme in the lab frame, rho_t = (sigma rho_x + Psi_x rho)_x with the
/// traveling potential Psi(x,t) = psi(x - v t) frozen at the theta-weighted
/// time t + theta dt of the step.
DensityField step_lab_frame(const DensityField& field, const PeriodicPotential& p,
                            const ChannelParams& c, const EvolveConfig& cfg);

struct RelaxResult {
    DensityField field;
    double l1_gap = 0.0;  // final L1 distance to the analytic steady profile
    int steps = 0;
    bool converged = false;
};

/// Iterate step_moving_frame until the L1 step-to-step change drops below
/// tol * dt or max_steps is hit. Non-convergence is reported in the result,
/// not thrown.
RelaxResult relax_to_steady(const DensityField& field, const PeriodicPotential& p,
                            const ChannelParams& c, const EvolveConfig& cfg, double tol,
                            int max_steps);

/// Cell-average L1 distance between two fields on the same grid.
double l1_distance(const DensityField& a, const DensityField& b);

}  // namespace ratchet
