#pragma once

#include <utility>
#include <vector>

#include "ratchet/potential.hpp"
#include "ratchet/quadrature.hpp"
#include "ratchet/steady.hpp"

namespace ratchet {

/// Samples of the correlation function
///   F(sigma, z) = int_0^1 exp((psi(x) - psi(x+z)) / sigma) dx
/// on z in [-1, 0]. F >= 1 everywhere (Jensen) and F(sigma, 0) = 1.
struct CorrelationProfile {
    double sigma = 1.0;
    std::vector<double> z_grid;
    std::vector<double> values;
};

/// Zero-voltage resistance R(sigma) = int_{-1}^0 F(sigma, z) dz >= 1,
/// sampled over a set of temperatures.
struct ResistanceCurve {
    std::vector<double> sigmas;
    std::vector<double> resistance;
};

/// Result of the moment-recovery pipeline: fitted large-sigma series
/// coefficients c_1..c_K of R(sigma) - 1, the even moments M_2, M_4, ...
/// recovered from them, and fit diagnostics.
struct MomentRecovery {
    std::vector<double> coeffs;
    std::vector<double> even_moments;
    double fit_residual = 0.0;
    double condition_estimate = 0.0;
};

/// F(sigma, z) by periodic trapezoid in x; defined for all real z (the
/// integrand is 1-periodic in z too). Exponents are max-shifted internally;
/// throws OverflowRiskError only if the value itself exceeds double range.
double correlation(const PeriodicPotential& p, double sigma, double z, const QuadratureSpec& q);

/// Profile of F on m uniformly spaced z points spanning [-1, 0].
CorrelationProfile sample_correlation(const PeriodicPotential& p, double sigma, int m,
                                      const QuadratureSpec& q);

/// Compactly supported kernels
///   h+(z) = int_z^1 e^{(psi(x-z)-psi(x))/sigma} dx   on [0,1], else 0,
///   h-(z) = int_{-z}^1 e^{(psi(x)-psi(x+z))/sigma} dx on [-1,0], else 0,
/// satisfying h+(z+1) + h-(z) = 1_{[-1,0]}(z) F(sigma, z).
std::pair<double, double> h_kernels(const PeriodicPotential& p, double sigma, double z,
                                    const QuadratureSpec& q);

/// Relative residual of the forward Laplace identity
///   int_{-1}^0 e^{-v z / sigma} F(sigma, z) dz = (e^{v/sigma} - 1) / J(v, sigma)
/// with the reduced current J = steady_current / sigma. Requires v != 0.
double transform_identity_residual(const PeriodicPotential& p, double sigma, double v,
                                   const QuadratureSpec& q);

/// (r_integral, r_fd): the double-integral resistance int_{-1}^0 F dz and the
/// central-difference (dI/dV)^{-1} at v = 0 with step 1e-4 sigma on the
/// physical current. The two agree to quadrature accuracy.
std::pair<double, double> resistance(const PeriodicPotential& p, double sigma,
                                     const QuadratureSpec& q);

/// Resistance curve over a list of sigmas; rows may be computed concurrently
/// but are always assembled in input order.
ResistanceCurve sample_resistance(const PeriodicPotential& p, const std::vector<double>& sigmas,
                                  const QuadratureSpec& q, int threads = 1);

/// Series coefficient c_k = (k!)^{-1} sum_j (-1)^j C(k,j) M_j M_{k-j} of the
/// large-sigma expansion R(sigma) = 1 + sum_k c_k sigma^{-k}. `moments` holds
/// M_0..M_K with M_0 = 1; k <= 12.
double series_coefficients_from_moments(const std::vector<double>& moments, int k);

struct SeriesFit {
    std::vector<double> coeffs;  // c_1..c_K
    double residual = 0.0;       // l2 norm of the misfit
    double condition = 0.0;      // singular-value ratio of the design matrix
};

/// Least-squares fit of R(sigma) - 1 against sigma^{-1}..sigma^{-K}.
/// Requires >= K+3 samples, all sigmas >= 4, K <= 8; throws
/// IllConditionedFitError when the design matrix condition exceeds 1e12.
SeriesFit fit_series_coefficients(const ResistanceCurve& curve, int K);

/// Invert the coefficient formula for antisymmetric potentials (odd moments
/// zero): M_2 = c_2 and, for even k >= 4,
///   M_k = (k! c_k - sum_{j=2,4,..,k-2} C(k,j) M_j M_{k-j}) / 2.
/// Returns [M_2, M_4, ..., M_{2 m_max}]; requires 2 m_max <= K.
std::vector<double> recover_even_moments(const std::vector<double>& coeffs, int m_max);

/// Full recovery pipeline from a resistance curve: fit K series
/// coefficients, then run the even-moment recursion (m_max = K/2).
MomentRecovery make_moment_recovery(const ResistanceCurve& curve, int K);

struct GaverStehfestResult {
    std::vector<double> values;     // estimates of F(sigma, -u)
    std::vector<bool> reliable;     // false where successive orders diverge
};

/// EXPERIMENTAL: numerically invert the Laplace identity from current
/// measurements alone. G(s) = (e^{-s} - 1) / J(-sigma s, sigma) is the
/// transform of u -> F(sigma, -u) on [0,1]; the implementation divides out
/// the known support factor (1 - e^{-s}) and applies Gaver-Stehfest
/// summation of the given (even) order at each u. Interior points are
/// accurate to ~1e-3; points where successive orders disagree come back
/// flagged unreliable.
GaverStehfestResult gaver_stehfest_recover_F(const PeriodicPotential& p, double sigma,
                                             const std::vector<double>& u_points, int n_terms,
                                             const QuadratureSpec& q = QuadratureSpec{});

}  // namespace ratchet
