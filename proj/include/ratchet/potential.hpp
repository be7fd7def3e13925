#pragma once

#include <cstddef>
#include <vector>

namespace ratchet {

/// 1-periodic, mean-zero driving potential represented as a finite
/// trigonometric series
///
///     psi(x) = sum_k a_k cos(2 pi k x) + b_k sin(2 pi k x),  k = 1..K.
///
/// There is no constant term, so the period mean vanishes exactly and the
/// derivative is analytic. Immutable after construction; all methods are
/// pure and safe to call concurrently.
class PeriodicPotential {
public:
    /// Zero potential (K = 0).
    PeriodicPotential() = default;

    /// Build from cosine/sine coefficient lists of equal length K.
    /// Throws InvalidInputError on length mismatch or non-finite entries.
    PeriodicPotential(std::vector<double> cos_coeffs, std::vector<double> sin_coeffs);

    /// psi(x); periodic extension applies for any finite x.
    double value(double x) const;

    /// Exact analytic derivative psi'(x).
    double derivative(double x) const;

    /// j-th power moment  M_j = int_0^1 psi(x)^j dx  by uniform trapezoid
    /// quadrature with n_points samples. Exact (up to rounding) whenever
    /// n_points resolves the integrand bandwidth; the stated requirement
    /// n_points >= 4*K*j is enforced and violations throw InvalidInputError.
    double moment(int j, int n_points) const;

    /// True iff max_x |psi(x) + psi(-x)| <= tol on a 256-point grid,
    /// i.e. psi is anti-symmetric about the origin within tol.
    bool is_antisymmetric(double tol) const;

    /// Potential x -> psi(-x): cosine coefficients kept, sine flipped.
    PeriodicPotential mirrored() const;

    int bandwidth() const { return static_cast<int>(cos_.size()); }

    /// True iff psi vanishes identically (every coefficient is zero).
    bool is_zero() const;
    const std::vector<double>& cos_coeffs() const { return cos_; }
    const std::vector<double>& sin_coeffs() const { return sin_; }

    /// Sum of coefficient magnitudes; |psi| never exceeds this.
    double coeff_l1_norm() const;

private:
    std::vector<double> cos_;
    std::vector<double> sin_;
};

/// Factory mirroring the construction contract; K = 0 yields the zero potential.
PeriodicPotential make_trig_potential(const std::vector<double>& cos_coeffs,
                                      const std::vector<double>& sin_coeffs);

}  // namespace ratchet
