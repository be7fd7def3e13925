#pragma once

#include <functional>
#include <span>
#include <vector>

namespace ratchet {

/// Uniform grid size for the periodic trapezoid rules. Powers of two >= 64.
struct QuadratureSpec {
    int n_points = 1024;

    /// Throws InvalidInputError unless n_points is a power of two >= 64.
    void validate() const;
};

/// Gauss-Legendre nodes/weights on [-1,1], computed once per order by
/// Newton iteration on the Legendre recurrence and cached.
struct GaussRule {
    std::vector<double> nodes;
    std::vector<double> weights;
};
const GaussRule& gauss_rule(int order);

/// int_a^b f, composite Gauss-Legendre with `panels` equal panels of
/// `order` points each. Machine-accurate for analytic integrands at
/// modest panel counts; this is the workhorse for the non-periodic
/// exponential-weighted integrals.
double integrate_panels(const std::function<double(double)>& f, double a, double b,
                        int panels, int order = 8);

/// Mean-value trapezoid over one period: (1/n) sum f(i/n). Spectrally
/// accurate for smooth 1-periodic f.
double trapezoid_periodic(const std::function<double(double)>& f, int n);

/// Trapezoid of uniformly sampled values with spacing h.
double trapezoid(std::span<const double> values, double h);

/// Running trapezoid antiderivative of uniformly sampled values; out[0] = 0.
std::vector<double> trapezoid_prefix(std::span<const double> values, double h);

/// log(sum exp(v_i)) with the usual max shift; -inf for an empty span.
double log_sum_exp(std::span<const double> v);

/// log(sum w_i exp(v_i)) for positive weights w.
double log_sum_exp_weighted(std::span<const double> v, std::span<const double> w);

}  // namespace ratchet
