#include "ratchet/steady.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <span>

#include "ratchet/errors.hpp"

namespace ratchet {

namespace {

constexpr double pi = std::numbers::pi;

// log(e^x + e^y), safe for any magnitudes.
double lse2(double x, double y) {
    if (x == -std::numeric_limits<double>::infinity()) return y;
    if (y == -std::numeric_limits<double>::infinity()) return x;
    const double m = std::max(x, y);
    return m + std::log1p(std::exp(-std::abs(x - y)));
}

// log|e^x - 1|.
double log_abs_expm1(double x) {
    if (x > 36.0) return x;
    return std::log(std::abs(std::expm1(x)));
}

// Exponent of the weight functions: g(z) = (v z + psi(z)) / sigma.
struct Exponent {
    const PeriodicPotential& p;
    double sigma, v;
    double operator()(double z) const { return (v * z + p.value(z)) / sigma; }
};

// log of int_a^b e^{sign*g(s) - shift} ds by one Gauss panel.
double panel_log_integral(const Exponent& g, double sign, double shift, double a, double b,
                          const GaussRule& rule) {
    const double mid = 0.5 * (a + b), half = 0.5 * (b - a);
    double terms[64];
    const int m = static_cast<int>(rule.nodes.size());
    for (int q = 0; q < m; ++q)
        terms[q] = std::log(half * rule.weights[q]) + sign * g(mid + half * rule.nodes[q]) - shift;
    return log_sum_exp(std::span<const double>(terms, m));
}

struct LogCurrentParts {
    double log_h_plus;    // log of e^{-(a+b)} H+
    double log_h_minus;   // log of e^{-(a+b)} H-
    double shift_sum;     // a + b
    double log_F_plus_1;  // log F+(1), unshifted
    double log_F_minus_1; // log F-(1), unshifted
};

// H+ = int_0^1 F+ f-, H- = int_0^1 F- f+ by composite Gauss-Legendre with
// all exponentials shifted by their maxima; accumulation happens in log
// space so deep potential wells cannot underflow the result.
LogCurrentParts current_parts(const PeriodicPotential& p, const ChannelParams& c,
                              const QuadratureSpec& q) {
    const Exponent g{p, c.sigma, c.v};
    const int panels = std::max(8, q.n_points / 8);
    const GaussRule& rule = gauss_rule(8);
    const double h = 1.0 / panels;

    double a = g(1.0), b = -g(0.0);
    for (int i = 0; i <= q.n_points; ++i) {
        const double gi = g(static_cast<double>(i) / q.n_points);
        a = std::max(a, gi);
        b = std::max(b, -gi);
    }

    const double neg_inf = -std::numeric_limits<double>::infinity();
    double log_run_plus = neg_inf;   // log int_0^{panel start} e^{g-a}
    double log_run_minus = neg_inf;  // log int_0^{panel start} e^{-g-b}
    double log_H_plus = neg_inf;
    double log_H_minus = neg_inf;

    for (int pnl = 0; pnl < panels; ++pnl) {
        const double z0 = pnl * h;
        for (std::size_t j = 0; j < rule.nodes.size(); ++j) {
            const double xi = z0 + 0.5 * h * (1.0 + rule.nodes[j]);
            const double lw = std::log(0.5 * h * rule.weights[j]);
            const double lFp = lse2(log_run_plus, panel_log_integral(g, +1, a, z0, xi, rule));
            const double lFm = lse2(log_run_minus, panel_log_integral(g, -1, b, z0, xi, rule));
            log_H_plus = lse2(log_H_plus, lw + lFp + (-g(xi) - b));
            log_H_minus = lse2(log_H_minus, lw + lFm + (g(xi) - a));
        }
        log_run_plus = lse2(log_run_plus, panel_log_integral(g, +1, a, z0, z0 + h, rule));
        log_run_minus = lse2(log_run_minus, panel_log_integral(g, -1, b, z0, z0 + h, rule));
    }
    return {log_H_plus, log_H_minus, a + b, a + log_run_plus, b + log_run_minus};
}

}  // namespace

void ChannelParams::validate() const {
    if (!(sigma > 0.0) || !std::isfinite(sigma) || !std::isfinite(v))
        throw InvalidInputError("ChannelParams: need finite v and sigma > 0");
}

WeightTables weight_tables(const PeriodicPotential& p, const ChannelParams& c,
                           const QuadratureSpec& q) {
    c.validate();
    q.validate();
    const double risk = (std::abs(c.v) + 2.0 * p.coeff_l1_norm()) / c.sigma;
    if (risk > 700.0)
        throw OverflowRiskError(
            "weight_tables: exponent range exceeds 700; use steady_current/steady_density, "
            "which rescale exponentials internally");

    const int n = q.n_points;
    WeightTables t;
    t.n = n;
    t.z.resize(n + 1);
    t.f_plus.resize(n + 1);
    t.f_minus.resize(n + 1);
    for (int i = 0; i <= n; ++i) {
        const double z = static_cast<double>(i) / n;
        const double g = (c.v * z + p.value(z)) / c.sigma;
        t.z[i] = z;
        t.f_plus[i] = std::exp(g);
        t.f_minus[i] = std::exp(-g);
    }
    t.F_plus = trapezoid_prefix(t.f_plus, 1.0 / n);
    t.F_minus = trapezoid_prefix(t.f_minus, 1.0 / n);
    return t;
}

double steady_current(const PeriodicPotential& p, const ChannelParams& c,
                      const QuadratureSpec& q) {
    c.validate();
    q.validate();
    if (c.v == 0.0) return 0.0;     // detailed balance
    if (p.is_zero()) return c.v;    // constant psi: rho = 1 forces I = v exactly

    const LogCurrentParts parts = current_parts(p, c, q);
    const double u = std::abs(c.v) / c.sigma;
    // I = sigma (1-e^{-v/s}) / (e^{-v/s} H- + H+); for v < 0 multiply
    // numerator and denominator by e^{v/s} so every exponential stays <= 1.
    const double log_num = std::log(-std::expm1(-u));
    const double log_den = (c.v > 0.0) ? lse2(-u + parts.log_h_minus, parts.log_h_plus)
                                       : lse2(parts.log_h_minus, -u + parts.log_h_plus);
    const double log_mag = log_num - parts.shift_sum - log_den;
    return (c.v > 0.0 ? 1.0 : -1.0) * c.sigma * std::exp(log_mag);
}

std::vector<double> steady_profile(const PeriodicPotential& p, const ChannelParams& c,
                                   const QuadratureSpec& q, const std::vector<double>& z) {
    c.validate();
    q.validate();
    const int n = q.n_points;
    const int panels = std::max(8, n / 8);
    const GaussRule& rule = gauss_rule(8);
    const double h = 1.0 / panels;
    const int order = static_cast<int>(rule.nodes.size());

    // Nodes and log-weights of the w-integral in
    //   rho(z) ∝ e^{-psi(z)/sigma} int_0^1 e^{(-v w + psi(z-w))/sigma} dw.
    const std::size_t w_count = static_cast<std::size_t>(panels) * order;
    std::vector<double> wn(w_count), lw(w_count);
    for (int pnl = 0; pnl < panels; ++pnl)
        for (int j = 0; j < order; ++j) {
            wn[pnl * order + j] = (pnl + 0.5 * (1.0 + rule.nodes[j])) * h;
            lw[pnl * order + j] = std::log(0.5 * h * rule.weights[j]);
        }

    auto log_R = [&](double zi) {
        std::vector<double> terms(wn.size());
        for (std::size_t m = 0; m < wn.size(); ++m)
            terms[m] = lw[m] + (-c.v * wn[m] + p.value(zi - wn[m])) / c.sigma;
        return log_sum_exp(terms) - p.value(zi) / c.sigma;
    };

    // Unit mass over the canonical grid (periodic trapezoid of R).
    std::vector<double> grid_logs(n);
    for (int i = 0; i < n; ++i) grid_logs[i] = log_R(static_cast<double>(i) / n);
    const double log_norm = log_sum_exp(grid_logs) - std::log(static_cast<double>(n));

    std::vector<double> rho(z.size());
    for (std::size_t i = 0; i < z.size(); ++i) rho[i] = std::exp(log_R(z[i]) - log_norm);
    return rho;
}

SteadyState steady_density(const PeriodicPotential& p, const ChannelParams& c,
                           const QuadratureSpec& q) {
    c.validate();
    q.validate();
    const int n = q.n_points;

    SteadyState ss;
    ss.params = c;
    ss.n = n;
    ss.grid.resize(n);
    for (int i = 0; i < n; ++i) ss.grid[i] = static_cast<double>(i) / n;
    ss.rho = steady_profile(p, c, q, ss.grid);
    for (double r : ss.rho)
        if (!(r > 0.0) || !std::isfinite(r))
            throw InternalConsistencyError("steady_density: non-positive density after assembly");

    ss.current = steady_current(p, c, q);
    ss.kappa = c.v - ss.current;

    // beta of the ansatz rho = f-(beta + J F+), reduced convention J = I/sigma:
    //   v != 0:  beta = J F+(1) / (e^{v/sigma} - 1);   v = 0:  beta = 1/F-(1).
    const LogCurrentParts parts = current_parts(p, c, q);
    if (c.v == 0.0) {
        ss.beta_reduced = std::exp(-parts.log_F_minus_1);
    } else {
        const double log_J_mag = std::log(std::abs(ss.current) / c.sigma);
        ss.beta_reduced = std::exp(log_J_mag + parts.log_F_plus_1 - log_abs_expm1(c.v / c.sigma));
    }
    return ss;
}

std::pair<double, double> mean_velocity(const SteadyState& ss) {
    double inv_mean = 0.0;
    for (double r : ss.rho) inv_mean += 1.0 / r;
    inv_mean /= ss.n;
    const double kappa_harmonic = ss.params.v * (1.0 - 1.0 / inv_mean);
    return {ss.kappa, kappa_harmonic};
}

double flux_residual(const SteadyState& ss, const PeriodicPotential& p) {
    const int n = ss.n;
    // Periodic spectral differentiation row: pi (-1)^d cot(pi d / n).
    std::vector<double> drow(n, 0.0);
    for (int d = 1; d < n; ++d)
        drow[d] = pi * ((d % 2 == 0) ? 1.0 : -1.0) / std::tan(pi * static_cast<double>(d) / n);
    double worst = 0.0;
    for (int i = 0; i < n; ++i) {
        double rho_z = 0.0;
        for (int d = 1; d < n; ++d) rho_z += drow[d] * ss.rho[(i - d + n) % n];
        const double flux = ss.params.sigma * rho_z +
                            (p.derivative(ss.grid[i]) + ss.params.v) * ss.rho[i];
        worst = std::max(worst, std::abs(flux - ss.current));
    }
    return worst;
}

}  // namespace ratchet
