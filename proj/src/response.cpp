#include "ratchet/response.hpp"

#include <Eigen/Dense>
#include <Eigen/SVD>
#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>
#include <thread>

#include "ratchet/errors.hpp"

namespace ratchet {

namespace {

// Evaluates F(sigma, z) for many z against one potential/grid. The shifted
// samples psi(x_i + z) come from angle-addition on per-harmonic tables, so
// the inner loop is exp + fused multiply-adds with no trig calls.
class CorrelationEvaluator {
public:
    CorrelationEvaluator(const PeriodicPotential& p, double sigma, const QuadratureSpec& q)
        : sigma_(sigma), n_(q.n_points), K_(p.bandwidth()), a_(p.cos_coeffs()),
          b_(p.sin_coeffs()) {
        if (!(sigma > 0.0)) throw InvalidInputError("correlation: sigma must be positive");
        q.validate();
        cosx_.resize(static_cast<std::size_t>(K_) * n_);
        sinx_.resize(static_cast<std::size_t>(K_) * n_);
        expo_.resize(n_);
        for (int i = 0; i < n_; ++i) {
            const double x = static_cast<double>(i) / n_;
            expo_[i] = p.value(x) / sigma_;
            for (int k = 0; k < K_; ++k) {
                const double arg = 2.0 * std::numbers::pi * (k + 1) * x;
                cosx_[k * n_ + i] = std::cos(arg);
                sinx_[k * n_ + i] = std::sin(arg);
            }
        }
    }

    /// log of (1/n) sum_i exp(expo_i - psi(x_i + z)/sigma), max-shifted.
    double log_F(double z) const {
        std::vector<double> ck(K_), sk(K_);
        for (int k = 0; k < K_; ++k) {
            const double arg = 2.0 * std::numbers::pi * (k + 1) * z;
            ck[k] = std::cos(arg);
            sk[k] = std::sin(arg);
        }
        double m = -std::numeric_limits<double>::infinity();
        std::vector<double> e(n_);
        for (int i = 0; i < n_; ++i) {
            double shifted = 0.0;
            for (int k = 0; k < K_; ++k) {
                const double c = cosx_[k * n_ + i], s = sinx_[k * n_ + i];
                shifted += a_[k] * (c * ck[k] - s * sk[k]) + b_[k] * (s * ck[k] + c * sk[k]);
            }
            e[i] = expo_[i] - shifted / sigma_;
            m = std::max(m, e[i]);
        }
        double sum = 0.0;
        for (int i = 0; i < n_; ++i) sum += std::exp(e[i] - m);
        return m + std::log(sum / n_);
    }

    double F(double z) const {
        const double lf = log_F(z);
        if (lf > 709.0) throw OverflowRiskError("correlation: F(sigma,z) exceeds double range");
        return std::exp(lf);
    }

private:
    double sigma_;
    int n_, K_;
    std::vector<double> a_, b_;
    std::vector<double> cosx_, sinx_, expo_;
};

double binomial(int n, int k) {
    double r = 1.0;
    for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
    return r;
}

double factorial(int n) {
    double r = 1.0;
    for (int i = 2; i <= n; ++i) r *= i;
    return r;
}

// Stehfest summation weights for an even number of terms.
std::vector<double> stehfest_weights(int n_terms) {
    const int half = n_terms / 2;
    std::vector<double> w(n_terms + 1, 0.0);
    for (int k = 1; k <= n_terms; ++k) {
        double sum = 0.0;
        for (int j = (k + 1) / 2; j <= std::min(k, half); ++j) {
            double term = std::pow(static_cast<double>(j), half) * factorial(2 * j);
            term /= factorial(half - j) * factorial(j) * factorial(j - 1) * factorial(k - j) *
                    factorial(2 * j - k);
            sum += term;
        }
        w[k] = ((half + k) % 2 == 0 ? 1.0 : -1.0) * sum;
    }
    return w;
}

}  // namespace

double correlation(const PeriodicPotential& p, double sigma, double z, const QuadratureSpec& q) {
    return CorrelationEvaluator(p, sigma, q).F(z);
}

CorrelationProfile sample_correlation(const PeriodicPotential& p, double sigma, int m,
                                      const QuadratureSpec& q) {
    if (m < 2) throw InvalidInputError("sample_correlation: need at least 2 samples");
    const CorrelationEvaluator ev(p, sigma, q);
    CorrelationProfile prof;
    prof.sigma = sigma;
    prof.z_grid.resize(m);
    prof.values.resize(m);
    for (int j = 0; j < m; ++j) {
        prof.z_grid[j] = -1.0 + static_cast<double>(j) / (m - 1);
        prof.values[j] = ev.F(prof.z_grid[j]);
    }
    return prof;
}

std::pair<double, double> h_kernels(const PeriodicPotential& p, double sigma, double z,
                                    const QuadratureSpec& q) {
    if (!(sigma > 0.0)) throw InvalidInputError("h_kernels: sigma must be positive");
    q.validate();
    const int base_panels = std::max(8, q.n_points / 8);
    double hp = 0.0, hm = 0.0;
    if (z >= 0.0 && z <= 1.0) {
        const int panels = std::max(1, static_cast<int>(std::ceil(base_panels * (1.0 - z))));
        if (z < 1.0)
            hp = integrate_panels(
                [&](double x) { return std::exp((p.value(x - z) - p.value(x)) / sigma); }, z, 1.0,
                panels);
    }
    if (z >= -1.0 && z <= 0.0) {
        const int panels = std::max(1, static_cast<int>(std::ceil(base_panels * (1.0 + z))));
        if (z > -1.0)
            hm = integrate_panels(
                [&](double x) { return std::exp((p.value(x) - p.value(x + z)) / sigma); }, -z, 1.0,
                panels);
    }
    return {hp, hm};
}

double transform_identity_residual(const PeriodicPotential& p, double sigma, double v,
                                   const QuadratureSpec& q) {
    if (!(sigma > 0.0)) throw InvalidInputError("transform_identity_residual: sigma > 0 required");
    if (v == 0.0)
        throw InvalidInputError("transform_identity_residual: v must be nonzero (the v = 0 "
                                "limit is the resistance)");
    const CorrelationEvaluator ev(p, sigma, q);
    const double lhs = integrate_panels(
        [&](double z) { return std::exp(-v * z / sigma + ev.log_F(z)); }, -1.0, 0.0,
        std::max(8, q.n_points / 8));
    const double current = steady_current(p, ChannelParams{sigma, v}, q);
    const double rhs = std::expm1(v / sigma) * sigma / current;
    return std::abs(lhs - rhs) / std::abs(rhs);
}

std::pair<double, double> resistance(const PeriodicPotential& p, double sigma,
                                     const QuadratureSpec& q) {
    const CorrelationEvaluator ev(p, sigma, q);
    // F is 1-periodic in z, so the mean over one period is spectrally exact.
    double r_int = 0.0;
    for (int j = 0; j < q.n_points; ++j)
        r_int += std::exp(ev.log_F(-1.0 + static_cast<double>(j) / q.n_points));
    r_int /= q.n_points;

    const double h = 1e-4 * sigma;
    const double ip = steady_current(p, ChannelParams{sigma, h}, q);
    const double im = steady_current(p, ChannelParams{sigma, -h}, q);
    const double r_fd = 2.0 * h / (ip - im);
    return {r_int, r_fd};
}

ResistanceCurve sample_resistance(const PeriodicPotential& p, const std::vector<double>& sigmas,
                                  const QuadratureSpec& q, int threads) {
    for (double s : sigmas)
        if (!(s > 0.0)) throw InvalidInputError("sample_resistance: sigmas must be positive");
    ResistanceCurve curve;
    curve.sigmas = sigmas;
    curve.resistance.assign(sigmas.size(), 0.0);
    const int nt = std::clamp<int>(threads, 1, static_cast<int>(sigmas.size()) + 1);
    if (nt <= 1) {
        for (std::size_t i = 0; i < sigmas.size(); ++i)
            curve.resistance[i] = resistance(p, sigmas[i], q).first;
        return curve;
    }
    std::vector<std::thread> pool;
    std::atomic<std::size_t> next{0};
    for (int t = 0; t < nt; ++t)
        pool.emplace_back([&] {
            for (std::size_t i = next.fetch_add(1); i < sigmas.size(); i = next.fetch_add(1))
                curve.resistance[i] = resistance(p, sigmas[i], q).first;
        });
    for (auto& th : pool) th.join();
    return curve;
}

double series_coefficients_from_moments(const std::vector<double>& moments, int k) {
    if (k < 0 || k > 12)
        throw InvalidInputError("series_coefficients_from_moments: k must lie in [0, 12]");
    if (static_cast<int>(moments.size()) < k + 1)
        throw InvalidInputError("series_coefficients_from_moments: need moments M_0..M_k");
    if (std::abs(moments[0] - 1.0) > 1e-12)
        throw InvalidInputError("series_coefficients_from_moments: M_0 must equal 1");
    double sum = 0.0;
    for (int j = 0; j <= k; ++j) {
        const double sign = (j % 2 == 0) ? 1.0 : -1.0;
        sum += sign * binomial(k, j) * moments[j] * moments[k - j];
    }
    return sum / factorial(k);
}

SeriesFit fit_series_coefficients(const ResistanceCurve& curve, int K) {
    const int m = static_cast<int>(curve.sigmas.size());
    if (K < 1 || K > 8) throw InvalidInputError("fit_series_coefficients: K must lie in [1, 8]");
    if (m < K + 3)
        throw InvalidInputError("fit_series_coefficients: need at least K+3 curve samples");
    for (double s : curve.sigmas)
        if (!(s >= 4.0))
            throw InvalidInputError("fit_series_coefficients: all sigmas must be >= 4 "
                                    "(asymptotic regime)");

    Eigen::MatrixXd A(m, K);
    Eigen::VectorXd y(m);
    for (int i = 0; i < m; ++i) {
        double pw = 1.0;
        for (int k = 0; k < K; ++k) {
            pw /= curve.sigmas[i];
            A(i, k) = pw;
        }
        y(i) = curve.resistance[i] - 1.0;
    }
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(A, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const double cond = svd.singularValues()(0) / svd.singularValues()(K - 1);
    if (!(cond < 1e12))
        throw IllConditionedFitError("fit_series_coefficients: condition estimate above 1e12; "
                                     "widen the sigma range");
    const Eigen::VectorXd c = svd.solve(y);

    SeriesFit fit;
    fit.coeffs.assign(c.data(), c.data() + K);
    fit.residual = (A * c - y).norm();
    fit.condition = cond;
    return fit;
}

std::vector<double> recover_even_moments(const std::vector<double>& coeffs, int m_max) {
    if (m_max < 1) throw InvalidInputError("recover_even_moments: m_max must be >= 1");
    if (static_cast<int>(coeffs.size()) < 2 * m_max)
        throw InvalidInputError("recover_even_moments: coefficient c_" +
                                std::to_string(2 * m_max) + " missing");
    // moments[k] = M_k with odd entries zero; coeffs[i] = c_{i+1}.
    std::vector<double> M(2 * m_max + 1, 0.0);
    M[0] = 1.0;
    std::vector<double> out;
    for (int k = 2; k <= 2 * m_max; k += 2) {
        double inner = 0.0;
        for (int j = 2; j <= k - 2; j += 2) inner += binomial(k, j) * M[j] * M[k - j];
        M[k] = (factorial(k) * coeffs[k - 1] - inner) / 2.0;
        out.push_back(M[k]);
    }
    return out;
}

MomentRecovery make_moment_recovery(const ResistanceCurve& curve, int K) {
    if (K % 2 != 0) throw InvalidInputError("make_moment_recovery: K must be even");
    const SeriesFit fit = fit_series_coefficients(curve, K);
    MomentRecovery rec;
    rec.coeffs = fit.coeffs;
    rec.even_moments = recover_even_moments(fit.coeffs, K / 2);
    rec.fit_residual = fit.residual;
    rec.condition_estimate = fit.condition;
    return rec;
}

GaverStehfestResult gaver_stehfest_recover_F(const PeriodicPotential& p, double sigma,
                                             const std::vector<double>& u_points, int n_terms,
                                             const QuadratureSpec& q) {
    if (n_terms != 8 && n_terms != 10 && n_terms != 12 && n_terms != 14)
        throw InvalidInputError("gaver_stehfest_recover_F: n_terms must be 8, 10, 12 or 14");
    if (!(sigma > 0.0)) throw InvalidInputError("gaver_stehfest_recover_F: sigma > 0 required");
    for (double u : u_points)
        if (!(u > 0.0 && u < 1.0))
            throw InvalidInputError("gaver_stehfest_recover_F: u points must lie in (0,1)");

    // The raw transform of u -> F(sigma, -u) 1_{[0,1]}(u) is
    // (e^{-s} - 1) / J(-sigma s, sigma) with J = I / sigma. Its target jumps
    // at the support edge u = 1, which defeats the summation everywhere.
    // Dividing by the known support factor (1 - e^{-s}) yields the
    // transform of the smooth 1-periodic extension of F, which agrees with
    // the target on (0,1):
    //   G-(s) = -1 / J(-sigma s, sigma) = -sigma / I(-sigma s, sigma).
    // Periodicity gives F(sigma,-u) = F(sigma,1-u), whose extension is
    // transformed by the positive-voltage branch G+(s) = sigma / I(sigma s,
    // sigma); the summation sharpens toward small u, so each point is
    // recovered through whichever branch puts it below 1/2. Only the
    // forward current model is consulted in either branch.
    auto G = [&](double s, double branch) {
        const double current = steady_current(p, ChannelParams{sigma, branch * sigma * s}, q);
        return branch * sigma / current;
    };

    auto estimate = [&](double u, int terms) {
        const double ueff = (u <= 0.5) ? u : 1.0 - u;
        const double branch = (u <= 0.5) ? -1.0 : 1.0;
        const std::vector<double> w = stehfest_weights(terms);
        const double l2u = std::numbers::ln2 / ueff;
        double sum = 0.0;
        for (int k = 1; k <= terms; ++k) sum += w[k] * G(k * l2u, branch);
        return l2u * sum;
    };

    GaverStehfestResult res;
    res.values.reserve(u_points.size());
    res.reliable.reserve(u_points.size());
    for (double u : u_points) {
        const double hi = estimate(u, n_terms);
        const double lo = estimate(u, n_terms - 2);
        res.values.push_back(hi);
        // successive-order agreement as the cancellation detector
        const double diff = std::abs(hi - lo) / std::max(1.0, std::abs(hi));
        res.reliable.push_back(std::isfinite(hi) && diff <= 5e-3);
    }
    return res;
}

}  // namespace ratchet
