#include "ratchet/quadrature.hpp"

#include <cmath>
#include <limits>
#include <map>
#include <mutex>
#include <numbers>

#include "ratchet/errors.hpp"

namespace ratchet {

void QuadratureSpec::validate() const {
    if (n_points < 64 || (n_points & (n_points - 1)) != 0)
        throw InvalidInputError("QuadratureSpec: n_points must be a power of two >= 64");
}

namespace {

GaussRule compute_gauss_rule(int n) {
    GaussRule r;
    r.nodes.resize(n);
    r.weights.resize(n);
    // Newton on P_n with the three-term recurrence; roots are symmetric.
    for (int i = 0; i < (n + 1) / 2; ++i) {
        double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
        double dp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = x;
            for (int k = 2; k <= n; ++k) {
                const double p2 = ((2 * k - 1) * x * p1 - (k - 1) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            dp = n * (x * p1 - p0) / (x * x - 1.0);
            const double dx = p1 / dp;
            x -= dx;
            if (std::abs(dx) < 1e-15) break;
        }
        r.nodes[i] = -x;
        r.nodes[n - 1 - i] = x;
        const double w = 2.0 / ((1.0 - x * x) * dp * dp);
        r.weights[i] = w;
        r.weights[n - 1 - i] = w;
    }
    return r;
}

}  // namespace

const GaussRule& gauss_rule(int order) {
    if (order < 1 || order > 64) throw InvalidInputError("gauss_rule: order out of range [1,64]");
    static std::map<int, GaussRule> cache;
    static std::mutex mutex;
    std::lock_guard<std::mutex> lock(mutex);
    auto it = cache.find(order);
    if (it == cache.end()) it = cache.emplace(order, compute_gauss_rule(order)).first;
    return it->second;
}

double integrate_panels(const std::function<double(double)>& f, double a, double b,
                        int panels, int order) {
    if (panels < 1) throw InvalidInputError("integrate_panels: need at least one panel");
    const GaussRule& g = gauss_rule(order);
    const double h = (b - a) / panels;
    double total = 0.0;
    for (int p = 0; p < panels; ++p) {
        const double mid = a + (p + 0.5) * h;
        double s = 0.0;
        for (int q = 0; q < order; ++q) s += g.weights[q] * f(mid + 0.5 * h * g.nodes[q]);
        total += 0.5 * h * s;
    }
    return total;
}

double trapezoid_periodic(const std::function<double(double)>& f, int n) {
    if (n < 1) throw InvalidInputError("trapezoid_periodic: n must be positive");
    double s = 0.0;
    for (int i = 0; i < n; ++i) s += f(static_cast<double>(i) / n);
    return s / n;
}

double trapezoid(std::span<const double> values, double h) {
    if (values.size() < 2) return 0.0;
    double s = 0.5 * (values.front() + values.back());
    for (std::size_t i = 1; i + 1 < values.size(); ++i) s += values[i];
    return s * h;
}

std::vector<double> trapezoid_prefix(std::span<const double> values, double h) {
    std::vector<double> out(values.size(), 0.0);
    for (std::size_t i = 1; i < values.size(); ++i)
        out[i] = out[i - 1] + 0.5 * h * (values[i - 1] + values[i]);
    return out;
}

double log_sum_exp(std::span<const double> v) {
    if (v.empty()) return -std::numeric_limits<double>::infinity();
    double m = v[0];
    for (double x : v) m = std::max(m, x);
    if (!std::isfinite(m)) return m;
    double s = 0.0;
    for (double x : v) s += std::exp(x - m);
    return m + std::log(s);
}

double log_sum_exp_weighted(std::span<const double> v, std::span<const double> w) {
    if (v.empty()) return -std::numeric_limits<double>::infinity();
    double m = v[0];
    for (double x : v) m = std::max(m, x);
    if (!std::isfinite(m)) return m;
    double s = 0.0;
    for (std::size_t i = 0; i < v.size(); ++i) s += w[i] * std::exp(v[i] - m);
    return m + std::log(s);
}

}  // namespace ratchet
