#include "ratchet/evolve.hpp"

#include <cmath>

#include "ratchet/errors.hpp"

namespace ratchet {

namespace {

// Bernoulli function B(x) = x / (e^x - 1), the exponential-fitting weight.
double bernoulli(double x) {
    if (std::abs(x) < 1e-8) return 1.0 - 0.5 * x;
    const double d = std::expm1(x);
    if (std::isinf(d)) return 0.0;
    return x / d;
}

// Solve the cyclic tridiagonal system where row i couples x_{i-1}, x_i,
// x_{i+1} (indices mod n): Sherman-Morrison on top of a Thomas sweep, plus
// one round of iterative refinement to push the residual (and the mass
// drift it causes) down to roundoff.
class CyclicTridiagonal {
public:
    CyclicTridiagonal(std::vector<double> lower, std::vector<double> diag,
                      std::vector<double> upper)
        : lo_(std::move(lower)), di_(std::move(diag)), up_(std::move(upper)),
          n_(static_cast<int>(di_.size())) {
        if (n_ < 8) throw InvalidInputError("cyclic solver: need at least 8 unknowns");
    }

    std::vector<double> apply(const std::vector<double>& x) const {
        std::vector<double> y(n_);
        for (int i = 0; i < n_; ++i)
            y[i] = lo_[i] * x[(i - 1 + n_) % n_] + di_[i] * x[i] + up_[i] * x[(i + 1) % n_];
        return y;
    }

    std::vector<double> solve(const std::vector<double>& rhs) const {
        std::vector<double> x = solve_once(rhs);
        // refinement: r = rhs - A x, x += A^{-1} r
        std::vector<double> r = apply(x);
        for (int i = 0; i < n_; ++i) r[i] = rhs[i] - r[i];
        const std::vector<double> dx = solve_once(r);
        for (int i = 0; i < n_; ++i) x[i] += dx[i];
        return x;
    }

private:
    std::vector<double> solve_once(const std::vector<double>& rhs) const {
        const double alpha = lo_[0];              // corner (0, n-1)
        const double beta = up_[n_ - 1];          // corner (n-1, 0)
        const double gamma = -di_[0];
        std::vector<double> d(di_);
        d[0] -= gamma;
        d[n_ - 1] -= alpha * beta / gamma;
        std::vector<double> y = thomas(d, rhs);
        std::vector<double> u(n_, 0.0);
        u[0] = gamma;
        u[n_ - 1] = beta;
        std::vector<double> q = thomas(d, u);
        const double num = y[0] + alpha * y[n_ - 1] / gamma;
        const double den = 1.0 + q[0] + alpha * q[n_ - 1] / gamma;
        if (den == 0.0 || !std::isfinite(den))
            throw NumericalFailureError("cyclic solver: singular system");
        for (int i = 0; i < n_; ++i) y[i] -= q[i] * num / den;
        return y;
    }

    // Plain Thomas sweep with the given diagonal (corners excluded).
    std::vector<double> thomas(const std::vector<double>& d,
                               const std::vector<double>& rhs) const {
        std::vector<double> c(n_), x(n_);
        double piv = d[0];
        if (piv == 0.0) throw NumericalFailureError("cyclic solver: zero pivot");
        c[0] = up_[0] / piv;
        x[0] = rhs[0] / piv;
        for (int i = 1; i < n_; ++i) {
            piv = d[i] - lo_[i] * c[i - 1];
            if (piv == 0.0 || !std::isfinite(piv))
                throw NumericalFailureError("cyclic solver: zero pivot");
            c[i] = (i + 1 < n_ ? up_[i] : 0.0) / piv;
            x[i] = (rhs[i] - lo_[i] * x[i - 1]) / piv;
        }
        for (int i = n_ - 2; i >= 0; --i) x[i] -= c[i] * x[i + 1];
        return x;
    }

    std::vector<double> lo_, di_, up_;
    int n_;
};

// Face potential jumps Delta phi_f / sigma for face f at z = f h, between
// cells f-1 and f. The moving frame tilts by v h per cell; the lab frame
// samples the traveling potential at the step's theta-weighted time.
std::vector<double> face_jumps(int n, const PeriodicPotential& p, const ChannelParams& c,
                               Frame frame, double t_eval) {
    const double h = 1.0 / n;
    std::vector<double> x(n);
    const double shift = (frame == Frame::lab) ? c.v * t_eval : 0.0;
    const double tilt = (frame == Frame::moving) ? c.v * h : 0.0;
    double prev = p.value((n - 1 + 0.5) * h - shift - 1.0);  // unwrapped left neighbor
    for (int f = 0; f < n; ++f) {
        const double cur = p.value((f + 0.5) * h - shift);
        x[f] = (cur - prev + tilt) / c.sigma;
        prev = cur;
    }
    return x;
}

DensityField theta_step(const DensityField& field, const PeriodicPotential& p,
                        const ChannelParams& c, const EvolveConfig& cfg, Frame frame) {
    c.validate();
    cfg.validate();
    const int n = field.grid_n;
    if (n < 8) throw InvalidInputError("theta_step: grid too small");
    const double h = 1.0 / n;
    const double s = c.sigma / (h * h);

    const std::vector<double> x = face_jumps(n, p, c, frame, field.time + cfg.theta * cfg.dt);

    // L rho: (Lrho)_i = s [B(-x_{i+1}) rho_{i+1} - (B(x_{i+1}) + B(-x_i)) rho_i
    //                      + B(x_i) rho_{i-1}]; columns sum to zero.
    std::vector<double> bp(n), bm(n);
    for (int f = 0; f < n; ++f) {
        bp[f] = bernoulli(x[f]);
        bm[f] = bernoulli(-x[f]);
    }
    std::vector<double> lo(n), di(n), up(n), rhs(n);
    const double im = cfg.theta * cfg.dt;
    const double ex = (1.0 - cfg.theta) * cfg.dt;
    for (int i = 0; i < n; ++i) {
        const int fr = (i + 1) % n;  // right face of cell i
        const double low = s * bp[i];
        const double dia = -s * (bp[fr] + bm[i]);
        const double upp = s * bm[fr];
        lo[i] = -im * low;
        di[i] = 1.0 - im * dia;
        up[i] = -im * upp;
        rhs[i] = field.values[i] +
                 ex * (low * field.values[(i - 1 + n) % n] + dia * field.values[i] +
                       upp * field.values[(i + 1) % n]);
    }

    DensityField out;
    out.grid_n = n;
    out.time = field.time + cfg.dt;
    out.renormalized = field.renormalized;
    out.values = CyclicTridiagonal(std::move(lo), std::move(di), std::move(up)).solve(rhs);
    return out;
}

}  // namespace

DensityField DensityField::uniform(int grid_n) {
    if (grid_n < 8) throw InvalidInputError("DensityField: grid_n must be >= 8");
    DensityField f;
    f.grid_n = grid_n;
    f.values.assign(grid_n, 1.0);
    return f;
}

DensityField DensityField::bump(int grid_n, double center, double width) {
    if (grid_n < 8) throw InvalidInputError("DensityField: grid_n must be >= 8");
    if (!(width > 0.0)) throw InvalidInputError("DensityField: bump width must be positive");
    std::vector<double> v(grid_n);
    for (int i = 0; i < grid_n; ++i) {
        const double z = (i + 0.5) / grid_n;
        double d = std::abs(z - center);
        d = std::min(d, 1.0 - d);  // periodic distance
        v[i] = std::exp(-0.5 * (d / width) * (d / width));
    }
    DensityField f = from_values(std::move(v));
    f.renormalized = false;  // normalization is part of the constructor here
    return f;
}

DensityField DensityField::from_values(std::vector<double> values, double time) {
    if (values.size() < 8) throw InvalidInputError("DensityField: grid_n must be >= 8");
    double mass = 0.0;
    for (double v : values) {
        if (!(v >= 0.0) || !std::isfinite(v))
            throw InvalidInputError("DensityField: values must be finite and nonnegative");
        mass += v;
    }
    mass /= static_cast<double>(values.size());
    if (mass <= 0.0) throw InvalidInputError("DensityField: zero mass");
    DensityField f;
    f.grid_n = static_cast<int>(values.size());
    f.time = time;
    f.renormalized = std::abs(mass - 1.0) > 1e-12;
    for (double& v : values) v /= mass;
    f.values = std::move(values);
    return f;
}

double DensityField::mass() const {
    double m = 0.0;
    for (double v : values) m += v;
    return m / grid_n;
}

void EvolveConfig::validate() const {
    if (!(dt > 0.0) || dt > 0.5) throw InvalidInputError("EvolveConfig: need 0 < dt <= 0.5");
    if (!(theta >= 0.5 && theta <= 1.0))
        throw InvalidInputError("EvolveConfig: theta must lie in [0.5, 1]");
}

DensityField step_moving_frame(const DensityField& field, const PeriodicPotential& p,
                               const ChannelParams& c, const EvolveConfig& cfg) {
    if (cfg.frame != Frame::moving)
        throw InvalidInputError("step_moving_frame: config frame must be `moving`");
    return theta_step(field, p, c, cfg, Frame::moving);
}

DensityField step_lab_frame(const DensityField& field, const PeriodicPotential& p,
                            const ChannelParams& c, const EvolveConfig& cfg) {
    if (cfg.frame != Frame::lab)
        throw InvalidInputError("step_lab_frame: config frame must be `lab`");
    return theta_step(field, p, c, cfg, Frame::lab);
}

RelaxResult relax_to_steady(const DensityField& field, const PeriodicPotential& p,
                            const ChannelParams& c, const EvolveConfig& cfg, double tol,
                            int max_steps) {
    if (cfg.frame != Frame::moving)
        throw InvalidInputError("relax_to_steady: config frame must be `moving`");
    if (!(tol > 0.0)) throw InvalidInputError("relax_to_steady: tol must be positive");
    if (max_steps < 1) throw InvalidInputError("relax_to_steady: max_steps must be >= 1");

    RelaxResult res;
    res.field = field;
    for (res.steps = 0; res.steps < max_steps;) {
        DensityField next = theta_step(res.field, p, c, cfg, Frame::moving);
        ++res.steps;
        const double change = l1_distance(next, res.field);
        res.field = std::move(next);
        if (change < tol * cfg.dt) {
            res.converged = true;
            break;
        }
    }

    std::vector<double> centers(field.grid_n);
    for (int i = 0; i < field.grid_n; ++i) centers[i] = (i + 0.5) / field.grid_n;
    const QuadratureSpec ref_q{1024};
    const std::vector<double> ref = steady_profile(p, c, ref_q, centers);
    double gap = 0.0;
    for (int i = 0; i < field.grid_n; ++i) gap += std::abs(res.field.values[i] - ref[i]);
    res.l1_gap = gap / field.grid_n;
    return res;
}

double l1_distance(const DensityField& a, const DensityField& b) {
    if (a.grid_n != b.grid_n) throw InvalidInputError("l1_distance: grid mismatch");
    double s = 0.0;
    for (int i = 0; i < a.grid_n; ++i) s += std::abs(a.values[i] - b.values[i]);
    return s / a.grid_n;
}

}  // namespace ratchet
