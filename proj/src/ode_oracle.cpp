// Discrete-ODE oracle for the moving-frame steady state. Deliberately
// self-contained: periodic spectral differentiation plus a dense LU solve,
// with no use of the quadrature or weight-table code that the closed-form
// current path is built on.

#include <Eigen/Dense>
#include <cmath>
#include <numbers>

#include "ratchet/errors.hpp"
#include "ratchet/steady.hpp"

namespace ratchet {

std::pair<double, std::vector<double>> ode_oracle_current(const PeriodicPotential& p,
                                                          const ChannelParams& c, int n) {
    c.validate();
    if (n < 128) throw InvalidInputError("ode_oracle_current: n must be >= 128");
    if (n % 2 != 0) throw InvalidInputError("ode_oracle_current: n must be even");

    // Unknowns (rho_0..rho_{n-1}, I). Rows 0..n-1 collocate the flux balance
    // sigma rho_z + (psi_z + v) rho - I = 0; row n is the unit-mass condition.
    Eigen::MatrixXd A = Eigen::MatrixXd::Zero(n + 1, n + 1);
    Eigen::VectorXd b = Eigen::VectorXd::Zero(n + 1);

    // Periodic spectral differentiation on [0,1): D_ij = pi (-1)^{i-j} cot(pi (i-j)/n).
    const double pi = std::numbers::pi;
    std::vector<double> drow(n, 0.0);
    for (int d = 1; d < n; ++d) {
        const double sgn = (d % 2 == 0) ? 1.0 : -1.0;
        drow[d] = pi * sgn / std::tan(pi * static_cast<double>(d) / n);
    }
    for (int i = 0; i < n; ++i) {
        const double z = static_cast<double>(i) / n;
        for (int j = 0; j < n; ++j) {
            if (i != j) A(i, j) = c.sigma * drow[(i - j + n) % n];
        }
        A(i, i) += p.derivative(z) + c.v;
        A(i, n) = -1.0;
    }
    for (int j = 0; j < n; ++j) A(n, j) = 1.0 / n;
    b(n) = 1.0;

    Eigen::PartialPivLU<Eigen::MatrixXd> lu(A);
    const Eigen::VectorXd x = lu.solve(b);
    const double resid = (A * x - b).norm();
    if (!x.allFinite() || resid > 1e-8 * (1.0 + b.norm()))
        throw NumericalFailureError("ode_oracle_current: singular or badly conditioned system");

    std::vector<double> rho(n);
    for (int i = 0; i < n; ++i) rho[i] = x(i);
    return {x(n), std::move(rho)};
}

}  // namespace ratchet
