#include <doctest.h>

#include <cmath>
#include <random>

#include "oracles.hpp"
#include "ratchet/errors.hpp"
#include "ratchet/particles.hpp"

using namespace ratchet;

namespace {
SteadyState standard_steady() {
    return steady_density(make_trig_potential({0.0}, {0.5}), ChannelParams{1.0, 1.0},
                          QuadratureSpec{2048});
}
}  // namespace

TEST_CASE("periodic cubic interpolation reproduces smooth samples") {
    const int n = 256;
    std::vector<double> v(n);
    for (int i = 0; i < n; ++i) v[i] = std::exp(std::sin(2.0 * std::numbers::pi * i / n));
    const PeriodicCubic spline(v, 0.0);
    for (int j = 0; j < 40; ++j) {
        const double x = j / 40.0 + 0.0123;
        const double f = std::exp(std::sin(2.0 * std::numbers::pi * x));
        const double df = f * 2.0 * std::numbers::pi * std::cos(2.0 * std::numbers::pi * x);
        CHECK(std::abs(spline.value(x) - f) < 1e-8);
        CHECK(std::abs(spline.derivative(x) - df) < 1e-5);
    }
    // periodic wrap
    CHECK(spline.value(-0.25) == doctest::Approx(spline.value(0.75)).epsilon(1e-14));
}

TEST_CASE("velocity field") {
    SUBCASE("flat potential, uniform density: zero velocity") {
        const DensityField f = DensityField::uniform(256);
        for (double x : {0.0, 0.31, 0.77})
            CHECK(std::abs(velocity_field(f, {}, ChannelParams{1.0, 2.0}, x, 0.4)) <= 1e-12);
    }
    SUBCASE("detailed balance: drift cancels the osmotic term") {
        const PeriodicPotential p = make_trig_potential({0.0}, {0.5});
        const SteadyState ss = steady_density(p, ChannelParams{1.0, 0.0}, QuadratureSpec{2048});
        for (int i = 0; i < 100; ++i)
            CHECK(std::abs(velocity_field(ss, p, i / 100.0, 0.0)) <= 1e-8);
    }
    SUBCASE("flux constancy across the moving-frame steady state") {
        // sigma rho_z + (psi_z + v) rho = I pointwise means rho (v_channel -
        // v_particle) is the constant I.
        const PeriodicPotential p = make_trig_potential({0.0}, {0.5});
        const SteadyState ss = standard_steady();
        const PeriodicCubic rho(ss.rho, 0.0);
        const VelocityField vf(ss, p);
        for (int i = 0; i < 128; ++i) {
            const double z = i / 128.0;
            CHECK(std::abs(rho.value(z) * (ss.params.v - vf(z, 0.0)) - ss.current) <= 1e-6);
        }
    }
    SUBCASE("degenerate density is rejected") {
        std::vector<double> v(64, 0.0);
        v[0] = 64.0;  // all mass in one cell, exact zeros elsewhere
        const DensityField f = DensityField::from_values(std::move(v));
        CHECK_THROWS_AS((velocity_field(f, {}, ChannelParams{1.0, 0.0}, 0.5, 0.0)),
                        DegenerateDensityError);
    }
}

TEST_CASE("orbit integration") {
    SUBCASE("no forces, no motion") {
        const DensityField f = DensityField::uniform(64);
        const VelocityField vf(f, {}, ChannelParams{1.0, 0.0});
        const OrbitPath path = integrate_orbit(vf, 0.4, 10.0, 0.01);
        for (double x : path.positions) CHECK(x == doctest::Approx(0.4).epsilon(1e-14));
    }
    SUBCASE("flat potential: lab orbit rides the wave at zero net speed") {
        // kappa = 0, so x(t) stays put even though the frame moves.
        const SteadyState ss = steady_density({}, ChannelParams{1.0, 1.0}, QuadratureSpec{256});
        const OrbitPath path = integrate_orbit(ss, {}, 0.25, 20.0, 0.01);
        CHECK(std::abs(path.positions.back() - 0.25) <= 1e-10);
    }
    SUBCASE("endpoint ratio approaches kappa") {
        const PeriodicPotential p = make_trig_potential({0.0}, {0.5});
        const SteadyState ss = standard_steady();
        const OrbitPath path = integrate_orbit(ss, p, 0.0, 200.0, 0.01);
        CHECK(std::abs(path.positions.back() / path.times.back() - ss.kappa) <= 1e-3);
    }
    SUBCASE("step rejection reports the offending step") {
        const SteadyState ss = standard_steady();
        const PeriodicPotential p = make_trig_potential({0.0}, {0.5});
        try {
            integrate_orbit(ss, p, 0.0, 10.0, 1.0);  // |v| dt exceeds a quarter period
            FAIL("expected StepRejectionError");
        } catch (const StepRejectionError& e) {
            CHECK(e.step_index >= 0);
        }
    }
}

TEST_CASE("moving frame orbit") {
    SUBCASE("zero current: frozen") {
        const PeriodicPotential p = make_trig_potential({0.0}, {0.5});
        const SteadyState ss = steady_density(p, ChannelParams{1.0, 0.0}, QuadratureSpec{256});
        const OrbitPath path = moving_frame_orbit(ss, 0.6, 10.0, 0.01);
        CHECK(path.positions.back() == doctest::Approx(0.6).epsilon(1e-14));
    }
    SUBCASE("flat potential: z(t) = z0 - v t") {
        const SteadyState ss = steady_density({}, ChannelParams{1.0, 1.0}, QuadratureSpec{256});
        const OrbitPath path = moving_frame_orbit(ss, 0.3, 10.0, 0.01);
        for (std::size_t i = 0; i < path.times.size(); ++i)
            CHECK(std::abs(path.positions[i] - (0.3 - path.times[i])) <= 1e-10);
    }
    SUBCASE("slope equals -I independent of the start point") {
        std::mt19937 rng(51);
        const PeriodicPotential p = oracles::random_potential(rng, 2, 0.6);
        const SteadyState ss = steady_density(p, ChannelParams{1.0, 2.0}, QuadratureSpec{2048});
        const OrbitPath a = moving_frame_orbit(ss, 0.1, 500.0, 0.005);
        const OrbitPath b = moving_frame_orbit(ss, 0.7, 500.0, 0.005);
        const double sa = empirical_mean_velocity(a, 0.1);
        const double sb = empirical_mean_velocity(b, 0.1);
        CHECK(std::abs(sa - sb) <= 1e-3);
        CHECK(std::abs(sa + ss.current) <= 1e-3);
    }
}

TEST_CASE("empirical mean velocity") {
    SUBCASE("constant and linear paths") {
        OrbitPath flat;
        OrbitPath line;
        for (int i = 0; i < 32; ++i) {
            flat.times.push_back(0.1 * i);
            flat.positions.push_back(2.5);
            line.times.push_back(0.1 * i);
            line.positions.push_back(1.0 - 0.37 * 0.1 * i);
        }
        CHECK(empirical_mean_velocity(flat, 0.1) == doctest::Approx(0.0).epsilon(1e-12));
        CHECK(empirical_mean_velocity(line, 0.25) == doctest::Approx(-0.37).epsilon(1e-12));
    }
    SUBCASE("input validation") {
        OrbitPath p;
        for (int i = 0; i < 8; ++i) {
            p.times.push_back(i);
            p.positions.push_back(i);
        }
        CHECK_THROWS_AS(empirical_mean_velocity(p, 0.1), InvalidInputError);
        for (int i = 8; i < 20; ++i) {
            p.times.push_back(i);
            p.positions.push_back(i);
        }
        CHECK_THROWS_AS(empirical_mean_velocity(p, 1.0), InvalidInputError);
        CHECK_THROWS_AS(empirical_mean_velocity(p, -0.1), InvalidInputError);
    }
}

TEST_CASE("consistency chain and initial-condition independence") {
    const PeriodicPotential p = make_trig_potential({0.0}, {0.5});
    const SteadyState ss = standard_steady();
    const auto [kappa, kappa_harmonic] = mean_velocity(ss);

    std::mt19937 rng(55);
    std::uniform_real_distribution<double> xd(0.0, 1.0);
    double lo = 1e300, hi = -1e300;
    double mean_v = 0.0;
    int mean_count = 0;
    const VelocityField vf(ss, p);
    for (int trial = 0; trial < 8; ++trial) {
        const OrbitPath path = integrate_orbit(ss, p, xd(rng), 500.0, 0.01);
        const double slope = empirical_mean_velocity(path, 0.1);
        lo = std::min(lo, slope);
        hi = std::max(hi, slope);
        if (trial == 0) {
            for (std::size_t i = path.times.size() / 10; i < path.times.size(); ++i) {
                mean_v += vf(path.positions[i], path.times[i]);
                ++mean_count;
            }
        }
    }
    CHECK(hi - lo <= 1e-3);                        // start-point independence
    CHECK(std::abs(hi - kappa) <= 2e-3);           // slope vs v - I
    CHECK(std::abs(kappa - kappa_harmonic) <= 2e-3);
    CHECK(std::abs(mean_v / mean_count - kappa) <= 1e-3);  // period average of v
}
