#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "oracles.hpp"
#include "ratchet/errors.hpp"
#include "ratchet/evolve.hpp"

using namespace ratchet;

namespace {

DensityField cosine_field(int n, double amplitude) {
    std::vector<double> v(n);
    for (int i = 0; i < n; ++i)
        v[i] = 1.0 + amplitude * std::cos(2.0 * std::numbers::pi * (i + 0.5) / n);
    return DensityField::from_values(std::move(v));
}

double cosine_amplitude(const DensityField& f) {
    double a = 0.0;
    for (int i = 0; i < f.grid_n; ++i)
        a += (f.values[i] - 1.0) * std::cos(2.0 * std::numbers::pi * (i + 0.5) / f.grid_n);
    return 2.0 * a / f.grid_n;
}

}  // namespace

TEST_CASE("field construction") {
    const DensityField u = DensityField::uniform(64);
    CHECK(u.mass() == doctest::Approx(1.0).epsilon(1e-15));
    CHECK_FALSE(u.renormalized);

    DensityField b = DensityField::bump(128, 0.5, 0.05);
    CHECK(b.mass() == doctest::Approx(1.0).epsilon(1e-13));

    DensityField f = DensityField::from_values(std::vector<double>(32, 2.0));
    CHECK(f.renormalized);
    CHECK(f.mass() == doctest::Approx(1.0).epsilon(1e-15));

    CHECK_THROWS_AS((DensityField::from_values({1.0, -0.5, 1.0, 1.0, 1.0, 1.0, 1.0, 1.0})),
                    InvalidInputError);
    CHECK_THROWS_AS(DensityField::uniform(4), InvalidInputError);
}

TEST_CASE("config validation") {
    CHECK_THROWS_AS((EvolveConfig{0.0, Frame::moving, 1.0}.validate()), InvalidInputError);
    CHECK_THROWS_AS((EvolveConfig{0.6, Frame::moving, 1.0}.validate()), InvalidInputError);
    CHECK_THROWS_AS((EvolveConfig{1e-3, Frame::moving, 0.4}.validate()), InvalidInputError);
    CHECK_THROWS_AS((step_moving_frame(DensityField::uniform(32), {}, ChannelParams{1.0, 0.0},
                                       EvolveConfig{1e-3, Frame::lab, 1.0})),
                    InvalidInputError);
    CHECK_THROWS_AS((step_lab_frame(DensityField::uniform(32), {}, ChannelParams{1.0, 0.0},
                                    EvolveConfig{1e-3, Frame::moving, 1.0})),
                    InvalidInputError);
}

TEST_CASE("pure diffusion damps the first mode at the heat-kernel rate") {
    const DensityField f = cosine_field(256, 0.5);
    const EvolveConfig cfg{0.01, Frame::moving, 0.5};
    const DensityField g = step_moving_frame(f, {}, ChannelParams{1.0, 0.0}, cfg);
    const double expected = 0.5 * std::exp(-4.0 * std::numbers::pi * std::numbers::pi * 0.01);
    CHECK(std::abs(cosine_amplitude(g) / expected - 1.0) < 0.02);
}

TEST_CASE("analytic steady state is a discrete fixed point up to scheme order") {
    const PeriodicPotential p = make_trig_potential({0.0}, {0.5});
    const ChannelParams c{1.0, 1.0};
    const int n = 512;
    std::vector<double> centers(n);
    for (int i = 0; i < n; ++i) centers[i] = (i + 0.5) / n;
    const DensityField f = DensityField::from_values(
        steady_profile(p, c, QuadratureSpec{1024}, centers));
    const DensityField g = step_moving_frame(f, p, c, EvolveConfig{1e-4, Frame::moving, 1.0});
    double sup = 0.0;
    for (int i = 0; i < n; ++i) sup = std::max(sup, std::abs(g.values[i] - f.values[i]));
    CHECK(sup <= 1e-8);
}

TEST_CASE("mass is conserved to roundoff every step") {
    std::mt19937 rng(41);
    std::uniform_real_distribution<double> ud(0.1, 2.0);
    for (int trial = 0; trial < 4; ++trial) {
        const PeriodicPotential p = oracles::random_potential(rng, 3, 1.0);
        const ChannelParams c{0.5 + ud(rng), ud(rng) - 1.0};
        std::vector<double> v(128);
        for (double& x : v) x = ud(rng);
        DensityField f = DensityField::from_values(std::move(v));
        const EvolveConfig cfg{0.01, Frame::moving, 1.0};
        for (int s = 0; s < 50; ++s) {
            const DensityField g = step_moving_frame(f, p, c, cfg);
            CHECK(std::abs(g.mass() - f.mass()) <= 1e-13);
            f = g;
        }
    }
}

TEST_CASE("lab frame") {
    SUBCASE("v=0 collapses to the moving-frame step bitwise") {
        std::mt19937 rng(43);
        const PeriodicPotential p = oracles::random_potential(rng, 3, 1.0);
        const ChannelParams c{0.8, 0.0};
        const DensityField f = DensityField::bump(128, 0.3, 0.07);
        const DensityField a =
            step_lab_frame(f, p, c, EvolveConfig{1e-3, Frame::lab, 0.7});
        const DensityField b =
            step_moving_frame(f, p, c, EvolveConfig{1e-3, Frame::moving, 0.7});
        for (int i = 0; i < 128; ++i) CHECK(a.values[i] == b.values[i]);
    }
    SUBCASE("flat potential leaves the uniform density untouched") {
        DensityField f = DensityField::uniform(128);
        const EvolveConfig cfg{0.01, Frame::lab, 0.5};
        for (int s = 0; s < 100; ++s) f = step_lab_frame(f, {}, ChannelParams{1.0, 2.0}, cfg);
        for (double v : f.values) CHECK(std::abs(v - 1.0) <= 1e-12);
    }
    SUBCASE("traveling wave settles onto the shifted steady profile") {
        // v t = 10 is an integer, so the shifted moving-frame profile lands
        // exactly on the lab grid.
        const PeriodicPotential p = make_trig_potential({0.0}, {0.5});
        const ChannelParams c{1.0, 1.0};
        const int n = 512;
        DensityField lab = DensityField::uniform(n);
        const EvolveConfig cfg{1e-3, Frame::lab, 0.5};
        for (int s = 0; s < 10000; ++s) lab = step_lab_frame(lab, p, c, cfg);
        std::vector<double> centers(n);
        for (int i = 0; i < n; ++i) centers[i] = (i + 0.5) / n;
        const std::vector<double> ref = steady_profile(p, c, QuadratureSpec{1024}, centers);
        double sup = 0.0;
        for (int i = 0; i < n; ++i) sup = std::max(sup, std::abs(lab.values[i] - ref[i]));
        CHECK(sup <= 5e-3);
    }
}

TEST_CASE("relaxation") {
    SUBCASE("uniform initial data for a flat potential converges immediately") {
        const RelaxResult r =
            relax_to_steady(DensityField::uniform(128), {}, ChannelParams{0.9, 1.7},
                            EvolveConfig{1e-3, Frame::moving, 1.0}, 1e-8, 10);
        CHECK(r.converged);
        CHECK(r.steps == 1);
        CHECK(r.l1_gap <= 1e-12);
    }
    SUBCASE("sharp bump relaxes onto the analytic steady state") {
        const PeriodicPotential p = make_trig_potential({0.0}, {0.5});
        const RelaxResult r =
            relax_to_steady(DensityField::bump(256, 0.5, 0.03), p, ChannelParams{1.0, 1.0},
                            EvolveConfig{1e-3, Frame::moving, 1.0}, 1e-8, 100000);
        CHECK(r.converged);
        CHECK(r.l1_gap <= 1e-4);
    }
    SUBCASE("hitting max_steps reports instead of throwing") {
        const PeriodicPotential p = make_trig_potential({0.0}, {0.5});
        const RelaxResult r =
            relax_to_steady(DensityField::bump(128, 0.5, 0.05), p, ChannelParams{1.0, 1.0},
                            EvolveConfig{1e-3, Frame::moving, 1.0}, 1e-14, 3);
        CHECK_FALSE(r.converged);
        CHECK(r.steps == 3);
        CHECK(std::isfinite(r.l1_gap));
    }
}

TEST_CASE("two solutions contract in L1") {
    std::mt19937 rng(47);
    const PeriodicPotential p = oracles::random_potential(rng, 2, 0.8);
    const ChannelParams c{0.7, 1.3};
    const EvolveConfig cfg{5e-3, Frame::moving, 1.0};
    DensityField a = DensityField::bump(128, 0.2, 0.05);
    DensityField b = DensityField::bump(128, 0.7, 0.1);
    double dist = l1_distance(a, b);
    for (int s = 0; s < 200; ++s) {
        a = step_moving_frame(a, p, c, cfg);
        b = step_moving_frame(b, p, c, cfg);
        const double next = l1_distance(a, b);
        CHECK(next <= dist + 1e-12);
        dist = next;
    }
}

TEST_CASE("backward Euler keeps densities nonnegative at any dt") {
    std::mt19937 rng(49);
    std::uniform_real_distribution<double> ud(0.0, 1.0), dtd(1e-4, 0.5);
    for (int trial = 0; trial < 100; ++trial) {
        const PeriodicPotential p = oracles::random_potential(rng, 3, 1.0);
        const ChannelParams c{0.3 + ud(rng), 4.0 * ud(rng) - 2.0};
        std::vector<double> v(96);
        for (double& x : v) x = ud(rng) < 0.3 ? 0.0 : ud(rng);
        if (std::none_of(v.begin(), v.end(), [](double x) { return x > 0.0; })) v[0] = 1.0;
        DensityField f = DensityField::from_values(std::move(v));
        const EvolveConfig cfg{dtd(rng), Frame::moving, 1.0};
        for (int s = 0; s < 100; ++s) {
            f = step_moving_frame(f, p, c, cfg);
            for (double x : f.values) CHECK(x >= 0.0);
        }
    }
}

TEST_CASE("second-order spatial convergence toward the analytic profile") {
    const PeriodicPotential p = make_trig_potential({0.0}, {0.5});
    const ChannelParams c{1.0, 1.0};
    double previous = 0.0;
    for (int n : {256, 512, 1024}) {
        const RelaxResult r =
            relax_to_steady(DensityField::uniform(n), p, c,
                            EvolveConfig{2e-3, Frame::moving, 1.0}, 1e-10, 400000);
        REQUIRE(r.converged);
        if (previous > 0.0) CHECK(previous / r.l1_gap >= 3.5);
        previous = r.l1_gap;
    }
}
