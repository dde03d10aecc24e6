#include <cmath>

#include "doctest.h"
#include "fixture_values.hpp"
#include "oracles.hpp"
#include "sodacer/dynamics.hpp"
#include "sodacer/errors.hpp"
#include "sodacer/rng.hpp"

using namespace sodacer;

namespace {

SystemState make_state(double uf, double iff, double vf, double im, double vm, double j = 0.0) {
    return SystemState{uf, iff, vf, im, vm, j};
}

const SystemState kG1 = make_state(0.1, 0.05, 0.2, 0.1, 0.1);

SystemState random_valid_state(Rng& rng) {
    for (;;) {
        SystemState x;
        x.u_f = rng.uniform01();
        x.i_f = rng.uniform01();
        x.v_f = rng.uniform01();
        x.i_m = rng.uniform01();
        x.v_m = rng.uniform01();
        if (x.u_f + x.i_f + x.v_f <= 1.0 && x.i_m + x.v_m <= 1.0) return x;
    }
}

ControlVector random_admissible_control(Rng& rng, const HpvParameters& p) {
    return {rng.uniform(0.0, 1.0), rng.uniform(0.0, 1.0), rng.uniform(0.0, p.u_max),
            rng.uniform(0.0, p.u_max), rng.uniform(0.0, p.alpha_max)};
}

}  // namespace

TEST_CASE("drift vanishes at the disease-free origin") {
    const HpvParameters p;
    const Vec5 d = hpv_drift(SystemState{}, p);
    for (double v : d) CHECK(v == 0.0);
}

TEST_CASE("drift: waning and turnover drain an isolated vaccinated pool") {
    const HpvParameters p;
    const Vec5 d = hpv_drift(make_state(0.0, 0.0, 0.3, 0.0, 0.0), p);
    CHECK(d[2] == doctest::Approx(-0.04).epsilon(1e-12));
}

TEST_CASE("drift matches the G1 golden fixture") {
    const HpvParameters p;
    const Vec5 d = hpv_drift(kG1, p);
    for (int i = 0; i < 5; ++i)
        CHECK(d[i] == doctest::Approx(fixtures::kG1Drift[i]).epsilon(1e-13));
}

TEST_CASE("control matrix structure") {
    const HpvParameters p;

    SUBCASE("at the origin the susceptible pools are full") {
        const Mat5 g = hpv_control_matrix(SystemState{}, p);
        CHECK(g[2][0] == doctest::Approx(p.mu_f));
        CHECK(g[2][1] == 0.0);
        CHECK(g[2][2] == 1.0);
        CHECK(g[2][3] == 0.0);
        CHECK(g[2][4] == 0.0);
    }
    SUBCASE("screening column couples to the unaware compartment") {
        const Mat5 g = hpv_control_matrix(make_state(0.4, 0.0, 0.0, 0.0, 0.0), p);
        CHECK(g[0][4] == doctest::Approx(-0.4));
        CHECK(g[1][4] == doctest::Approx(0.4));
    }
    SUBCASE("the male infectious row has no control coupling") {
        Rng rng(7);
        for (int trial = 0; trial < 20; ++trial) {
            const Mat5 g = hpv_control_matrix(random_valid_state(rng), p);
            for (double v : g[3]) CHECK(v == 0.0);
        }
    }
}

TEST_CASE("running cost rate") {
    const HpvParameters p;
    CHECK(running_cost_rate(ControlVector{}, p) == 0.0);
    CHECK(running_cost_rate({1, 1, 0, 0, 0}, p) == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(running_cost_rate({0, 0, 3, 3, 0}, p) == doctest::Approx(1.8).epsilon(1e-15));
}

TEST_CASE("affine consistency: drift + g u equals the direct model RHS") {
    const HpvParameters p;
    Rng rng(11);
    for (int trial = 0; trial < 1000; ++trial) {
        const SystemState x = random_valid_state(rng);
        const ControlVector u = random_admissible_control(rng, p);
        const Vec5 f = hpv_drift(x, p);
        const Vec5 gu = matvec(hpv_control_matrix(x, p), u.as_array());
        Vec6 y = x.augmented();
        const auto direct = oracles::model_rhs(y, u.as_array(), p);
        for (int i = 0; i < 5; ++i) CHECK(std::abs(f[i] + gu[i] - direct[i]) < 1e-12);
    }
}

TEST_CASE("forward invariance at the zero faces") {
    const HpvParameters p;
    Rng rng(13);
    for (int face = 0; face < 5; ++face) {
        for (int trial = 0; trial < 100; ++trial) {
            SystemState x = random_valid_state(rng);
            switch (face) {
                case 0: x.u_f = 0.0; break;
                case 1: x.i_f = 0.0; break;
                case 2: x.v_f = 0.0; break;
                case 3: x.i_m = 0.0; break;
                case 4: x.v_m = 0.0; break;
            }
            const ControlVector u = random_admissible_control(rng, p);
            const Vec6 rhs = augmented_rhs(x.augmented(), u, p);
            CHECK(rhs[face] >= -1e-12);
        }
    }
}

TEST_CASE("integrator preserves the disease-free equilibrium") {
    const HpvParameters p;
    const StepResult r = integrate_step(SystemState{}, ControlVector{}, p, 0.5);
    for (double v : r.state.compartments()) CHECK(v == 0.0);
    CHECK(r.clamp_events == 0);
}

TEST_CASE("uncontrolled G1 trajectory matches the fine-step Euler oracle") {
    const HpvParameters p;
    const double dt = 0.01;
    const int n_steps = 2000;

    const auto oracle =
        oracles::euler_rollout(kG1.augmented(), Vec5{}, p, n_steps * dt, 0.0001, dt);

    SystemState x = kG1;
    double max_err = 0.0;
    for (int k = 0; k < n_steps; ++k) {
        x = integrate_step(x, ControlVector{}, p, dt).state;
        const Vec6 ref = oracle[static_cast<std::size_t>(k) + 1];
        const Vec5 got = x.compartments();
        for (int i = 0; i < 5; ++i) max_err = std::max(max_err, std::abs(got[i] - ref[i]));
    }
    CHECK(max_err < 1e-5);
}

TEST_CASE("uncontrolled epidemic stays endemic over 20 years") {
    const HpvParameters p;
    SystemState x = make_state(0.05, 0.05, 0.0, 0.05, 0.0);
    for (int k = 0; k < 2000; ++k) x = integrate_step(x, ControlVector{}, p, 0.01).state;
    CHECK(x.u_f + x.i_f + x.i_m > 0.01);
}

TEST_CASE("j_cost is nonnegative and non-decreasing along trajectories") {
    const HpvParameters p;
    Rng rng(17);
    SystemState x = random_valid_state(rng);
    const ControlVector u = random_admissible_control(rng, p);
    double prev = x.j_cost;
    for (int k = 0; k < 500; ++k) {
        x = integrate_step(x, u, p, 0.01).state;
        CHECK(x.j_cost >= prev);
        prev = x.j_cost;
    }
}

TEST_CASE("fourth-order convergence against the fine-step oracle") {
    const HpvParameters p;
    const ControlVector u{0.2, 0.1, 0.5, 0.2, 0.2};
    const double horizon = 1.0;

    auto rk4_error = [&](double dt) {
        const auto oracle =
            oracles::euler_rollout(kG1.augmented(), u.as_array(), p, horizon, 1e-6, horizon);
        SystemState x = kG1;
        const long n = std::lround(horizon / dt);
        for (long k = 0; k < n; ++k) x = integrate_step(x, u, p, dt).state;
        double err = 0.0;
        for (int i = 0; i < 5; ++i)
            err = std::max(err, std::abs(x.compartments()[i] - oracle.back()[i]));
        return err;
    };

    const double coarse = rk4_error(0.2);
    const double fine = rk4_error(0.1);
    const double factor = coarse / fine;
    CHECK(factor > 8.0);
    CHECK(factor < 32.0);
}

TEST_CASE("non-finite states are reported") {
    HpvParameters p;
    p.beta_m = 1e300;  // blow the step up
    SystemState x = make_state(0.5, 0.1, 0.1, 0.5, 0.1);
    CHECK_THROWS_AS(integrate_step(x, ControlVector{}, p, 1e6), NonFiniteState);
}
