#include <cmath>

#include "doctest.h"
#include "fixture_values.hpp"
#include "oracles.hpp"
#include "sodacer/critic.hpp"
#include "sodacer/errors.hpp"
#include "sodacer/rng.hpp"

using namespace sodacer;

namespace {

const SystemState kG1{0.1, 0.05, 0.2, 0.1, 0.1, 0.0};

Sample random_sample(Rng& rng, const CostConfig& cfg) {
    Sample s;
    for (;;) {
        for (int i = 0; i < 5; ++i) s.x[i] = rng.uniform01();
        if (s.x[0] + s.x[1] + s.x[2] <= 1.0 && s.x[3] + s.x[4] <= 1.0) break;
    }
    for (int i = 0; i < 5; ++i) s.u[i] = rng.uniform(-0.9 * cfg.kappa[i], 0.9 * cfg.kappa[i]);
    return s;
}

CriticWeights random_weights(Rng& rng) {
    CriticWeights w;
    for (double& v : w.w) v = rng.uniform(-1.0, 1.0);
    return w;
}

}  // namespace

TEST_CASE("tracking error") {
    CostConfig cfg;
    CHECK(tracking_error(kG1, cfg) == kG1.compartments());

    cfg.x_ref = kG1.compartments();
    for (double v : tracking_error(kG1, cfg)) CHECK(v == 0.0);

    cfg.x_ref = Vec5{};
    const SystemState ones{1, 1, 1, 1, 1, 0};
    for (double v : tracking_error(ones, cfg)) CHECK(v == 1.0);
}

TEST_CASE("features") {
    SUBCASE("no constant term") {
        for (double v : features(Vec5{})) CHECK(v == 0.0);
    }
    SUBCASE("isolated first compartment hits exactly its linear and square terms") {
        const FeatureVec phi = features({1, 0, 0, 0, 0});
        int nonzero = 0;
        for (double v : phi) nonzero += v != 0.0;
        CHECK(nonzero == 2);
        CHECK(phi[0] == 1.0);  // linear
        CHECK(phi[5] == 1.0);  // square
    }
    SUBCASE("cubic cross term") {
        const FeatureVec phi = features({0.5, 0, 0, 0.2, 0});
        CHECK(phi[16] == doctest::Approx(0.05).epsilon(1e-15));
    }
}

TEST_CASE("feature jacobian") {
    SUBCASE("at the origin only the linear rows survive, one unit entry each") {
        const FeatureJacobian jac = feature_jacobian(Vec5{});
        // linear block ordering: U_f, I_m, V_m, I_f, V_f
        const int expected_col[5] = {0, 3, 4, 1, 2};
        for (int r = 0; r < 5; ++r)
            for (int c = 0; c < 5; ++c)
                CHECK(jac[r][c] == (c == expected_col[r] ? 1.0 : 0.0));
        for (int r = 5; r < kFeatureCount; ++r)
            for (double v : jac[r]) CHECK(v == 0.0);
    }
    SUBCASE("square-term row") {
        const FeatureJacobian jac = feature_jacobian({0.3, 0, 0, 0, 0});
        CHECK(jac[5][0] == doctest::Approx(0.6).epsilon(1e-15));
        for (int c = 1; c < 5; ++c) CHECK(jac[5][c] == 0.0);
    }
    SUBCASE("matches central finite differences") {
        Rng rng(23);
        for (int trial = 0; trial < 20; ++trial) {
            Vec5 e;
            for (double& v : e) v = rng.uniform(-1.0, 1.0);
            const FeatureJacobian jac = feature_jacobian(e);
            const double h = 1e-6;
            for (int c = 0; c < 5; ++c) {
                Vec5 ep = e, em = e;
                ep[c] += h;
                em[c] -= h;
                const FeatureVec fp = features(ep), fm = features(em);
                for (int r = 0; r < kFeatureCount; ++r)
                    CHECK(std::abs(jac[r][c] - (fp[r] - fm[r]) / (2 * h)) < 1e-8);
            }
        }
    }
}

TEST_CASE("value estimate") {
    CostConfig cfg;
    CriticWeights zero;
    CHECK(value(kG1.compartments(), zero) == 0.0);
    Rng rng5(5);
    CHECK(value(Vec5{}, random_weights(rng5)) == 0.0);

    SUBCASE("one-hot weights pick out a single feature") {
        const Vec5 e = kG1.compartments();
        const FeatureVec phi = features(e);
        for (int k = 0; k < kFeatureCount; ++k) {
            CriticWeights w;
            w.w[k] = 1.0;
            CHECK(value(e, w) == phi[k]);
        }
    }
    SUBCASE("linearity in the weights") {
        Rng rng(29);
        for (int trial = 0; trial < 50; ++trial) {
            const CriticWeights w1 = random_weights(rng), w2 = random_weights(rng);
            const double a = rng.uniform(-2, 2), b = rng.uniform(-2, 2);
            Vec5 e;
            for (double& v : e) v = rng.uniform(-1, 1);
            CriticWeights mix;
            for (int k = 0; k < kFeatureCount; ++k) mix.w[k] = a * w1.w[k] + b * w2.w[k];
            CHECK(std::abs(value(e, mix) - (a * value(e, w1) + b * value(e, w2))) < 1e-12);
        }
    }
}

TEST_CASE("control law") {
    const HpvParameters params;
    CostConfig cfg;

    SUBCASE("zero weights give zero controls") {
        for (double u : control_law(kG1, CriticWeights{}, cfg, params)) CHECK(u == 0.0);
    }
    SUBCASE("saturation: a huge argument pins the output at the limit") {
        // one-hot weight on the linear V_f feature makes s_u1 = c * susceptible pool
        const double susceptible = 1.0 - kG1.u_f - kG1.i_f - kG1.v_f;
        CriticWeights w;
        w.w[4] = 50.0 * 2.0 * cfg.kappa[2] * cfg.phi_gain[2] / susceptible;
        const Vec5 u = control_law(kG1, w, cfg, params);
        CHECK(std::abs(u[2] + cfg.kappa[2]) < 1e-10);
    }
    SUBCASE("outputs always respect the saturation limits") {
        Rng rng(31);
        for (int trial = 0; trial < 1000; ++trial) {
            const Sample s = random_sample(rng, cfg);
            SystemState x{s.x[0], s.x[1], s.x[2], s.x[3], s.x[4], 0.0};
            CriticWeights w;
            for (double& v : w.w) v = rng.uniform(-100.0, 100.0);
            const Vec5 u = control_law(x, w, cfg, params);
            for (int i = 0; i < 5; ++i) CHECK(std::abs(u[i]) <= cfg.kappa[i]);
        }
    }
}

TEST_CASE("control-effort cost") {
    CostConfig unit;
    unit.kappa = {1, 1, 1, 1, 1};

    CHECK(control_effort_cost(Vec5{}, unit) == 0.0);

    SUBCASE("closed form matches adaptive quadrature") {
        CHECK(control_effort_cost({0.5, 0, 0, 0, 0}, unit) ==
              doctest::Approx(fixtures::kEffortAtHalf).epsilon(1e-12));
        for (double r = 0.0; r < 0.995; r += 0.1) {
            const double ratio = std::min(r, 0.99);
            const double closed = control_effort_cost({ratio, 0, 0, 0, 0}, unit);
            const double quad = 2.0 * oracles::adaptive_simpson(
                                          [](double th) { return std::atanh(th); }, 0.0, ratio);
            CHECK(std::abs(closed - quad) < 1e-9);
        }
    }
    SUBCASE("default limits") {
        CostConfig cfg;
        const double closed = control_effort_cost({0, 0, 2.0, 0, 0}, cfg);
        const double quad =
            2.0 * oracles::adaptive_simpson(
                      [](double th) { return 3.0 * std::atanh(th / 3.0); }, 0.0, 2.0);
        CHECK(std::abs(closed - quad) < 1e-9);
    }
    SUBCASE("boundary limit and divergence") {
        CHECK(control_effort_cost({1.0, 0, 0, 0, 0}, unit) ==
              doctest::Approx(std::log(4.0)).epsilon(1e-15));
        CHECK_THROWS_AS(control_effort_cost({1.0 + 1e-12, 0, 0, 0, 0}, unit),
                        SaturationBoundary);
    }
    SUBCASE("symmetry, positivity, monotonicity") {
        Rng rng(37);
        CostConfig cfg;
        double prev = 0.0;
        for (double r = 0.05; r < 1.0; r += 0.05) {
            Vec5 u{};
            for (int i = 0; i < 5; ++i) u[i] = r * cfg.kappa[i];
            Vec5 neg = u;
            for (double& v : neg) v = -v;
            const double c = control_effort_cost(u, cfg);
            CHECK(c > 0.0);
            CHECK(c == doctest::Approx(control_effort_cost(neg, cfg)).epsilon(1e-14));
            CHECK(c > prev);
            prev = c;
        }
        (void)rng;
    }
}

TEST_CASE("approximate Hamiltonian") {
    const HpvParameters params;
    CostConfig cfg;

    SUBCASE("vanishes when everything is zero") {
        Sample s;
        CHECK(approx_hamiltonian(s, CriticWeights{}, cfg, params) == 0.0);
    }
    SUBCASE("only the state penalty survives with zero weights and controls") {
        Sample s;
        s.x = kG1.compartments();
        const double expected = 0.1 * 0.1 + 0.05 * 0.05 + 0.1 * 0.1;  // q = (1,1,0,1,0)
        CHECK(approx_hamiltonian(s, CriticWeights{}, cfg, params) ==
              doctest::Approx(expected).epsilon(1e-14));
    }
    SUBCASE("matches the G2 golden fixture") {
        Sample s;
        s.x = kG1.compartments();
        s.u = {0.2, 0.1, 0.5, 0.2, 0.3};
        CriticWeights w;
        for (int k = 0; k < kFeatureCount; ++k)
            w.w[k] = (static_cast<double>(k + 1) / 100.0) * (k % 2 == 0 ? 1.0 : -1.0);
        CHECK(control_effort_cost(s.u, cfg) ==
              doctest::Approx(fixtures::kG2ControlCost).epsilon(1e-10));
        CHECK(approx_hamiltonian(s, w, cfg, params) ==
              doctest::Approx(fixtures::kG2Hamiltonian).epsilon(1e-8));
    }
}

TEST_CASE("critic loss and gradient") {
    const HpvParameters params;
    CostConfig cfg;

    SUBCASE("zero residual gives zero gradient") {
        Sample s;  // H = 0 at the all-zero sample with zero weights
        const LossGrad lg = critic_loss_and_gradient(s, CriticWeights{}, cfg, params);
        CHECK(lg.loss == 0.0);
        for (double g : lg.grad) CHECK(g == 0.0);
    }
    SUBCASE("gradient matches central finite differences") {
        Rng rng(41);
        for (int trial = 0; trial < 100; ++trial) {
            const Sample s = random_sample(rng, cfg);
            CriticWeights w = random_weights(rng);
            const LossGrad lg = critic_loss_and_gradient(s, w, cfg, params);
            CHECK(lg.loss >= 0.0);
            const double h = 1e-6;
            double err = 0.0, scale = 0.0;
            for (int k = 0; k < kFeatureCount; ++k) {
                CriticWeights wp = w, wm = w;
                wp.w[k] += h;
                wm.w[k] -= h;
                const double fd = (critic_loss_and_gradient(s, wp, cfg, params).loss -
                                   critic_loss_and_gradient(s, wm, cfg, params).loss) /
                                  (2 * h);
                err = std::max(err, std::abs(lg.grad[k] - fd));
                scale = std::max(scale, std::abs(lg.grad[k]));
            }
            CHECK(err / std::max(scale, 1e-12) < 1e-5);
        }
    }
}
