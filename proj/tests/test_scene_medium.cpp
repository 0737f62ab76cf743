#include <cint/random_medium.hpp>
#include <cint/scenario.hpp>

#include <gtest/gtest.h>

#include <cmath>
#include <random>

using namespace cint;

namespace {

Scene reference_scene(double sigma_tau) {
    Scene s = preset_scene("fig2");
    s.sigma_tau = sigma_tau;
    return s;
}

}  // namespace

TEST(DeriveScales, ResolutionAtReferenceSetup) {
    EXPECT_NEAR(derive_scales(reference_scene(3.1)).H / 11.36, 1.0, 0.01);
    EXPECT_NEAR(derive_scales(reference_scene(4.0)).H / 14.615, 1.0, 0.01);
    EXPECT_NEAR(derive_scales(reference_scene(3.1)).h, 1.0, 1e-9);
}

TEST(DeriveScales, DecoherenceAndThreshold) {
    Scene s = reference_scene(3.1);
    Scales sc = derive_scales(s);
    EXPECT_NEAR(sc.Xd, std::sqrt(3.0) * s.ell / (2 * 3.1), 1e-9);
    EXPECT_DOUBLE_EQ(sc.X, std::min(s.a, sc.Xd / 3));
    EXPECT_TRUE(std::isinf(derive_scales(reference_scene(0)).Xd));
}

TEST(DeriveScales, InfiniteThresholdGivesHalfH) {
    Scales sc = derive_scales(reference_scene(0), std::numeric_limits<double>::infinity());
    EXPECT_DOUBLE_EQ(sc.H, sc.h / 2);
}

TEST(DeriveScales, HNonincreasingInXAndXd) {
    Scene s = reference_scene(3.1);
    double prev = std::numeric_limits<double>::infinity();
    for (double X : {10.0, 50.0, 100.0, 500.0, 3000.0, 1e5}) {
        double H = derive_scales(s, X).H;
        EXPECT_LE(H, prev);
        prev = H;
    }
    prev = std::numeric_limits<double>::infinity();
    for (double st : {8.0, 4.0, 2.0, 1.0, 0.5}) {  // Xd grows as sigma_tau falls
        double H = derive_scales(reference_scene(st), 1000.0).H;
        EXPECT_LE(H, prev);
        prev = H;
    }
}

TEST(DeriveScales, HAtLeastHalfh) {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(0.0, 6.0);
    for (int i = 0; i < 50; ++i) {
        Scales sc = derive_scales(reference_scene(u(rng)), std::pow(10.0, u(rng)));
        EXPECT_GE(sc.H, sc.h / 2 * (1 - 1e-15));
    }
}

TEST(DeriveScales, RejectsNonFinite) {
    Scene s = reference_scene(3.1);
    s.L = std::numeric_limits<double>::quiet_NaN();
    EXPECT_THROW(derive_scales(s), Error);
}

TEST(Separation, ThreeReflectors) {
    Scales sc;
    sc.H = 11.36;
    EXPECT_NEAR(separation_zeta(preset_scene("fig2"), sc), 10 / (3 * 11.36), 1e-12);
    EXPECT_NEAR(separation_zeta(preset_scene("fig2"), sc), 0.2934, 5e-5);
}

TEST(Separation, SignedScene) {
    Scales sc;
    sc.H = 14.615;
    Scene s = preset_scene("fig4");
    EXPECT_NEAR(separation_min_gap(s) / sc.H, 1.98, 0.005);
    EXPECT_NEAR(separation_zeta(s, sc), 0.661, 5e-4);
}

TEST(Separation, SingleReflectorAndScaling) {
    Scene s = preset_scene("fig2");
    Scales sc;
    sc.H = 5;
    double z1 = separation_zeta(s, sc);
    sc.H = 10;
    EXPECT_NEAR(separation_zeta(s, sc), z1 / 2, 1e-14);
    s.reflectors = {{100, 1}};
    EXPECT_TRUE(std::isinf(separation_zeta(s, sc)));
}

TEST(SceneJson, RoundTrip) {
    Scene s = preset_scene("fig4");
    s.seed = 99;
    Scene t = scene_from_json(scene_to_json(s));
    EXPECT_EQ(scene_to_json(t), scene_to_json(s));
}

TEST(SceneJson, UnknownFieldNamed) {
    nlohmann::json j = {{"L", 2e4}, {"sigma_tua", 3.1}};
    try {
        scene_from_json(j);
        FAIL() << "expected an error";
    } catch (const Error& e) {
        EXPECT_NE(std::string(e.what()).find("sigma_tua"), std::string::npos);
    }
}

TEST(SceneJson, ReflectorForms) {
    nlohmann::json j = {{"reflectors", {{123, 2.0}, {{"z", 130}, {"rho", -1}}}}};
    Scene s = scene_from_json(j);
    ASSERT_EQ(s.reflectors.size(), 2u);
    EXPECT_EQ(s.reflectors[1].rho, -1);
    EXPECT_THROW(scene_from_json(nlohmann::json{{"N", 1}}), Error);
    EXPECT_THROW(scene_from_json(nlohmann::json{{"domain", {5, 1}}}), Error);
}

TEST(Scenario, UnknownNameNamesField) {
    try {
        preset_scene("fig7");
        FAIL();
    } catch (const Error& e) {
        EXPECT_NE(std::string(e.what()).find("name"), std::string::npos);
    }
}

TEST(TauCovariance, Examples) {
    Scene s = reference_scene(3.1);
    double st2 = 3.1 * 3.1;
    EXPECT_NEAR(tau_covariance(0, s), st2, 1e-12 * st2);
    // independent oracle: midpoint rule with many panels
    double acc = 0;
    const int n = 200000;
    for (int i = 0; i < n; ++i) {
        double t = (i + 0.5) / n;
        acc += std::exp(-t * t / 2);
    }
    acc /= n;
    EXPECT_NEAR(tau_covariance(s.ell, s) / st2, acc, 1e-9);
    EXPECT_NEAR(tau_covariance(s.ell, s) / st2, 0.85562, 5e-6);
    EXPECT_LT(tau_covariance(1e4 * s.ell, s), 1e-3 * st2);
}

TEST(TauCovariance, EvenAndMonotone) {
    Scene s = reference_scene(2.0);
    double prev = tau_covariance(0, s);
    for (int i = 1; i <= 40; ++i) {
        double dx = 0.2 * i * s.ell;
        double c = tau_covariance(dx, s);
        EXPECT_EQ(c, tau_covariance(-dx, s));
        EXPECT_LE(c, prev);
        EXPECT_NEAR(c, tau_covariance_erf(dx, s), 1e-10 * s.sigma_tau * s.sigma_tau);
        prev = c;
    }
}

TEST(TauCovariance, GramPositiveSemidefinite) {
    Scene s = reference_scene(3.1);
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> u(-2 * s.a, 2 * s.a);
    for (int trial = 0; trial < 5; ++trial) {
        RVec x(60);
        for (auto& v : x) v = u(rng);
        RMat C(60, 60);
        for (int i = 0; i < 60; ++i)
            for (int j = 0; j < 60; ++j) C(i, j) = tau_covariance_erf(x[i] - x[j], s);
        double mn = Eigen::SelfAdjointEigenSolver<RMat>(C, Eigen::EigenvaluesOnly).eigenvalues().minCoeff();
        EXPECT_GE(mn, -1e-10 * 3.1 * 3.1);
    }
}

TEST(Screen, DeterministicPerSeed) {
    Scene s = reference_scene(3.1);
    EXPECT_EQ(sample_screen(s, 17).tau, sample_screen(s, 17).tau);
    EXPECT_NE(sample_screen(s, 17).tau, sample_screen(s, 18).tau);
    EXPECT_EQ(sample_screen(s, 17).tau.size(), s.N);
}

TEST(Screen, ZeroSigmaIsZero) {
    Scene s = reference_scene(0);
    EXPECT_EQ(sample_screen(s, 4).tau.cwiseAbs().maxCoeff(), 0.0);
}

TEST(Screen, EnsembleVariance) {
    Scene s = reference_scene(3.1);
    double acc = 0;
    int n = 0;
    ScreenSampler sampler(s, s.sensors());
    for (int r = 0; r < 400; ++r) {
        Rng rng = make_rng(mix_seed(8, r));
        RVec t = sampler.sample(rng);
        acc += t.squaredNorm();
        n += t.size();
    }
    // correlated samples: 400 realizations gives a few percent precision
    EXPECT_NEAR(acc / n / 9.61, 1.0, 0.1);
}

TEST(Coherence, ZeroOffsetIsExactlyOne) {
    CoherenceReport c = coherence_check(reference_scene(3.1), 1000, 3);
    ASSERT_FALSE(c.rows.empty());
    EXPECT_EQ(c.rows[0].dx, 0.0);
    EXPECT_EQ(c.rows[0].empirical, 1.0);
    EXPECT_THROW(coherence_check(reference_scene(3.1), 999, 3), Error);
}

TEST(Coherence, MatchesGaussianDecay) {
    Scene s = reference_scene(3.1);
    CoherenceReport c = coherence_check(s, 10000, 21);
    double Xd = derive_scales(s).Xd;
    for (const auto& r : c.rows) {
        EXPECT_NEAR(r.predicted, std::exp(-r.dx * r.dx / (2 * Xd * Xd)), 1e-15);
        if (r.std_error > 0) EXPECT_LE(std::abs(r.empirical - r.predicted), 3 * r.std_error) << "dx " << r.dx;
        if (r.dx == Xd) EXPECT_NEAR(r.empirical, std::exp(-0.5), 0.03);
    }
    EXPECT_LT(c.mean_phasor, 0.05);
    EXPECT_NEAR(c.mean_phasor_predicted, std::exp(-4.805), 1e-12);
    EXPECT_NEAR(c.variance / 9.61, 1.0, 0.05);
}
