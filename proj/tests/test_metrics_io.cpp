#include <cint/cint.hpp>

#include <gtest/gtest.h>

#include <cmath>
#include <random>

using namespace cint;
namespace fs = std::filesystem;

namespace {

RVec bump(const RVec& g, double z, double s, double a = 1.0) {
    return (a * (-(g.array() - z).square() / (2 * s * s)).exp()).matrix();
}

struct TempDir {
    fs::path p;
    TempDir() {
        p = fs::temp_directory_path() / ("cint_test_" + std::to_string(std::random_device{}()));
        fs::create_directories(p);
    }
    ~TempDir() { fs::remove_all(p); }
};

}  // namespace

TEST(FindPeaks, GaussianWidthAndOrder) {
    RVec g = uniform_grid(0, 245, 0.03);
    RVec v = bump(g, 100.013, 3.0) + bump(g, 160, 1.5, 0.4);
    PeakReport r = find_peaks(g, v, 0.1);
    ASSERT_EQ(r.peaks.size(), 2u);
    EXPECT_NEAR(r.peaks[0].location, 100.013, 0.015);
    EXPECT_NEAR(r.peaks[0].width / 3.0, 1.0, 0.02);
    EXPECT_NEAR(r.peaks[1].width / 1.5, 1.0, 0.02);
    EXPECT_NEAR(r.peaks[1].value, 0.4, 1e-3);
    EXPECT_EQ(find_peaks(g, v, 0.5).peaks.size(), 1u);
}

TEST(FindPeaks, EmptyAndScaleInvariant) {
    RVec g = uniform_grid(0, 10, 0.1);
    EXPECT_TRUE(find_peaks(g, RVec::Zero(g.size()), 0.1).peaks.empty());
    RVec v = bump(g, 4, 1);
    PeakReport a = find_peaks(g, v), b = find_peaks(g, (7.5 * v).eval());
    ASSERT_EQ(a.peaks.size(), b.peaks.size());
    EXPECT_DOUBLE_EQ(a.peaks[0].location, b.peaks[0].location);
    EXPECT_NEAR(a.peaks[0].width, b.peaks[0].width, 1e-12);
}

TEST(FindPeaks, SignedImagesUseModulus) {
    RVec g = uniform_grid(0, 100, 0.05);
    RVec v = bump(g, 30, 2) - bump(g, 60, 2, 0.7);
    PeakReport r = find_peaks(g, v, 0.1);
    ASSERT_EQ(r.peaks.size(), 2u);
    EXPECT_NEAR(r.peaks[1].location, 60, 0.05);
    EXPECT_LT(r.peaks[1].value, 0);
}

TEST(FindPeaks, ComplexImagesUseModulus) {
    RVec g = uniform_grid(0, 100, 0.05);
    CVec v = bump(g, 40, 2).cast<cplx>() * std::polar(1.0, 2.0) + bump(g, 70, 2, 0.6).cast<cplx>() * I;
    PeakReport r = find_peaks(make_image(g, v, "SAR"), 0.1);
    ASSERT_EQ(r.peaks.size(), 2u);
    EXPECT_NEAR(r.peaks[0].location, 40, 0.01);
    EXPECT_NEAR(r.peaks[1].value, 0.6, 1e-3);
}

TEST(SignAt, Values) {
    RVec g = uniform_grid(0, 4, 1);
    RVec v(5);
    v << 1, -2, 0, 3, -1e-300;
    EXPECT_EQ(sign_at(g, v, {0, 1, 2, 3, 4, 1.4}), (std::vector<int>{1, -1, 0, 1, -1, -1}));
    EXPECT_EQ(value_at(g, v, 2.9), 3);
}

TEST(CovStatistic, EdgeCases) {
    std::vector<cplx> same(10, cplx(2, 1));
    EXPECT_EQ(cov_statistic(same), 0.0);
    EXPECT_TRUE(std::isinf(cov_statistic({cplx(1, 0), cplx(-1, 0)})));
    EXPECT_THROW(cov_statistic({cplx(1, 0)}), Error);
}

TEST(CovStatistic, MonteCarlo) {
    std::mt19937_64 rng(12);
    std::normal_distribution<double> nd(0, 1);
    std::vector<cplx> s;
    for (int i = 0; i < 20000; ++i) s.emplace_back(3 + 0.6 * nd(rng), 0.6 * nd(rng));
    // sqrt(0.36 + 0.36) / 3
    EXPECT_NEAR(cov_statistic(s) / (std::sqrt(0.72) / 3), 1.0, 0.05);
}

TEST(CountPeaks2d, SyntheticBlobs) {
    CMat M = CMat::Zero(40, 40);
    for (int i = 0; i < 40; ++i)
        for (int j = 0; j < 40; ++j)
            M(i, j) = std::exp(-((i - 10) * (i - 10) + (j - 10) * (j - 10)) / 8.0) +
                      0.5 * std::exp(-((i - 30) * (i - 30) + (j - 20) * (j - 20)) / 8.0);
    EXPECT_EQ(count_peaks_2d(M, 0.1), 2);
    EXPECT_EQ(count_peaks_2d(M, 0.6), 1);
    EXPECT_EQ(count_peaks_2d(CMat::Zero(5, 5)), 0);
    EXPECT_EQ(count_peaks_2d(CMat::Ones(5, 5)), 1);
}

TEST(Io, TwoPointRoundTrip) {
    TempDir d;
    CMat M = CMat::Random(7, 7);
    io::write_twopoint(d.p / "m.bin", M, 123.25);
    double X = 0;
    EXPECT_EQ(io::read_twopoint(d.p / "m.bin", &X), M);
    EXPECT_EQ(X, 123.25);
    EXPECT_EQ(fs::file_size(d.p / "m.bin"), 24u + 16u * 49u);
    io::atomic_write(d.p / "bad.bin", "XXXX0000000000000000000000");
    EXPECT_THROW(io::read_twopoint(d.p / "bad.bin"), Error);
    std::string t = io::read_file(d.p / "m.bin");
    io::atomic_write(d.p / "short.bin", t.substr(0, t.size() - 3));
    EXPECT_THROW(io::read_twopoint(d.p / "short.bin"), Error);
}

TEST(Io, RecordRoundTrip) {
    TempDir d;
    CVec r = CVec::Random(400);
    io::write_record(d.p / "r.bin", r);
    EXPECT_EQ(io::read_record(d.p / "r.bin"), r);
    EXPECT_THROW(io::read_record(d.p / "missing.bin"), Error);
}

TEST(Io, ImageCsvRoundTrip) {
    TempDir d;
    RVec g = uniform_grid(0, 2, 0.25);
    CVec v = CVec::Random(g.size());
    ImageProfile img{g, v, "SP"};
    io::write_image_csv(d.p / "i.csv", img);
    ImageProfile back = io::read_image_csv(d.p / "i.csv");
    EXPECT_EQ(back.grid, g);
    EXPECT_EQ(back.values, v);
    io::atomic_write(d.p / "h.csv", "x,y\n1,2\n");
    EXPECT_THROW(io::read_image_csv(d.p / "h.csv"), Error);
}

TEST(Io, ProductsCsvHeaderAndRows) {
    RVec g = uniform_grid(0, 245, 1.0 / 3);
    FourierProducts fp = fourier_products(analytic_two_point({11.36, 1.0, reflectors_three()}, g), g, 11.36, 1.0, 2.0);
    std::string s = io::products_csv(fp);
    EXPECT_EQ(s.rfind("kappa,kappa_tilde,re,im\n", 0), 0u);
    EXPECT_EQ(static_cast<long>(std::count(s.begin(), s.end(), '\n')), 1 + fp.mask.count());
}

TEST(Lbfgs, Rosenbrock) {
    auto fg = [](const RVec& x, RVec& g) {
        double a = 1 - x[0], b = x[1] - x[0] * x[0];
        g[0] = -2 * a - 400 * x[0] * b;
        g[1] = 200 * b;
        return a * a + 100 * b * b;
    };
    RVec x0(2);
    x0 << -1.2, 1.0;
    LbfgsSettings st;
    st.gtol = 1e-10;
    LbfgsResult r = lbfgs_minimize(fg, x0, st);
    EXPECT_NEAR(r.x[0], 1.0, 1e-6);
    EXPECT_NEAR(r.x[1], 1.0, 1e-6);
    for (std::size_t i = 1; i < r.history.size(); ++i) EXPECT_LE(r.history[i], r.history[i - 1]);
}

TEST(Lbfgs, TargetStops) {
    auto fg = [](const RVec& x, RVec& g) {
        g = 2 * x;
        return x.squaredNorm();
    };
    LbfgsSettings st;
    st.f_target = 0.5;
    LbfgsResult r = lbfgs_minimize(fg, RVec::Constant(3, 2.0), st);
    EXPECT_EQ(r.status, LbfgsStatus::reached_target);
    EXPECT_LE(r.f, 0.5);
}

TEST(Quadrature, KnownIntegrals) {
    EXPECT_NEAR(integrate([](double x) { return std::exp(-x * x / 2); }, -30, 30, 1e-13).value, std::sqrt(2 * pi), 1e-12);
    EXPECT_NEAR(integrate([](double x) { return std::sin(x); }, 0, pi).value, 2.0, 1e-12);
    EXPECT_NEAR(integrate_pieces([](double x) { return std::abs(x); }, {-1, 0, 2}).value, 2.5, 1e-14);
}

TEST(Seeds, MixSeedIsStable) {
    EXPECT_EQ(mix_seed(1, 2), mix_seed(1, 2));
    EXPECT_NE(mix_seed(1, 2), mix_seed(2, 1));
    RealizationSeeds rs = realization_seeds(42);
    EXPECT_EQ(rs.screen, mix_seed(42, 1));
    EXPECT_EQ(rs.noise, mix_seed(42, 2));
}

TEST(Sweep, ArgumentErrors) {
    Scene s = preset_scene("fig2");
    EXPECT_THROW(sweep(s, "X", {}, 5), Error);
    EXPECT_THROW(sweep(s, "sigma", {1.0}, 5), Error);
    EXPECT_THROW(sweep(s, "X", {1.0}, 1), Error);
    EXPECT_THROW(sweep(s, "X", {-3.0}, 2), Error);
}

TEST(Sweep, HomogeneousRowHasZeroCov) {
    Scene s = preset_scene("fig2");
    SweepSettings st;
    st.methods = {"ci"};
    auto rows = sweep(s, "sigma_tau", {0.0}, 3, st);
    ASSERT_EQ(rows.size(), 1u);
    EXPECT_LT(rows[0].cov, 1e-12);
    std::string csv = sweep_csv(rows, st.methods);
    EXPECT_EQ(csv.rfind("axis,value,realizations,X,cov,ci_err_mean,ci_err_std\n", 0), 0u);
}

TEST(Pipeline, OutputsWrittenAndReloadable) {
    TempDir d;
    Scene s = preset_scene("fig1");
    PipelineResult res = run_scenario("fig1", s, 3, d.p, {"sar", "ci"}, {});
    fs::path dir = d.p / "fig1";
    for (const char* f : {"record.bin", "manifest.json", "image_sar.csv", "image_ci.csv"})
        EXPECT_TRUE(fs::exists(dir / f)) << f;
    nlohmann::json man;
    Record r = load_simulation(dir, &man);
    EXPECT_EQ(r.r, simulate(s, 3).r);
    EXPECT_EQ(man.at("seeds").at("master").get<std::uint64_t>(), 3u);
    EXPECT_THROW(compute_images(r, {"bogus"}), Error);
}
