#include <cmath>
#include <numeric>

#include <gtest/gtest.h>

#include "fdl/oracles.hpp"
#include "fdl/synth.hpp"

using namespace fdl;

namespace {

std::vector<double> logistic_map(std::size_t n, double x0) {
    std::vector<double> x(n);
    x[0] = x0;
    for (std::size_t i = 1; i < n; ++i) x[i] = 4.0 * x[i - 1] * (1.0 - x[i - 1]);
    return x;
}

RosensteinConfig map_config() {
    RosensteinConfig c;
    c.embed_dim = 1;
    c.exclusion = 1;
    c.fit_end = 4;
    return c;
}

}  // namespace

TEST(Rosenstein, LogisticMapRecoversLn2) {
    // r = 4 logistic map: lambda = ln 2 per iteration.
    const auto r = rosenstein_lle(logistic_map(3000, 0.3), map_config());
    EXPECT_FALSE(r.degenerate);
    EXPECT_NEAR(r.lambda, std::log(2.0), 0.01 * std::log(2.0));
}

TEST(Rosenstein, ConstantSeriesIsDegenerate) {
    const auto r = rosenstein_lle(std::vector<double>(500, 3.0));
    EXPECT_TRUE(r.degenerate);
    EXPECT_EQ(r.lambda, 0.0);
}

TEST(Rosenstein, AffineInvariant) {
    const auto x = logistic_map(2000, 0.17);
    auto y = x;
    for (auto& v : y) v = 25.0 * v - 3.0;
    EXPECT_NEAR(rosenstein_lle(x, map_config()).lambda, rosenstein_lle(y, map_config()).lambda, 1e-9);
}

TEST(Rosenstein, SampleStepScalesRate) {
    auto c = map_config();
    const auto x = logistic_map(2000, 0.41);
    const double per_step = rosenstein_lle(x, c).lambda;
    c.sample_dt = 0.5;
    EXPECT_NEAR(rosenstein_lle(x, c).lambda, 2.0 * per_step, 1e-12);
}

TEST(Rosenstein, LorenzCloseToBenettin) {
    LorenzSpec s;
    s.t1 = 60.0;
    s.n = 6001;
    const auto traj = lorenz_trajectory(s);
    std::vector<double> x;
    for (std::size_t i = 1000; i < traj.size(); ++i) x.push_back(traj[i][0]);
    RosensteinConfig c;
    c.sample_dt = 0.01;
    c.delay = 10;
    c.exclusion = 100;
    c.horizon = 300;
    // Skip the initial fast alignment; fit the linear stretch.
    c.fit_begin = 50;
    c.fit_end = 200;
    const double ros = rosenstein_lle(x, c).lambda;
    const double ben = benettin_lle(LorenzSpec{}, 200.0, 1.0, 10.0);
    EXPECT_NEAR(ros, ben, 0.15);
}

TEST(Benettin, LinearSystemEigenvalue) {
    // Diagonal A: largest exponent is the largest eigenvalue.
    const std::array<double, 3> d{0.5, -1.0, -2.0};
    auto f = [&](double, const State<3>& x) { return State<3>{d[0] * x[0], d[1] * x[1], d[2] * x[2]}; };
    auto jac = [&](const State<3>&) { return std::array<double, 9>{d[0], 0, 0, 0, d[1], 0, 0, 0, d[2]}; };
    BenettinOptions opt;
    // The tangent vector starts at (1,1,1)/sqrt 3, so only 1/sqrt 3 of it
    // lies on the growing axis.
    for (double t : {20.0, 200.0}) {
        opt.t_total = t;
        const double want = 0.5 + std::log(1.0 / std::sqrt(3.0)) / t;
        EXPECT_NEAR(benettin_lle<3>(f, jac, State<3>{1, 1, 1}, opt), want, 1e-6);
    }
}

TEST(Benettin, ClassicLorenz) {
    EXPECT_NEAR(benettin_lle(LorenzSpec{}, 200.0, 1.0, 10.0), 0.906, 0.05);
}

TEST(Benettin, NoCouplingIsNotChaotic) {
    LorenzSpec s;
    s.alpha = 0.0;
    // x is frozen: the x direction is neutral, so no exponential growth.
    const double short_run = benettin_lle(s, 50.0, 1.0), long_run = benettin_lle(s, 500.0, 1.0);
    EXPECT_LT(long_run, short_run);
    EXPECT_LE(std::abs(long_run), 0.01);
}

TEST(Benettin, RejectsBadOptions) {
    EXPECT_THROW(benettin_lle(LorenzSpec{}, 0.0, 1.0), ArgumentError);
    EXPECT_THROW(benettin_lle(LorenzSpec{}, 10.0, 0.0), ArgumentError);
}

TEST(Peaks, GaussianCentredBetweenSamples) {
    // On [0, 50] with 1000 samples, x = 25 falls midway between two samples.
    const auto c = gen_gaussian_mixture({{100, 0}, {10, 1}, {25, 1}});
    const auto m = peak_metrics(c);
    ASSERT_EQ(m.count, 1u);
    EXPECT_NEAR(*m.max_height, 100.0, 1e-2);
    // The domain edge at x = 0 keeps 100 exp(-6.25) of the kernel, so the
    // prominence is slightly short of the height.
    const double half = *m.max_height - 0.5 * (*m.max_height - c.ys().front());
    EXPECT_NEAR(*m.half_prom_width, 2.0 * 10.0 * std::sqrt(std::log(100.0 / half)), 1e-3);
    EXPECT_NEAR(*m.half_prom_width, 16.651, 0.05);
}

TEST(Peaks, GaussianHalfWidth) {
    const auto xs = Curve::grid(0.0, 100.0, 2001);
    std::vector<double> ys(xs.size());
    for (std::size_t i = 0; i < xs.size(); ++i) ys[i] = std::exp(-std::pow((xs[i] - 50.0) / 10.0, 2));
    const auto m = peak_metrics(Curve(xs, ys));
    ASSERT_EQ(m.count, 1u);
    EXPECT_EQ(*m.max_height, 1.0);
    EXPECT_NEAR(*m.half_prom_width, 2.0 * 10.0 * std::sqrt(std::log(2.0)), 1e-3);
}

TEST(Peaks, FlatCurveHasNone) {
    const auto m = peak_metrics(Curve::on_grid(0, 1, std::vector<double>(50, 0.0)));
    EXPECT_EQ(m.count, 0u);
    EXPECT_FALSE(m.max_height);
    EXPECT_FALSE(m.half_prom_width);
}

TEST(Peaks, FlatTopCountsOnce) {
    const std::vector<double> y{0, 1, 3, 3, 3, 1, 0, 2, 2, 5};
    const auto m = peak_metrics(Curve::on_grid(0, 9, y));
    ASSERT_EQ(m.count, 1u);
    EXPECT_EQ(m.peaks[0].index, 3u);
    EXPECT_EQ(m.peaks[0].prominence, 3.0);
    // Rising into the right edge is not a peak.
    EXPECT_EQ(peak_metrics(Curve::on_grid(0, 3, std::vector<double>{0, 1, 1, 1})).count, 0u);
}

TEST(Peaks, TwoPeaksReportTheHigher) {
    const auto xs = Curve::grid(0.0, 100.0, 1001);
    std::vector<double> ys(xs.size());
    for (std::size_t i = 0; i < xs.size(); ++i)
        ys[i] = 2.0 * std::exp(-std::pow((xs[i] - 30.0) / 4.0, 2)) + 3.0 * std::exp(-std::pow((xs[i] - 70.0) / 6.0, 2));
    const auto m = peak_metrics(Curve(xs, ys));
    ASSERT_EQ(m.count, 2u);
    EXPECT_NEAR(*m.max_height, 3.0, 1e-9);
    EXPECT_NEAR(*m.half_prom_width, 12.0 * std::sqrt(std::log(2.0)), 1e-2);
}

TEST(Peaks, WidthScalesWithDilation) {
    Rng rng(4);
    for (int k = 0; k < 20; ++k) {
        const auto c = gen_gaussian_mixture(draw_gaussian_mixture(rng));
        std::vector<double> xs = c.xs();
        for (auto& x : xs) x *= 3.0;
        const auto a = peak_metrics(c), b = peak_metrics(Curve(xs, c.ys()));
        ASSERT_EQ(a.count, b.count);
        if (a.count) {
            EXPECT_NEAR(*b.half_prom_width, 3.0 * *a.half_prom_width, 1e-9 * *b.half_prom_width);
        }
    }
}

TEST(F1F2, UnitOffset) {
    const std::vector<double> r{10, 20, 30, 40, 50}, s{9, 19, 29, 39, 49};
    const auto sc = f1_f2(r, s);
    EXPECT_NEAR(sc.f2, 50.0 * std::log10(100.0 / std::sqrt(2.0)), 1e-12);
    EXPECT_NEAR(sc.f2, 92.474, 1e-3);
    EXPECT_NEAR(sc.f1, 5.0 / 150.0 * 100.0, 1e-12);
    EXPECT_TRUE(sc.similar());
}

TEST(F1F2, IdenticalAndExtreme) {
    const std::vector<double> r{100, 100, 100}, z{0, 0, 0};
    EXPECT_EQ(f1_f2(r, r).f2, 100.0);
    EXPECT_EQ(f1_f2(r, r).f1, 0.0);
    const auto sc = f1_f2(r, z);
    EXPECT_EQ(sc.f1, 100.0);
    EXPECT_FALSE(sc.similar());
}

TEST(F1F2, PermutationInvariant) {
    const std::vector<double> r{5, 30, 60, 80, 90}, s{7, 25, 66, 79, 95};
    std::vector<std::size_t> p{3, 0, 4, 1, 2};
    std::vector<double> rp, sp;
    for (auto i : p) rp.push_back(r[i]), sp.push_back(s[i]);
    EXPECT_NEAR(f1_f2(r, s).f1, f1_f2(rp, sp).f1, 1e-12);
    EXPECT_NEAR(f1_f2(r, s).f2, f1_f2(rp, sp).f2, 1e-12);
}

TEST(F1F2, F2DecreasesWithDistance) {
    const std::vector<double> r{10, 40, 70, 90};
    double last = 101.0;
    for (double off : {0.0, 1.0, 5.0, 10.0, 30.0}) {
        std::vector<double> s = r;
        for (auto& v : s) v += off;
        const double f2 = f1_f2(r, s).f2;
        EXPECT_LT(f2, last);
        last = f2;
    }
}

TEST(F1F2, Errors) {
    const std::vector<double> z{0, 0}, a{1, 2}, b{1};
    EXPECT_THROW(f1_f2(z, a), ArgumentError);
    EXPECT_THROW(f1_f2(a, b), ArgumentError);
    EXPECT_THROW(f1_f2(std::vector<double>{}, std::vector<double>{}), ArgumentError);
}

TEST(F1F2, SimilarPairsFromGenerator) {
    for (std::uint64_t s = 0; s < 50; ++s) {
        const auto p = gen_dissolution_pair(PairKind::Similar, s);
        EXPECT_TRUE(f1_f2(p.reference, p.test).similar()) << "seed " << s;
        const auto q = gen_dissolution_pair(PairKind::Dissimilar, s);
        EXPECT_FALSE(f1_f2(q.reference, q.test).similar()) << "seed " << s;
    }
}
