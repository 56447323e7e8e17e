#include <algorithm>
#include <cmath>
#include <numeric>

#include <boost/math/distributions/students_t.hpp>
#include <gtest/gtest.h>

#include "fdl/rng.hpp"
#include "fdl/stats.hpp"

using namespace fdl;

TEST(Pearson, ExactAndNegated) {
    const std::vector<double> a{1, 2, 3, 4, 5}, b{2, 4, 6, 8, 10}, c{5, 4, 3, 2, 1};
    EXPECT_DOUBLE_EQ(pearson(a, b), 1.0);
    EXPECT_DOUBLE_EQ(pearson(a, c), -1.0);
    EXPECT_EQ(pearson(a, std::vector<double>(5, 2.0)), 0.0);
    EXPECT_THROW(pearson(a, std::vector<double>{1.0}), ArgumentError);
}

TEST(Regression, HandComputedOls) {
    const std::vector<double> x{1, 2, 3, 4, 5}, y{1.1, 1.9, 3.2, 3.8, 5.3};
    const auto rep = regression_report(x, y);
    // Sxx = 10, Sxy = 10.3, mean y = 3.06.
    EXPECT_NEAR(rep.slope, 1.03, 1e-12);
    EXPECT_NEAR(rep.intercept, 3.06 - 1.03 * 3.0, 1e-12);
    double sse = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) sse += std::pow(y[i] - rep.intercept - rep.slope * x[i], 2);
    const double s2 = sse / 3.0;
    EXPECT_NEAR(rep.se_slope, std::sqrt(s2 / 10.0), 1e-12);
    EXPECT_NEAR(rep.se_intercept, std::sqrt(s2 * (0.2 + 9.0 / 10.0)), 1e-12);
    const boost::math::students_t t3(3.0);
    EXPECT_NEAR(rep.p_slope, 2 * boost::math::cdf(boost::math::complement(t3, std::abs((rep.slope - 1) / rep.se_slope))),
                1e-10);
    EXPECT_EQ(rep.n, 5u);
    EXPECT_FALSE(rep.degenerate);
}

TEST(Regression, PerfectFitIsDegenerate) {
    const std::vector<double> x{1, 2, 3, 4}, y{3, 5, 7, 9};
    const auto rep = regression_report(x, y);
    EXPECT_TRUE(rep.degenerate);
    EXPECT_DOUBLE_EQ(rep.slope, 2.0);
    EXPECT_DOUBLE_EQ(rep.intercept, 1.0);
    EXPECT_TRUE(std::isnan(rep.p_slope));
}

TEST(Regression, Errors) {
    const std::vector<double> x{1, 1, 1}, y{1, 2, 3};
    EXPECT_THROW(regression_report(x, y), ArgumentError);
    EXPECT_THROW(regression_report(std::vector<double>{1, 2}, std::vector<double>{1, 2}), ArgumentError);
    EXPECT_THROW(regression_report(y, std::vector<double>{1, 2}), ArgumentError);
}

TEST(StudentT, MatchesBoost) {
    for (double df : {1.0, 2.5, 3.0, 10.0, 98.0, 1000.0}) {
        const boost::math::students_t d(df);
        for (double t : {-30.0, -4.0, -1.0, -0.1, 0.0, 0.3, 1.96, 5.0, 40.0}) {
            EXPECT_NEAR(student_t_cdf(t, df), boost::math::cdf(d, t), 1e-10) << "df " << df << " t " << t;
            EXPECT_NEAR(two_sided_p(t, df), 2 * boost::math::cdf(boost::math::complement(d, std::abs(t))), 1e-10);
        }
    }
    EXPECT_THROW(student_t_cdf(1.0, 0.0), ArgumentError);
}

TEST(Regression, SlopePValuesUniformUnderNull) {
    // predicted = truth + noise satisfies slope 1; p-values ~ U(0, 1).
    Rng rng(77);
    std::vector<double> ps;
    for (int rep = 0; rep < 200; ++rep) {
        std::vector<double> x(50), y(50);
        for (std::size_t i = 0; i < x.size(); ++i) {
            x[i] = rng.uniform(0, 10);
            y[i] = x[i] + rng.normal();
        }
        ps.push_back(regression_report(x, y).p_slope);
    }
    std::sort(ps.begin(), ps.end());
    double d = 0.0;
    for (std::size_t i = 0; i < ps.size(); ++i) {
        const double n = static_cast<double>(ps.size());
        d = std::max({d, (i + 1) / n - ps[i], ps[i] - i / n});
    }
    EXPECT_LT(d, 1.36 / std::sqrt(200.0));
}

TEST(Confusion, CountsAndAccuracy) {
    const std::vector<int> t{0, 0, 1, 1, 1}, p{0, 1, 1, 1, 0};
    const auto cm = confusion(t, p, std::vector<std::string>{"a", "b"});
    EXPECT_EQ(cm.counts[0][0], 1u);
    EXPECT_EQ(cm.counts[0][1], 1u);
    EXPECT_EQ(cm.counts[1][0], 1u);
    EXPECT_EQ(cm.counts[1][1], 2u);
    EXPECT_EQ(cm.total(), 5u);
    EXPECT_DOUBLE_EQ(cm.accuracy, 0.6);
    // Row sums are the per-class truth counts.
    EXPECT_EQ(cm.counts[1][0] + cm.counts[1][1], 3u);
}

TEST(Confusion, ReorderInvariant) {
    Rng rng(3);
    std::vector<int> t(100), p(100);
    for (std::size_t i = 0; i < t.size(); ++i) {
        t[i] = static_cast<int>(rng.uniform() * 3);
        p[i] = rng.uniform() < 0.7 ? t[i] : static_cast<int>(rng.uniform() * 3);
    }
    std::vector<std::size_t> idx(t.size());
    std::iota(idx.begin(), idx.end(), 0);
    rng.shuffle(std::span<std::size_t>(idx));
    std::vector<int> t2, p2;
    for (auto i : idx) t2.push_back(t[i]), p2.push_back(p[i]);
    EXPECT_EQ(confusion(t, p, 3).counts, confusion(t2, p2, 3).counts);
}

TEST(Confusion, RejectsUnknownLabels) {
    const std::vector<int> t{0, 2}, p{0, 1};
    EXPECT_THROW(confusion(t, p, 2), ArgumentError);
    EXPECT_THROW(confusion(t, std::vector<int>{0}, 3), ArgumentError);
    EXPECT_EQ(confusion(std::vector<int>{}, std::vector<int>{}, 2).accuracy, 0.0);
}
