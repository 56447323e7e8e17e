#include <cmath>

#include <gtest/gtest.h>

#include "fdl/encode.hpp"
#include "fdl/synth.hpp"

using namespace fdl;

namespace {

void expect_invariants(const EncodedImage& img) {
    for (std::size_t i = 0; i < image_side; ++i) {
        ASSERT_EQ(img.at(i, i), 0.5);
        for (std::size_t j = 0; j < image_side; ++j) {
            ASSERT_GE(img.at(i, j), 0.0);
            ASSERT_LE(img.at(i, j), 1.0);
            ASSERT_NEAR(img.at(i, j) + img.at(j, i), 1.0, 2 * 0x1.0p-53);
        }
    }
}

// Overlap of sample k's unit cell with output bin i when n cells are
// squeezed into m bins, in units of one cell.
double coverage(std::size_t k, std::size_t i, std::size_t n, std::size_t m) {
    const double lo = static_cast<double>(i) * n / m, hi = static_cast<double>(i + 1) * n / m;
    return std::max(0.0, std::min(hi, k + 1.0) - std::max(lo, static_cast<double>(k)));
}

}  // namespace

TEST(Encode, ThreePointHandExample) {
    // Profile [0, 0.5, 1, 1, ...]; the top-left 3x3 block is the hand case.
    std::vector<double> f(image_side, 1.0);
    f[0] = 0.0;
    f[1] = 0.5;
    const auto full = encode_normalized(f);
    const double want[3][3] = {{.5, .25, 0}, {.75, .5, .25}, {1, .75, .5}};
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) EXPECT_DOUBLE_EQ(full.at(i, j), want[i][j]);
}

TEST(Encode, ConstantCurveIsNeutral) {
    const auto img = encode(Curve::on_grid(0, 1, std::vector<double>(100, 7.0)), NormalizationMode::local());
    for (double p : img.pixels) EXPECT_EQ(p, 0.5);
}

TEST(Encode, IncreasingCurveSignStructure) {
    const auto img = encode(gen_exponential({0.3}), NormalizationMode::local());
    for (std::size_t i = 0; i < image_side; ++i) {
        for (std::size_t j = 0; j < image_side; ++j) {
            if (i > j) {
                EXPECT_GT(img.at(i, j), 0.5);
            } else if (i < j) {
                EXPECT_LT(img.at(i, j), 0.5);
            }
            if (j > 0) {
                EXPECT_LE(img.at(i, j), img.at(i, j - 1));
            }
        }
    }
}

TEST(Encode, AffineInvariance) {
    Rng rng(12);
    for (int k = 0; k < 100; ++k) {
        const auto c = gen_trig({TrigKind::Cosine, rng.uniform(0, 3)});
        const double a = rng.uniform(0.1, 50), b = rng.uniform(-100, 100);
        std::vector<double> ys = c.ys();
        for (auto& y : ys) y = a * y + b;
        const auto i1 = encode(c, NormalizationMode::local());
        const auto i2 = encode(c.with_ys(ys), NormalizationMode::local());
        for (std::size_t p = 0; p < image_pixels; ++p) ASSERT_NEAR(i1.pixels[p], i2.pixels[p], 1e-12);
    }
}

TEST(Encode, BoxReductionEqualsAreaResizedFullMatrix) {
    for (std::size_t n : {56u, 100u, 1000u}) {
        Rng rng(n);
        std::vector<double> ys(n);
        for (auto& y : ys) y = rng.uniform();
        const auto c = Curve::on_grid(0, 1, ys);
        const auto img = encode(c, NormalizationMode::local());
        const auto f = minmax_normalize(c, NormalizationMode::local()).ys();
        // Full n x n image, then area resize to 28 x 28.
        const double area = static_cast<double>(n) / image_side;
        for (std::size_t i = 0; i < image_side; i += 9) {
            for (std::size_t j = 0; j < image_side; j += 5) {
                double acc = 0.0;
                for (std::size_t r = 0; r < n; ++r) {
                    const double wr = coverage(r, i, n, image_side);
                    if (wr == 0.0) continue;
                    for (std::size_t s = 0; s < n; ++s) {
                        const double ws = coverage(s, j, n, image_side);
                        if (ws != 0.0) acc += wr * ws * (f[r] - f[s] + 1.0) / 2.0;
                    }
                }
                ASSERT_NEAR(img.at(i, j), acc / (area * area), 1e-12) << "n " << n;
            }
        }
    }
}

TEST(Encode, ShortCurvesInterpolate) {
    const auto p = dissolution_profile(0.03);
    const auto r = reduce_to(profile_curve(p), image_side);
    EXPECT_EQ(r.size(), image_side);
    EXPECT_EQ(r.front(), p.front());
    EXPECT_EQ(r.back(), p.back());
}

TEST(Encode, GlobalModeClampsOutOfRange) {
    const auto c = Curve::on_grid(0, 1, std::vector<double>{-5, 0, 5, 10, 20});
    const auto img = encode(c, NormalizationMode::global(0, 10));
    expect_invariants(img);
}

TEST(EncodeBatch, Contracts) {
    EXPECT_TRUE(encode_batch({}, NormalizationMode::local()).empty());
    const auto one = gen_exponential({0.5});
    const auto b = encode_batch(std::vector<Curve>{one}, NormalizationMode::local());
    ASSERT_EQ(b.size(), 1u);
    EXPECT_EQ(b[0].pixels, encode(one, NormalizationMode::local()).pixels);
}

TEST(EncodeBatch, ThousandExponentialsSatisfyInvariants) {
    Rng rng(2);
    std::vector<Curve> curves;
    for (int k = 0; k < 1000; ++k) curves.push_back(add_noise(gen_exponential(draw_exponential(rng)), {0.1}, k));
    const auto imgs = encode_batch(curves, NormalizationMode::local());
    ASSERT_EQ(imgs.size(), 1000u);
    for (std::size_t k = 0; k < imgs.size(); ++k) {
        expect_invariants(imgs[k]);
        ASSERT_EQ(imgs[k].source_meta.family, Family::Exponential);
    }
}
