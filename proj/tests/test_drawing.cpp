#include <algorithm>
#include <sstream>

#include <gtest/gtest.h>

#include "fdl/drawing.hpp"
#include "fdl/models.hpp"

using namespace fdl;

namespace {

const char* header = "timestamp,X,Y,Z,P,A,subject,class\n";

std::vector<DrawingRecord> parse(const std::string& s) {
    std::istringstream in(s);
    return ingest_drawings(in);
}

std::string error_of(const std::string& csv) {
    try {
        parse(csv);
    } catch (const DataError& e) {
        return e.what();
    }
    return "";
}

double range_of(std::span<const double> v) {
    const auto [lo, hi] = std::minmax_element(v.begin(), v.end());
    return *hi - *lo;
}

}  // namespace

TEST(Ingest, TwoRowsOneSubject) {
    const auto recs = parse(std::string(header) + "0,1,2,0,500,45,s1,control\n10,2,3,0,510,46,s1,control\n");
    ASSERT_EQ(recs.size(), 1u);
    EXPECT_EQ(recs[0].size(), 2u);
    EXPECT_EQ(recs[0].subject, "s1");
    EXPECT_EQ(recs[0].cls, DrawingClass::Control);
    EXPECT_EQ(recs[0].p, (std::vector<double>{500, 510}));
}

TEST(Ingest, GroupsSubjectsInOrder) {
    const auto recs = parse(std::string(header) +
                            "0,1,1,0,1,1,b,patient\n0,1,1,0,1,1,a,0\n1,1,1,0,1,1,b,patient\n");
    ASSERT_EQ(recs.size(), 2u);
    EXPECT_EQ(recs[0].subject, "b");
    EXPECT_EQ(recs[0].size(), 2u);
    EXPECT_EQ(recs[1].cls, DrawingClass::Control);
}

TEST(Ingest, MissingColumnNamed) {
    const auto e = error_of("timestamp,X,Y,Z,A,subject,class\n0,1,2,0,45,s1,control\n");
    EXPECT_NE(e.find("'P'"), std::string::npos) << e;
}

TEST(Ingest, NonMonotoneTimestamps) {
    const auto e = error_of(std::string(header) + "5,1,2,0,1,1,s,control\n5,1,2,0,1,1,s,control\n");
    EXPECT_NE(e.find("non-monotone"), std::string::npos) << e;
    EXPECT_NE(e.find("row 3"), std::string::npos) << e;
}

TEST(Ingest, BadCellsAndClasses) {
    EXPECT_NE(error_of(std::string(header) + "0,abc,2,0,1,1,s,control\n").find("column X"), std::string::npos);
    EXPECT_NE(error_of(std::string(header) + "0,1,2,0,1,1,s,healthy\n").find("unknown class"), std::string::npos);
    EXPECT_NE(error_of(std::string(header) + "0,1,2\n").find("fields"), std::string::npos);
    EXPECT_NE(error_of("").find("empty"), std::string::npos);
    EXPECT_NE(error_of(std::string(header) + "0,1,1,0,1,1,s,control\n1,1,1,0,1,1,s,patient\n").find("changes class"),
              std::string::npos);
}

TEST(Ingest, CsvRoundTrip) {
    const auto corpus = synthetic_spiral_corpus(2, 3, 5, 50);
    std::stringstream ss;
    write_drawings_csv(ss, corpus);
    const auto back = ingest_drawings(ss);
    ASSERT_EQ(back.size(), corpus.size());
    for (std::size_t i = 0; i < corpus.size(); ++i) {
        EXPECT_EQ(back[i].subject, corpus[i].subject);
        EXPECT_EQ(back[i].cls, corpus[i].cls);
        EXPECT_EQ(back[i].x, corpus[i].x);
        EXPECT_EQ(back[i].p, corpus[i].p);
    }
}

TEST(Augment, IdentityChangesNothing) {
    const auto rec = synthetic_spiral("s", DrawingClass::Patient, 1, 200);
    const auto out = augment_drawing(rec, AugmentSpec::identity(), 9);
    EXPECT_EQ(out.x, rec.x);
    EXPECT_EQ(out.y, rec.y);
    EXPECT_EQ(out.p, rec.p);
}

TEST(Augment, ShiftsStayInRangeAndPreserveShape) {
    const auto rec = synthetic_spiral("s", DrawingClass::Control, 2, 200);
    AugmentSpec spec;
    spec.reflect = false;
    for (std::uint64_t seed = 0; seed < 200; ++seed) {
        const auto out = augment_drawing(rec, spec, seed);
        ASSERT_EQ(out.size(), rec.size());
        ASSERT_EQ(out.cls, rec.cls);
        const double dx = out.x[0] - rec.x[0], dp = out.p[0] - rec.p[0];
        ASSERT_GE(dx, -25.0);
        ASSERT_LE(dx, 25.0);
        ASSERT_GE(dp, 0.0);
        ASSERT_LE(dp, 50.0);
        // Constant shift along the whole channel.
        for (std::size_t i = 0; i < rec.size(); ++i) ASSERT_NEAR(out.x[i] - rec.x[i], dx, 1e-9);
        ASSERT_EQ(out.t, rec.t);
    }
}

TEST(Augment, ReflectionKeepsMeanAndRange) {
    const auto rec = synthetic_spiral("s", DrawingClass::Control, 3, 300);
    AugmentSpec spec = AugmentSpec::identity();
    spec.reflect = true;
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        const auto out = augment_drawing(rec, spec, seed);
        EXPECT_NEAR(mean(out.x), mean(rec.x), 1e-9);
        EXPECT_NEAR(range_of(out.x), range_of(rec.x), 1e-9);
    }
}

TEST(Augment, SeededAndClassWeighted) {
    const auto corpus = synthetic_spiral_corpus(1, 2, 4, 100);
    const auto a = augment_corpus(corpus, {}, 3, 11), b = augment_corpus(corpus, {}, 3, 11);
    ASSERT_EQ(a.size(), 4u * 3 + 2 * 3);
    for (std::size_t i = 0; i < a.size(); ++i) EXPECT_EQ(a[i].x, b[i].x);
    EXPECT_EQ(std::count_if(a.begin(), a.end(), [](const auto& r) { return r.cls == DrawingClass::Control; }), 12);
    EXPECT_EQ(augmentation_copies(DrawingClass::Control, 1), 4u);
    AugmentSpec bad;
    bad.x_shift = {1.0, -1.0};
    EXPECT_THROW(augment_drawing(corpus[0], bad, 0), ArgumentError);
}

TEST(Curves, ChannelsBecomeCurves) {
    const auto rec = synthetic_spiral("s", DrawingClass::Control, 6, 900);
    const auto cs = drawings_to_curves(rec, {Channel::X, Channel::Y});
    ASSERT_EQ(cs.size(), 2u);
    EXPECT_EQ(cs[0].ys(), rec.x);
    EXPECT_EQ(cs[0].xs().front(), rec.t.front());
    EXPECT_EQ(cs[0].xs().back(), rec.t.back());
    EXPECT_EQ(cs[1].meta().labels.at("class"), 0.0);
    // X of a spiral oscillates with growing amplitude.
    const std::span<const double> x(rec.x);
    EXPECT_LT(range_of(x.subspan(0, 300)), range_of(x.subspan(600, 300)));
    EXPECT_THROW(drawings_to_curves(rec, {}), ArgumentError);
    EXPECT_THROW(channel_from_string("Q"), ArgumentError);
}

TEST(Curves, FiveChannelsFeedTheCnn) {
    const std::vector<Channel> all{Channel::X, Channel::Y, Channel::Z, Channel::P, Channel::A};
    const auto corpus = synthetic_spiral_corpus(2, 2, 8, 200);
    const auto t = encode_drawings(corpus, all);
    EXPECT_EQ(t.n, 4u);
    EXPECT_EQ(t.shape.c, 5u);
    nn::Network<float> net(build_classifier_cnn(2), {image_side, image_side, 5}, {}, 1);
    EXPECT_EQ(net.param_count(), cnn_param_count(2, 5));
    const auto y = nn::predict(net, t);
    EXPECT_EQ(y.n, 4u);
}

TEST(Task, SmallSpiralRun) {
    const auto corpus = synthetic_spiral_corpus(5, 20, 3, 300);
    auto cfg = task_preset(TaskId::Drawing).train;
    cfg.epochs = 2;
    DrawingOptions opt;
    opt.base_copies = 1;
    auto run = run_drawing_task(corpus, cfg, opt);
    ASSERT_TRUE(run.report.confusion);
    // One control and four patients held out, control augmented 4x.
    EXPECT_EQ(run.report.n_test, 4u + 4u);
    EXPECT_EQ(run.model.input_channels(), 2u);
    EXPECT_THROW(run_drawing_task({corpus[0]}, cfg, opt), DataError);
}
