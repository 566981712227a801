#include <cmath>
#include <fstream>
#include <random>

#include <gtest/gtest.h>

#include "grangernet/error.hpp"
#include "grangernet/eval.hpp"
#include "oracles.hpp"
#include "test_support.hpp"

namespace gn = grangernet;
using testing_support::code_of;
using Labels = std::vector<std::uint8_t>;

TEST(Labels, Examples) {
    const std::vector<gn::PairKey> cand{{"p1", "g"}, {"p2", "g"}, {"p3", "g"}, {"p4", "g"}};
    const std::vector<gn::ReferenceEntry> ref{{{"p1", "g"}, 1e-12}, {{"p2", "g"}, 0.95}, {{"p3", "g"}, 0.5},
                                              {{"zz", "g"}, 1e-20}};
    const auto l = gn::label_from_reference(cand, ref, 1e-10, 0.9);
    EXPECT_EQ(l.pair_ids, (std::vector<std::size_t>{0, 1}));
    EXPECT_EQ(l.labels, (Labels{1, 0}));
    EXPECT_EQ(l.n_true(), 1u);
    EXPECT_EQ(l.n_false(), 1u);
    EXPECT_FALSE(l.provenance.empty());

    EXPECT_EQ(code_of([&] { gn::label_from_reference(cand, {}, 1e-10, 0.9); }), gn::ErrorCode::NoLabeledPairs);
    const std::vector<gn::ReferenceEntry> middle{{{"p1", "g"}, 0.3}, {{"p2", "g"}, 0.6}};
    EXPECT_EQ(code_of([&] { gn::label_from_reference(cand, middle, 1e-10, 0.9); }), gn::ErrorCode::NoLabeledPairs);
}

TEST(Labels, DuplicateEntriesKeepSmallestValue) {
    const std::vector<gn::PairKey> cand{{"a", "b"}};
    const std::vector<gn::ReferenceEntry> ref{{{"a", "b"}, 0.95}, {{"a", "b"}, 1e-11}};
    EXPECT_EQ(gn::label_from_reference(cand, ref, 1e-10, 0.9).labels, (Labels{1}));
}

TEST(Auroc, Examples) {
    EXPECT_EQ(gn::auroc(std::vector<double>{4, 3, 2, 1}, Labels{1, 1, 0, 0}), 1.0);
    EXPECT_EQ(gn::auroc(std::vector<double>{4, 3, 2, 1}, Labels{0, 0, 1, 1}), 0.0);
    EXPECT_EQ(gn::auroc(std::vector<double>(6, 0.3), Labels{1, 0, 0, 1, 0, 0}), 0.5);
    EXPECT_EQ(code_of([] { gn::auroc(std::vector<double>{1, 2}, Labels{1, 1}); }), gn::ErrorCode::OneClassOnly);
}

TEST(Auprc, Examples) {
    EXPECT_NEAR(gn::auprc(std::vector<double>{3, 2, 1}, Labels{1, 0, 1}), 5.0 / 6.0, 1e-15);

    std::vector<double> s(100);
    Labels lab(100, 0);
    for (std::size_t i = 0; i < 100; ++i) s[i] = 100.0 - static_cast<double>(i);
    for (std::size_t i = 0; i < 5; ++i) lab[i] = 1;
    EXPECT_EQ(gn::auprc(s, lab), 1.0);

    // Worst ranking: all 95 false pairs first, so the i-th true pair sees precision i / (95 + i).
    Labels worst(100, 0);
    for (std::size_t i = 95; i < 100; ++i) worst[i] = 1;
    double expect = 0.0;
    for (int i = 1; i <= 5; ++i) expect += i / (95.0 + i);
    EXPECT_NEAR(gn::auprc(s, worst), expect / 5.0, 1e-15);

    // A fully tied block gets precision equal to the prevalence.
    EXPECT_NEAR(gn::auprc(std::vector<double>(8, 1.0), Labels{1, 0, 0, 0, 1, 0, 0, 0}), 0.25, 1e-15);
    EXPECT_EQ(code_of([] { gn::auprc(std::vector<double>{1, 2}, Labels{0, 0}); }), gn::ErrorCode::OneClassOnly);
}

TEST(Metrics, MatchBruteForceOracles) {
    std::mt19937_64 rng(1);
    for (int t = 0; t < 200; ++t) {
        const std::size_t n = 2 + rng() % 49;
        std::vector<double> s(n);
        Labels lab(n);
        std::uniform_int_distribution<int> coarse(0, 1 + static_cast<int>(rng() % 8));
        for (std::size_t i = 0; i < n; ++i) {
            s[i] = coarse(rng);
            lab[i] = static_cast<std::uint8_t>(rng() % 3 == 0);
        }
        lab[0] = 1;
        lab[1] = 0;
        EXPECT_EQ(gn::auroc(s, lab), oracle::auroc_pairs(s, lab));
        EXPECT_EQ(gn::auprc(s, lab), oracle::auprc_sweep(s, lab));
    }
}

TEST(Metrics, InvariantUnderIncreasingTransform) {
    std::mt19937_64 rng(2);
    std::normal_distribution<double> z;
    for (int t = 0; t < 20; ++t) {
        std::vector<double> s(60), e(60), neg(60);
        Labels lab(60);
        for (std::size_t i = 0; i < 60; ++i) {
            lab[i] = static_cast<std::uint8_t>(i % 4 == 0);
            s[i] = z(rng) + lab[i];
            e[i] = std::exp(3.0 * s[i]) + 1.0;
            neg[i] = -s[i];
        }
        EXPECT_EQ(gn::auroc(e, lab), gn::auroc(s, lab));
        EXPECT_EQ(gn::auprc(e, lab), gn::auprc(s, lab));
        EXPECT_NEAR(gn::auroc(s, lab) + gn::auroc(neg, lab), 1.0, 1e-14);
    }
}

TEST(Metrics, RandomScoresMatchExpectedAveragePrecision) {
    // Expected average precision of a uniformly random ranking with P true
    // pairs out of n: mean over positions r of (1 + (P - 1)(r - 1)/(n - 1)) / r.
    const std::size_t n = 400, P = 20;
    double expect = 0.0;
    for (std::size_t r = 1; r <= n; ++r) expect += (1.0 + (P - 1.0) * (r - 1.0) / (n - 1.0)) / static_cast<double>(r);
    expect /= static_cast<double>(n);
    EXPECT_NEAR(expect, 0.05, 0.02);

    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u;
    Labels lab(n, 0);
    for (std::size_t i = 0; i < P; ++i) lab[i] = 1;
    const int trials = 2000;
    double sum = 0.0, sum2 = 0.0, roc = 0.0;
    std::vector<double> s(n);
    for (int t = 0; t < trials; ++t) {
        for (auto& v : s) v = u(rng);
        const double ap = gn::auprc(s, lab);
        sum += ap;
        sum2 += ap * ap;
        roc += gn::auroc(s, lab);
    }
    const double mean = sum / trials;
    const double se = std::sqrt((sum2 / trials - mean * mean) / trials);
    EXPECT_NEAR(mean, expect, 3 * se);
    EXPECT_NEAR(roc / trials, 0.5, 0.01);
}

TEST(Reference, ReadAndErrors) {
    const auto dir = testing_support::scratch_dir("reference");
    std::ofstream(dir / "ref.tsv") << "# x\ty\tp\npeak1\tgeneA\t1e-12\r\npeak2\tgeneA\t0.95\n";
    const auto ref = gn::read_reference(dir / "ref.tsv");
    ASSERT_EQ(ref.size(), 2u);
    EXPECT_EQ(ref[0].key.x_name, "peak1");
    EXPECT_EQ(ref[0].value, 1e-12);
    EXPECT_EQ(ref[1].value, 0.95);

    std::ofstream(dir / "bad.tsv") << "peak1\tgeneA\t0.1\npeak2\tgeneA\n";
    try {
        gn::read_reference(dir / "bad.tsv");
        FAIL();
    } catch (const gn::Error& e) {
        EXPECT_EQ(e.code(), gn::ErrorCode::ParseError);
        EXPECT_NE(std::string(e.what()).find(":2:"), std::string::npos);
    }
    EXPECT_EQ(code_of([&] { gn::read_reference(dir / "none.tsv"); }), gn::ErrorCode::ParseError);
}
