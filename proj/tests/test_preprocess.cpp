#include <algorithm>
#include <cmath>
#include <fstream>
#include <random>
#include <tuple>

#include <gtest/gtest.h>

#include "grangernet/error.hpp"
#include "grangernet/preprocess.hpp"
#include "test_support.hpp"

namespace gn = grangernet;
using testing_support::code_of;

namespace {

// Brute-force neighbour lists: sort every other node by (squared distance, id).
std::vector<std::vector<gn::NodeId>> brute_knn(const Eigen::MatrixXd& x, std::size_t k) {
    const auto n = static_cast<std::size_t>(x.rows());
    std::vector<std::vector<gn::NodeId>> out(n);
    for (std::size_t u = 0; u < n; ++u) {
        std::vector<std::pair<double, gn::NodeId>> d;
        for (std::size_t v = 0; v < n; ++v) {
            if (v == u) continue;
            d.emplace_back((x.row(static_cast<Eigen::Index>(u)) - x.row(static_cast<Eigen::Index>(v))).squaredNorm(),
                           static_cast<gn::NodeId>(v));
        }
        std::sort(d.begin(), d.end());
        for (std::size_t i = 0; i < k; ++i) out[u].push_back(d[i].second);
    }
    return out;
}

}  // namespace

TEST(LogCpm, Examples) {
    Eigen::MatrixXd counts(3, 2);
    counts << 0, 0,   //
        10, 0,        //
        3, 1;
    const auto out = gn::log_cpm(counts, 10.0);
    EXPECT_EQ(out(0, 0), 0.0);
    EXPECT_EQ(out(0, 1), 0.0);
    EXPECT_NEAR(out(1, 0), std::log(100001.0), 1e-12);
    EXPECT_NEAR(out(1, 0), 11.5129, 1e-4);
    EXPECT_EQ(out(1, 1), 0.0);
    EXPECT_NEAR(out(2, 0), std::log1p(0.75e6 / 10.0), 1e-12);
}

TEST(LogCpm, RejectsBadInput) {
    Eigen::MatrixXd neg(1, 2);
    neg << 1, -1;
    EXPECT_EQ(code_of([&] { gn::log_cpm(neg, 10.0); }), gn::ErrorCode::NonFiniteInput);
    Eigen::MatrixXd nan(1, 1);
    nan << std::nan("");
    EXPECT_EQ(code_of([&] { gn::log_cpm(nan, 10.0); }), gn::ErrorCode::NonFiniteInput);
    Eigen::MatrixXd ok = Eigen::MatrixXd::Ones(1, 1);
    EXPECT_EQ(code_of([&] { gn::log_cpm(ok, 0.0); }), gn::ErrorCode::InvalidArgument);
}

TEST(LogCpm, PreservesWithinRowOrder) {
    std::mt19937_64 rng(1);
    std::poisson_distribution<int> pois(4.0);
    Eigen::MatrixXd counts(20, 15);
    for (Eigen::Index i = 0; i < counts.size(); ++i) counts.data()[i] = pois(rng);
    const auto out = gn::log_cpm(counts, 100.0);
    for (Eigen::Index r = 0; r < counts.rows(); ++r) {
        for (Eigen::Index a = 0; a < counts.cols(); ++a) {
            for (Eigen::Index b = 0; b < counts.cols(); ++b) {
                if (counts(r, a) < counts(r, b)) EXPECT_LT(out(r, a), out(r, b));
                if (counts(r, a) == counts(r, b)) EXPECT_EQ(out(r, a), out(r, b));
            }
        }
    }
}

TEST(MaxScale, Examples) {
    Eigen::MatrixXd m(3, 2);
    m << 2, 0,  //
        4, 0,   //
        8, 0;
    const auto out = gn::max_scale(m);
    EXPECT_EQ(out(0, 0), 0.25);
    EXPECT_EQ(out(1, 0), 0.5);
    EXPECT_EQ(out(2, 0), 1.0);
    EXPECT_EQ(out.col(1), Eigen::VectorXd::Zero(3));

    Eigen::MatrixXd single(1, 1);
    single << 5;
    EXPECT_EQ(gn::max_scale(single)(0, 0), 1.0);
}

TEST(MaxScale, Idempotent) {
    std::mt19937_64 rng(2);
    std::uniform_real_distribution<double> u(0.0, 50.0);
    Eigen::MatrixXd m(30, 6);
    for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = u(rng);
    const auto once = gn::max_scale(m);
    EXPECT_EQ(gn::max_scale(once), once);
    EXPECT_LE(once.maxCoeff(), 1.0);
    EXPECT_GE(once.minCoeff(), 0.0);
}

TEST(Knn, CollinearPoints) {
    Eigen::MatrixXd x(3, 1);
    x << 0, 1, 10;
    const auto edges = gn::knn_graph(x, 1);
    ASSERT_EQ(edges.size(), 3u);
    EXPECT_EQ(std::tie(edges[0].src, edges[0].dst), std::make_tuple(0u, 1u));
    EXPECT_EQ(std::tie(edges[1].src, edges[1].dst), std::make_tuple(1u, 0u));
    EXPECT_EQ(std::tie(edges[2].src, edges[2].dst), std::make_tuple(2u, 1u));
    EXPECT_DOUBLE_EQ(edges[2].distance, 9.0);
}

TEST(Knn, CompleteGraphAtKMax) {
    Eigen::MatrixXd x = Eigen::MatrixXd::Random(6, 3);
    const auto edges = gn::knn_graph(x, 5);
    EXPECT_EQ(edges.size(), 30u);
    for (const auto& e : edges) EXPECT_NE(e.src, e.dst);
    EXPECT_EQ(code_of([&] { gn::knn_graph(x, 6); }), gn::ErrorCode::KTooLarge);
}

TEST(Knn, DuplicateCoordinatesBreakTiesTowardLowerId) {
    Eigen::MatrixXd x(4, 2);
    x << 0, 0,  //
        1, 1,   //
        1, 1,   //
        1, 1;
    const auto edges = gn::knn_graph(x, 1);
    EXPECT_EQ(edges[0].dst, 1u);
    EXPECT_EQ(edges[1].dst, 2u);
    EXPECT_EQ(edges[2].dst, 1u);
    EXPECT_EQ(edges[3].dst, 1u);
}

TEST(Knn, MatchesBruteForceAndIgnoresWorkerCount) {
    std::mt19937_64 rng(4);
    std::normal_distribution<double> z;
    for (int trial = 0; trial < 10; ++trial) {
        const std::size_t n = 20 + rng() % 80;
        const std::size_t k = 1 + rng() % 10;
        Eigen::MatrixXd x(static_cast<Eigen::Index>(n), 3);
        for (Eigen::Index i = 0; i < x.size(); ++i) x.data()[i] = std::round(4.0 * z(rng)) / 4.0;  // forces ties
        const auto expect = brute_knn(x, k);
        const auto single = gn::knn_graph(x, k, 1);
        const auto multi = gn::knn_graph(x, k, 4);
        ASSERT_EQ(single.size(), n * k);
        ASSERT_EQ(multi.size(), n * k);
        for (std::size_t u = 0; u < n; ++u) {
            for (std::size_t i = 0; i < k; ++i) {
                const auto& e = single[u * k + i];
                EXPECT_EQ(e.src, u);
                EXPECT_EQ(e.dst, expect[u][i]);
                EXPECT_EQ(multi[u * k + i].dst, e.dst);
                EXPECT_EQ(multi[u * k + i].distance, e.distance);
            }
        }
    }
}

TEST(Orient, Examples) {
    std::vector<gn::Edge> both{{0, 1}, {1, 0}};
    std::vector<double> pt{0.1, 0.9};
    auto dag = gn::orient_by_pseudotime(2, both, pt);
    ASSERT_EQ(dag.edges().size(), 1u);
    EXPECT_EQ(dag.edges()[0], (gn::Edge{0, 1}));

    std::vector<double> tied{0.5, 0.5};
    EXPECT_TRUE(gn::orient_by_pseudotime(2, both, tied).edges().empty());
}

TEST(Orient, AlignedEdgesUnchangedAndAlwaysForward) {
    std::mt19937_64 rng(6);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    Eigen::MatrixXd x = Eigen::MatrixXd::Random(80, 2);
    std::vector<double> pt(80);
    for (auto& t : pt) t = std::round(20.0 * u(rng)) / 20.0;  // many ties
    const auto knn = gn::knn_graph(x, 6);
    const auto dag = gn::orient_by_pseudotime(80, knn, pt);
    for (const auto& e : dag.edges()) EXPECT_LT(pt[e.src], pt[e.dst]);

    std::vector<gn::Edge> kept(dag.edges().begin(), dag.edges().end());
    const auto again = gn::orient_by_pseudotime(80, kept, pt);
    EXPECT_TRUE(std::equal(again.edges().begin(), again.edges().end(), kept.begin(), kept.end()));
}

TEST(MatrixIo, DenseRoundTripIsExact) {
    const auto dir = testing_support::scratch_dir("matrix_io");
    gn::NamedMatrix m;
    m.values = Eigen::MatrixXd::Random(7, 3) * 1e3;
    m.values(0, 0) = 1.0 / 3.0;
    m.names = {"a", "b", "c"};
    gn::write_matrix(dir / "m.tsv", m);
    const auto back = gn::read_matrix(dir / "m.tsv");
    EXPECT_EQ(back.names, m.names);
    EXPECT_EQ(back.values, m.values);
}

TEST(MatrixIo, CommaSeparatedAndMatrixMarket) {
    const auto dir = testing_support::scratch_dir("matrix_formats");
    std::ofstream(dir / "c.csv") << "g1,g2\n1,2\n3,4.5\n";
    const auto csv = gn::read_matrix(dir / "c.csv");
    EXPECT_EQ(csv.names, (std::vector<std::string>{"g1", "g2"}));
    EXPECT_EQ(csv.values(1, 1), 4.5);

    std::ofstream(dir / "m.mtx") << "%%MatrixMarket matrix coordinate real general\n% comment\n3 2 2\n1 2 5\n3 1 7\n";
    const auto mm = gn::read_matrix(dir / "m.mtx");
    EXPECT_EQ(mm.n_nodes(), 3u);
    EXPECT_EQ(mm.n_vars(), 2u);
    EXPECT_EQ(mm.values(0, 1), 5.0);
    EXPECT_EQ(mm.values(2, 0), 7.0);
    EXPECT_EQ(mm.values(1, 1), 0.0);
    EXPECT_EQ(mm.names[1], "var1");
}

TEST(MatrixIo, ParseErrorsCarryLineNumbers) {
    const auto dir = testing_support::scratch_dir("matrix_errors");
    std::ofstream(dir / "bad.tsv") << "a\tb\n1\t2\n3\n";
    try {
        gn::read_matrix(dir / "bad.tsv");
        FAIL();
    } catch (const gn::Error& e) {
        EXPECT_EQ(e.code(), gn::ErrorCode::ParseError);
        EXPECT_NE(std::string(e.what()).find(":3:"), std::string::npos) << e.what();
    }
    std::ofstream(dir / "word.tsv") << "a\n1\nabc\n";
    EXPECT_EQ(code_of([&] { gn::read_matrix(dir / "word.tsv"); }), gn::ErrorCode::ParseError);
    EXPECT_EQ(code_of([&] { gn::read_vector(dir / "missing.txt"); }), gn::ErrorCode::ParseError);
}

TEST(MatrixIo, VectorRoundTrip) {
    const auto dir = testing_support::scratch_dir("vector_io");
    std::vector<double> v{0.1, -2.5, 1e-300, 7.0};
    gn::write_vector(dir / "v.txt", v);
    EXPECT_EQ(gn::read_vector(dir / "v.txt"), v);
}

TEST(Orient, SymmetrizedCollinearPointsFormAChain) {
    Eigen::MatrixXd x(3, 1);
    x << 0, 1, 10;
    const auto undirected = gn::symmetrize(gn::knn_graph(x, 1));
    EXPECT_EQ(undirected, (std::vector<gn::Edge>{{0, 1}, {1, 0}, {1, 2}, {2, 1}}));
    const std::vector<double> pt{0.0, 1.0, 2.0};
    const auto dag = gn::orient_by_pseudotime(3, undirected, pt);
    EXPECT_TRUE(std::ranges::equal(dag.edges(), std::vector<gn::Edge>{{0, 1}, {1, 2}}));
}
