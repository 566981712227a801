#include <cmath>
#include <limits>
#include <random>

#include <gtest/gtest.h>

#include "grangernet/error.hpp"
#include "grangernet/model.hpp"
#include "oracles.hpp"
#include "test_support.hpp"

namespace gn = grangernet;
using testing_support::code_of;

namespace {

gn::LaggedOperators chain_ops(std::size_t n) {
    return gn::lagged_operators(gn::build_dag(n, oracle::chain_edges(n)));
}

gn::EncoderParams random_params(std::mt19937_64& rng, std::size_t L) {
    std::uniform_real_distribution<double> u(-1.5, 1.5);
    gn::EncoderParams p = gn::EncoderParams::zeros(L);
    for (std::size_t l = 0; l < L; ++l) {
        p.w[l] = u(rng);
        p.b[l] = 0.3 * u(rng);
    }
    return p;
}

std::vector<double> random_vector(std::mt19937_64& rng, std::size_t n) {
    std::normal_distribution<double> z;
    std::vector<double> v(n);
    for (auto& x : v) x = z(rng);
    return v;
}

}  // namespace

TEST(EncodeHistory, ZeroParametersGiveZero) {
    auto ops = chain_ops(5);
    std::vector<double> v{1, -2, 3, 4, 5};
    const auto out = gn::encode_history(v, ops, gn::EncoderParams::zeros(3), 1);
    for (double h : out.h_tilde) EXPECT_EQ(h, 0.0);
}

TEST(EncodeHistory, SingleLayerShiftsByOne) {
    auto ops = chain_ops(3);
    gn::EncoderParams p{{1.0}, {0.0}};
    std::vector<double> v{1, 0, 0};
    const auto out = gn::encode_history(v, ops, p, 1);
    EXPECT_EQ(out.h_tilde[0], 0.0);
    EXPECT_NEAR(out.h_tilde[1], 0.76159, 1e-5);
    EXPECT_EQ(out.h_tilde[1], std::tanh(1.0));
    EXPECT_EQ(out.h_tilde[2], 0.0);
}

TEST(EncodeHistory, TwoLayersMatchHandRecurrence) {
    auto ops = chain_ops(3);
    gn::EncoderParams p{{1.0, 1.0}, {0.0, 0.0}};
    std::vector<double> v{1, 0, 0};
    const auto out = gn::encode_history(v, ops, p, 1, true);
    const double t1 = std::tanh(1.0);
    const double t2 = std::tanh(t1 / 2.0);
    EXPECT_NEAR(out.layers(0, 1), t1, 1e-15);
    EXPECT_NEAR(out.layers(1, 0), 0.0, 1e-15);
    EXPECT_NEAR(out.layers(1, 1), t2, 1e-15);
    EXPECT_NEAR(out.layers(1, 2), t2, 1e-15);
    EXPECT_NEAR(out.h_tilde[1], (t1 + t2) / 2.0, 1e-15);
    EXPECT_NEAR(out.h_tilde[2], t2 / 2.0, 1e-15);
}

TEST(EncodeHistory, MatchesScalarOracleOnRandomDags) {
    std::mt19937_64 rng(21);
    for (int trial = 0; trial < 60; ++trial) {
        const std::size_t n = 2 + rng() % 60;
        const std::size_t L = 1 + rng() % 5;
        const std::size_t hops = 1 + rng() % L;
        auto edges = oracle::random_dag_edges(rng, n, 0.1);
        auto ops = gn::lagged_operators(gn::build_dag(n, edges));
        auto g = oracle::from_edges(n, edges);
        const auto p = random_params(rng, L);
        const auto v = random_vector(rng, n);
        const auto got = gn::encode_history(v, ops, p, hops).h_tilde;
        const auto want = oracle::encode<long double>(
            g, std::vector<long double>(v.begin(), v.end()), std::vector<long double>(p.w.begin(), p.w.end()),
            std::vector<long double>(p.b.begin(), p.b.end()), hops);
        for (std::size_t i = 0; i < n; ++i) {
            EXPECT_NEAR(got[i], static_cast<double>(want[i]), 1e-13);
            EXPECT_GT(got[i], -1.0);
            EXPECT_LT(got[i], 1.0);
        }
    }
}

TEST(EncodeHistory, InvariantToOwnValueAndNonAncestors) {
    std::mt19937_64 rng(22);
    for (int trial = 0; trial < 40; ++trial) {
        const std::size_t n = 2 + rng() % 50;
        const std::size_t L = 1 + rng() % 4;
        const std::size_t hops = 1 + rng() % L;
        auto edges = oracle::random_dag_edges(rng, n, 0.12);
        auto ops = gn::lagged_operators(gn::build_dag(n, edges));
        const auto anc = oracle::ancestors_within(oracle::from_edges(n, edges), L);
        const auto p = random_params(rng, L);
        auto v = random_vector(rng, n);
        const auto base = gn::encode_history(v, ops, p, hops).h_tilde;
        const std::size_t u = rng() % n;
        v[u] += 0.75;
        const auto moved = gn::encode_history(v, ops, p, hops).h_tilde;
        for (std::size_t w = 0; w < n; ++w) {
            if (!anc[w][u]) EXPECT_EQ(base[w], moved[w]) << "node " << w << " moved by input at " << u;
        }
    }
}

TEST(EncodeHistory, OwnValueHasZeroFiniteDifference) {
    std::mt19937_64 rng(23);
    const std::size_t n = 30;
    auto ops = gn::lagged_operators(gn::build_dag(n, oracle::random_dag_edges(rng, n, 0.15)));
    const auto p = random_params(rng, 4);
    auto v = random_vector(rng, n);
    for (std::size_t j = 0; j < n; ++j) {
        auto up = v, down = v;
        up[j] += 1e-6;
        down[j] -= 1e-6;
        const double d = (gn::encode_history(up, ops, p, 1).h_tilde[j] - gn::encode_history(down, ops, p, 1).h_tilde[j]) / 2e-6;
        EXPECT_EQ(d, 0.0);
    }
}

TEST(EncodeHistory, ChainReducesToScalarRecurrence) {
    const std::size_t n = 200, L = 3;
    auto ops = chain_ops(n);
    std::mt19937_64 rng(24);
    const auto p = random_params(rng, L);
    const auto v = random_vector(rng, n);
    // h1[t] = tanh(w1 v[t-1] + b1); later layers average the previous layer at t-1 and t.
    std::vector<double> prev(n), cur(n), mean(n, 0.0);
    for (std::size_t t = 0; t < n; ++t) prev[t] = std::tanh(p.w[0] * (t ? v[t - 1] : 0.0) + p.b[0]);
    for (std::size_t t = 0; t < n; ++t) mean[t] += prev[t];
    for (std::size_t l = 1; l < L; ++l) {
        for (std::size_t t = 0; t < n; ++t) {
            const double s = t ? (prev[t - 1] + prev[t]) / 2.0 : prev[t];
            cur[t] = std::tanh(p.w[l] * s + p.b[l]);
        }
        for (std::size_t t = 0; t < n; ++t) mean[t] += cur[t];
        prev = cur;
    }
    const auto got = gn::encode_history(v, ops, p, 1).h_tilde;
    for (std::size_t t = 0; t < n; ++t) EXPECT_NEAR(got[t], mean[t] / L, 1e-12);
}

TEST(EncodeHistory, Errors) {
    auto ops = chain_ops(3);
    std::vector<double> short_v{1, 2};
    EXPECT_EQ(code_of([&] { gn::encode_history(short_v, ops, gn::EncoderParams::zeros(2), 1); }),
              gn::ErrorCode::DimensionMismatch);
    gn::EncoderParams bad{{1.0, std::numeric_limits<double>::infinity()}, {0.0, 0.0}};
    std::vector<double> v{1, 2, 3};
    EXPECT_EQ(code_of([&] { gn::encode_history(v, ops, bad, 1); }), gn::ErrorCode::NonFiniteParameter);
}

TEST(EncodeHistoryBatch, MatchesSingleCalls) {
    std::mt19937_64 rng(25);
    const std::size_t n = 80, L = 4, m = 9;
    auto ops = gn::lagged_operators(gn::build_dag(n, oracle::random_dag_edges(rng, n, 0.06)));
    Eigen::MatrixXd V(n, m);
    std::vector<gn::EncoderParams> params;
    for (std::size_t j = 0; j < m; ++j) {
        const auto v = random_vector(rng, n);
        for (std::size_t i = 0; i < n; ++i) V(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = v[i];
        params.push_back(random_params(rng, L));
    }
    params[3] = params[2];
    V.col(3) = V.col(2);
    for (std::size_t hops : {1u, 2u}) {
        const Eigen::MatrixXd out = gn::encode_history_batch(V, ops, params, hops);
        for (std::size_t j = 0; j < m; ++j) {
            const auto col = V.col(static_cast<Eigen::Index>(j));
            const auto single =
                gn::encode_history(std::span<const double>(col.data(), n), ops, params[j], hops).h_tilde;
            for (std::size_t i = 0; i < n; ++i) {
                EXPECT_LE(std::abs(out(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) - single[i]),
                          1e-12);
            }
        }
        EXPECT_EQ(out.col(2), out.col(3));
    }
}

TEST(Predict, ZeroModel) {
    auto ops = chain_ops(4);
    std::vector<double> x{1, 2, 3, 4}, y{4, 3, 2, 1};
    for (double p : gn::predict_full(x, y, ops, gn::PairModel::zeros(2))) EXPECT_EQ(p, 0.0);
    for (double p : gn::predict_full(x, y, ops, gn::PairModel::zeros(2, 1, gn::Link::exponential))) EXPECT_EQ(p, 1.0);
    for (double p : gn::predict_reduced(y, ops, gn::PairModel::zeros(2))) EXPECT_EQ(p, 0.0);
}

TEST(Predict, StructuralIdentities) {
    std::mt19937_64 rng(26);
    const std::size_t n = 40, L = 3;
    auto ops = gn::lagged_operators(gn::build_dag(n, oracle::random_dag_edges(rng, n, 0.1)));
    auto x = random_vector(rng, n), y = random_vector(rng, n);
    gn::PairModel m = gn::PairModel::zeros(L);
    m.x_full = random_params(rng, L);
    m.y_full = random_params(rng, L);
    m.y_reduced = m.y_full;
    m.c = 0.0;
    for (auto link : {gn::Link::identity, gn::Link::exponential}) {
        m.link = link;
        const auto full = gn::predict_full(x, y, ops, m);
        EXPECT_EQ(full, gn::predict_reduced(y, ops, m));
        const auto hy = gn::encode_history(y, ops, m.y_full, 1).h_tilde;
        for (std::size_t i = 0; i < n; ++i) EXPECT_EQ(full[i], gn::apply_link(link, hy[i]));
    }
    m.link = gn::Link::identity;
    m.c = 0.7;
    const auto reduced = gn::predict_reduced(y, ops, m);
    auto x2 = x;
    for (auto& v : x2) v += 1.0;
    EXPECT_EQ(gn::predict_reduced(y, ops, m), reduced);
    EXPECT_NE(gn::predict_full(x2, y, ops, m), gn::predict_full(x, y, ops, m));
}

TEST(PairModelLayout, FlattenAssignRoundTrip) {
    std::mt19937_64 rng(27);
    gn::PairModel m = gn::PairModel::zeros(3);
    m.x_full = random_params(rng, 3);
    m.y_full = random_params(rng, 3);
    m.y_reduced = random_params(rng, 3);
    m.c = -0.25;
    const auto flat = m.flatten();
    ASSERT_EQ(flat.size(), m.n_parameters());
    EXPECT_EQ(flat.size(), 19u);
    EXPECT_EQ(flat[0], m.x_full.w[0]);
    EXPECT_EQ(flat[3], m.x_full.b[0]);
    EXPECT_EQ(flat[6], m.y_full.w[0]);
    EXPECT_EQ(flat[12], m.y_reduced.w[0]);
    EXPECT_EQ(flat[18], m.c);
    gn::PairModel back = gn::PairModel::zeros(3);
    back.assign(flat);
    EXPECT_EQ(back.flatten(), flat);
}

TEST(PairModelLayout, Validation) {
    gn::PairModel m = gn::PairModel::zeros(2);
    EXPECT_NO_THROW(gn::validate(m));
    m.lag_hops = 3;
    EXPECT_ANY_THROW(gn::validate(m));
    m.lag_hops = 1;
    m.y_reduced = gn::EncoderParams::zeros(3);
    EXPECT_ANY_THROW(gn::validate(m));
    m = gn::PairModel::zeros(2);
    m.c = std::nan("");
    EXPECT_EQ(code_of([&] { gn::validate(m); }), gn::ErrorCode::NonFiniteParameter);
}
