// Finite-difference gradient check shared by the unit tests and the
// acceptance binary.
#pragma once

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include <boost/multiprecision/cpp_bin_float.hpp>

#include "grangernet/graph.hpp"
#include "grangernet/model.hpp"
#include "oracles.hpp"

namespace gradcheck {

namespace gn = grangernet;
using Big = boost::multiprecision::cpp_bin_float_50;

struct Instance {
    std::size_t n = 0;
    std::vector<gn::Edge> edges;
    gn::LaggedOperators ops;
    std::vector<double> x, y;
    gn::PairModel model;
};

inline Instance random_instance(std::mt19937_64& rng, std::size_t L, std::size_t hops, gn::Link link) {
    std::normal_distribution<double> z;
    std::uniform_real_distribution<double> u(-1.2, 1.2);
    Instance s;
    s.n = 3 + rng() % 48;
    s.edges = oracle::random_dag_edges(rng, s.n, 0.15);
    s.ops = gn::lagged_operators(gn::build_dag(s.n, s.edges));
    s.x.resize(s.n);
    s.y.resize(s.n);
    for (auto& v : s.x) v = z(rng);
    for (auto& v : s.y) v = link == gn::Link::exponential ? std::exp(0.5 * z(rng)) : z(rng);
    s.model = gn::PairModel::zeros(L, hops, link);
    auto flat = s.model.flatten();
    for (auto& v : flat) v = u(rng);
    s.model.assign(flat);
    return s;
}

inline Big oracle_loss(const Instance& s, const std::vector<Big>& theta) {
    const auto g = oracle::from_edges(s.n, s.edges);
    return oracle::total_loss<Big>(g, std::vector<Big>(s.x.begin(), s.x.end()),
                                   std::vector<Big>(s.y.begin(), s.y.end()), theta, s.model.layers(),
                                   s.model.lag_hops, s.model.link == gn::Link::exponential);
}

// Central differences of the 50-digit oracle loss.
inline std::vector<double> fd_gradient(const Instance& s) {
    const auto flat = s.model.flatten();
    std::vector<Big> theta(flat.begin(), flat.end());
    std::vector<double> out(flat.size());
    const Big h("1e-6");
    for (std::size_t i = 0; i < flat.size(); ++i) {
        auto up = theta, down = theta;
        up[i] += h;
        down[i] -= h;
        out[i] = static_cast<double>((oracle_loss(s, up) - oracle_loss(s, down)) / (2 * h));
    }
    return out;
}

inline double max_rel_error(const std::vector<double>& analytic, const std::vector<double>& numeric) {
    double worst = 0.0;
    for (std::size_t i = 0; i < analytic.size(); ++i) {
        worst = std::max(worst, std::abs(analytic[i] - numeric[i]) / std::max(std::abs(analytic[i]), 1e-8));
    }
    return worst;
}

}  // namespace gradcheck
