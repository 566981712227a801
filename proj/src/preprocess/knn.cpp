#include <algorithm>
#include <cmath>
#include <string>

#include "grangernet/error.hpp"
#include "grangernet/parallel.hpp"
#include "grangernet/preprocess.hpp"

namespace grangernet {

std::vector<KnnEdge> knn_graph(const Eigen::MatrixXd& coords, std::size_t k, std::size_t workers) {
    const auto n = static_cast<std::size_t>(coords.rows());
    if (k >= n) {
        throw Error(ErrorCode::KTooLarge, "k=" + std::to_string(k) + " with " + std::to_string(n) + " nodes");
    }
    // Row-major copy so each point is contiguous.
    const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> points = coords;
    const auto dim = static_cast<std::size_t>(coords.cols());

    std::vector<KnnEdge> edges(n * k);
    parallel_for(n, workers, [&](std::size_t begin, std::size_t end) {
        std::vector<std::pair<double, NodeId>> candidates(n - 1);
        for (std::size_t u = begin; u < end; ++u) {
            const double* pu = points.row(static_cast<Eigen::Index>(u)).data();
            std::size_t c = 0;
            for (std::size_t v = 0; v < n; ++v) {
                if (v == u) continue;
                const double* pv = points.row(static_cast<Eigen::Index>(v)).data();
                double d2 = 0.0;
                for (std::size_t t = 0; t < dim; ++t) {
                    const double diff = pu[t] - pv[t];
                    d2 += diff * diff;
                }
                candidates[c++] = {d2, static_cast<NodeId>(v)};
            }
            std::partial_sort(candidates.begin(), candidates.begin() + static_cast<std::ptrdiff_t>(k),
                              candidates.end());
            for (std::size_t r = 0; r < k; ++r) {
                edges[u * k + r] = {static_cast<NodeId>(u), candidates[r].second, std::sqrt(candidates[r].first)};
            }
        }
    });
    return edges;
}

namespace {

Dag orient(std::size_t n_nodes, std::vector<Edge> candidates, std::span<const double> pseudotime) {
    if (pseudotime.size() != n_nodes) {
        throw Error(ErrorCode::DimensionMismatch, "pseudotime has " + std::to_string(pseudotime.size()) +
                                                      " entries for " + std::to_string(n_nodes) + " nodes");
    }
    for (double t : pseudotime) {
        if (!std::isfinite(t)) throw Error(ErrorCode::NonFiniteInput, "pseudotime contains a non-finite value");
    }
    std::vector<Edge> kept;
    for (const auto& e : candidates) {
        if (e.src >= n_nodes || e.dst >= n_nodes) {
            throw Error(ErrorCode::NodeIdOutOfRange, "edge endpoint beyond " + std::to_string(n_nodes) + " nodes");
        }
        if (pseudotime[e.src] < pseudotime[e.dst]) kept.push_back(e);
    }
    std::sort(kept.begin(), kept.end());
    return build_dag(n_nodes, kept);
}

}  // namespace

std::vector<Edge> symmetrize(std::span<const KnnEdge> edges) {
    std::vector<Edge> out;
    out.reserve(2 * edges.size());
    for (const auto& e : edges) {
        out.push_back({e.src, e.dst});
        out.push_back({e.dst, e.src});
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

Dag orient_by_pseudotime(std::size_t n_nodes, std::span<const KnnEdge> edges,
                         std::span<const double> pseudotime) {
    std::vector<Edge> plain;
    plain.reserve(edges.size());
    for (const auto& e : edges) plain.push_back({e.src, e.dst});
    return orient(n_nodes, std::move(plain), pseudotime);
}

Dag orient_by_pseudotime(std::size_t n_nodes, std::span<const Edge> edges,
                         std::span<const double> pseudotime) {
    return orient(n_nodes, {edges.begin(), edges.end()}, pseudotime);
}

}  // namespace grangernet
