#pragma once

#include <cstddef>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "grangernet/graph.hpp"

namespace grangernet {

/// Dense node-by-variable matrix with one name per column.
struct NamedMatrix {
    Eigen::MatrixXd values;
    std::vector<std::string> names;

    std::size_t n_nodes() const { return static_cast<std::size_t>(values.rows()); }
    std::size_t n_vars() const { return static_cast<std::size_t>(values.cols()); }
    std::span<const double> column(std::size_t j) const {
        return {values.col(static_cast<Eigen::Index>(j)).data(), n_nodes()};
    }
};

struct Embedding {
    Eigen::MatrixXd coords;  // n_nodes x d
    std::vector<double> pseudotime;
};

/// ln(1 + CPM / divisor) per entry, CPM taken over each row (node). Rows with
/// zero total map to zeros. Throws NonFiniteInput on negative or non-finite
/// counts and InvalidArgument on a non-positive divisor.
Eigen::MatrixXd log_cpm(const Eigen::MatrixXd& counts, double divisor);

/// Divides each column by its maximum; all-zero columns are left alone.
Eigen::MatrixXd max_scale(const Eigen::MatrixXd& values);

/// A directed kNN edge carrying the Euclidean distance between its endpoints.
struct KnnEdge {
    NodeId src = 0;
    NodeId dst = 0;
    double distance = 0.0;
};

/**
 * Exact Euclidean k-nearest-neighbour graph by brute force.
 *
 * Emits u -> v for each of the k nearest v != u, nearest first, distance
 * ties going to the lower id. Queries are split across `workers` threads;
 * the output does not depend on the worker count. Throws KTooLarge when
 * k >= n.
 */
std::vector<KnnEdge> knn_graph(const Eigen::MatrixXd& coords, std::size_t k, std::size_t workers = 1);

/// Undirected view of a kNN graph: u -> v and v -> u for every kNN edge,
/// sorted and without duplicates.
std::vector<Edge> symmetrize(std::span<const KnnEdge> edges);

/// Keeps u -> v iff pseudotime[u] < pseudotime[v] and builds the Dag from
/// the kept edges (sorted). Ties in pseudotime drop the edge.
Dag orient_by_pseudotime(std::size_t n_nodes, std::span<const KnnEdge> edges,
                         std::span<const double> pseudotime);
Dag orient_by_pseudotime(std::size_t n_nodes, std::span<const Edge> edges,
                         std::span<const double> pseudotime);

// Text formats. Dense matrices have one header row of variable names and one
// row per node, whitespace or comma separated. MatrixMarket coordinate files
// (rows = nodes) are detected by their banner and get names var0, var1, ...
NamedMatrix read_matrix(const std::filesystem::path& path);
void write_matrix(const std::filesystem::path& path, const NamedMatrix& m);
std::vector<double> read_vector(const std::filesystem::path& path);
void write_vector(const std::filesystem::path& path, std::span<const double> v);

}  // namespace grangernet
