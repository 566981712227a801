#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <vector>

#include <Eigen/Dense>

namespace grangernet {

using NodeId = std::uint32_t;

struct Edge {
    NodeId src = 0;
    NodeId dst = 0;

    friend auto operator<=>(const Edge&, const Edge&) = default;
};

/**
 * Directed acyclic graph over observations.
 *
 * Nodes are the integers [0, size()). An edge u -> v places u in the
 * causal past of v. Construction rejects self-loops, duplicate edges,
 * out-of-range ids and cycles, so any Dag instance is valid.
 */
class Dag {
public:
    Dag() = default;

    std::size_t size() const noexcept { return in_degree_.size(); }
    std::span<const Edge> edges() const noexcept { return edges_; }
    std::span<const std::size_t> in_degree() const noexcept { return in_degree_; }

    /// Parents of `v`, in ascending id order.
    std::span<const NodeId> parents(NodeId v) const;
    /// Children of `v`, in ascending id order.
    std::span<const NodeId> children(NodeId v) const;

    /// A topological order (Kahn's algorithm, smallest ready id first).
    std::span<const NodeId> topological_order() const noexcept { return topo_; }

    std::size_t n_roots() const;
    std::size_t max_in_degree() const;

private:
    friend Dag build_dag(std::size_t n_nodes, std::span<const Edge> edges);

    std::vector<Edge> edges_;
    std::vector<std::size_t> in_degree_;
    std::vector<std::size_t> parent_ptr_;
    std::vector<NodeId> parent_idx_;
    std::vector<std::size_t> child_ptr_;
    std::vector<NodeId> child_idx_;
    std::vector<NodeId> topo_;
};

/// Validates the edge list and builds a Dag. Throws Error with CycleDetected,
/// SelfLoop, DuplicateEdge or NodeIdOutOfRange.
Dag build_dag(std::size_t n_nodes, std::span<const Edge> edges);

/**
 * Square sparse matrix in compressed sparse column layout.
 *
 * Row indices within a column are stored ascending and every product
 * accumulates nonzeros in that stored order, so results do not depend on
 * how callers batch or parallelize.
 */
class SparseColumnMatrix {
public:
    SparseColumnMatrix() = default;
    SparseColumnMatrix(std::size_t n, std::vector<std::size_t> col_ptr, std::vector<NodeId> row_idx,
                       std::vector<double> values);

    std::size_t size() const noexcept { return n_; }
    std::size_t nonzeros() const noexcept { return values_.size(); }

    std::span<const NodeId> column_rows(std::size_t j) const;
    std::span<const double> column_values(std::size_t j) const;

    /// Entry (i, j); zero when not stored.
    double at(std::size_t i, std::size_t j) const;
    double column_sum(std::size_t j) const;

    /// out = M^T v. `out` must not alias `v`.
    void transpose_apply(std::span<const double> v, std::span<double> out) const;
    /// out = M v. `out` must not alias `v`.
    void apply(std::span<const double> v, std::span<double> out) const;

private:
    std::size_t n_ = 0;
    std::vector<std::size_t> col_ptr_{0};
    std::vector<NodeId> row_idx_;
    std::vector<double> values_;
};

/**
 * The two propagation operators derived from a Dag.
 *
 * a:      a(i, j) = 1 / d_j for each edge i -> j, d_j the in-degree of j.
 *         Columns of roots are empty. Diagonal is zero.
 * a_plus: same pattern plus the diagonal, every entry of column j equal to
 *         1 / (d_j + 1). Every column sums to one.
 *
 * Immutable after construction; safe to share across threads.
 */
struct LaggedOperators {
    SparseColumnMatrix a;
    SparseColumnMatrix a_plus;

    std::size_t size() const noexcept { return a.size(); }
};

LaggedOperators lagged_operators(const Dag& dag);

/// Returns M^T v. Throws DimensionMismatch.
std::vector<double> transpose_apply(const SparseColumnMatrix& m, std::span<const double> v);

/// Column-wise M^T V; column j is bit-identical to transpose_apply(M, V.col(j)).
Eigen::MatrixXd transpose_apply_batch(const SparseColumnMatrix& m, const Eigen::MatrixXd& v);

/// Reads a `src<TAB>dst` edge list. Lines starting with '#' and blank lines are
/// skipped, except a `# n_nodes=N` header which fixes the node count so that
/// trailing isolated nodes survive a round trip. Otherwise the count is max id + 1.
struct EdgeList {
    std::vector<Edge> edges;
    std::size_t inferred_nodes = 0;
};
EdgeList read_edge_list(const std::filesystem::path& path);
void write_edge_list(const std::filesystem::path& path, std::span<const Edge> edges,
                     std::optional<std::size_t> n_nodes = std::nullopt);

}  // namespace grangernet
