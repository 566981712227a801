#include "grangernet/graph.hpp"

#include <algorithm>
#include <queue>
#include <string>

#include "grangernet/error.hpp"

namespace grangernet {

namespace {

// Builds a compressed adjacency (offsets + ids) keyed by `key(e)`, storing `value(e)`.
template <typename Key, typename Value>
void compress(std::size_t n, std::span<const Edge> edges, Key key, Value value,
              std::vector<std::size_t>& ptr, std::vector<NodeId>& idx) {
    ptr.assign(n + 1, 0);
    for (const auto& e : edges) ++ptr[key(e) + 1];
    for (std::size_t i = 0; i < n; ++i) ptr[i + 1] += ptr[i];
    idx.resize(edges.size());
    std::vector<std::size_t> fill(ptr.begin(), ptr.end() - 1);
    for (const auto& e : edges) idx[fill[key(e)]++] = value(e);
    for (std::size_t i = 0; i < n; ++i) std::sort(idx.begin() + ptr[i], idx.begin() + ptr[i + 1]);
}

}  // namespace

std::span<const NodeId> Dag::parents(NodeId v) const {
    return {parent_idx_.data() + parent_ptr_[v], parent_ptr_[v + 1] - parent_ptr_[v]};
}

std::span<const NodeId> Dag::children(NodeId v) const {
    return {child_idx_.data() + child_ptr_[v], child_ptr_[v + 1] - child_ptr_[v]};
}

std::size_t Dag::n_roots() const {
    return static_cast<std::size_t>(std::count(in_degree_.begin(), in_degree_.end(), 0));
}

std::size_t Dag::max_in_degree() const {
    return in_degree_.empty() ? 0 : *std::max_element(in_degree_.begin(), in_degree_.end());
}

Dag build_dag(std::size_t n_nodes, std::span<const Edge> edges) {
    for (const auto& e : edges) {
        if (e.src >= n_nodes || e.dst >= n_nodes) {
            throw Error(ErrorCode::NodeIdOutOfRange, "edge " + std::to_string(e.src) + "->" +
                                                         std::to_string(e.dst) + " with " +
                                                         std::to_string(n_nodes) + " nodes");
        }
        if (e.src == e.dst) {
            throw Error(ErrorCode::SelfLoop, "node " + std::to_string(e.src));
        }
    }

    std::vector<Edge> sorted(edges.begin(), edges.end());
    std::sort(sorted.begin(), sorted.end());
    if (auto dup = std::adjacent_find(sorted.begin(), sorted.end()); dup != sorted.end()) {
        throw Error(ErrorCode::DuplicateEdge,
                    "edge " + std::to_string(dup->src) + "->" + std::to_string(dup->dst));
    }

    Dag dag;
    dag.edges_.assign(edges.begin(), edges.end());
    compress(n_nodes, edges, [](const Edge& e) { return e.dst; },
             [](const Edge& e) { return e.src; }, dag.parent_ptr_, dag.parent_idx_);
    compress(n_nodes, edges, [](const Edge& e) { return e.src; },
             [](const Edge& e) { return e.dst; }, dag.child_ptr_, dag.child_idx_);

    dag.in_degree_.resize(n_nodes);
    for (std::size_t v = 0; v < n_nodes; ++v) {
        dag.in_degree_[v] = dag.parent_ptr_[v + 1] - dag.parent_ptr_[v];
    }

    // Kahn's algorithm; a min-heap keeps the order deterministic.
    std::vector<std::size_t> remaining(dag.in_degree_);
    std::priority_queue<NodeId, std::vector<NodeId>, std::greater<>> ready;
    for (std::size_t v = 0; v < n_nodes; ++v) {
        if (remaining[v] == 0) ready.push(static_cast<NodeId>(v));
    }
    dag.topo_.reserve(n_nodes);
    while (!ready.empty()) {
        NodeId u = ready.top();
        ready.pop();
        dag.topo_.push_back(u);
        for (NodeId c : dag.children(u)) {
            if (--remaining[c] == 0) ready.push(c);
        }
    }
    if (dag.topo_.size() != n_nodes) {
        throw Error(ErrorCode::CycleDetected, std::to_string(n_nodes - dag.topo_.size()) +
                                                  " nodes lie on or downstream of a cycle");
    }
    return dag;
}

}  // namespace grangernet
