#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <random>
#include <vector>

#include <Eigen/Dense>

#include "grangernet/dataset.hpp"
#include "grangernet/graph.hpp"

namespace grangernet {

enum class Nonlinearity { linear, tanh, quadratic };

/// Parameters of a synthetic branching system with planted causal pairs.
struct SynthSpec {
    std::size_t n_nodes = 2000;
    std::size_t n_branches = 3;
    /// Number of layers from root to leaf.
    std::size_t depth = 40;
    /// Neighbours per node in the embedding kNN graph.
    std::size_t k_neighbors = 15;
    std::size_t n_x_vars = 200;
    std::size_t n_y_vars = 50;
    std::size_t n_causal_pairs = 50;
    std::size_t n_candidate_pairs = 1000;
    std::size_t lag_steps = 1;
    double coupling = 1.0;
    double noise_sd = 0.3;
    Nonlinearity nonlinearity = Nonlinearity::tanh;
    /// Probability that an observed entry is zeroed.
    double dropout_rate = 0.0;
    /// Each node draws between 1 and max_parents parents ...
    std::size_t max_parents = 2;
    /// ... from this many preceding layers of its lineage.
    std::size_t parent_layers = 2;
    /// Weight of a target's own parent-mean history in its noise process.
    double y_autoregression = 0.5;
    std::uint64_t seed = 0;

    void validate() const;
};

struct BranchingDag {
    Dag dag;
    std::vector<double> pseudotime;
    Eigen::MatrixXd embedding;  // n_nodes x 2
    std::vector<std::size_t> depth;
    std::vector<std::size_t> lineage;  // 0 = trunk, b + 1 = branch b
};

/**
 * Layered random DAG. With more than one branch the first third of the
 * layers form a shared trunk and the rest split into `n_branches` lineages.
 * Each node draws its parents from the preceding `parent_layers` layers of
 * its lineage. Pseudotime is depth plus a jitter in [0, 0.9), so every edge
 * points forward in pseudotime. The 2-d embedding lays each lineage along
 * its own direction.
 */
BranchingDag generate_branching_dag(const SynthSpec& spec, std::mt19937_64& rng);

struct SimulatedValues {
    Eigen::MatrixXd x;  // n_nodes x n_x_vars
    Eigen::MatrixXd y;  // n_nodes x n_y_vars
};

/**
 * x_j[v] = mean of x_j over parents + N(0, noise_sd^2); roots draw N(0, 1).
 * y_i[v] = coupling * sum over causes j of f((A^T)^lag x_j)[v] + e_i[v], with
 * e_i[v] = y_autoregression * mean of e_i over parents + N(0, noise_sd^2).
 * Finally each entry is zeroed with probability dropout_rate.
 */
SimulatedValues simulate_pair_values(const Dag& dag, std::span<const CandidatePair> truth, const SynthSpec& spec,
                                     std::mt19937_64& rng);

struct SynthDataset {
    Dataset data;
    Dag dag;
    std::vector<double> pseudotime;
    Eigen::MatrixXd embedding;
    std::vector<CandidatePair> truth;
    /// Per candidate pair id: 1 if planted.
    std::vector<std::uint8_t> is_causal;
};

/// Full scenario: DAG, values, planted pairs and the candidate set. Every
/// target gets an equal share of candidates, its planted causes included.
SynthDataset generate_synthetic(const SynthSpec& spec);

/// Writes x.tsv, y.tsv, edges.tsv, pseudotime.txt, embedding.tsv, pairs.tsv,
/// truth.tsv and reference.tsv (value 0 for planted pairs, 1 otherwise).
void write_synthetic(const std::filesystem::path& dir, const SynthDataset& s);

}  // namespace grangernet
