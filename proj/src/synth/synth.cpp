#include "grangernet/synth.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <set>
#include <string>

#include "grangernet/error.hpp"
#include "grangernet/preprocess.hpp"

namespace grangernet {

void SynthSpec::validate() const {
    auto fail = [](const std::string& what) { throw Error(ErrorCode::ConfigError, "synth: " + what); };
    if (n_branches < 1) fail("n_branches must be >= 1");
    if (depth < 1) fail("depth must be >= 1");
    if (lag_steps < 1) fail("lag_steps must be >= 1");
    if (max_parents < 1 || parent_layers < 1) fail("max_parents and parent_layers must be >= 1");
    if (n_x_vars < 1 || n_y_vars < 1) fail("need at least one x and one y variable");
    if (n_causal_pairs > n_x_vars * n_y_vars) fail("n_causal_pairs exceeds n_x_vars * n_y_vars");
    if (n_candidate_pairs < n_causal_pairs || n_candidate_pairs > n_x_vars * n_y_vars) {
        fail("n_candidate_pairs must lie in [n_causal_pairs, n_x_vars * n_y_vars]");
    }
    if (!(dropout_rate >= 0.0 && dropout_rate < 1.0)) fail("dropout_rate must lie in [0, 1)");
    if (!(noise_sd >= 0.0)) fail("noise_sd must be >= 0");
    const std::size_t trunk = n_branches > 1 ? std::max<std::size_t>(1, depth / 3) : depth;
    const std::size_t slots = trunk + n_branches * (depth - trunk);
    if (n_branches > 1 && depth < 2) fail("branching needs depth >= 2");
    if (n_nodes < slots) fail("n_nodes must be at least the number of layer slots (" + std::to_string(slots) + ")");
}

BranchingDag generate_branching_dag(const SynthSpec& spec, std::mt19937_64& rng) {
    spec.validate();
    const std::size_t trunk = spec.n_branches > 1 ? std::max<std::size_t>(1, spec.depth / 3) : spec.depth;
    const std::size_t branch_layers = spec.depth - trunk;
    const std::size_t slots = trunk + spec.n_branches * branch_layers;

    // slot s -> (lineage, depth); nodes are numbered slot by slot.
    std::vector<std::vector<NodeId>> slot_nodes(slots);
    auto slot_of = [&](std::size_t lineage, std::size_t d) {
        return d < trunk ? d : trunk + (lineage - 1) * branch_layers + (d - trunk);
    };
    BranchingDag out;
    out.depth.resize(spec.n_nodes);
    out.lineage.resize(spec.n_nodes);
    NodeId next = 0;
    for (std::size_t s = 0; s < slots; ++s) {
        const std::size_t count = spec.n_nodes / slots + (s < spec.n_nodes % slots ? 1 : 0);
        const std::size_t lineage = s < trunk ? 0 : 1 + (s - trunk) / branch_layers;
        const std::size_t d = s < trunk ? s : trunk + (s - trunk) % branch_layers;
        for (std::size_t c = 0; c < count; ++c) {
            slot_nodes[s].push_back(next);
            out.depth[next] = d;
            out.lineage[next] = lineage;
            ++next;
        }
    }

    std::vector<Edge> edges;
    std::uniform_int_distribution<std::size_t> n_parents_dist(1, spec.max_parents);
    std::vector<NodeId> pool;
    for (NodeId v = 0; v < spec.n_nodes; ++v) {
        const std::size_t d = out.depth[v];
        if (d == 0) continue;
        pool.clear();
        for (std::size_t back = 1; back <= spec.parent_layers && back <= d; ++back) {
            const auto& layer = slot_nodes[slot_of(out.lineage[v], d - back)];
            pool.insert(pool.end(), layer.begin(), layer.end());
        }
        const std::size_t k = std::min(n_parents_dist(rng), pool.size());
        // Partial Fisher-Yates draw without replacement.
        for (std::size_t i = 0; i < k; ++i) {
            std::uniform_int_distribution<std::size_t> pick(i, pool.size() - 1);
            std::swap(pool[i], pool[pick(rng)]);
            edges.push_back({pool[i], v});
        }
    }
    std::sort(edges.begin(), edges.end());
    out.dag = build_dag(spec.n_nodes, edges);

    std::uniform_real_distribution<double> jitter(0.0, 0.9);
    std::normal_distribution<double> spread(0.0, 0.5);
    out.pseudotime.resize(spec.n_nodes);
    out.embedding.resize(static_cast<Eigen::Index>(spec.n_nodes), 2);
    for (NodeId v = 0; v < spec.n_nodes; ++v) {
        const double t = static_cast<double>(out.depth[v]) + jitter(rng);
        out.pseudotime[v] = t;
        double px = t, py = 0.0;
        if (out.lineage[v] > 0) {
            const double angle = spec.n_branches > 1
                                     ? (-0.4 + 0.8 * static_cast<double>(out.lineage[v] - 1) /
                                                   static_cast<double>(spec.n_branches - 1)) * std::numbers::pi
                                     : 0.0;
            const double along = t - static_cast<double>(trunk);
            px = static_cast<double>(trunk) + along * std::cos(angle);
            py = along * std::sin(angle);
        }
        const auto row = static_cast<Eigen::Index>(v);
        out.embedding(row, 0) = px + spread(rng);
        out.embedding(row, 1) = py + spread(rng);
    }
    return out;
}

SimulatedValues simulate_pair_values(const Dag& dag, std::span<const CandidatePair> truth, const SynthSpec& spec,
                                     std::mt19937_64& rng) {
    const std::size_t n = dag.size();
    const auto ops = lagged_operators(dag);
    std::normal_distribution<double> standard(0.0, 1.0);
    auto noise = [&] { return spec.noise_sd * standard(rng); };

    auto parent_mean = [&](std::span<const double> v, NodeId node) {
        auto parents = dag.parents(node);
        double s = 0.0;
        for (NodeId p : parents) s += v[p];
        return s / static_cast<double>(parents.size());
    };

    SimulatedValues out;
    out.x.resize(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(spec.n_x_vars));
    out.y.resize(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(spec.n_y_vars));
    const auto order = dag.topological_order();

    for (std::size_t j = 0; j < spec.n_x_vars; ++j) {
        std::span<double> col(out.x.col(static_cast<Eigen::Index>(j)).data(), n);
        for (NodeId v : order) col[v] = dag.in_degree()[v] == 0 ? standard(rng) : parent_mean(col, v) + noise();
    }

    auto mechanism = [&](double z) {
        switch (spec.nonlinearity) {
            case Nonlinearity::linear: return z;
            case Nonlinearity::tanh: return std::tanh(z);
            case Nonlinearity::quadratic: return z * z;
        }
        return z;
    };

    std::vector<double> lagged(n), scratch(n);
    for (std::size_t i = 0; i < spec.n_y_vars; ++i) {
        std::span<double> col(out.y.col(static_cast<Eigen::Index>(i)).data(), n);
        for (NodeId v : order) {
            col[v] = dag.in_degree()[v] == 0 ? noise() : spec.y_autoregression * parent_mean(col, v) + noise();
        }
        for (const auto& pair : truth) {
            if (pair.y != i) continue;
            std::span<const double> x(out.x.col(static_cast<Eigen::Index>(pair.x)).data(), n);
            std::copy(x.begin(), x.end(), lagged.begin());
            for (std::size_t step = 0; step < spec.lag_steps; ++step) {
                ops.a.transpose_apply(lagged, scratch);
                std::swap(lagged, scratch);
            }
            for (std::size_t v = 0; v < n; ++v) col[v] += spec.coupling * mechanism(lagged[v]);
        }
    }

    if (spec.dropout_rate > 0.0) {
        std::bernoulli_distribution drop(spec.dropout_rate);
        for (auto* m : {&out.x, &out.y}) {
            for (Eigen::Index j = 0; j < m->cols(); ++j) {
                for (Eigen::Index v = 0; v < m->rows(); ++v) {
                    if (drop(rng)) (*m)(v, j) = 0.0;
                }
            }
        }
    }
    return out;
}

SynthDataset generate_synthetic(const SynthSpec& spec) {
    spec.validate();
    std::mt19937_64 rng(spec.seed);
    auto graph = generate_branching_dag(spec, rng);

    // Planted pairs: targets in round-robin order, causes drawn uniformly.
    std::set<std::pair<std::size_t, std::size_t>> planted;  // (y, x)
    std::uniform_int_distribution<std::size_t> pick_x(0, spec.n_x_vars - 1);
    for (std::size_t k = 0; k < spec.n_causal_pairs; ++k) {
        const std::size_t yi = k % spec.n_y_vars;
        std::size_t xi = pick_x(rng);
        while (planted.count({yi, xi})) xi = pick_x(rng);
        planted.insert({yi, xi});
    }

    // Candidates: an equal share per target, planted causes first, then random fill.
    std::set<std::pair<std::size_t, std::size_t>> candidates(planted);
    std::vector<std::size_t> quota(spec.n_y_vars, spec.n_candidate_pairs / spec.n_y_vars);
    for (std::size_t i = 0; i < spec.n_candidate_pairs % spec.n_y_vars; ++i) ++quota[i];
    for (std::size_t yi = 0; yi < spec.n_y_vars; ++yi) {
        std::size_t have = 0;
        for (const auto& [py, px] : planted) have += py == yi;
        const std::size_t want = std::min(std::max(quota[yi], have), spec.n_x_vars);
        while (have < want) {
            if (candidates.insert({yi, pick_x(rng)}).second) ++have;
        }
    }

    SynthDataset out;
    for (const auto& [yi, xi] : candidates) {
        out.data.pairs.push_back({xi, yi});
        out.is_causal.push_back(planted.count({yi, xi}) ? 1 : 0);
    }
    for (const auto& [yi, xi] : planted) out.truth.push_back({xi, yi});

    auto values = simulate_pair_values(graph.dag, out.truth, spec, rng);
    out.data.x.values = std::move(values.x);
    out.data.y.values = std::move(values.y);
    for (std::size_t j = 0; j < spec.n_x_vars; ++j) out.data.x.names.push_back("x" + std::to_string(j));
    for (std::size_t i = 0; i < spec.n_y_vars; ++i) out.data.y.names.push_back("y" + std::to_string(i));
    out.dag = std::move(graph.dag);
    out.pseudotime = std::move(graph.pseudotime);
    out.embedding = std::move(graph.embedding);
    return out;
}

void write_synthetic(const std::filesystem::path& dir, const SynthDataset& s) {
    std::filesystem::create_directories(dir);
    write_matrix(dir / "x.tsv", s.data.x);
    write_matrix(dir / "y.tsv", s.data.y);
    write_edge_list(dir / "edges.tsv", s.dag.edges(), s.dag.size());
    write_vector(dir / "pseudotime.txt", s.pseudotime);
    write_matrix(dir / "embedding.tsv", {s.embedding, {"dim0", "dim1"}});
    write_pairs(dir / "pairs.tsv", s.data);

    std::ofstream truth(dir / "truth.tsv");
    for (const auto& p : s.truth) truth << s.data.x.names[p.x] << '\t' << s.data.y.names[p.y] << '\n';
    std::ofstream reference(dir / "reference.tsv");
    for (std::size_t p = 0; p < s.data.pairs.size(); ++p) {
        reference << s.data.x_name(p) << '\t' << s.data.y_name(p) << '\t' << (s.is_causal[p] ? 0 : 1) << '\n';
    }
    if (!truth || !reference) throw Error(ErrorCode::ParseError, "cannot write synthetic bundle to " + dir.string());
}

}  // namespace grangernet
