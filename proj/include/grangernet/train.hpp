#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "grangernet/dataset.hpp"
#include "grangernet/graph.hpp"
#include "grangernet/model.hpp"

namespace grangernet {

/// Squared-error terms of both predictors for one pair.
struct LossReport {
    std::vector<double> per_node_full;
    std::vector<double> per_node_reduced;
    double rss_full = 0.0;
    double rss_reduced = 0.0;

    double total() const noexcept { return rss_full + rss_reduced; }
};

/// Same layout as PairModel: one EncoderParams per encoder plus dL/dc.
struct Gradients {
    EncoderParams x_full;
    EncoderParams y_full;
    EncoderParams y_reduced;
    double c = 0.0;

    std::vector<double> flatten() const;
};

/// Which terms of the combined loss a training run minimizes. `joint` is the
/// normal mode; the other two exist to check that joint training decouples.
enum class Objective { joint, full_only, reduced_only };

/// Throws NonFinitePrediction when a prediction overflows.
LossReport pair_loss(std::span<const double> x, std::span<const double> y, const LaggedOperators& ops,
                     const PairModel& m);

/// Exact gradient of rss_full + rss_reduced with respect to all 6L+1
/// parameters by reverse accumulation through the encoder layers.
/// Throws NonFinitePrediction or NonFiniteGradient.
Gradients pair_gradients(std::span<const double> x, std::span<const double> y, const LaggedOperators& ops,
                         const PairModel& m);

/// Loss and gradient in one pass. With a non-joint objective the gradient of
/// the excluded predictor's parameters is zero.
struct PairEvaluation {
    LossReport loss;
    Gradients grad;
};
PairEvaluation evaluate_pair(std::span<const double> x, std::span<const double> y, const LaggedOperators& ops,
                             const PairModel& m, Objective objective = Objective::joint);

struct AdamOptions {
    double beta1 = 0.9;
    double beta2 = 0.999;
    double epsilon = 1e-8;
};

struct AdamState {
    std::vector<double> m;
    std::vector<double> v;
    std::uint64_t step = 0;
};

/// One bias-corrected Adam update in place. `state` is sized on first use.
void adam_step(std::span<double> params, std::span<const double> grads, AdamState& state, double learning_rate,
               const AdamOptions& options = {});

/// Glorot-uniform weights for scalar layers (bound sqrt(6 / (1 + 1))), zero
/// biases, c = 0. The reduced target encoder starts as a copy of the full
/// target encoder, so both predictors begin with identical losses.
PairModel glorot_init(std::size_t layers, std::mt19937_64& rng, std::size_t lag_hops = 1,
                      Link link = Link::identity);

struct TrainConfig {
    double learning_rate = 1e-3;
    std::size_t max_epochs = 20;
    std::size_t minibatch_pairs = 1024;
    std::size_t layers = 10;
    std::size_t lag_hops = 1;
    /// Stop once the relative change of the epoch loss drops below this / |P|.
    /// Zero disables the check.
    double convergence_numerator = 0.1;
    std::uint64_t seed = 0;
    Link link = Link::identity;
    Objective objective = Objective::joint;
    AdamOptions adam;

    void validate() const;
};

struct PairFit {
    std::size_t pair_id = 0;
    PairModel model;
    LossReport loss;
    std::uint64_t steps = 0;
    bool ok = true;
    std::string diagnostic;
};

struct TrainResult {
    std::vector<PairFit> fits;  // indexed by pair id, failed pairs have ok == false
    std::vector<double> epoch_losses;
    std::size_t epochs_run = 0;
    bool converged = false;
};

/**
 * Trains every candidate pair's full and reduced predictors.
 *
 * Each epoch shuffles the pairs (seeded) and walks them in minibatches;
 * pairs in a minibatch are split across `workers` threads. Pairs share no
 * parameters, so each pair's trajectory depends only on its own data, the
 * seed and the epoch count; the worker count never changes the result.
 * A pair whose prediction or gradient turns non-finite is marked failed and
 * dropped from further updates.
 */
TrainResult train_all(const Dataset& data, const LaggedOperators& ops, const TrainConfig& config,
                      std::size_t workers = 1);

/// JSON checkpoint of trained pairs; parameters use PairModel::flatten order.
void write_checkpoint(const std::filesystem::path& path, const Dataset& data, const TrainConfig& config,
                      const TrainResult& result);
struct Checkpoint {
    std::size_t layers = 0;
    std::size_t lag_hops = 1;
    Link link = Link::identity;
    struct Entry {
        std::size_t pair_id;
        std::string x_name;
        std::string y_name;
        std::uint64_t steps;
        PairModel model;
    };
    std::vector<Entry> entries;
};
Checkpoint read_checkpoint(const std::filesystem::path& path);

}  // namespace grangernet
