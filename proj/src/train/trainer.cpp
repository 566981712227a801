#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include <spdlog/spdlog.h>

#include "grangernet/error.hpp"
#include "grangernet/parallel.hpp"
#include "grangernet/train.hpp"

namespace grangernet {

void Dataset::validate() const {
    if (x.n_nodes() != y.n_nodes()) {
        throw Error(ErrorCode::DimensionMismatch, "x has " + std::to_string(x.n_nodes()) + " nodes, y has " +
                                                      std::to_string(y.n_nodes()));
    }
    if (x.names.size() != x.n_vars() || y.names.size() != y.n_vars()) {
        throw Error(ErrorCode::DimensionMismatch, "variable names do not match matrix columns");
    }
    for (std::size_t p = 0; p < pairs.size(); ++p) {
        if (pairs[p].x >= x.n_vars() || pairs[p].y >= y.n_vars()) {
            throw Error(ErrorCode::InvalidArgument, "pair " + std::to_string(p) + " references a missing column");
        }
    }
}

void TrainConfig::validate() const {
    if (!(learning_rate > 0.0)) throw Error(ErrorCode::ConfigError, "learning_rate must be > 0");
    if (minibatch_pairs < 1) throw Error(ErrorCode::ConfigError, "minibatch_pairs must be >= 1");
    if (layers < 1) throw Error(ErrorCode::ConfigError, "layers must be >= 1");
    if (lag_hops < 1 || lag_hops > layers) throw Error(ErrorCode::ConfigError, "lag_hops must lie in [1, layers]");
    if (!(convergence_numerator >= 0.0)) throw Error(ErrorCode::ConfigError, "convergence_numerator must be >= 0");
}

TrainResult train_all(const Dataset& data, const LaggedOperators& ops, const TrainConfig& config,
                      std::size_t workers) {
    config.validate();
    data.validate();
    if (data.n_nodes() != ops.size()) {
        throw Error(ErrorCode::DimensionMismatch, "dataset has " + std::to_string(data.n_nodes()) +
                                                      " nodes, graph has " + std::to_string(ops.size()));
    }

    const std::size_t n_pairs = data.pairs.size();
    std::mt19937_64 rng(config.seed);

    TrainResult result;
    result.fits.resize(n_pairs);
    for (std::size_t p = 0; p < n_pairs; ++p) {
        result.fits[p].pair_id = p;
        result.fits[p].model = glorot_init(config.layers, rng, config.lag_hops, config.link);
    }
    std::vector<AdamState> states(n_pairs);
    std::vector<double> epoch_terms(n_pairs, 0.0);

    auto fail = [&](std::size_t p, const std::string& what) {
        result.fits[p].ok = false;
        result.fits[p].diagnostic = what;
    };
    auto report_failures = [&](std::size_t already_failed) {
        std::size_t count = 0;
        for (const auto& fit : result.fits) {
            if (!fit.ok && ++count > already_failed) {
                spdlog::warn("pair {} ({} -> {}) dropped: {}", fit.pair_id, data.x_name(fit.pair_id),
                             data.y_name(fit.pair_id), fit.diagnostic);
            }
        }
        return count;
    };

    std::vector<std::size_t> order(n_pairs);
    std::iota(order.begin(), order.end(), 0);
    std::size_t n_failed = 0;
    const double tolerance = n_pairs ? config.convergence_numerator / static_cast<double>(n_pairs) : 0.0;

    for (std::size_t epoch = 0; epoch < config.max_epochs; ++epoch) {
        std::shuffle(order.begin(), order.end(), rng);
        for (std::size_t start = 0; start < n_pairs; start += config.minibatch_pairs) {
            const std::size_t stop = std::min(n_pairs, start + config.minibatch_pairs);
            parallel_for(stop - start, workers, [&](std::size_t begin, std::size_t end) {
                for (std::size_t k = start + begin; k < start + end; ++k) {
                    const std::size_t p = order[k];
                    auto& fit = result.fits[p];
                    if (!fit.ok) continue;
                    const auto& pair = data.pairs[p];
                    try {
                        auto eval = evaluate_pair(data.x.column(pair.x), data.y.column(pair.y), ops, fit.model,
                                                  config.objective);
                        epoch_terms[p] = config.objective == Objective::full_only      ? eval.loss.rss_full
                                         : config.objective == Objective::reduced_only ? eval.loss.rss_reduced
                                                                                       : eval.loss.total();
                        auto params = fit.model.flatten();
                        adam_step(params, eval.grad.flatten(), states[p], config.learning_rate, config.adam);
                        fit.model.assign(params);
                        fit.steps = states[p].step;
                    } catch (const Error& e) {
                        fail(p, e.what());
                    }
                }
            });
        }
        n_failed = report_failures(n_failed);

        double total = 0.0;
        for (std::size_t p = 0; p < n_pairs; ++p) {
            if (result.fits[p].ok) total += epoch_terms[p];
        }
        result.epoch_losses.push_back(total);
        result.epochs_run = epoch + 1;
        spdlog::debug("epoch {} loss {:.6g}", epoch + 1, total);

        if (epoch > 0 && tolerance > 0.0) {
            const double previous = result.epoch_losses[epoch - 1];
            if (previous > 0.0 && std::abs(total - previous) / previous < tolerance) {
                result.converged = true;
                break;
            }
        }
    }

    parallel_for(n_pairs, workers, [&](std::size_t begin, std::size_t end) {
        for (std::size_t p = begin; p < end; ++p) {
            auto& fit = result.fits[p];
            if (!fit.ok) continue;
            const auto& pair = data.pairs[p];
            try {
                fit.loss = pair_loss(data.x.column(pair.x), data.y.column(pair.y), ops, fit.model);
            } catch (const Error& e) {
                fail(p, e.what());
            }
        }
    });
    report_failures(n_failed);
    return result;
}

}  // namespace grangernet
