#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "grangernet/graph.hpp"

namespace grangernet {

/// Per-layer scalar weight and bias of one history encoder.
struct EncoderParams {
    std::vector<double> w;
    std::vector<double> b;

    std::size_t layers() const noexcept { return w.size(); }
    static EncoderParams zeros(std::size_t layers) { return {std::vector<double>(layers), std::vector<double>(layers)}; }
};

enum class Link { identity, exponential };

/**
 * Parameters of the full and reduced predictors for one candidate pair.
 *
 *   full:    y ~ link(h_y_full + c * h_x_full)
 *   reduced: y ~ link(h_y_reduced)
 *
 * The three encoders share the layer count; 1 <= lag_hops <= layers.
 */
struct PairModel {
    EncoderParams x_full;
    EncoderParams y_full;
    EncoderParams y_reduced;
    double c = 0.0;
    std::size_t lag_hops = 1;
    Link link = Link::identity;

    std::size_t layers() const noexcept { return x_full.layers(); }
    /// 6L + 1.
    std::size_t n_parameters() const noexcept { return 6 * layers() + 1; }

    static PairModel zeros(std::size_t layers, std::size_t lag_hops = 1, Link link = Link::identity);

    /// Flat layout: x_full.w, x_full.b, y_full.w, y_full.b, y_reduced.w, y_reduced.b, c.
    std::vector<double> flatten() const;
    void assign(std::span<const double> flat);
};

/// Output of a history encoder. `layers` and `propagated` are filled only when
/// requested; both are L x n, row l holding layer l+1. `propagated` row l is
/// the operator product fed into layer l+1 before its affine map and tanh.
struct HistoryOutput {
    std::vector<double> h_tilde;
    Eigen::MatrixXd layers;
    Eigen::MatrixXd propagated;
};

/**
 * Lagged message passing over the Dag:
 *
 *   h1 = tanh(w1 * A^T v + b1)
 *   hl = tanh(wl * M^T h(l-1) + bl),  M = A for l <= lag_hops, A_plus after
 *   h_tilde = mean over the L layers
 *
 * Throws DimensionMismatch and NonFiniteParameter.
 */
HistoryOutput encode_history(std::span<const double> v, const LaggedOperators& ops, const EncoderParams& p,
                             std::size_t lag_hops, bool keep_layers = false);

/// Column j of the result equals encode_history(V.col(j), params[j]).h_tilde.
Eigen::MatrixXd encode_history_batch(const Eigen::MatrixXd& v, const LaggedOperators& ops,
                                     std::span<const EncoderParams> params, std::size_t lag_hops);

double apply_link(Link link, double u);

std::vector<double> predict_full(std::span<const double> x, std::span<const double> y, const LaggedOperators& ops,
                                 const PairModel& m);
std::vector<double> predict_reduced(std::span<const double> y, const LaggedOperators& ops, const PairModel& m);

/// Throws unless the model's encoders agree on L >= 1, lag_hops is in [1, L]
/// and every parameter is finite.
void validate(const PairModel& m);

}  // namespace grangernet
