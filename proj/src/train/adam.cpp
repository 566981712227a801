#include <cmath>

#include "grangernet/error.hpp"
#include "grangernet/train.hpp"

namespace grangernet {

void adam_step(std::span<double> params, std::span<const double> grads, AdamState& state, double learning_rate,
               const AdamOptions& options) {
    if (params.size() != grads.size()) {
        throw Error(ErrorCode::DimensionMismatch, "parameter and gradient sizes differ");
    }
    if (state.m.empty()) {
        state.m.assign(params.size(), 0.0);
        state.v.assign(params.size(), 0.0);
    }
    if (state.m.size() != params.size()) {
        throw Error(ErrorCode::DimensionMismatch, "optimizer state does not match parameter count");
    }
    ++state.step;
    const double t = static_cast<double>(state.step);
    const double correction1 = 1.0 - std::pow(options.beta1, t);
    const double correction2 = 1.0 - std::pow(options.beta2, t);
    for (std::size_t i = 0; i < params.size(); ++i) {
        const double g = grads[i];
        state.m[i] = options.beta1 * state.m[i] + (1.0 - options.beta1) * g;
        state.v[i] = options.beta2 * state.v[i] + (1.0 - options.beta2) * g * g;
        const double m_hat = state.m[i] / correction1;
        const double v_hat = state.v[i] / correction2;
        params[i] -= learning_rate * m_hat / (std::sqrt(v_hat) + options.epsilon);
    }
}

PairModel glorot_init(std::size_t layers, std::mt19937_64& rng, std::size_t lag_hops, Link link) {
    if (layers == 0) throw Error(ErrorCode::InvalidArgument, "layers must be >= 1");
    // fan_in = fan_out = 1 for a scalar layer.
    const double bound = std::sqrt(6.0 / 2.0);
    std::uniform_real_distribution<double> uniform(-bound, bound);
    PairModel m = PairModel::zeros(layers, lag_hops, link);
    for (auto& w : m.x_full.w) w = uniform(rng);
    for (auto& w : m.y_full.w) w = uniform(rng);
    m.y_reduced = m.y_full;
    return m;
}

}  // namespace grangernet
