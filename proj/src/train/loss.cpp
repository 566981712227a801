#include <cmath>
#include <string>

#include "grangernet/error.hpp"
#include "grangernet/train.hpp"

namespace grangernet {

namespace {

// Reverse pass through one encoder. `g_tilde` is dLoss/dh_tilde.
void encoder_backward(const HistoryOutput& fw, std::span<const double> g_tilde, const LaggedOperators& ops,
                      const EncoderParams& p, std::size_t lag_hops, EncoderParams& grad) {
    const std::size_t n = g_tilde.size();
    const std::size_t L = p.layers();
    const double inv_l = 1.0 / static_cast<double>(L);
    grad = EncoderParams::zeros(L);

    std::vector<double> gh(n), delta(n), back(n);
    for (std::size_t i = 0; i < n; ++i) gh[i] = g_tilde[i] * inv_l;

    for (std::size_t l = L; l-- > 0;) {
        const auto row = static_cast<Eigen::Index>(l);
        double gw = 0.0, gb = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const auto col = static_cast<Eigen::Index>(i);
            const double h = fw.layers(row, col);
            delta[i] = gh[i] * (1.0 - h * h);
            gw += delta[i] * fw.propagated(row, col);
            gb += delta[i];
        }
        grad.w[l] = gw;
        grad.b[l] = gb;
        if (l == 0) break;
        // Adjoint of M^T is M.
        const auto& op = l < lag_hops ? ops.a : ops.a_plus;
        op.apply(delta, back);
        const double w = p.w[l];
        for (std::size_t i = 0; i < n; ++i) gh[i] = g_tilde[i] * inv_l + w * back[i];
    }
}

void check_finite(const EncoderParams& g, const char* which) {
    for (std::size_t l = 0; l < g.layers(); ++l) {
        if (!std::isfinite(g.w[l]) || !std::isfinite(g.b[l])) {
            throw Error(ErrorCode::NonFiniteGradient, std::string(which) + " layer " + std::to_string(l + 1));
        }
    }
}

PairEvaluation evaluate(std::span<const double> x, std::span<const double> y, const LaggedOperators& ops,
                        const PairModel& m, Objective objective, bool want_grad) {
    validate(m);
    const std::size_t n = ops.size();
    if (x.size() != n || y.size() != n) {
        throw Error(ErrorCode::DimensionMismatch, "pair vectors do not match the graph size " + std::to_string(n));
    }

    const auto hx = encode_history(x, ops, m.x_full, m.lag_hops, want_grad);
    const auto hyf = encode_history(y, ops, m.y_full, m.lag_hops, want_grad);
    const auto hyr = encode_history(y, ops, m.y_reduced, m.lag_hops, want_grad);

    PairEvaluation out;
    auto& loss = out.loss;
    loss.per_node_full.resize(n);
    loss.per_node_reduced.resize(n);
    std::vector<double> du_full(n), du_reduced(n);
    const bool exp_link = m.link == Link::exponential;
    for (std::size_t i = 0; i < n; ++i) {
        const double yf = apply_link(m.link, hyf.h_tilde[i] + m.c * hx.h_tilde[i]);
        const double yr = apply_link(m.link, hyr.h_tilde[i]);
        if (!std::isfinite(yf) || !std::isfinite(yr)) {
            throw Error(ErrorCode::NonFinitePrediction, "prediction overflow at node " + std::to_string(i));
        }
        const double rf = yf - y[i];
        const double rr = yr - y[i];
        loss.per_node_full[i] = rf * rf;
        loss.per_node_reduced[i] = rr * rr;
        loss.rss_full += rf * rf;
        loss.rss_reduced += rr * rr;
        du_full[i] = 2.0 * rf * (exp_link ? yf : 1.0);
        du_reduced[i] = 2.0 * rr * (exp_link ? yr : 1.0);
    }
    if (!want_grad) return out;

    const std::size_t L = m.layers();
    auto& g = out.grad;
    g.x_full = EncoderParams::zeros(L);
    g.y_full = EncoderParams::zeros(L);
    g.y_reduced = EncoderParams::zeros(L);
    if (objective != Objective::reduced_only) {
        std::vector<double> gx(n);
        double gc = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            gc += du_full[i] * hx.h_tilde[i];
            gx[i] = m.c * du_full[i];
        }
        g.c = gc;
        encoder_backward(hyf, du_full, ops, m.y_full, m.lag_hops, g.y_full);
        encoder_backward(hx, gx, ops, m.x_full, m.lag_hops, g.x_full);
    }
    if (objective != Objective::full_only) {
        encoder_backward(hyr, du_reduced, ops, m.y_reduced, m.lag_hops, g.y_reduced);
    }
    check_finite(g.x_full, "x_full");
    check_finite(g.y_full, "y_full");
    check_finite(g.y_reduced, "y_reduced");
    if (!std::isfinite(g.c)) throw Error(ErrorCode::NonFiniteGradient, "c");
    return out;
}

}  // namespace

std::vector<double> Gradients::flatten() const {
    std::vector<double> flat;
    for (const auto* enc : {&x_full, &y_full, &y_reduced}) {
        flat.insert(flat.end(), enc->w.begin(), enc->w.end());
        flat.insert(flat.end(), enc->b.begin(), enc->b.end());
    }
    flat.push_back(c);
    return flat;
}

LossReport pair_loss(std::span<const double> x, std::span<const double> y, const LaggedOperators& ops,
                     const PairModel& m) {
    return evaluate(x, y, ops, m, Objective::joint, false).loss;
}

Gradients pair_gradients(std::span<const double> x, std::span<const double> y, const LaggedOperators& ops,
                         const PairModel& m) {
    return evaluate(x, y, ops, m, Objective::joint, true).grad;
}

PairEvaluation evaluate_pair(std::span<const double> x, std::span<const double> y, const LaggedOperators& ops,
                             const PairModel& m, Objective objective) {
    return evaluate(x, y, ops, m, objective, true);
}

}  // namespace grangernet
