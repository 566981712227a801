#include <cmath>
#include <string>

#include "grangernet/error.hpp"
#include "grangernet/model.hpp"

namespace grangernet {

namespace {

void check_params(const EncoderParams& p, std::size_t lag_hops) {
    if (p.w.empty() || p.w.size() != p.b.size()) {
        throw Error(ErrorCode::InvalidArgument, "encoder needs matching weight and bias vectors of length >= 1");
    }
    if (lag_hops < 1 || lag_hops > p.layers()) {
        throw Error(ErrorCode::InvalidArgument, "lag_hops=" + std::to_string(lag_hops) + " outside [1, " +
                                                    std::to_string(p.layers()) + "]");
    }
    for (std::size_t l = 0; l < p.layers(); ++l) {
        if (!std::isfinite(p.w[l]) || !std::isfinite(p.b[l])) {
            throw Error(ErrorCode::NonFiniteParameter, "layer " + std::to_string(l + 1));
        }
    }
}

}  // namespace

PairModel PairModel::zeros(std::size_t layers, std::size_t lag_hops, Link link) {
    PairModel m;
    m.x_full = EncoderParams::zeros(layers);
    m.y_full = EncoderParams::zeros(layers);
    m.y_reduced = EncoderParams::zeros(layers);
    m.lag_hops = lag_hops;
    m.link = link;
    return m;
}

std::vector<double> PairModel::flatten() const {
    std::vector<double> flat;
    flat.reserve(n_parameters());
    for (const auto* enc : {&x_full, &y_full, &y_reduced}) {
        flat.insert(flat.end(), enc->w.begin(), enc->w.end());
        flat.insert(flat.end(), enc->b.begin(), enc->b.end());
    }
    flat.push_back(c);
    return flat;
}

void PairModel::assign(std::span<const double> flat) {
    if (flat.size() != n_parameters()) {
        throw Error(ErrorCode::DimensionMismatch, "expected " + std::to_string(n_parameters()) + " parameters, got " +
                                                      std::to_string(flat.size()));
    }
    const std::size_t L = layers();
    auto it = flat.begin();
    for (auto* enc : {&x_full, &y_full, &y_reduced}) {
        std::copy(it, it + static_cast<std::ptrdiff_t>(L), enc->w.begin());
        it += static_cast<std::ptrdiff_t>(L);
        std::copy(it, it + static_cast<std::ptrdiff_t>(L), enc->b.begin());
        it += static_cast<std::ptrdiff_t>(L);
    }
    c = *it;
}

void validate(const PairModel& m) {
    const std::size_t L = m.layers();
    if (m.y_full.layers() != L || m.y_reduced.layers() != L) {
        throw Error(ErrorCode::InvalidArgument, "encoders disagree on layer count");
    }
    check_params(m.x_full, m.lag_hops);
    check_params(m.y_full, m.lag_hops);
    check_params(m.y_reduced, m.lag_hops);
    if (!std::isfinite(m.c)) throw Error(ErrorCode::NonFiniteParameter, "interaction coefficient c");
}

HistoryOutput encode_history(std::span<const double> v, const LaggedOperators& ops, const EncoderParams& p,
                             std::size_t lag_hops, bool keep_layers) {
    const std::size_t n = ops.size();
    if (v.size() != n) {
        throw Error(ErrorCode::DimensionMismatch, "input of length " + std::to_string(v.size()) +
                                                      " for a graph of " + std::to_string(n) + " nodes");
    }
    check_params(p, lag_hops);
    const std::size_t L = p.layers();

    HistoryOutput out;
    out.h_tilde.assign(n, 0.0);
    if (keep_layers) {
        out.layers.resize(static_cast<Eigen::Index>(L), static_cast<Eigen::Index>(n));
        out.propagated.resize(static_cast<Eigen::Index>(L), static_cast<Eigen::Index>(n));
    }

    std::vector<double> h(v.begin(), v.end());
    std::vector<double> s(n);
    for (std::size_t l = 0; l < L; ++l) {
        const auto& op = l < lag_hops ? ops.a : ops.a_plus;
        op.transpose_apply(h, s);
        const double w = p.w[l], b = p.b[l];
        for (std::size_t i = 0; i < n; ++i) {
            h[i] = std::tanh(w * s[i] + b);
            out.h_tilde[i] += h[i];
        }
        if (keep_layers) {
            const auto row = static_cast<Eigen::Index>(l);
            for (std::size_t i = 0; i < n; ++i) {
                out.layers(row, static_cast<Eigen::Index>(i)) = h[i];
                out.propagated(row, static_cast<Eigen::Index>(i)) = s[i];
            }
        }
    }
    const double inv_l = 1.0 / static_cast<double>(L);
    for (double& x : out.h_tilde) x *= inv_l;
    return out;
}

Eigen::MatrixXd encode_history_batch(const Eigen::MatrixXd& v, const LaggedOperators& ops,
                                     std::span<const EncoderParams> params, std::size_t lag_hops) {
    const std::size_t n = ops.size();
    if (static_cast<std::size_t>(v.rows()) != n || static_cast<std::size_t>(v.cols()) != params.size()) {
        throw Error(ErrorCode::DimensionMismatch, "batch shape does not match graph size and parameter count");
    }
    if (params.empty()) return Eigen::MatrixXd(v.rows(), 0);
    const std::size_t L = params[0].layers();
    for (const auto& p : params) {
        if (p.layers() != L) throw Error(ErrorCode::InvalidArgument, "batch encoders disagree on layer count");
        check_params(p, lag_hops);
    }

    Eigen::MatrixXd h = v;
    Eigen::MatrixXd acc = Eigen::MatrixXd::Zero(v.rows(), v.cols());
    for (std::size_t l = 0; l < L; ++l) {
        const auto& op = l < lag_hops ? ops.a : ops.a_plus;
        Eigen::MatrixXd s = transpose_apply_batch(op, h);
        for (Eigen::Index k = 0; k < v.cols(); ++k) {
            const double w = params[static_cast<std::size_t>(k)].w[l];
            const double b = params[static_cast<std::size_t>(k)].b[l];
            for (Eigen::Index i = 0; i < v.rows(); ++i) {
                h(i, k) = std::tanh(w * s(i, k) + b);
                acc(i, k) += h(i, k);
            }
        }
    }
    return acc * (1.0 / static_cast<double>(L));
}

double apply_link(Link link, double u) { return link == Link::exponential ? std::exp(u) : u; }

std::vector<double> predict_full(std::span<const double> x, std::span<const double> y, const LaggedOperators& ops,
                                 const PairModel& m) {
    validate(m);
    const auto hy = encode_history(y, ops, m.y_full, m.lag_hops);
    const auto hx = encode_history(x, ops, m.x_full, m.lag_hops);
    std::vector<double> out(ops.size());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = apply_link(m.link, hy.h_tilde[i] + m.c * hx.h_tilde[i]);
    return out;
}

std::vector<double> predict_reduced(std::span<const double> y, const LaggedOperators& ops, const PairModel& m) {
    validate(m);
    const auto hy = encode_history(y, ops, m.y_reduced, m.lag_hops);
    std::vector<double> out(ops.size());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = apply_link(m.link, hy.h_tilde[i]);
    return out;
}

}  // namespace grangernet
