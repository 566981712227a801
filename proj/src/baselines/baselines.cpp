#include "grangernet/baselines.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <string>

#include "grangernet/error.hpp"
#include "grangernet/score.hpp"

namespace grangernet {

PearsonResult pearson(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size() || x.empty()) {
        throw Error(ErrorCode::DimensionMismatch, "pearson needs two non-empty vectors of equal length");
    }
    const double n = static_cast<double>(x.size());
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= n;
    my /= n;
    double sxy = 0.0, sxx = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double dx = x[i] - mx, dy = y[i] - my;
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if (sxx == 0.0 || syy == 0.0) return {0.0, true};
    return {std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0), false};
}

Eigen::MatrixXd pseudocell_smooth(const Eigen::MatrixXd& values, std::span<const KnnEdge> edges,
                                  std::size_t neighborhood) {
    const auto n = static_cast<std::size_t>(values.rows());
    if (neighborhood == 0) return values;

    // Undirected neighbour sets keeping the smallest distance seen per pair.
    std::vector<std::map<NodeId, double>> adjacency(n);
    auto add = [&](NodeId a, NodeId b, double d) {
        auto [it, inserted] = adjacency[a].emplace(b, d);
        if (!inserted) it->second = std::min(it->second, d);
    };
    for (const auto& e : edges) {
        if (e.src >= n || e.dst >= n) throw Error(ErrorCode::NodeIdOutOfRange, "kNN edge outside the matrix");
        if (e.src == e.dst) continue;
        add(e.src, e.dst, e.distance);
        add(e.dst, e.src, e.distance);
    }

    Eigen::MatrixXd out(values.rows(), values.cols());
    std::vector<std::pair<double, NodeId>> nbrs;
    for (std::size_t v = 0; v < n; ++v) {
        nbrs.assign(adjacency[v].size(), {});
        std::size_t k = 0;
        for (const auto& [id, d] : adjacency[v]) nbrs[k++] = {d, id};
        std::sort(nbrs.begin(), nbrs.end());
        const std::size_t take = std::min(neighborhood, nbrs.size());
        const auto row = static_cast<Eigen::Index>(v);
        out.row(row) = values.row(row);
        for (std::size_t i = 0; i < take; ++i) out.row(row) += values.row(static_cast<Eigen::Index>(nbrs[i].second));
        out.row(row) /= static_cast<double>(take + 1);
    }
    return out;
}

PseudotimeBins assign_pseudotime_bins(std::span<const double> pseudotime, std::size_t n_bins) {
    if (pseudotime.empty() || n_bins == 0) {
        throw Error(ErrorCode::InvalidArgument, "binning needs at least one node and one bin");
    }
    for (double t : pseudotime) {
        if (!std::isfinite(t)) throw Error(ErrorCode::NonFiniteInput, "pseudotime contains a non-finite value");
    }
    const auto [lo_it, hi_it] = std::minmax_element(pseudotime.begin(), pseudotime.end());
    const double lo = *lo_it, hi = *hi_it;
    if (hi == lo && pseudotime.size() > 1) {
        throw Error(ErrorCode::AllOneBin, "all " + std::to_string(pseudotime.size()) + " nodes share pseudotime " +
                                              std::to_string(lo));
    }

    PseudotimeBins bins;
    bins.bin_of_node.resize(pseudotime.size());
    bins.occupancy.assign(n_bins, 0);
    const double width = hi > lo ? (hi - lo) / static_cast<double>(n_bins) : 1.0;
    for (std::size_t v = 0; v < pseudotime.size(); ++v) {
        auto b = static_cast<std::size_t>((pseudotime[v] - lo) / width);
        b = std::min(b, n_bins - 1);
        bins.bin_of_node[v] = b;
        ++bins.occupancy[b];
    }
    return bins;
}

std::vector<double> PseudotimeBins::means(std::span<const double> values) const {
    if (values.size() != bin_of_node.size()) {
        throw Error(ErrorCode::DimensionMismatch, "values do not match the binned nodes");
    }
    std::vector<double> sums(n_bins(), 0.0);
    for (std::size_t v = 0; v < values.size(); ++v) sums[bin_of_node[v]] += values[v];
    for (std::size_t b = 0; b < sums.size(); ++b) {
        sums[b] = occupancy[b] ? sums[b] / static_cast<double>(occupancy[b]) : std::numeric_limits<double>::quiet_NaN();
    }
    return sums;
}

BinnedSeries bin_by_pseudotime(std::span<const double> x, std::span<const double> y,
                               std::span<const double> pseudotime, std::size_t n_bins) {
    if (x.size() != pseudotime.size() || y.size() != pseudotime.size()) {
        throw Error(ErrorCode::DimensionMismatch, "x, y and pseudotime must have equal length");
    }
    const auto bins = assign_pseudotime_bins(pseudotime, n_bins);
    return {bins.means(x), bins.means(y), bins.occupancy};
}

namespace {

// Least squares with a ridge fallback for rank-deficient designs. Returns RSS.
double fit_rss(const Eigen::MatrixXd& design, const Eigen::VectorXd& target, bool& ridge) {
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(design);
    Eigen::VectorXd beta;
    if (qr.rank() < design.cols()) {
        ridge = true;
        const Eigen::MatrixXd gram =
            design.transpose() * design + 1e-8 * Eigen::MatrixXd::Identity(design.cols(), design.cols());
        beta = gram.ldlt().solve(design.transpose() * target);
    } else {
        beta = qr.solve(target);
    }
    return (target - design * beta).squaredNorm();
}

}  // namespace

VarGrangerResult var_granger(std::span<const double> x_bins, std::span<const double> y_bins, std::size_t max_lag) {
    if (x_bins.size() != y_bins.size()) throw Error(ErrorCode::DimensionMismatch, "series lengths differ");
    if (max_lag < 1) throw Error(ErrorCode::InvalidArgument, "max_lag must be >= 1");
    std::vector<double> xs, ys;
    for (std::size_t t = 0; t < x_bins.size(); ++t) {
        if (std::isnan(x_bins[t]) || std::isnan(y_bins[t])) continue;
        xs.push_back(x_bins[t]);
        ys.push_back(y_bins[t]);
    }
    const std::size_t len = xs.size();
    if (len <= 3 * max_lag) {
        throw Error(ErrorCode::DegenerateSampleSize, "series of length " + std::to_string(len) +
                                                         " is too short for max_lag=" + std::to_string(max_lag));
    }
    const std::size_t rows = len - max_lag;
    VarGrangerResult r;
    r.df1 = max_lag;
    if (rows <= 2 * max_lag + 1) {
        throw Error(ErrorCode::DegenerateSampleSize, "no residual degrees of freedom");
    }
    r.df2 = rows - 2 * max_lag - 1;

    const auto L = static_cast<Eigen::Index>(max_lag);
    const auto T = static_cast<Eigen::Index>(rows);
    Eigen::VectorXd target(T);
    Eigen::MatrixXd restricted(T, 1 + L);
    Eigen::MatrixXd unrestricted(T, 1 + 2 * L);
    for (Eigen::Index i = 0; i < T; ++i) {
        const auto t = static_cast<std::size_t>(i) + max_lag;
        target(i) = ys[t];
        restricted(i, 0) = 1.0;
        unrestricted(i, 0) = 1.0;
        for (Eigen::Index l = 1; l <= L; ++l) {
            const auto lag = static_cast<std::size_t>(l);
            restricted(i, l) = ys[t - lag];
            unrestricted(i, l) = ys[t - lag];
            unrestricted(i, L + l) = xs[t - lag];
        }
    }
    r.rss_restricted = fit_rss(restricted, target, r.ridge_fallback);
    r.rss_unrestricted = fit_rss(unrestricted, target, r.ridge_fallback);

    if (r.rss_unrestricted == 0.0) {
        if (r.rss_restricted > 0.0) {
            r.f_stat = std::numeric_limits<double>::infinity();
            r.p_value = 0.0;
            r.neg_log10_p = std::numeric_limits<double>::infinity();
        }
        return r;
    }
    const double f = ((r.rss_restricted - r.rss_unrestricted) / static_cast<double>(r.df1)) /
                     (r.rss_unrestricted / static_cast<double>(r.df2));
    if (!(f > 0.0)) return r;
    r.f_stat = f;
    const double log_p = f_log_upper_tail(f, static_cast<double>(r.df1), static_cast<double>(r.df2));
    r.p_value = std::exp(log_p);
    r.neg_log10_p = -log_p / std::log(10.0);
    return r;
}

}  // namespace grangernet
