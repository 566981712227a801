#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "grangernet/graph.hpp"
#include "grangernet/preprocess.hpp"

namespace grangernet {

struct PearsonResult {
    double r = 0.0;
    /// One of the inputs was constant; r is reported as 0.
    bool zero_variance = false;
};

PearsonResult pearson(std::span<const double> x, std::span<const double> y);

/**
 * Replaces each row v by the mean of row v and its `neighborhood` nearest
 * neighbours. Neighbours come from the undirected union of `edges`, ordered
 * by distance then id; a node with fewer neighbours uses all of them.
 */
Eigen::MatrixXd pseudocell_smooth(const Eigen::MatrixXd& values, std::span<const KnnEdge> edges,
                                  std::size_t neighborhood = 50);

/// Assignment of nodes to equal-width pseudotime bins; the node(s) at the
/// maximum fall in the last bin.
struct PseudotimeBins {
    std::vector<std::size_t> bin_of_node;
    std::vector<std::size_t> occupancy;

    std::size_t n_bins() const { return occupancy.size(); }
    /// Per-bin means; empty bins hold NaN.
    std::vector<double> means(std::span<const double> values) const;
};

/// Throws AllOneBin when two or more nodes share a single pseudotime value.
PseudotimeBins assign_pseudotime_bins(std::span<const double> pseudotime, std::size_t n_bins = 100);

struct BinnedSeries {
    std::vector<double> x_bins;
    std::vector<double> y_bins;
    std::vector<std::size_t> occupancy;
};

BinnedSeries bin_by_pseudotime(std::span<const double> x, std::span<const double> y,
                               std::span<const double> pseudotime, std::size_t n_bins = 100);

struct VarGrangerResult {
    double f_stat = 0.0;
    double p_value = 1.0;
    double neg_log10_p = 0.0;
    std::size_t df1 = 0;
    std::size_t df2 = 0;
    double rss_restricted = 0.0;
    double rss_unrestricted = 0.0;
    /// A design matrix was rank deficient and a ridge (1e-8) solve was used.
    bool ridge_fallback = false;
};

/**
 * Linear Granger test on two aligned series. NaN entries (empty bins) are
 * dropped pairwise first. Regresses y_t on an intercept and max_lag lags of y
 * (restricted), then additionally on max_lag lags of x (unrestricted), and
 * returns the F-test with (max_lag, T - 2 max_lag - 1) degrees of freedom,
 * T being the number of regression rows. Throws DegenerateSampleSize when the
 * series has 3 * max_lag values or fewer.
 */
VarGrangerResult var_granger(std::span<const double> x_bins, std::span<const double> y_bins, std::size_t max_lag = 1);

}  // namespace grangernet
