#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace grangernet {

/// Regularized incomplete beta I_x(a, b) by continued fraction.
/// Throws DomainError for x outside [0, 1] or non-positive a, b.
double incomplete_beta(double x, double a, double b);
/// ln I_x(a, b), accurate where I_x(a, b) underflows.
double log_incomplete_beta(double x, double a, double b);

/// P(T <= t) for Student's t with `df` degrees of freedom (df may be fractional).
double student_t_cdf(double t, double df);
/// ln P(T <= t).
double student_t_log_cdf(double t, double df);
/// P(F >= f) for the F distribution with (d1, d2) degrees of freedom.
double f_upper_tail(double f, double d1, double d2);
double f_log_upper_tail(double f, double d1, double d2);

struct FTestResult {
    double f_stat = 0.0;
    double p_value = 1.0;
    double neg_log10_p = 0.0;
    std::size_t df1 = 0;
    std::size_t df2 = 0;
    /// rss_full was zero: F is reported as +infinity and p as 0.
    bool zero_residual = false;
};

/**
 * Nested-model F-test of the full predictor (4L+1 parameters) against the
 * reduced one (2L parameters) on n observations:
 *
 *   F = ((rss_reduced - rss_full) / (2L + 1)) / (rss_full / (n - 4L - 1))
 *
 * A full model that fits worse gives F = 0, p = 1. Throws
 * DegenerateSampleSize when n - 4L - 1 <= 0.
 */
FTestResult f_test(double rss_reduced, double rss_full, std::size_t n, std::size_t layers);

struct WelchResult {
    double t_stat = 0.0;
    double p_value = 0.5;
    double neg_log10_p = 0.0;
    double df = 0.0;
    /// Both samples were constant; p is 0 or 1 by comparing the means.
    bool zero_variance = false;
};

/// One-tailed Welch t-test; the alternative is mean(full) < mean(reduced).
/// Throws DegenerateSampleSize for fewer than two observations per sample.
WelchResult welch_t(std::span<const double> losses_full, std::span<const double> losses_reduced);

struct PairScore {
    std::size_t pair_id = 0;
    double f_stat = 0.0;
    double f_pvalue = 1.0;
    double f_neg_log10_p = 0.0;
    double t_stat = 0.0;
    double t_pvalue = 0.5;
    double t_neg_log10_p = 0.0;
    std::size_t df1 = 0;
    std::size_t df2 = 0;
    bool zero_residual = false;
    bool zero_variance = false;
};

enum class RankMode { f, welch };

struct RankedPair {
    std::size_t pair_id = 0;
    double score = 0.0;
};

/// Descending order of scores, ties broken by ascending pair id.
using Ranking = std::vector<RankedPair>;

double rank_score(const PairScore& s, RankMode mode);
Ranking rank_pairs(std::span<const PairScore> scores, RankMode mode);
/// Generic form used by the baselines: (pair id, score) in any order.
Ranking rank_by_score(std::span<const RankedPair> scores);

/// Spearman rank correlation with average ranks for ties.
double spearman(std::span<const double> a, std::span<const double> b);

}  // namespace grangernet
