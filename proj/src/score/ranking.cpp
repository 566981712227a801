#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <vector>

#include "grangernet/error.hpp"
#include "grangernet/score.hpp"

namespace grangernet {

namespace {

std::vector<double> average_ranks(std::span<const double> v) {
    std::vector<std::size_t> idx(v.size());
    std::iota(idx.begin(), idx.end(), 0);
    std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return v[a] < v[b]; });
    std::vector<double> ranks(v.size());
    for (std::size_t i = 0; i < idx.size();) {
        std::size_t j = i;
        while (j + 1 < idx.size() && v[idx[j + 1]] == v[idx[i]]) ++j;
        const double r = 0.5 * static_cast<double>(i + j) + 1.0;
        for (std::size_t k = i; k <= j; ++k) ranks[idx[k]] = r;
        i = j + 1;
    }
    return ranks;
}

}  // namespace

double spearman(std::span<const double> a, std::span<const double> b) {
    if (a.size() != b.size() || a.size() < 2) {
        throw Error(ErrorCode::DimensionMismatch, "spearman needs two equal-length samples of size >= 2");
    }
    const auto ra = average_ranks(a);
    const auto rb = average_ranks(b);
    const double mean = 0.5 * static_cast<double>(a.size() + 1);
    double sab = 0.0, saa = 0.0, sbb = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        sab += (ra[i] - mean) * (rb[i] - mean);
        saa += (ra[i] - mean) * (ra[i] - mean);
        sbb += (rb[i] - mean) * (rb[i] - mean);
    }
    if (saa == 0.0 || sbb == 0.0) return 0.0;
    return sab / std::sqrt(saa * sbb);
}


double rank_score(const PairScore& s, RankMode mode) {
    return mode == RankMode::f ? s.f_stat : s.t_neg_log10_p;
}

Ranking rank_by_score(std::span<const RankedPair> scores) {
    Ranking out(scores.begin(), scores.end());
    for (auto& r : out) {
        if (std::isnan(r.score)) r.score = -std::numeric_limits<double>::infinity();
    }
    std::sort(out.begin(), out.end(), [](const RankedPair& a, const RankedPair& b) {
        if (a.score != b.score) return a.score > b.score;
        return a.pair_id < b.pair_id;
    });
    return out;
}

Ranking rank_pairs(std::span<const PairScore> scores, RankMode mode) {
    std::vector<RankedPair> raw;
    raw.reserve(scores.size());
    for (const auto& s : scores) raw.push_back({s.pair_id, rank_score(s, mode)});
    return rank_by_score(raw);
}

}  // namespace grangernet
