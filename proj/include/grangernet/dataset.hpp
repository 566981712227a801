#pragma once

#include <cstddef>
#include <filesystem>
#include <string>
#include <vector>

#include "grangernet/preprocess.hpp"

namespace grangernet {

/// Candidate (cause, target) pair, as column indices into Dataset::x / Dataset::y.
struct CandidatePair {
    std::size_t x = 0;
    std::size_t y = 0;

    friend bool operator==(const CandidatePair&, const CandidatePair&) = default;
};

/// Observations of candidate causes (x) and targets (y) on the same nodes,
/// plus the candidate set. A pair's id is its index in `pairs`.
struct Dataset {
    NamedMatrix x;
    NamedMatrix y;
    std::vector<CandidatePair> pairs;

    std::size_t n_nodes() const { return x.n_nodes(); }
    const std::string& x_name(std::size_t pair_id) const { return x.names[pairs[pair_id].x]; }
    const std::string& y_name(std::size_t pair_id) const { return y.names[pairs[pair_id].y]; }

    /// Throws DimensionMismatch / InvalidArgument on inconsistent shapes or
    /// out-of-range pair indices.
    void validate() const;
};

}  // namespace grangernet

namespace grangernet {

/// Pairs file: one `x_name<TAB>y_name` per line, '#' comments allowed.
/// Throws ParseError on unknown names (with the line number).
std::vector<CandidatePair> read_pairs(const std::filesystem::path& path, const std::vector<std::string>& x_names,
                                      const std::vector<std::string>& y_names);
void write_pairs(const std::filesystem::path& path, const Dataset& data);

}  // namespace grangernet
