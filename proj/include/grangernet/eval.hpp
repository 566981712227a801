#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

namespace grangernet {

struct PairKey {
    std::string x_name;
    std::string y_name;

    friend auto operator<=>(const PairKey&, const PairKey&) = default;
};

/// One row of a reference file: `x_name<TAB>y_name<TAB>value`.
struct ReferenceEntry {
    PairKey key;
    double value = 0.0;
};

/// Candidate pairs with a binary label (1 = true interaction).
struct LabeledPairs {
    std::vector<std::size_t> pair_ids;
    std::vector<std::uint8_t> labels;
    std::string provenance;

    std::size_t n_true() const;
    std::size_t n_false() const;
};

/**
 * Labels candidates from a reference: value < true_threshold is a true pair,
 * value > false_threshold a false pair, anything between is discarded, as
 * are reference rows for pairs that are not candidates. A pair listed more
 * than once keeps its smallest value. Throws NoLabeledPairs when nothing
 * gets a label.
 */
LabeledPairs label_from_reference(std::span<const PairKey> candidates, std::span<const ReferenceEntry> reference,
                                  double true_threshold, double false_threshold);

/// Mann-Whitney AUROC: P(score_true > score_false) + P(equal) / 2.
/// Throws OneClassOnly unless both labels occur.
double auroc(std::span<const double> scores, std::span<const std::uint8_t> labels);

/// Average precision over a descending sweep; tied scores enter as one block.
/// Throws OneClassOnly unless both labels occur.
double auprc(std::span<const double> scores, std::span<const std::uint8_t> labels);

std::vector<ReferenceEntry> read_reference(const std::filesystem::path& path);

}  // namespace grangernet
