#include "grangernet/eval.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <map>
#include <numeric>
#include <sstream>

#include "grangernet/error.hpp"

namespace grangernet {

std::size_t LabeledPairs::n_true() const {
    return static_cast<std::size_t>(std::count(labels.begin(), labels.end(), 1));
}

std::size_t LabeledPairs::n_false() const { return labels.size() - n_true(); }

LabeledPairs label_from_reference(std::span<const PairKey> candidates, std::span<const ReferenceEntry> reference,
                                  double true_threshold, double false_threshold) {
    std::map<PairKey, double> best;
    for (const auto& entry : reference) {
        auto [it, inserted] = best.emplace(entry.key, entry.value);
        if (!inserted) it->second = std::min(it->second, entry.value);
    }
    LabeledPairs out;
    for (std::size_t id = 0; id < candidates.size(); ++id) {
        auto it = best.find(candidates[id]);
        if (it == best.end()) continue;
        if (it->second < true_threshold) {
            out.pair_ids.push_back(id);
            out.labels.push_back(1);
        } else if (it->second > false_threshold) {
            out.pair_ids.push_back(id);
            out.labels.push_back(0);
        }
    }
    if (out.pair_ids.empty()) {
        throw Error(ErrorCode::NoLabeledPairs, "no candidate pair falls in either reference class");
    }
    std::ostringstream note;
    note << "true if value < " << true_threshold << ", false if value > " << false_threshold;
    out.provenance = note.str();
    return out;
}

namespace {

// Indices sorted by descending score.
std::vector<std::size_t> descending(std::span<const double> scores, std::span<const std::uint8_t> labels) {
    if (scores.size() != labels.size()) throw Error(ErrorCode::DimensionMismatch, "scores and labels differ in length");
    const auto pos = static_cast<std::size_t>(std::count_if(labels.begin(), labels.end(), [](auto l) { return l != 0; }));
    if (pos == 0 || pos == labels.size()) {
        throw Error(ErrorCode::OneClassOnly, "metric needs at least one true and one false pair");
    }
    std::vector<std::size_t> order(scores.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });
    return order;
}

}  // namespace

double auroc(std::span<const double> scores, std::span<const std::uint8_t> labels) {
    const auto order = descending(scores, labels);
    // Count, for every true pair, the false pairs strictly below it plus half the tied ones.
    double wins = 0.0;
    std::size_t false_above = 0, n_false = 0, n_true = 0;
    for (std::size_t i = 0; i < order.size();) {
        std::size_t j = i;
        std::size_t block_true = 0, block_false = 0;
        while (j < order.size() && scores[order[j]] == scores[order[i]]) {
            (labels[order[j]] ? block_true : block_false)++;
            ++j;
        }
        n_true += block_true;
        n_false += block_false;
        wins -= static_cast<double>(block_true) * (static_cast<double>(false_above) + 0.5 * static_cast<double>(block_false));
        false_above += block_false;
        i = j;
    }
    // Each true pair beats every false pair not above or tied with it.
    wins += static_cast<double>(n_true) * static_cast<double>(n_false);
    return wins / (static_cast<double>(n_true) * static_cast<double>(n_false));
}

double auprc(std::span<const double> scores, std::span<const std::uint8_t> labels) {
    const auto order = descending(scores, labels);
    const auto n_true = static_cast<std::size_t>(std::count_if(labels.begin(), labels.end(), [](auto l) { return l != 0; }));
    double area = 0.0;
    std::size_t tp = 0, fp = 0;
    for (std::size_t i = 0; i < order.size();) {
        std::size_t j = i;
        std::size_t block_true = 0;
        while (j < order.size() && scores[order[j]] == scores[order[i]]) {
            (labels[order[j]] ? block_true : fp)++;
            ++j;
        }
        tp += block_true;
        if (block_true) {
            area += static_cast<double>(block_true) * (static_cast<double>(tp) / static_cast<double>(tp + fp));
        }
        i = j;
    }
    return area / static_cast<double>(n_true);
}

std::vector<ReferenceEntry> read_reference(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::ParseError, "cannot open reference " + path.string());
    std::vector<ReferenceEntry> out;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || line[0] == '#') continue;
        std::istringstream fields(line);
        ReferenceEntry e;
        std::string value;
        if (!std::getline(fields, e.key.x_name, '\t') || !std::getline(fields, e.key.y_name, '\t') ||
            !std::getline(fields, value, '\t')) {
            throw Error(ErrorCode::ParseError, path.string() + ":" + std::to_string(line_no) +
                                                   ": expected 'x_name<TAB>y_name<TAB>value'");
        }
        auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), e.value);
        if (ec != std::errc() || ptr != value.data() + value.size()) {
            throw Error(ErrorCode::ParseError, path.string() + ":" + std::to_string(line_no) + ": bad value '" + value + "'");
        }
        out.push_back(std::move(e));
    }
    return out;
}

}  // namespace grangernet
