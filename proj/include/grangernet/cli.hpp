#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "grangernet/dataset.hpp"
#include "grangernet/error.hpp"
#include "grangernet/eval.hpp"
#include "grangernet/graph.hpp"
#include "grangernet/preprocess.hpp"
#include "grangernet/score.hpp"
#include "grangernet/synth.hpp"
#include "grangernet/train.hpp"

namespace grangernet {

enum class Method { gnn, pearson, pseudocell, var };

std::string_view to_string(Method m);
Method parse_method(std::string_view s);

enum class DagSource { unspecified, edges, knn };

/// Everything a `run` needs. Config-file keys are listed in echo().
struct RunConfig {
    TrainConfig train;
    Method method = Method::gnn;
    RankMode rank_mode = RankMode::f;

    std::filesystem::path x_path;
    std::filesystem::path y_path;
    std::filesystem::path pairs_path;  // empty: window rule or every (x, y) pair
    std::filesystem::path x_positions;
    std::filesystem::path y_positions;
    double max_distance = 1e6;
    std::filesystem::path edges_path;      // DAG from an edge list ...
    std::filesystem::path embedding_path;  // ... or from kNN on an embedding
    std::filesystem::path pseudotime_path;
    DagSource dag_source = DagSource::unspecified;
    std::size_t k = 15;

    std::filesystem::path output_dir;
    std::filesystem::path reference_path;  // optional, adds metrics to the manifest
    double true_threshold = 1e-10;
    double false_threshold = 0.9;

    std::size_t pseudocell_neighborhood = 50;
    std::size_t n_bins = 100;
    std::size_t var_lag = 1;
    std::size_t workers = 1;
    bool write_checkpoint = true;

    /// Sets one `key = value` setting. Throws ConfigError on unknown keys or
    /// unparsable values.
    void set(std::string_view key, std::string_view value);
    /// The DAG source after resolving `unspecified`.
    DagSource resolved_dag_source() const;
    /// Checks the invariants that do not touch the filesystem. Throws ConfigError.
    void validate() const;
    /// Also checks that every referenced input exists. Throws ConfigError.
    void validate_inputs() const;
    /// Every setting as key -> value text, in a stable order.
    std::map<std::string, std::string> echo() const;
};

/// Flat `key = value` text, '#' comments, blank lines ignored.
RunConfig read_run_config(const std::filesystem::path& path);
void apply_overrides(RunConfig& config, std::span<const std::string> key_values);

/// One scored candidate pair. Fields a method does not produce stay NaN (or 0
/// for the degrees of freedom).
struct ScoreRow {
    std::size_t pair_id = 0;
    double score = 0.0;
    double f_stat = 0.0;
    double f_pvalue = 0.0;
    double t_stat = 0.0;
    double t_pvalue = 0.0;
    double t_neg_log10_p = 0.0;
    std::size_t df1 = 0;
    std::size_t df2 = 0;
    bool flagged = false;  // zero residual / zero variance / fallback solve
};

std::vector<ScoreRow> score_gnn(const Dataset& data, const TrainResult& result, std::size_t layers, RankMode mode);
std::vector<ScoreRow> score_pearson(const Dataset& data);
std::vector<ScoreRow> score_pseudocell(const Dataset& data, std::span<const KnnEdge> knn, std::size_t neighborhood);
std::vector<ScoreRow> score_var(const Dataset& data, std::span<const double> pseudotime, std::size_t n_bins,
                                std::size_t max_lag);

/// JSON lines in rank order (rank 1 first). Infinite scores are written as
/// the largest finite double and flagged.
void write_scores(const std::filesystem::path& path, const Dataset& data, Method method,
                  std::span<const ScoreRow> rows);

struct ScoreRecord {
    std::size_t pair_id = 0;
    std::string x_name;
    std::string y_name;
    std::string method;
    double score = 0.0;
    std::size_t rank = 0;
};
std::vector<ScoreRecord> read_scores(const std::filesystem::path& path);

struct EvalRow {
    std::string method;
    double auprc = 0.0;
    double auroc = 0.0;
    std::size_t n_true = 0;
    std::size_t n_false = 0;
};
/// Labels every method's pairs against the reference and computes both
/// metrics. Records are grouped by their method field.
std::vector<EvalRow> evaluate_scores(std::span<const ScoreRecord> records, std::span<const ReferenceEntry> reference,
                                     double true_threshold, double false_threshold);

// Run manifest -------------------------------------------------------------

struct FileDigest {
    std::string path;
    std::string sha256;
};

struct StageRecord {
    std::string name;
    double wall_seconds = 0.0;
    std::vector<FileDigest> outputs;
};

struct RunManifest {
    std::map<std::string, std::string> config;
    std::uint64_t seed = 0;
    std::string version;
    std::vector<FileDigest> inputs;
    std::vector<StageRecord> stages;
    std::vector<EvalRow> metrics;
};

/// Lowercase hex SHA-256 of a file's bytes. Throws ParseError if unreadable.
std::string sha256_file(const std::filesystem::path& path);
void write_manifest(const std::filesystem::path& path, const RunManifest& m);
RunManifest read_manifest(const std::filesystem::path& path);
/// Paths whose current digest differs from the manifest (missing files included).
std::vector<std::string> verify_manifest(const RunManifest& m);

// Subcommands ----------------------------------------------------------------

struct BuildDagOptions {
    std::filesystem::path embedding_path;
    std::filesystem::path pseudotime_path;
    std::size_t k = 15;
    std::filesystem::path output_edges;
    std::filesystem::path output_stats;  // empty: stats only logged
    std::size_t workers = 1;
};

struct DagStats {
    std::size_t n_nodes = 0;
    std::size_t n_edges = 0;
    std::size_t n_roots = 0;
    std::size_t max_in_degree = 0;
};

DagStats cmd_build_dag(const BuildDagOptions& options);

struct CandidateOptions {
    std::filesystem::path x_path;  // matrix, only the header names are used
    std::filesystem::path y_path;
    std::filesystem::path x_positions;  // optional `name<TAB>sequence<TAB>position`
    std::filesystem::path y_positions;
    double max_distance = 1e6;
    std::filesystem::path output_pairs;
};

/// Returns the number of pairs written.
std::size_t cmd_candidates(const CandidateOptions& options);

struct NamedPosition {
    std::string name;
    std::string sequence;
    std::int64_t position = 0;
};
std::vector<NamedPosition> read_positions(const std::filesystem::path& path);
/// All (x, y) index pairs within max_distance on the same sequence, ordered by
/// y then x. Names without a position never pair.
std::vector<CandidatePair> window_pairs(const std::vector<std::string>& x_names,
                                        const std::vector<std::string>& y_names,
                                        std::span<const NamedPosition> x_positions,
                                        std::span<const NamedPosition> y_positions, double max_distance);

struct RunOutcome {
    std::filesystem::path scores_path;
    std::filesystem::path manifest_path;
    std::vector<ScoreRow> rows;
    std::vector<EvalRow> metrics;
    std::size_t failed_pairs = 0;
};

RunOutcome cmd_run(const RunConfig& config);

struct EvalOptions {
    std::vector<std::filesystem::path> score_paths;
    std::filesystem::path reference_path;
    double true_threshold = 1e-10;
    double false_threshold = 0.9;
    std::filesystem::path output;  // empty: stdout only
};

std::vector<EvalRow> cmd_eval(const EvalOptions& options);

struct SynthOptions {
    std::filesystem::path output_dir;
};

void cmd_synth(const SynthSpec& spec, const SynthOptions& options);

/// Process exit status for an error code: 2 configuration, 3 data, 4 internal.
int exit_code_for(ErrorCode code);

}  // namespace grangernet
