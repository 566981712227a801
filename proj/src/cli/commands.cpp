#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <sstream>
#include <stdexcept>
#include <unordered_map>

#include <spdlog/spdlog.h>

#include "json.hpp"

#include "grangernet/baselines.hpp"
#include "grangernet/cli.hpp"
#include "grangernet/error.hpp"

namespace grangernet {

using json = nlohmann::ordered_json;

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

class Stopwatch {
public:
    double seconds() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
    }

private:
    std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

json number(double v) {
    if (std::isnan(v)) return nullptr;
    if (std::isinf(v)) return v > 0 ? std::numeric_limits<double>::max() : -std::numeric_limits<double>::max();
    return v;
}

double number_or_nan(const json& j) { return j.is_number() ? j.get<double>() : kNaN; }

FileDigest digest(const std::filesystem::path& p) { return {p.string(), sha256_file(p)}; }

void abs_correlations(const Eigen::MatrixXd& x, const Eigen::MatrixXd& y, std::span<const CandidatePair> pairs,
                      std::vector<ScoreRow>& rows) {
    const auto n = static_cast<std::size_t>(x.rows());
    for (std::size_t p = 0; p < pairs.size(); ++p) {
        const auto r = pearson({x.col(static_cast<Eigen::Index>(pairs[p].x)).data(), n},
                               {y.col(static_cast<Eigen::Index>(pairs[p].y)).data(), n});
        ScoreRow row{.pair_id = p, .score = std::abs(r.r), .f_stat = kNaN, .f_pvalue = kNaN, .t_stat = kNaN,
                     .t_pvalue = kNaN, .t_neg_log10_p = kNaN, .flagged = r.zero_variance};
        rows.push_back(row);
    }
}

std::vector<CandidatePair> cross_product(std::size_t n_x, std::size_t n_y) {
    std::vector<CandidatePair> pairs;
    pairs.reserve(n_x * n_y);
    for (std::size_t i = 0; i < n_y; ++i) {
        for (std::size_t j = 0; j < n_x; ++j) pairs.push_back({j, i});
    }
    return pairs;
}

}  // namespace

// Scoring ------------------------------------------------------------------

std::vector<ScoreRow> score_gnn(const Dataset& data, const TrainResult& result, std::size_t layers, RankMode mode) {
    std::vector<ScoreRow> rows;
    for (const auto& fit : result.fits) {
        if (!fit.ok) continue;
        const auto f = f_test(fit.loss.rss_reduced, fit.loss.rss_full, data.n_nodes(), layers);
        const auto t = welch_t(fit.loss.per_node_full, fit.loss.per_node_reduced);
        PairScore s{.pair_id = fit.pair_id,
                    .f_stat = f.f_stat,
                    .f_pvalue = f.p_value,
                    .f_neg_log10_p = f.neg_log10_p,
                    .t_stat = t.t_stat,
                    .t_pvalue = t.p_value,
                    .t_neg_log10_p = t.neg_log10_p,
                    .df1 = f.df1,
                    .df2 = f.df2,
                    .zero_residual = f.zero_residual,
                    .zero_variance = t.zero_variance};
        rows.push_back({.pair_id = s.pair_id,
                        .score = rank_score(s, mode),
                        .f_stat = s.f_stat,
                        .f_pvalue = s.f_pvalue,
                        .t_stat = s.t_stat,
                        .t_pvalue = s.t_pvalue,
                        .t_neg_log10_p = s.t_neg_log10_p,
                        .df1 = s.df1,
                        .df2 = s.df2,
                        .flagged = s.zero_residual || s.zero_variance});
    }
    return rows;
}

std::vector<ScoreRow> score_pearson(const Dataset& data) {
    std::vector<ScoreRow> rows;
    abs_correlations(data.x.values, data.y.values, data.pairs, rows);
    return rows;
}

std::vector<ScoreRow> score_pseudocell(const Dataset& data, std::span<const KnnEdge> knn, std::size_t neighborhood) {
    std::vector<ScoreRow> rows;
    abs_correlations(pseudocell_smooth(data.x.values, knn, neighborhood),
                     pseudocell_smooth(data.y.values, knn, neighborhood), data.pairs, rows);
    return rows;
}

std::vector<ScoreRow> score_var(const Dataset& data, std::span<const double> pseudotime, std::size_t n_bins,
                                std::size_t max_lag) {
    const auto bins = assign_pseudotime_bins(pseudotime, n_bins);
    std::unordered_map<std::size_t, std::vector<double>> x_means, y_means;
    std::vector<ScoreRow> rows;
    for (std::size_t p = 0; p < data.pairs.size(); ++p) {
        const auto [xi, yi] = data.pairs[p];
        auto xm = x_means.find(xi);
        if (xm == x_means.end()) xm = x_means.emplace(xi, bins.means(data.x.column(xi))).first;
        auto ym = y_means.find(yi);
        if (ym == y_means.end()) ym = y_means.emplace(yi, bins.means(data.y.column(yi))).first;
        const auto g = var_granger(xm->second, ym->second, max_lag);
        rows.push_back({.pair_id = p,
                        .score = g.neg_log10_p,
                        .f_stat = g.f_stat,
                        .f_pvalue = g.p_value,
                        .t_stat = kNaN,
                        .t_pvalue = kNaN,
                        .t_neg_log10_p = kNaN,
                        .df1 = g.df1,
                        .df2 = g.df2,
                        .flagged = g.ridge_fallback});
    }
    return rows;
}

void write_scores(const std::filesystem::path& path, const Dataset& data, Method method,
                  std::span<const ScoreRow> rows) {
    std::vector<RankedPair> scored;
    scored.reserve(rows.size());
    std::unordered_map<std::size_t, const ScoreRow*> by_id;
    for (const auto& r : rows) {
        scored.push_back({r.pair_id, r.score});
        by_id.emplace(r.pair_id, &r);
    }
    const Ranking ranking = rank_by_score(scored);

    std::ofstream out(path);
    if (!out) throw Error(ErrorCode::ParseError, "cannot write scores " + path.string());
    for (std::size_t i = 0; i < ranking.size(); ++i) {
        const ScoreRow& r = *by_id.at(ranking[i].pair_id);
        json j;
        j["pair_id"] = r.pair_id;
        j["x_name"] = data.x_name(r.pair_id);
        j["y_name"] = data.y_name(r.pair_id);
        j["method"] = std::string(to_string(method));
        j["score"] = number(r.score);
        j["f_stat"] = number(r.f_stat);
        j["f_pvalue"] = number(r.f_pvalue);
        j["t_stat"] = number(r.t_stat);
        j["t_pvalue"] = number(r.t_pvalue);
        j["df1"] = r.df1;
        j["df2"] = r.df2;
        j["flagged"] = r.flagged;
        j["rank"] = i + 1;
        out << j.dump() << '\n';
    }
}

std::vector<ScoreRecord> read_scores(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::ParseError, "cannot open scores " + path.string());
    std::vector<ScoreRecord> records;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        try {
            const json j = json::parse(line);
            records.push_back({j.at("pair_id").get<std::size_t>(), j.at("x_name").get<std::string>(),
                               j.at("y_name").get<std::string>(), j.at("method").get<std::string>(),
                               number_or_nan(j.at("score")), j.value("rank", std::size_t{0})});
        } catch (const json::exception& e) {
            throw Error(ErrorCode::ParseError, path.string() + ":" + std::to_string(line_no) + ": " + e.what());
        }
    }
    return records;
}

std::vector<EvalRow> evaluate_scores(std::span<const ScoreRecord> records, std::span<const ReferenceEntry> reference,
                                     double true_threshold, double false_threshold) {
    std::vector<std::string> order;
    std::map<std::string, std::vector<const ScoreRecord*>> groups;
    for (const auto& r : records) {
        auto [it, inserted] = groups.try_emplace(r.method);
        if (inserted) order.push_back(r.method);
        it->second.push_back(&r);
    }
    std::vector<EvalRow> out;
    for (const auto& method : order) {
        const auto& group = groups.at(method);
        std::vector<PairKey> keys;
        keys.reserve(group.size());
        for (const auto* r : group) keys.push_back({r->x_name, r->y_name});
        const auto labeled = label_from_reference(keys, reference, true_threshold, false_threshold);
        std::vector<double> scores;
        scores.reserve(labeled.pair_ids.size());
        for (std::size_t id : labeled.pair_ids) scores.push_back(group[id]->score);
        out.push_back({method, auprc(scores, labeled.labels), auroc(scores, labeled.labels), labeled.n_true(),
                       labeled.n_false()});
    }
    return out;
}

// Subcommands ----------------------------------------------------------------

DagStats cmd_build_dag(const BuildDagOptions& options) {
    const NamedMatrix embedding = read_matrix(options.embedding_path);
    const std::vector<double> pseudotime = read_vector(options.pseudotime_path);
    if (pseudotime.size() != embedding.n_nodes()) {
        throw Error(ErrorCode::DimensionMismatch, "embedding has " + std::to_string(embedding.n_nodes()) +
                                                      " rows, pseudotime has " + std::to_string(pseudotime.size()));
    }
    const auto knn = knn_graph(embedding.values, options.k, options.workers);
    Dag dag = [&] {
        try {
            return orient_by_pseudotime(embedding.n_nodes(), symmetrize(knn), pseudotime);
        } catch (const Error& e) {
            if (e.code() == ErrorCode::CycleDetected) throw std::logic_error(std::string("internal: ") + e.what());
            throw;
        }
    }();

    DagStats stats{dag.size(), dag.edges().size(), dag.n_roots(), dag.max_in_degree()};
    if (stats.n_edges == 0) spdlog::warn("no kNN edge points forward in pseudotime; the DAG has no edges");
    write_edge_list(options.output_edges, dag.edges(), dag.size());
    spdlog::info("DAG: {} nodes, {} edges, {} roots, max in-degree {}", stats.n_nodes, stats.n_edges, stats.n_roots,
                 stats.max_in_degree);
    if (!options.output_stats.empty()) {
        std::ofstream out(options.output_stats);
        if (!out) throw Error(ErrorCode::ParseError, "cannot write " + options.output_stats.string());
        json j{{"n_nodes", stats.n_nodes},
               {"n_edges", stats.n_edges},
               {"n_roots", stats.n_roots},
               {"max_in_degree", stats.max_in_degree}};
        out << j.dump(2) << '\n';
    }
    return stats;
}

std::vector<NamedPosition> read_positions(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::ParseError, "cannot open positions " + path.string());
    std::vector<NamedPosition> out;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || line[0] == '#') continue;
        std::istringstream fields(line);
        NamedPosition p;
        std::string pos;
        if (!std::getline(fields, p.name, '\t') || !std::getline(fields, p.sequence, '\t') ||
            !std::getline(fields, pos, '\t')) {
            throw Error(ErrorCode::ParseError, path.string() + ":" + std::to_string(line_no) +
                                                   ": expected 'name<TAB>sequence<TAB>position'");
        }
        try {
            std::size_t used = 0;
            p.position = std::stoll(pos, &used);
            if (used != pos.size()) throw std::invalid_argument(pos);
        } catch (const std::exception&) {
            throw Error(ErrorCode::ParseError,
                        path.string() + ":" + std::to_string(line_no) + ": bad position '" + pos + "'");
        }
        out.push_back(std::move(p));
    }
    return out;
}

std::vector<CandidatePair> window_pairs(const std::vector<std::string>& x_names,
                                        const std::vector<std::string>& y_names,
                                        std::span<const NamedPosition> x_positions,
                                        std::span<const NamedPosition> y_positions, double max_distance) {
    std::unordered_map<std::string, const NamedPosition*> x_pos, y_pos;
    for (const auto& p : x_positions) x_pos.emplace(p.name, &p);
    for (const auto& p : y_positions) y_pos.emplace(p.name, &p);

    // Per sequence, x indices sorted by position.
    std::map<std::string, std::vector<std::pair<std::int64_t, std::size_t>>> by_sequence;
    for (std::size_t j = 0; j < x_names.size(); ++j) {
        auto it = x_pos.find(x_names[j]);
        if (it != x_pos.end()) by_sequence[it->second->sequence].emplace_back(it->second->position, j);
    }
    for (auto& [seq, v] : by_sequence) std::sort(v.begin(), v.end());

    std::vector<CandidatePair> pairs;
    for (std::size_t i = 0; i < y_names.size(); ++i) {
        auto it = y_pos.find(y_names[i]);
        if (it == y_pos.end()) continue;
        auto seq = by_sequence.find(it->second->sequence);
        if (seq == by_sequence.end()) continue;
        const auto& xs = seq->second;
        const double center = static_cast<double>(it->second->position);
        auto lo = std::lower_bound(xs.begin(), xs.end(), center - max_distance,
                                   [](const auto& e, double v) { return static_cast<double>(e.first) < v; });
        std::vector<std::size_t> hits;
        for (; lo != xs.end() && static_cast<double>(lo->first) <= center + max_distance; ++lo) hits.push_back(lo->second);
        std::sort(hits.begin(), hits.end());
        for (std::size_t j : hits) pairs.push_back({j, i});
    }
    return pairs;
}

std::size_t cmd_candidates(const CandidateOptions& options) {
    Dataset data;
    data.x = read_matrix(options.x_path);
    data.y = read_matrix(options.y_path);
    if (options.x_positions.empty() != options.y_positions.empty()) {
        throw Error(ErrorCode::ConfigError, "x and y positions must be given together");
    }
    if (options.x_positions.empty()) {
        data.pairs = cross_product(data.x.n_vars(), data.y.n_vars());
    } else {
        data.pairs = window_pairs(data.x.names, data.y.names, read_positions(options.x_positions),
                                  read_positions(options.y_positions), options.max_distance);
    }
    write_pairs(options.output_pairs, data);
    spdlog::info("{} candidate pairs", data.pairs.size());
    return data.pairs.size();
}

RunOutcome cmd_run(const RunConfig& config) {
    config.validate_inputs();
    std::filesystem::create_directories(config.output_dir);

    RunManifest manifest;
    manifest.config = config.echo();
    manifest.seed = config.train.seed;
    manifest.version = GRANGERNET_VERSION;
    for (const auto* p : {&config.x_path, &config.y_path, &config.pairs_path, &config.x_positions,
                          &config.y_positions, &config.edges_path, &config.embedding_path, &config.pseudotime_path,
                          &config.reference_path}) {
        if (!p->empty()) manifest.inputs.push_back(digest(*p));
    }

    RunOutcome outcome;

    Stopwatch load_clock;
    Dataset data;
    data.x = read_matrix(config.x_path);
    data.y = read_matrix(config.y_path);
    if (!config.pairs_path.empty()) {
        data.pairs = read_pairs(config.pairs_path, data.x.names, data.y.names);
    } else if (!config.x_positions.empty()) {
        data.pairs = window_pairs(data.x.names, data.y.names, read_positions(config.x_positions),
                                  read_positions(config.y_positions), config.max_distance);
    } else {
        data.pairs = cross_product(data.x.n_vars(), data.y.n_vars());
    }
    data.validate();
    std::vector<double> pseudotime;
    if (!config.pseudotime_path.empty()) {
        pseudotime = read_vector(config.pseudotime_path);
        if (pseudotime.size() != data.n_nodes()) {
            throw Error(ErrorCode::DimensionMismatch, "pseudotime has " + std::to_string(pseudotime.size()) +
                                                          " entries for " + std::to_string(data.n_nodes()) + " nodes");
        }
    }
    Eigen::MatrixXd embedding;
    if (!config.embedding_path.empty()) {
        embedding = read_matrix(config.embedding_path).values;
        if (static_cast<std::size_t>(embedding.rows()) != data.n_nodes()) {
            throw Error(ErrorCode::DimensionMismatch, "embedding rows do not match the node count");
        }
    }
    manifest.stages.push_back({"load", load_clock.seconds(), {}});
    spdlog::info("loaded {} nodes, {} x vars, {} y vars, {} candidate pairs", data.n_nodes(), data.x.n_vars(),
                 data.y.n_vars(), data.pairs.size());
    if (data.pairs.empty()) throw Error(ErrorCode::InvalidArgument, "no candidate pairs");

    const std::string method_name(to_string(config.method));
    outcome.scores_path = config.output_dir / ("scores_" + method_name + ".jsonl");

    if (config.method == Method::gnn) {
        Stopwatch dag_clock;
        StageRecord dag_stage{"dag", 0.0, {}};
        Dag dag;
        if (config.resolved_dag_source() == DagSource::edges) {
            const auto list = read_edge_list(config.edges_path);
            if (list.inferred_nodes > data.n_nodes()) {
                throw Error(ErrorCode::NodeIdOutOfRange, "edge list names more nodes than the matrices have");
            }
            dag = build_dag(data.n_nodes(), list.edges);
        } else {
            const auto knn = knn_graph(embedding, config.k, config.workers);
            dag = orient_by_pseudotime(data.n_nodes(), symmetrize(knn), pseudotime);
            const auto edges_out = config.output_dir / "dag_edges.tsv";
            write_edge_list(edges_out, dag.edges(), dag.size());
            dag_stage.outputs.push_back(digest(edges_out));
        }
        if (dag.edges().empty()) spdlog::warn("the DAG has no edges; every node is a root");
        dag_stage.wall_seconds = dag_clock.seconds();
        manifest.stages.push_back(std::move(dag_stage));

        Stopwatch train_clock;
        const auto ops = lagged_operators(dag);
        const TrainResult result = train_all(data, ops, config.train, config.workers);
        StageRecord train_stage{"train", 0.0, {}};
        if (config.write_checkpoint) {
            const auto ckpt = config.output_dir / "checkpoint.json";
            write_checkpoint(ckpt, data, config.train, result);
            train_stage.outputs.push_back(digest(ckpt));
        }
        train_stage.wall_seconds = train_clock.seconds();
        manifest.stages.push_back(std::move(train_stage));
        outcome.failed_pairs = static_cast<std::size_t>(
            std::count_if(result.fits.begin(), result.fits.end(), [](const PairFit& f) { return !f.ok; }));
        spdlog::info("trained {} epochs{}, {} failed pairs", result.epochs_run,
                     result.converged ? " (converged)" : "", outcome.failed_pairs);

        Stopwatch score_clock;
        outcome.rows = score_gnn(data, result, config.train.layers, config.rank_mode);
        write_scores(outcome.scores_path, data, config.method, outcome.rows);
        manifest.stages.push_back({"score", score_clock.seconds(), {digest(outcome.scores_path)}});
    } else {
        Stopwatch score_clock;
        switch (config.method) {
            case Method::pearson: outcome.rows = score_pearson(data); break;
            case Method::pseudocell: {
                const std::size_t k = std::min(config.pseudocell_neighborhood, data.n_nodes() - 1);
                const auto knn = knn_graph(embedding, k, config.workers);
                outcome.rows = score_pseudocell(data, knn, config.pseudocell_neighborhood);
                break;
            }
            case Method::var: outcome.rows = score_var(data, pseudotime, config.n_bins, config.var_lag); break;
            case Method::gnn: break;
        }
        write_scores(outcome.scores_path, data, config.method, outcome.rows);
        manifest.stages.push_back({"score", score_clock.seconds(), {digest(outcome.scores_path)}});
    }

    if (!config.reference_path.empty()) {
        Stopwatch eval_clock;
        std::vector<ScoreRecord> records;
        records.reserve(outcome.rows.size());
        for (const auto& r : outcome.rows) {
            records.push_back({r.pair_id, data.x_name(r.pair_id), data.y_name(r.pair_id), method_name, r.score, 0});
        }
        outcome.metrics = evaluate_scores(records, read_reference(config.reference_path), config.true_threshold,
                                          config.false_threshold);
        manifest.metrics = outcome.metrics;
        manifest.stages.push_back({"eval", eval_clock.seconds(), {}});
        for (const auto& m : outcome.metrics) {
            spdlog::info("{}: AUPRC {:.4f}, AUROC {:.4f} ({} true, {} false)", m.method, m.auprc, m.auroc, m.n_true,
                         m.n_false);
        }
    }

    outcome.manifest_path = config.output_dir / ("manifest_" + method_name + ".json");
    write_manifest(outcome.manifest_path, manifest);
    return outcome;
}

std::vector<EvalRow> cmd_eval(const EvalOptions& options) {
    if (options.score_paths.empty()) throw Error(ErrorCode::ConfigError, "no score files given");
    std::vector<ScoreRecord> records;
    for (const auto& p : options.score_paths) {
        auto part = read_scores(p);
        records.insert(records.end(), part.begin(), part.end());
    }
    const auto rows = evaluate_scores(records, read_reference(options.reference_path), options.true_threshold,
                                      options.false_threshold);
    if (!options.output.empty()) {
        std::ofstream out(options.output);
        if (!out) throw Error(ErrorCode::ParseError, "cannot write " + options.output.string());
        for (const auto& r : rows) {
            out << json{{"method", r.method},
                        {"auprc", r.auprc},
                        {"auroc", r.auroc},
                        {"n_true", r.n_true},
                        {"n_false", r.n_false}}
                       .dump()
                << '\n';
        }
    }
    return rows;
}

void cmd_synth(const SynthSpec& spec, const SynthOptions& options) {
    const SynthDataset s = generate_synthetic(spec);
    write_synthetic(options.output_dir, s);
    // A ready-made run configuration for the bundle.
    std::ofstream cfg(options.output_dir / "run.conf");
    cfg << "x = x.tsv\ny = y.tsv\npairs = pairs.tsv\nedges = edges.tsv\nembedding = embedding.tsv\n"
           "pseudotime = pseudotime.txt\ndag_source = edges\nreference = reference.tsv\n"
        << "seed = " << spec.seed << "\noutput_dir = results\n";
    if (!cfg) throw Error(ErrorCode::ParseError, "cannot write run.conf in " + options.output_dir.string());
    spdlog::info("synthetic bundle: {} nodes, {} edges, {} candidate pairs, {} planted", s.dag.size(),
                 s.dag.edges().size(), s.data.pairs.size(), s.truth.size());
}

int exit_code_for(ErrorCode code) {
    switch (code) {
        case ErrorCode::ConfigError:
        case ErrorCode::InvalidArgument: return 2;
        default: return 3;
    }
}

}  // namespace grangernet
