// grangernet command-line driver.
#include <exception>
#include <iostream>
#include <string>
#include <vector>

#include <spdlog/spdlog.h>

#include "CLI11.hpp"
#include "json.hpp"

#include "grangernet/cli.hpp"
#include "grangernet/error.hpp"

namespace gn = grangernet;

namespace {

void print_metrics(const std::vector<gn::EvalRow>& rows) {
    for (const auto& r : rows) {
        nlohmann::ordered_json j{{"method", r.method},
                                 {"auprc", r.auprc},
                                 {"auroc", r.auroc},
                                 {"n_true", r.n_true},
                                 {"n_false", r.n_false}};
        std::cout << j.dump() << '\n';
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Granger causal discovery on DAG-structured single-cell data"};
    app.set_version_flag("--version", std::string(GRANGERNET_VERSION));
    app.require_subcommand(1);
    std::string log_level = "info";
    app.add_option("--log-level", log_level, "trace, debug, info, warn, error or off")->capture_default_str();

    // build-dag
    gn::BuildDagOptions dag_opts;
    auto* build = app.add_subcommand("build-dag", "kNN graph on an embedding, oriented by pseudotime");
    build->add_option("--embedding", dag_opts.embedding_path, "node-by-dimension matrix")->required();
    build->add_option("--pseudotime", dag_opts.pseudotime_path, "one value per node")->required();
    build->add_option("-k,--k", dag_opts.k, "neighbours per node")->capture_default_str();
    build->add_option("-o,--out", dag_opts.output_edges, "edge list to write")->required();
    build->add_option("--stats", dag_opts.output_stats, "JSON file for graph statistics");
    build->add_option("--workers", dag_opts.workers, "threads for the kNN search")->capture_default_str();

    // candidates
    gn::CandidateOptions cand_opts;
    auto* cand = app.add_subcommand("candidates", "enumerate candidate (x, y) pairs");
    cand->add_option("--x", cand_opts.x_path, "x matrix (header names are used)")->required();
    cand->add_option("--y", cand_opts.y_path, "y matrix (header names are used)")->required();
    cand->add_option("--x-positions", cand_opts.x_positions, "name, sequence, position TSV");
    cand->add_option("--y-positions", cand_opts.y_positions, "name, sequence, position TSV");
    cand->add_option("--max-distance", cand_opts.max_distance, "window half-width")->capture_default_str();
    cand->add_option("-o,--out", cand_opts.output_pairs, "pairs file to write")->required();

    // run
    std::string config_path;
    std::vector<std::string> overrides;
    auto* run = app.add_subcommand("run", "train and score candidate pairs");
    run->add_option("-c,--config", config_path, "key = value config file");
    run->add_option("--set", overrides, "key=value override, repeatable");

    // eval
    gn::EvalOptions eval_opts;
    auto* eval = app.add_subcommand("eval", "AUPRC and AUROC of score files against a reference");
    eval->add_option("--scores", eval_opts.score_paths, "JSON-lines score file(s)")->required();
    eval->add_option("--reference", eval_opts.reference_path, "x, y, value TSV")->required();
    eval->add_option("--true-threshold", eval_opts.true_threshold, "value below this is a true pair")
        ->capture_default_str();
    eval->add_option("--false-threshold", eval_opts.false_threshold, "value above this is a false pair")
        ->capture_default_str();
    eval->add_option("-o,--out", eval_opts.output, "also write the metrics here");

    // synth
    gn::SynthSpec spec;
    gn::SynthOptions synth_opts;
    std::string nonlinearity = "tanh";
    auto* synth = app.add_subcommand("synth", "write a synthetic benchmark bundle");
    synth->add_option("-o,--out", synth_opts.output_dir, "bundle directory")->required();
    synth->add_option("--seed", spec.seed)->capture_default_str();
    synth->add_option("--nodes", spec.n_nodes)->capture_default_str();
    synth->add_option("--branches", spec.n_branches)->capture_default_str();
    synth->add_option("--depth", spec.depth)->capture_default_str();
    synth->add_option("--k", spec.k_neighbors)->capture_default_str();
    synth->add_option("--x-vars", spec.n_x_vars)->capture_default_str();
    synth->add_option("--y-vars", spec.n_y_vars)->capture_default_str();
    synth->add_option("--causal-pairs", spec.n_causal_pairs)->capture_default_str();
    synth->add_option("--candidate-pairs", spec.n_candidate_pairs)->capture_default_str();
    synth->add_option("--lag", spec.lag_steps)->capture_default_str();
    synth->add_option("--coupling", spec.coupling)->capture_default_str();
    synth->add_option("--noise", spec.noise_sd)->capture_default_str();
    synth->add_option("--dropout", spec.dropout_rate)->capture_default_str();
    synth->add_option("--nonlinearity", nonlinearity)
        ->check(CLI::IsMember({"linear", "tanh", "quadratic"}))
        ->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::Success& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    spdlog::set_level(spdlog::level::from_str(log_level));

    try {
        if (*build) {
            gn::cmd_build_dag(dag_opts);
        } else if (*cand) {
            gn::cmd_candidates(cand_opts);
        } else if (*run) {
            gn::RunConfig config = config_path.empty() ? gn::RunConfig{} : gn::read_run_config(config_path);
            gn::apply_overrides(config, overrides);
            const auto outcome = gn::cmd_run(config);
            print_metrics(outcome.metrics);
            std::cerr << "scores: " << outcome.scores_path.string() << "\nmanifest: "
                      << outcome.manifest_path.string() << '\n';
        } else if (*eval) {
            print_metrics(gn::cmd_eval(eval_opts));
        } else if (*synth) {
            spec.nonlinearity = nonlinearity == "linear"   ? gn::Nonlinearity::linear
                                : nonlinearity == "tanh" ? gn::Nonlinearity::tanh
                                                         : gn::Nonlinearity::quadratic;
            try {
                spec.validate();
            } catch (const gn::Error& e) {
                throw gn::Error(gn::ErrorCode::ConfigError, e.what());
            }
            gn::cmd_synth(spec, synth_opts);
        }
    } catch (const gn::Error& e) {
        spdlog::error("{}", e.what());
        return gn::exit_code_for(e.code());
    } catch (const std::exception& e) {
        spdlog::error("internal error: {}", e.what());
        return 4;
    }
    return 0;
}
