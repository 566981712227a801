#include <charconv>
#include <fstream>
#include <functional>
#include <sstream>
#include <unordered_map>

#include "grangernet/cli.hpp"
#include "grangernet/error.hpp"

namespace grangernet {

namespace {

std::string_view trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

[[noreturn]] void bad_value(std::string_view key, std::string_view value) {
    throw Error(ErrorCode::ConfigError, "invalid value '" + std::string(value) + "' for " + std::string(key));
}

std::size_t to_count(std::string_view key, std::string_view v) {
    std::size_t out = 0;
    auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
    if (ec != std::errc{} || ptr != v.data() + v.size()) bad_value(key, v);
    return out;
}

double to_real(std::string_view key, std::string_view v) {
    double out = 0.0;
    auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
    if (ec != std::errc{} || ptr != v.data() + v.size()) bad_value(key, v);
    return out;
}

bool to_bool(std::string_view key, std::string_view v) {
    if (v == "true" || v == "1" || v == "yes") return true;
    if (v == "false" || v == "0" || v == "no") return false;
    bad_value(key, v);
}

std::string fmt_real(double v) {
    std::ostringstream os;
    os.precision(17);
    os << v;
    return os.str();
}

std::string_view to_string(Link l) { return l == Link::identity ? "identity" : "exp"; }
std::string_view to_string(RankMode m) { return m == RankMode::f ? "f" : "welch"; }
std::string_view to_string(DagSource s) {
    switch (s) {
        case DagSource::edges: return "edges";
        case DagSource::knn: return "knn";
        case DagSource::unspecified: break;
    }
    return "";
}
std::string_view to_string(Objective o) {
    switch (o) {
        case Objective::joint: return "joint";
        case Objective::full_only: return "full_only";
        case Objective::reduced_only: return "reduced_only";
    }
    return "";
}

}  // namespace

std::string_view to_string(Method m) {
    switch (m) {
        case Method::gnn: return "gnn";
        case Method::pearson: return "pearson";
        case Method::pseudocell: return "pseudocell";
        case Method::var: return "var";
    }
    return "";
}

Method parse_method(std::string_view s) {
    for (Method m : {Method::gnn, Method::pearson, Method::pseudocell, Method::var}) {
        if (to_string(m) == s) return m;
    }
    throw Error(ErrorCode::ConfigError, "unknown method '" + std::string(s) + "' (gnn, pearson, pseudocell, var)");
}

void RunConfig::set(std::string_view key, std::string_view raw) {
    const std::string_view v = trim(raw);
    using Setter = std::function<void(RunConfig&, std::string_view)>;
    static const std::unordered_map<std::string_view, Setter> setters = {
        {"learning_rate", [](RunConfig& c, std::string_view v) { c.train.learning_rate = to_real("learning_rate", v); }},
        {"max_epochs", [](RunConfig& c, std::string_view v) { c.train.max_epochs = to_count("max_epochs", v); }},
        {"minibatch_pairs",
         [](RunConfig& c, std::string_view v) { c.train.minibatch_pairs = to_count("minibatch_pairs", v); }},
        {"layers", [](RunConfig& c, std::string_view v) { c.train.layers = to_count("layers", v); }},
        {"lag_hops", [](RunConfig& c, std::string_view v) { c.train.lag_hops = to_count("lag_hops", v); }},
        {"convergence_numerator",
         [](RunConfig& c, std::string_view v) { c.train.convergence_numerator = to_real("convergence_numerator", v); }},
        {"seed", [](RunConfig& c, std::string_view v) { c.train.seed = to_count("seed", v); }},
        {"link",
         [](RunConfig& c, std::string_view v) {
             if (v == "identity") c.train.link = Link::identity;
             else if (v == "exp") c.train.link = Link::exponential;
             else bad_value("link", v);
         }},
        {"objective",
         [](RunConfig& c, std::string_view v) {
             if (v == "joint") c.train.objective = Objective::joint;
             else if (v == "full_only") c.train.objective = Objective::full_only;
             else if (v == "reduced_only") c.train.objective = Objective::reduced_only;
             else bad_value("objective", v);
         }},
        {"method", [](RunConfig& c, std::string_view v) { c.method = parse_method(v); }},
        {"rank_mode",
         [](RunConfig& c, std::string_view v) {
             if (v == "f") c.rank_mode = RankMode::f;
             else if (v == "welch") c.rank_mode = RankMode::welch;
             else bad_value("rank_mode", v);
         }},
        {"x", [](RunConfig& c, std::string_view v) { c.x_path = v; }},
        {"y", [](RunConfig& c, std::string_view v) { c.y_path = v; }},
        {"pairs", [](RunConfig& c, std::string_view v) { c.pairs_path = v; }},
        {"x_positions", [](RunConfig& c, std::string_view v) { c.x_positions = v; }},
        {"y_positions", [](RunConfig& c, std::string_view v) { c.y_positions = v; }},
        {"max_distance", [](RunConfig& c, std::string_view v) { c.max_distance = to_real("max_distance", v); }},
        {"edges", [](RunConfig& c, std::string_view v) { c.edges_path = v; }},
        {"embedding", [](RunConfig& c, std::string_view v) { c.embedding_path = v; }},
        {"pseudotime", [](RunConfig& c, std::string_view v) { c.pseudotime_path = v; }},
        {"dag_source",
         [](RunConfig& c, std::string_view v) {
             if (v == "edges") c.dag_source = DagSource::edges;
             else if (v == "knn") c.dag_source = DagSource::knn;
             else bad_value("dag_source", v);
         }},
        {"k", [](RunConfig& c, std::string_view v) { c.k = to_count("k", v); }},
        {"output_dir", [](RunConfig& c, std::string_view v) { c.output_dir = v; }},
        {"reference", [](RunConfig& c, std::string_view v) { c.reference_path = v; }},
        {"true_threshold", [](RunConfig& c, std::string_view v) { c.true_threshold = to_real("true_threshold", v); }},
        {"false_threshold",
         [](RunConfig& c, std::string_view v) { c.false_threshold = to_real("false_threshold", v); }},
        {"pseudocell_neighborhood",
         [](RunConfig& c, std::string_view v) {
             c.pseudocell_neighborhood = to_count("pseudocell_neighborhood", v);
         }},
        {"n_bins", [](RunConfig& c, std::string_view v) { c.n_bins = to_count("n_bins", v); }},
        {"var_lag", [](RunConfig& c, std::string_view v) { c.var_lag = to_count("var_lag", v); }},
        {"workers", [](RunConfig& c, std::string_view v) { c.workers = to_count("workers", v); }},
        {"checkpoint", [](RunConfig& c, std::string_view v) { c.write_checkpoint = to_bool("checkpoint", v); }},
    };
    auto it = setters.find(trim(key));
    if (it == setters.end()) throw Error(ErrorCode::ConfigError, "unknown config key '" + std::string(key) + "'");
    it->second(*this, v);
}

DagSource RunConfig::resolved_dag_source() const {
    if (dag_source != DagSource::unspecified) return dag_source;
    const bool has_edges = !edges_path.empty();
    const bool has_knn = !embedding_path.empty() && !pseudotime_path.empty();
    if (has_edges && has_knn) {
        throw Error(ErrorCode::ConfigError, "both an edge list and embedding+pseudotime given; set dag_source");
    }
    if (has_edges) return DagSource::edges;
    if (has_knn) return DagSource::knn;
    throw Error(ErrorCode::ConfigError, "no DAG source: give edges, or embedding and pseudotime");
}

void RunConfig::validate() const {
    train.validate();
    if (x_path.empty() || y_path.empty()) throw Error(ErrorCode::ConfigError, "x and y matrices are required");
    if (output_dir.empty()) throw Error(ErrorCode::ConfigError, "output_dir is required");
    const DagSource source = resolved_dag_source();
    if (source == DagSource::edges && edges_path.empty()) {
        throw Error(ErrorCode::ConfigError, "dag_source = edges needs an edge list");
    }
    if (source == DagSource::knn && (embedding_path.empty() || pseudotime_path.empty())) {
        throw Error(ErrorCode::ConfigError, "dag_source = knn needs embedding and pseudotime");
    }
    if (k < 1) throw Error(ErrorCode::ConfigError, "k must be >= 1");
    if (method == Method::pseudocell && embedding_path.empty()) {
        throw Error(ErrorCode::ConfigError, "method pseudocell needs an embedding");
    }
    if (method == Method::var && pseudotime_path.empty()) {
        throw Error(ErrorCode::ConfigError, "method var needs pseudotime");
    }
    if (x_positions.empty() != y_positions.empty()) {
        throw Error(ErrorCode::ConfigError, "x_positions and y_positions go together");
    }
    if (!pairs_path.empty() && !x_positions.empty()) {
        throw Error(ErrorCode::ConfigError, "give either a pairs file or positions, not both");
    }
    if (!(max_distance >= 0.0)) throw Error(ErrorCode::ConfigError, "max_distance must be >= 0");
    if (!(true_threshold <= false_threshold)) {
        throw Error(ErrorCode::ConfigError, "true_threshold must not exceed false_threshold");
    }
    if (pseudocell_neighborhood < 1) throw Error(ErrorCode::ConfigError, "pseudocell_neighborhood must be >= 1");
    if (n_bins < 2) throw Error(ErrorCode::ConfigError, "n_bins must be >= 2");
    if (var_lag < 1) throw Error(ErrorCode::ConfigError, "var_lag must be >= 1");
    if (workers < 1) throw Error(ErrorCode::ConfigError, "workers must be >= 1");
}

void RunConfig::validate_inputs() const {
    validate();
    for (const auto* p : {&x_path, &y_path, &pairs_path, &x_positions, &y_positions, &edges_path, &embedding_path,
                          &pseudotime_path, &reference_path}) {
        if (!p->empty() && !std::filesystem::exists(*p)) {
            throw Error(ErrorCode::ConfigError, "input file not found: " + p->string());
        }
    }
}

std::map<std::string, std::string> RunConfig::echo() const {
    return {
        {"learning_rate", fmt_real(train.learning_rate)},
        {"max_epochs", std::to_string(train.max_epochs)},
        {"minibatch_pairs", std::to_string(train.minibatch_pairs)},
        {"layers", std::to_string(train.layers)},
        {"lag_hops", std::to_string(train.lag_hops)},
        {"convergence_numerator", fmt_real(train.convergence_numerator)},
        {"seed", std::to_string(train.seed)},
        {"link", std::string(to_string(train.link))},
        {"objective", std::string(to_string(train.objective))},
        {"method", std::string(to_string(method))},
        {"rank_mode", std::string(to_string(rank_mode))},
        {"x", x_path.string()},
        {"y", y_path.string()},
        {"pairs", pairs_path.string()},
        {"x_positions", x_positions.string()},
        {"y_positions", y_positions.string()},
        {"max_distance", fmt_real(max_distance)},
        {"edges", edges_path.string()},
        {"embedding", embedding_path.string()},
        {"pseudotime", pseudotime_path.string()},
        {"dag_source", std::string(to_string(dag_source))},
        {"k", std::to_string(k)},
        {"output_dir", output_dir.string()},
        {"reference", reference_path.string()},
        {"true_threshold", fmt_real(true_threshold)},
        {"false_threshold", fmt_real(false_threshold)},
        {"pseudocell_neighborhood", std::to_string(pseudocell_neighborhood)},
        {"n_bins", std::to_string(n_bins)},
        {"var_lag", std::to_string(var_lag)},
        {"workers", std::to_string(workers)},
        {"checkpoint", write_checkpoint ? "true" : "false"},
    };
}

RunConfig read_run_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::ConfigError, "cannot open config " + path.string());
    RunConfig config;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        std::string_view s = line;
        // '#' starts a comment at line start or after whitespace.
        for (std::size_t i = 0; i < s.size(); ++i) {
            if (s[i] == '#' && (i == 0 || s[i - 1] == ' ' || s[i - 1] == '\t')) {
                s = s.substr(0, i);
                break;
            }
        }
        s = trim(s);
        if (s.empty()) continue;
        const auto eq = s.find('=');
        if (eq == std::string_view::npos) {
            throw Error(ErrorCode::ConfigError,
                        path.string() + ":" + std::to_string(line_no) + ": expected 'key = value'");
        }
        try {
            config.set(trim(s.substr(0, eq)), s.substr(eq + 1));
        } catch (const Error& e) {
            std::string msg = e.what();
            msg.erase(0, msg.find(": ") + 2);
            throw Error(ErrorCode::ConfigError, path.string() + ":" + std::to_string(line_no) + ": " + msg);
        }
    }
    // Relative paths in a config file are relative to the file itself.
    const auto base = path.parent_path();
    for (auto* p : {&config.x_path, &config.y_path, &config.pairs_path, &config.x_positions, &config.y_positions,
                    &config.edges_path, &config.embedding_path, &config.pseudotime_path, &config.output_dir,
                    &config.reference_path}) {
        if (!p->empty() && p->is_relative()) *p = base / *p;
    }
    return config;
}

void apply_overrides(RunConfig& config, std::span<const std::string> key_values) {
    for (const auto& kv : key_values) {
        const auto eq = kv.find('=');
        if (eq == std::string::npos) throw Error(ErrorCode::ConfigError, "override '" + kv + "' is not key=value");
        config.set(std::string_view(kv).substr(0, eq), std::string_view(kv).substr(eq + 1));
    }
}

}  // namespace grangernet
