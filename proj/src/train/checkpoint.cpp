#include <fstream>

#include "json.hpp"

#include "grangernet/error.hpp"
#include "grangernet/train.hpp"

namespace grangernet {

namespace {

constexpr const char* kFormat = "grangernet-checkpoint";
constexpr const char* kLayout = "x_full.w,x_full.b,y_full.w,y_full.b,y_reduced.w,y_reduced.b,c";

}  // namespace

void write_checkpoint(const std::filesystem::path& path, const Dataset& data, const TrainConfig& config,
                      const TrainResult& result) {
    nlohmann::ordered_json doc;
    doc["format"] = kFormat;
    doc["version"] = 1;
    doc["layers"] = config.layers;
    doc["lag_hops"] = config.lag_hops;
    doc["link"] = config.link == Link::exponential ? "exponential" : "identity";
    doc["layout"] = kLayout;
    auto& pairs = doc["pairs"] = nlohmann::ordered_json::array();
    for (const auto& fit : result.fits) {
        if (!fit.ok) continue;
        nlohmann::ordered_json entry;
        entry["pair_id"] = fit.pair_id;
        entry["x_name"] = data.x_name(fit.pair_id);
        entry["y_name"] = data.y_name(fit.pair_id);
        entry["step"] = fit.steps;
        entry["params"] = fit.model.flatten();
        pairs.push_back(std::move(entry));
    }
    std::ofstream out(path);
    if (!out) throw Error(ErrorCode::ParseError, "cannot write checkpoint " + path.string());
    out << doc.dump() << '\n';
}

Checkpoint read_checkpoint(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::ParseError, "cannot open checkpoint " + path.string());
    nlohmann::json doc;
    try {
        in >> doc;
        if (doc.at("format") != kFormat || doc.at("layout") != kLayout) {
            throw Error(ErrorCode::ParseError, path.string() + ": not a checkpoint in the expected layout");
        }
        Checkpoint cp;
        cp.layers = doc.at("layers").get<std::size_t>();
        cp.lag_hops = doc.at("lag_hops").get<std::size_t>();
        cp.link = doc.at("link") == "exponential" ? Link::exponential : Link::identity;
        for (const auto& entry : doc.at("pairs")) {
            Checkpoint::Entry e;
            e.pair_id = entry.at("pair_id").get<std::size_t>();
            e.x_name = entry.at("x_name").get<std::string>();
            e.y_name = entry.at("y_name").get<std::string>();
            e.steps = entry.at("step").get<std::uint64_t>();
            e.model = PairModel::zeros(cp.layers, cp.lag_hops, cp.link);
            e.model.assign(entry.at("params").get<std::vector<double>>());
            cp.entries.push_back(std::move(e));
        }
        return cp;
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorCode::ParseError, path.string() + ": " + e.what());
    }
}

}  // namespace grangernet
