#include <array>
#include <fstream>
#include <memory>

#include <openssl/evp.h>

#include "json.hpp"

#include "grangernet/cli.hpp"
#include "grangernet/error.hpp"

namespace grangernet {

using json = nlohmann::ordered_json;

std::string sha256_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorCode::ParseError, "cannot read " + path.string());

    std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx(EVP_MD_CTX_new(), &EVP_MD_CTX_free);
    if (!ctx || EVP_DigestInit_ex(ctx.get(), EVP_sha256(), nullptr) != 1) {
        throw std::runtime_error("SHA-256 initialisation failed");
    }
    std::array<char, 1 << 16> buf{};
    while (in) {
        in.read(buf.data(), buf.size());
        if (in.gcount() > 0) EVP_DigestUpdate(ctx.get(), buf.data(), static_cast<std::size_t>(in.gcount()));
    }
    std::array<unsigned char, EVP_MAX_MD_SIZE> md{};
    unsigned int len = 0;
    EVP_DigestFinal_ex(ctx.get(), md.data(), &len);

    static constexpr char hex[] = "0123456789abcdef";
    std::string out;
    out.reserve(2 * len);
    for (unsigned int i = 0; i < len; ++i) {
        out.push_back(hex[md[i] >> 4]);
        out.push_back(hex[md[i] & 0xF]);
    }
    return out;
}

namespace {

json digests_to_json(const std::vector<FileDigest>& files) {
    json arr = json::array();
    for (const auto& f : files) arr.push_back({{"path", f.path}, {"sha256", f.sha256}});
    return arr;
}

std::vector<FileDigest> digests_from_json(const json& arr) {
    std::vector<FileDigest> out;
    for (const auto& f : arr) out.push_back({f.at("path").get<std::string>(), f.at("sha256").get<std::string>()});
    return out;
}

}  // namespace

void write_manifest(const std::filesystem::path& path, const RunManifest& m) {
    json j;
    j["format"] = "grangernet-manifest";
    j["version"] = m.version;
    j["seed"] = m.seed;
    j["config"] = m.config;
    j["inputs"] = digests_to_json(m.inputs);
    json stages = json::array();
    for (const auto& s : m.stages) {
        stages.push_back({{"name", s.name}, {"wall_seconds", s.wall_seconds}, {"outputs", digests_to_json(s.outputs)}});
    }
    j["stages"] = std::move(stages);
    json metrics = json::array();
    for (const auto& r : m.metrics) {
        metrics.push_back({{"method", r.method},
                           {"auprc", r.auprc},
                           {"auroc", r.auroc},
                           {"n_true", r.n_true},
                           {"n_false", r.n_false}});
    }
    j["metrics"] = std::move(metrics);

    std::ofstream out(path);
    if (!out) throw Error(ErrorCode::ParseError, "cannot write manifest " + path.string());
    out << j.dump(2) << '\n';
}

RunManifest read_manifest(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::ParseError, "cannot open manifest " + path.string());
    RunManifest m;
    try {
        const json j = json::parse(in);
        if (j.value("format", "") != "grangernet-manifest") {
            throw Error(ErrorCode::ParseError, path.string() + " is not a run manifest");
        }
        m.version = j.at("version").get<std::string>();
        m.seed = j.at("seed").get<std::uint64_t>();
        m.config = j.at("config").get<std::map<std::string, std::string>>();
        m.inputs = digests_from_json(j.at("inputs"));
        for (const auto& s : j.at("stages")) {
            m.stages.push_back({s.at("name").get<std::string>(), s.at("wall_seconds").get<double>(),
                                digests_from_json(s.at("outputs"))});
        }
        for (const auto& r : j.at("metrics")) {
            m.metrics.push_back({r.at("method").get<std::string>(), r.at("auprc").get<double>(),
                                 r.at("auroc").get<double>(), r.at("n_true").get<std::size_t>(),
                                 r.at("n_false").get<std::size_t>()});
        }
    } catch (const json::exception& e) {
        throw Error(ErrorCode::ParseError, path.string() + ": " + e.what());
    }
    return m;
}

std::vector<std::string> verify_manifest(const RunManifest& m) {
    std::vector<std::string> bad;
    auto check = [&](const FileDigest& f) {
        if (!std::filesystem::exists(f.path) || sha256_file(f.path) != f.sha256) bad.push_back(f.path);
    };
    for (const auto& f : m.inputs) check(f);
    for (const auto& s : m.stages) {
        for (const auto& f : s.outputs) check(f);
    }
    return bad;
}

}  // namespace grangernet
