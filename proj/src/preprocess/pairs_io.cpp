#include <fstream>
#include <sstream>
#include <unordered_map>

#include "grangernet/dataset.hpp"
#include "grangernet/error.hpp"

namespace grangernet {

std::vector<CandidatePair> read_pairs(const std::filesystem::path& path, const std::vector<std::string>& x_names,
                                      const std::vector<std::string>& y_names) {
    std::unordered_map<std::string, std::size_t> x_index, y_index;
    for (std::size_t j = 0; j < x_names.size(); ++j) x_index.emplace(x_names[j], j);
    for (std::size_t j = 0; j < y_names.size(); ++j) y_index.emplace(y_names[j], j);

    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::ParseError, "cannot open pairs file " + path.string());
    std::vector<CandidatePair> pairs;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || line[0] == '#') continue;
        std::istringstream fields(line);
        std::string xn, yn;
        if (!std::getline(fields, xn, '\t') || !std::getline(fields, yn, '\t')) {
            throw Error(ErrorCode::ParseError, path.string() + ":" + std::to_string(line_no) +
                                                   ": expected 'x_name<TAB>y_name'");
        }
        auto xi = x_index.find(xn);
        auto yi = y_index.find(yn);
        if (xi == x_index.end() || yi == y_index.end()) {
            throw Error(ErrorCode::ParseError, path.string() + ":" + std::to_string(line_no) + ": unknown variable in pair " +
                                                   xn + " -> " + yn);
        }
        pairs.push_back({xi->second, yi->second});
    }
    return pairs;
}

void write_pairs(const std::filesystem::path& path, const Dataset& data) {
    std::ofstream out(path);
    if (!out) throw Error(ErrorCode::ParseError, "cannot write pairs file " + path.string());
    for (std::size_t p = 0; p < data.pairs.size(); ++p) out << data.x_name(p) << '\t' << data.y_name(p) << '\n';
}

}  // namespace grangernet
