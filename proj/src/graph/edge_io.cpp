#include <algorithm>
#include <fstream>
#include <limits>
#include <sstream>
#include <string>

#include "grangernet/error.hpp"
#include "grangernet/graph.hpp"

namespace grangernet {

EdgeList read_edge_list(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::ParseError, "cannot open edge list " + path.string());

    EdgeList out;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.rfind("# n_nodes=", 0) == 0) {
            std::istringstream header(line.substr(10));
            std::size_t n = 0;
            if (!(header >> n)) {
                throw Error(ErrorCode::ParseError, path.string() + ":" + std::to_string(line_no) + ": bad n_nodes header");
            }
            out.inferred_nodes = std::max(out.inferred_nodes, n);
            continue;
        }
        if (line.empty() || line[0] == '#') continue;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        std::istringstream fields(line);
        long long src = -1, dst = -1;
        std::string extra;
        if (!(fields >> src >> dst) || (fields >> extra) || src < 0 || dst < 0 ||
            src > std::numeric_limits<NodeId>::max() || dst > std::numeric_limits<NodeId>::max()) {
            throw Error(ErrorCode::ParseError,
                        path.string() + ":" + std::to_string(line_no) + ": expected 'src<TAB>dst'");
        }
        out.edges.push_back({static_cast<NodeId>(src), static_cast<NodeId>(dst)});
        out.inferred_nodes = std::max<std::size_t>(
            out.inferred_nodes, static_cast<std::size_t>(std::max(src, dst)) + 1);
    }
    return out;
}

void write_edge_list(const std::filesystem::path& path, std::span<const Edge> edges,
                     std::optional<std::size_t> n_nodes) {
    std::ofstream out(path);
    if (!out) throw Error(ErrorCode::ParseError, "cannot write edge list " + path.string());
    if (n_nodes) out << "# n_nodes=" << *n_nodes << '\n';
    for (const auto& e : edges) out << e.src << '\t' << e.dst << '\n';
}

}  // namespace grangernet
