#include <charconv>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <string>

#include "grangernet/error.hpp"
#include "grangernet/preprocess.hpp"

namespace grangernet {

namespace {

std::vector<std::string> split_fields(const std::string& line) {
    std::vector<std::string> out;
    std::string field;
    for (char ch : line) {
        if (ch == ',' || ch == ' ' || ch == '\t' || ch == '\r') {
            if (!field.empty()) out.push_back(std::move(field));
            field.clear();
        } else {
            field.push_back(ch);
        }
    }
    if (!field.empty()) out.push_back(std::move(field));
    return out;
}

double parse_double(const std::string& s, const std::filesystem::path& path, std::size_t line_no) {
    double value = 0.0;
    const char* first = s.data();
    const char* last = s.data() + s.size();
    if (!s.empty() && *first == '+') ++first;
    auto [ptr, ec] = std::from_chars(first, last, value);
    if (ec != std::errc() || ptr != last) {
        throw Error(ErrorCode::ParseError,
                    path.string() + ":" + std::to_string(line_no) + ": cannot parse '" + s + "' as a number");
    }
    return value;
}

NamedMatrix read_matrix_market(std::ifstream& in, const std::filesystem::path& path) {
    std::string line;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line[0] != '%') break;
    }
    std::istringstream header(line);
    std::size_t rows = 0, cols = 0, nnz = 0;
    if (!(header >> rows >> cols >> nnz)) {
        throw Error(ErrorCode::ParseError, path.string() + ":" + std::to_string(line_no) + ": bad size line");
    }
    NamedMatrix m;
    m.values = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
    for (std::size_t j = 0; j < cols; ++j) m.names.push_back("var" + std::to_string(j));
    std::size_t read = 0;
    while (read < nnz && std::getline(in, line)) {
        ++line_no;
        if (line.empty() || line[0] == '%') continue;
        auto f = split_fields(line);
        if (f.size() < 2) {
            throw Error(ErrorCode::ParseError, path.string() + ":" + std::to_string(line_no) + ": bad entry");
        }
        const auto i = static_cast<std::size_t>(parse_double(f[0], path, line_no));
        const auto j = static_cast<std::size_t>(parse_double(f[1], path, line_no));
        const double v = f.size() > 2 ? parse_double(f[2], path, line_no) : 1.0;
        if (i < 1 || i > rows || j < 1 || j > cols) {
            throw Error(ErrorCode::ParseError, path.string() + ":" + std::to_string(line_no) + ": index out of range");
        }
        m.values(static_cast<Eigen::Index>(i - 1), static_cast<Eigen::Index>(j - 1)) += v;
        ++read;
    }
    if (read != nnz) {
        throw Error(ErrorCode::ParseError, path.string() + ": expected " + std::to_string(nnz) + " entries, found " +
                                               std::to_string(read));
    }
    return m;
}

}  // namespace

NamedMatrix read_matrix(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::ParseError, "cannot open matrix " + path.string());

    std::string line;
    if (!std::getline(in, line)) throw Error(ErrorCode::ParseError, path.string() + ": empty file");
    if (line.rfind("%%MatrixMarket", 0) == 0) {
        if (line.find("coordinate") == std::string::npos) {
            throw Error(ErrorCode::ParseError, path.string() + ": only coordinate MatrixMarket files are supported");
        }
        return read_matrix_market(in, path);
    }

    NamedMatrix m;
    m.names = split_fields(line);
    if (m.names.empty()) throw Error(ErrorCode::ParseError, path.string() + ":1: empty header");
    const std::size_t cols = m.names.size();
    std::vector<double> data;
    std::size_t line_no = 1, rows = 0;
    while (std::getline(in, line)) {
        ++line_no;
        auto fields = split_fields(line);
        if (fields.empty()) continue;
        if (fields.size() != cols) {
            throw Error(ErrorCode::ParseError, path.string() + ":" + std::to_string(line_no) + ": expected " +
                                                   std::to_string(cols) + " fields, found " +
                                                   std::to_string(fields.size()));
        }
        for (const auto& f : fields) data.push_back(parse_double(f, path, line_no));
        ++rows;
    }
    m.values.resize(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
    for (std::size_t i = 0; i < rows; ++i) {
        for (std::size_t j = 0; j < cols; ++j) {
            m.values(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = data[i * cols + j];
        }
    }
    return m;
}

void write_matrix(const std::filesystem::path& path, const NamedMatrix& m) {
    std::ofstream out(path);
    if (!out) throw Error(ErrorCode::ParseError, "cannot write matrix " + path.string());
    for (std::size_t j = 0; j < m.names.size(); ++j) out << (j ? "\t" : "") << m.names[j];
    out << '\n' << std::setprecision(17);
    for (Eigen::Index i = 0; i < m.values.rows(); ++i) {
        for (Eigen::Index j = 0; j < m.values.cols(); ++j) out << (j ? "\t" : "") << m.values(i, j);
        out << '\n';
    }
}

std::vector<double> read_vector(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::ParseError, "cannot open " + path.string());
    std::vector<double> out;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        auto fields = split_fields(line);
        if (fields.empty() || fields[0][0] == '#') continue;
        if (fields.size() != 1) {
            throw Error(ErrorCode::ParseError, path.string() + ":" + std::to_string(line_no) + ": expected one value");
        }
        out.push_back(parse_double(fields[0], path, line_no));
    }
    return out;
}

void write_vector(const std::filesystem::path& path, std::span<const double> v) {
    std::ofstream out(path);
    if (!out) throw Error(ErrorCode::ParseError, "cannot write " + path.string());
    out << std::setprecision(17);
    for (double x : v) out << x << '\n';
}

}  // namespace grangernet
