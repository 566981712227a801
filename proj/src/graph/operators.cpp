#include <algorithm>
#include <string>

#include "grangernet/error.hpp"
#include "grangernet/graph.hpp"

namespace grangernet {

SparseColumnMatrix::SparseColumnMatrix(std::size_t n, std::vector<std::size_t> col_ptr,
                                       std::vector<NodeId> row_idx, std::vector<double> values)
    : n_(n), col_ptr_(std::move(col_ptr)), row_idx_(std::move(row_idx)), values_(std::move(values)) {
    if (col_ptr_.size() != n_ + 1 || row_idx_.size() != values_.size() ||
        col_ptr_.back() != values_.size()) {
        throw Error(ErrorCode::DimensionMismatch, "inconsistent compressed column arrays");
    }
}

std::span<const NodeId> SparseColumnMatrix::column_rows(std::size_t j) const {
    return {row_idx_.data() + col_ptr_[j], col_ptr_[j + 1] - col_ptr_[j]};
}

std::span<const double> SparseColumnMatrix::column_values(std::size_t j) const {
    return {values_.data() + col_ptr_[j], col_ptr_[j + 1] - col_ptr_[j]};
}

double SparseColumnMatrix::at(std::size_t i, std::size_t j) const {
    auto rows = column_rows(j);
    auto it = std::lower_bound(rows.begin(), rows.end(), static_cast<NodeId>(i));
    if (it == rows.end() || *it != i) return 0.0;
    return column_values(j)[static_cast<std::size_t>(it - rows.begin())];
}

double SparseColumnMatrix::column_sum(std::size_t j) const {
    double s = 0.0;
    for (double x : column_values(j)) s += x;
    return s;
}

void SparseColumnMatrix::transpose_apply(std::span<const double> v, std::span<double> out) const {
    const NodeId* rows = row_idx_.data();
    const double* vals = values_.data();
    for (std::size_t j = 0; j < n_; ++j) {
        double acc = 0.0;
        for (std::size_t p = col_ptr_[j]; p < col_ptr_[j + 1]; ++p) acc += vals[p] * v[rows[p]];
        out[j] = acc;
    }
}

void SparseColumnMatrix::apply(std::span<const double> v, std::span<double> out) const {
    std::fill(out.begin(), out.end(), 0.0);
    const NodeId* rows = row_idx_.data();
    const double* vals = values_.data();
    for (std::size_t j = 0; j < n_; ++j) {
        const double vj = v[j];
        if (vj == 0.0) continue;
        for (std::size_t p = col_ptr_[j]; p < col_ptr_[j + 1]; ++p) out[rows[p]] += vals[p] * vj;
    }
}

LaggedOperators lagged_operators(const Dag& dag) {
    const std::size_t n = dag.size();
    std::vector<std::size_t> a_ptr(n + 1, 0), ap_ptr(n + 1, 0);
    std::vector<NodeId> a_rows, ap_rows;
    std::vector<double> a_vals, ap_vals;
    a_rows.reserve(dag.edges().size());
    a_vals.reserve(dag.edges().size());
    ap_rows.reserve(dag.edges().size() + n);
    ap_vals.reserve(dag.edges().size() + n);

    for (std::size_t j = 0; j < n; ++j) {
        auto parents = dag.parents(static_cast<NodeId>(j));
        const double d = static_cast<double>(parents.size());
        const double w_plus = 1.0 / (d + 1.0);
        bool diag_done = false;
        for (NodeId i : parents) {
            a_rows.push_back(i);
            a_vals.push_back(1.0 / d);
            if (!diag_done && i > j) {
                ap_rows.push_back(static_cast<NodeId>(j));
                ap_vals.push_back(w_plus);
                diag_done = true;
            }
            ap_rows.push_back(i);
            ap_vals.push_back(w_plus);
        }
        if (!diag_done) {
            ap_rows.push_back(static_cast<NodeId>(j));
            ap_vals.push_back(w_plus);
        }
        a_ptr[j + 1] = a_rows.size();
        ap_ptr[j + 1] = ap_rows.size();
    }
    return {SparseColumnMatrix(n, std::move(a_ptr), std::move(a_rows), std::move(a_vals)),
            SparseColumnMatrix(n, std::move(ap_ptr), std::move(ap_rows), std::move(ap_vals))};
}

std::vector<double> transpose_apply(const SparseColumnMatrix& m, std::span<const double> v) {
    if (v.size() != m.size()) {
        throw Error(ErrorCode::DimensionMismatch, "vector of length " + std::to_string(v.size()) +
                                                      " for operator of size " + std::to_string(m.size()));
    }
    std::vector<double> out(m.size());
    m.transpose_apply(v, out);
    return out;
}

Eigen::MatrixXd transpose_apply_batch(const SparseColumnMatrix& m, const Eigen::MatrixXd& v) {
    if (static_cast<std::size_t>(v.rows()) != m.size()) {
        throw Error(ErrorCode::DimensionMismatch, "batch with " + std::to_string(v.rows()) +
                                                      " rows for operator of size " + std::to_string(m.size()));
    }
    Eigen::MatrixXd out(v.rows(), v.cols());
    const auto n = static_cast<std::size_t>(v.rows());
    for (Eigen::Index k = 0; k < v.cols(); ++k) {
        m.transpose_apply({v.col(k).data(), n}, {out.col(k).data(), n});
    }
    return out;
}

}  // namespace grangernet
