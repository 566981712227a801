#include <cmath>

#include "grangernet/error.hpp"
#include "grangernet/preprocess.hpp"

namespace grangernet {

Eigen::MatrixXd log_cpm(const Eigen::MatrixXd& counts, double divisor) {
    if (!(divisor > 0.0) || !std::isfinite(divisor)) {
        throw Error(ErrorCode::InvalidArgument, "log_cpm divisor must be positive");
    }
    Eigen::MatrixXd out = Eigen::MatrixXd::Zero(counts.rows(), counts.cols());
    for (Eigen::Index i = 0; i < counts.rows(); ++i) {
        double total = 0.0;
        for (Eigen::Index j = 0; j < counts.cols(); ++j) {
            const double e = counts(i, j);
            if (!std::isfinite(e) || e < 0.0) {
                throw Error(ErrorCode::NonFiniteInput, "count at (" + std::to_string(i) + ", " +
                                                           std::to_string(j) + ") is not a finite non-negative value");
            }
            total += e;
        }
        if (total == 0.0) continue;
        const double scale = 1e6 / total / divisor;
        for (Eigen::Index j = 0; j < counts.cols(); ++j) out(i, j) = std::log1p(counts(i, j) * scale);
    }
    return out;
}

Eigen::MatrixXd max_scale(const Eigen::MatrixXd& values) {
    Eigen::MatrixXd out = values;
    for (Eigen::Index j = 0; j < out.cols(); ++j) {
        if (out.rows() == 0) break;
        const double mx = out.col(j).maxCoeff();
        if (mx > 0.0) out.col(j) /= mx;
    }
    return out;
}

}  // namespace grangernet
