#include "mixfactor/gsvd.hpp"

#include <string>
#include <utility>

namespace mixfactor {

DiagMetric::DiagMetric(Eigen::VectorXd w) : weights(std::move(w)) {
    for (Eigen::Index i = 0; i < weights.size(); ++i) {
        if (!(weights[i] > 0.0)) {
            throw SchemaError("metric weight " + std::to_string(i) +
                              " is not strictly positive");
        }
    }
}

DiagMetric DiagMetric::uniform(Eigen::Index size, double value) {
    return DiagMetric(Eigen::VectorXd::Constant(size, value));
}

namespace {

void check_dims(const Eigen::MatrixXd& Z, const DiagMetric& N, const DiagMetric& M) {
    if (N.size() != Z.rows()) {
        throw SchemaError("row metric length " + std::to_string(N.size()) +
                          " does not match " + std::to_string(Z.rows()) + " rows");
    }
    if (M.size() != Z.cols()) {
        throw SchemaError("column metric length " + std::to_string(M.size()) +
                          " does not match " + std::to_string(Z.cols()) + " columns");
    }
}

}  // namespace

GsvdResult gsvd(const Eigen::MatrixXd& Z, const DiagMetric& N, const DiagMetric& M,
                double rank_tol) {
    check_dims(Z, N, M);
    if (!Z.allFinite()) {
        throw NumericError("gsvd input contains non-finite entries");
    }
    if (rank_tol < 0.0) {
        throw SchemaError("rank tolerance must be nonnegative");
    }

    const Eigen::VectorXd ns = N.sqrt().matrix();
    const Eigen::VectorXd ms = M.sqrt().matrix();
    const Eigen::MatrixXd scaled = ns.asDiagonal() * Z * ms.asDiagonal();

    Eigen::JacobiSVD<Eigen::MatrixXd> svd(scaled, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const Eigen::VectorXd& sv = svd.singularValues();

    Eigen::Index rank = 0;
    if (sv.size() > 0) {
        const double cutoff = rank_tol * sv[0];
        while (rank < sv.size() && sv[rank] > cutoff) {
            ++rank;
        }
    }

    GsvdResult result;
    result.rank = rank;
    result.singular_values = sv.head(rank);
    result.U = N.inv_sqrt().matrix().asDiagonal() * svd.matrixU().leftCols(rank);
    result.V = M.inv_sqrt().matrix().asDiagonal() * svd.matrixV().leftCols(rank);

    // Deterministic signs: largest-magnitude entry of each V column positive.
    for (Eigen::Index i = 0; i < rank; ++i) {
        Eigen::Index j = 0;
        result.V.col(i).cwiseAbs().maxCoeff(&j);
        if (result.V(j, i) < 0.0) {
            result.V.col(i) = -result.V.col(i);
            result.U.col(i) = -result.U.col(i);
        }
    }
    return result;
}

Eigen::MatrixXd row_scores(const Eigen::MatrixXd& Z, const DiagMetric& M,
                           const Eigen::MatrixXd& V) {
    if (M.size() != Z.cols() || V.rows() != Z.cols()) {
        throw SchemaError("row_scores: dimension mismatch");
    }
    return Z * M.weights.asDiagonal() * V;
}

Eigen::MatrixXd col_scores(const Eigen::MatrixXd& Z, const DiagMetric& N,
                           const Eigen::MatrixXd& U) {
    if (N.size() != Z.rows() || U.rows() != Z.rows()) {
        throw SchemaError("col_scores: dimension mismatch");
    }
    return Z.transpose() * N.weights.asDiagonal() * U;
}

}  // namespace mixfactor
