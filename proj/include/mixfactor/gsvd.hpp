#pragma once

#include <Eigen/Dense>

#include "mixfactor/errors.hpp"

namespace mixfactor {

inline constexpr double kDefaultRankTol = 1e-10;

/// Diagonal metric: strictly positive weights defining a weighted inner
/// product on row space (N) or column space (M).
struct DiagMetric {
    Eigen::VectorXd weights;

    DiagMetric() = default;
    explicit DiagMetric(Eigen::VectorXd w);
    static DiagMetric uniform(Eigen::Index size, double value);

    Eigen::Index size() const { return weights.size(); }
    Eigen::ArrayXd sqrt() const { return weights.array().sqrt(); }
    Eigen::ArrayXd inv_sqrt() const { return weights.array().rsqrt(); }
};

/// Generalized SVD of Z under metrics N and M: Z = U Lambda V^t with
/// U^t N U = I_r and V^t M V = I_r. Eigenvalues of Z^t N Z M are the
/// squared singular values.
struct GsvdResult {
    Eigen::MatrixXd U;                // n x r
    Eigen::VectorXd singular_values;  // sqrt(lambda_i), nonincreasing
    Eigen::MatrixXd V;                // p x r
    Eigen::Index rank = 0;

    Eigen::VectorXd eigenvalues() const { return singular_values.array().square(); }
};

/// Computes the GSVD via a standard SVD of N^{1/2} Z M^{1/2} followed by
/// the back-transform U = N^{-1/2} U~, V = M^{-1/2} V~. The numerical rank
/// keeps singular values above rank_tol times the largest one. Column
/// signs are fixed so the largest-magnitude entry of each V column is
/// positive.
GsvdResult gsvd(const Eigen::MatrixXd& Z, const DiagMetric& N, const DiagMetric& M,
                double rank_tol = kDefaultRankTol);

/// Row factor scores F = Z M V (equal to U Lambda for a matching GSVD).
Eigen::MatrixXd row_scores(const Eigen::MatrixXd& Z, const DiagMetric& M,
                           const Eigen::MatrixXd& V);

/// Column factor scores A = Z^t N U (equal to V Lambda), the loadings.
Eigen::MatrixXd col_scores(const Eigen::MatrixXd& Z, const DiagMetric& N,
                           const Eigen::MatrixXd& U);

}  // namespace mixfactor
