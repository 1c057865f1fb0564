#pragma once

#include <Eigen/Dense>

#include "mixfactor/preprocess.hpp"

namespace mixfactor {

inline constexpr Eigen::Index kAllComponents = -1;

/// Fitted PCAmix model. Eigenvalues cover the full numerical rank; the
/// score and loading matrices keep the first `ndim` components.
struct FactorModel {
    Preprocessed pre;
    GsvdResult decomposition;      // full rank
    Eigen::Index ndim = 0;
    Eigen::VectorXd eigenvalues;   // length rank, nonincreasing
    Eigen::MatrixXd F;             // n x ndim, observation scores (U Lambda)
    Eigen::MatrixXd A;             // (p1+m) x ndim, loadings V Lambda
    Eigen::MatrixXd A_star;        // (p1+m) x ndim, factor scores M V Lambda
    Eigen::MatrixXd sqload;        // p x ndim, squared loadings per variable
    Eigen::MatrixXd contrib;       // p x ndim, contributions (== sqload here)
    Eigen::MatrixXd contrib_pct;   // p x ndim, 100 * contrib / lambda_i
    Eigen::MatrixXd beta;          // (1+p1+m) x ndim, row 0 is the intercept
};

/// Fits PCAmix: GSVD of the preprocessed Z under N and M. `ndim` defaults
/// to every component above the rank tolerance; asking for more than the
/// rank is an error.
FactorModel fit_pcamix(const MixedTable& table, Eigen::Index ndim = kAllComponents,
                       bool rename_levels = false, double rank_tol = kDefaultRankTol);

/// Same fit on an already-built preprocessing (used per group by MFAmix).
FactorModel fit_pcamix(Preprocessed pre, Eigen::Index ndim = kAllComponents,
                       double rank_tol = kDefaultRankTol);

/// Factor scores of the m levels (the categorical rows of A*); each row is
/// the barycenter of the normalized observation scores of its level.
Eigen::MatrixXd level_scores(const FactorModel& model);

/// Correlations of the numeric variables with the principal components
/// (the p1 numeric rows of A).
Eigen::MatrixXd correlation_circle(const FactorModel& model);

/// Scores of new observations through the linear-combination coefficients
/// beta; reproduces F on the training rows.
Eigen::MatrixXd predict_scores(const FactorModel& model, const MixedTable& new_table);

// Shared helpers for the three methods.

/// Contributions c_ji = sum over the columns of variable j of
/// w_s * a_si^2, where w are the column-metric weights used by the fit.
Eigen::MatrixXd contributions(const Eigen::MatrixXd& A, const Eigen::VectorXd& col_weights,
                              const std::vector<VariableInfo>& variables);

/// Affine coefficients over the raw (X1 | G) columns for scores = Z * W;
/// row 0 holds the intercepts.
Eigen::MatrixXd prediction_coefficients(const Preprocessed& pre, const Eigen::MatrixXd& W);

/// Applies prediction coefficients to a new table.
Eigen::MatrixXd predict_with_coefficients(const Preprocessed& pre, const Eigen::MatrixXd& beta,
                                          const MixedTable& new_table);

/// Squared loadings measured directly against given component scores:
/// squared correlation for numerics, correlation ratio for categoricals.
Eigen::MatrixXd squared_loadings_direct(const Preprocessed& pre, const Eigen::MatrixXd& F);

}  // namespace mixfactor
