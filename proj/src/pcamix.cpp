#include "mixfactor/pcamix.hpp"

#include <string>
#include <utility>

namespace mixfactor {

Eigen::MatrixXd contributions(const Eigen::MatrixXd& A, const Eigen::VectorXd& col_weights,
                              const std::vector<VariableInfo>& variables) {
    Eigen::MatrixXd contrib =
        Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(variables.size()), A.cols());
    for (std::size_t j = 0; j < variables.size(); ++j) {
        for (Eigen::Index s : variables[j].z_cols) {
            contrib.row(static_cast<Eigen::Index>(j)) +=
                col_weights[s] * A.row(s).array().square().matrix();
        }
    }
    return contrib;
}

Eigen::MatrixXd prediction_coefficients(const Preprocessed& pre, const Eigen::MatrixXd& W) {
    const Eigen::Index p1 = pre.n_numeric;
    const Eigen::Index pz = pre.n_zcols();
    if (W.rows() != pz) {
        throw SchemaError("prediction_coefficients: coefficient rows do not match Z columns");
    }
    // scores = Z W with z_k = (x_k - mean_k) / sd_k (numeric) or
    // x_k - n_k / n (indicator); fold the centering into the intercept.
    Eigen::MatrixXd beta(1 + pz, W.cols());
    const double n = static_cast<double>(pre.n_rows);
    beta.row(0).setZero();
    for (Eigen::Index k = 0; k < p1; ++k) {
        beta.row(1 + k) = W.row(k) / pre.col_sds[k];
        beta.row(0) -= W.row(k) * (pre.col_means[k] / pre.col_sds[k]);
    }
    for (Eigen::Index s = 0; s < pre.n_levels; ++s) {
        beta.row(1 + p1 + s) = W.row(p1 + s);
        beta.row(0) -= W.row(p1 + s) * (pre.level_counts[s] / n);
    }
    return beta;
}

Eigen::MatrixXd predict_with_coefficients(const Preprocessed& pre, const Eigen::MatrixXd& beta,
                                          const MixedTable& new_table) {
    const Eigen::MatrixXd X = raw_design(new_table, pre);
    Eigen::MatrixXd scores = X * beta.bottomRows(pre.n_zcols());
    scores.rowwise() += beta.row(0);
    return scores;
}

Eigen::MatrixXd squared_loadings_direct(const Preprocessed& pre, const Eigen::MatrixXd& F) {
    const Eigen::Index n = pre.n_rows;
    const double inv_n = 1.0 / static_cast<double>(n);
    Eigen::MatrixXd sq(static_cast<Eigen::Index>(pre.variables.size()), F.cols());
    for (Eigen::Index i = 0; i < F.cols(); ++i) {
        const Eigen::VectorXd& f = F.col(i);
        const double total_var = inv_n * f.squaredNorm();  // components are N-centered
        for (std::size_t j = 0; j < pre.variables.size(); ++j) {
            const auto& var = pre.variables[j];
            double value = 0.0;
            if (total_var > 0.0) {
                if (var.kind == VarKind::Numeric) {
                    const double cov = inv_n * pre.Z.col(var.z_cols[0]).dot(f);
                    value = cov * cov / total_var;  // z column has unit variance
                } else {
                    // eta^2: between-level variance over total variance.
                    double between = 0.0;
                    for (std::size_t s = 0; s < var.levels.size(); ++s) {
                        const Eigen::Index zc = var.z_cols[s];
                        const double ns = pre.level_counts[zc - pre.n_numeric];
                        double sum = 0.0;
                        for (Eigen::Index r = 0; r < n; ++r) {
                            if (var.level_of_row[static_cast<std::size_t>(r)] ==
                                static_cast<std::int32_t>(s)) {
                                sum += f[r];
                            }
                        }
                        const double level_mean = sum / ns;
                        between += (ns / static_cast<double>(n)) * level_mean * level_mean;
                    }
                    value = between / total_var;
                }
            }
            sq(static_cast<Eigen::Index>(j), i) = value;
        }
    }
    return sq;
}

FactorModel fit_pcamix(Preprocessed pre, Eigen::Index ndim, double rank_tol) {
    FactorModel model;
    model.decomposition = gsvd(pre.Z, pre.N, pre.M, rank_tol);
    const Eigen::Index rank = model.decomposition.rank;
    if (rank == 0) {
        throw NumericError("preprocessed data has rank 0");
    }
    if (ndim == kAllComponents) {
        ndim = rank;
    }
    if (ndim < 1 || ndim > rank) {
        throw SchemaError("ndim " + std::to_string(ndim) + " is out of range [1, " +
                          std::to_string(rank) + "]");
    }
    model.ndim = ndim;
    model.eigenvalues = model.decomposition.eigenvalues();

    const auto& dec = model.decomposition;
    const Eigen::VectorXd lambda_head = model.eigenvalues.head(ndim);
    const Eigen::VectorXd sv_head = dec.singular_values.head(ndim);
    model.F = dec.U.leftCols(ndim) * sv_head.asDiagonal();
    model.A = dec.V.leftCols(ndim) * sv_head.asDiagonal();
    model.A_star = pre.M.weights.asDiagonal() * model.A;
    model.contrib = contributions(model.A, pre.M.weights, pre.variables);
    model.sqload = model.contrib;  // equal in PCAmix
    model.contrib_pct = 100.0 * model.contrib * lambda_head.cwiseInverse().asDiagonal();
    model.beta =
        prediction_coefficients(pre, pre.M.weights.asDiagonal() * dec.V.leftCols(ndim));
    model.pre = std::move(pre);
    return model;
}

FactorModel fit_pcamix(const MixedTable& table, Eigen::Index ndim, bool rename_levels,
                       double rank_tol) {
    return fit_pcamix(build_preprocessed(table, rename_levels), ndim, rank_tol);
}

Eigen::MatrixXd level_scores(const FactorModel& model) {
    return model.A_star.bottomRows(model.pre.n_levels);
}

Eigen::MatrixXd correlation_circle(const FactorModel& model) {
    return model.A.topRows(model.pre.n_numeric);
}

Eigen::MatrixXd predict_scores(const FactorModel& model, const MixedTable& new_table) {
    return predict_with_coefficients(model.pre, model.beta, new_table);
}

}  // namespace mixfactor
