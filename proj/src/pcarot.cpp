#include "mixfactor/pcarot.hpp"

#include <cmath>
#include <string>
#include <utility>

namespace mixfactor {

namespace {

// Per-variable squared loadings alpha/beta terms for the (l, t) plane.
struct PlaneTerms {
    double sum_alpha = 0.0;
    double sum_beta = 0.0;
    double sum_alpha_beta = 0.0;
    double sum_alpha_sq = 0.0;
    double sum_beta_sq = 0.0;
};

PlaneTerms plane_terms(const Eigen::MatrixXd& A, Eigen::Index l, Eigen::Index t,
                       const std::vector<std::vector<Eigen::Index>>& var_index) {
    PlaneTerms terms;
    for (const auto& cols : var_index) {
        double alpha = 0.0;
        double beta = 0.0;
        for (Eigen::Index s : cols) {
            alpha += A(s, l) * A(s, l) - A(s, t) * A(s, t);
            beta += 2.0 * A(s, l) * A(s, t);
        }
        terms.sum_alpha += alpha;
        terms.sum_beta += beta;
        terms.sum_alpha_beta += alpha * beta;
        terms.sum_alpha_sq += alpha * alpha;
        terms.sum_beta_sq += beta * beta;
    }
    return terms;
}

void rotate_pair(Eigen::MatrixXd& B, Eigen::Index l, Eigen::Index t, double theta) {
    const double c = std::cos(theta);
    const double s = std::sin(theta);
    const Eigen::VectorXd bl = B.col(l);
    B.col(l) = c * bl + s * B.col(t);
    B.col(t) = -s * bl + c * B.col(t);
}

}  // namespace

double varimax_criterion(const Eigen::MatrixXd& A_tilde,
                         const std::vector<std::vector<Eigen::Index>>& var_index) {
    const double p = static_cast<double>(var_index.size());
    double crit = 0.0;
    for (Eigen::Index i = 0; i < A_tilde.cols(); ++i) {
        double sum = 0.0;
        double sum_sq = 0.0;
        for (const auto& cols : var_index) {
            double c_ji = 0.0;
            for (Eigen::Index s : cols) {
                c_ji += A_tilde(s, i) * A_tilde(s, i);
            }
            sum += c_ji;
            sum_sq += c_ji * c_ji;
        }
        crit += p * sum_sq - sum * sum;
    }
    return crit;
}

double planar_angle(const Eigen::MatrixXd& A_tilde_rot, Eigen::Index l, Eigen::Index t,
                    const std::vector<std::vector<Eigen::Index>>& var_index) {
    if (l == t || l < 0 || t < 0 || l >= A_tilde_rot.cols() || t >= A_tilde_rot.cols()) {
        throw SchemaError("planar_angle: invalid component pair");
    }
    const double p = static_cast<double>(var_index.size());
    const PlaneTerms terms = plane_terms(A_tilde_rot, l, t, var_index);
    const double g = 2.0 * p * terms.sum_alpha_beta - 2.0 * terms.sum_alpha * terms.sum_beta;
    const double h = p * (terms.sum_alpha_sq - terms.sum_beta_sq) -
                     terms.sum_alpha * terms.sum_alpha + terms.sum_beta * terms.sum_beta;
    const double norm_sq = g * g + h * h;
    if (norm_sq < 1e-24) {
        return 0.0;  // criterion locally flat on this plane
    }
    double psi = std::acos(std::clamp(h / std::sqrt(norm_sq), -1.0, 1.0));
    if (g < 0.0) {
        psi = -psi;
    }
    return psi / 4.0;
}

RotationResult rotate(const FactorModel& model, Eigen::Index k, const RotationOptions& options) {
    const Eigen::Index rank = model.decomposition.rank;
    if (k < 2 || k > rank) {
        throw SchemaError("rotation dimension k = " + std::to_string(k) +
                          " must be in [2, rank = " + std::to_string(rank) + "]");
    }
    const Preprocessed& pre = model.pre;
    const auto var_index = pre.var_index();
    const Eigen::VectorXd ns = pre.N.sqrt().matrix();
    const Eigen::VectorXd ms = pre.M.sqrt().matrix();
    const Eigen::VectorXd sv = model.decomposition.singular_values.head(k);

    // Standard-SVD factors of N^{1/2} Z M^{1/2}, truncated to k columns.
    const Eigen::MatrixXd U_tilde = ns.asDiagonal() * model.decomposition.U.leftCols(k);
    const Eigen::MatrixXd V_tilde = ms.asDiagonal() * model.decomposition.V.leftCols(k);

    RotationResult result;
    result.k = k;
    result.U_tilde_rot = U_tilde;
    result.A_tilde_rot = V_tilde * sv.asDiagonal();
    result.criterion_by_sweep.push_back(varimax_criterion(result.A_tilde_rot, var_index));

    for (int sweep = 1; sweep <= options.max_sweeps; ++sweep) {
        double max_angle = 0.0;
        for (Eigen::Index l = 0; l + 1 < k; ++l) {
            for (Eigen::Index t = l + 1; t < k; ++t) {
                const double theta = planar_angle(result.A_tilde_rot, l, t, var_index);
                max_angle = std::max(max_angle, std::abs(theta));
                rotate_pair(result.A_tilde_rot, l, t, theta);
                rotate_pair(result.U_tilde_rot, l, t, theta);
            }
        }
        result.sweeps = sweep;
        result.criterion_by_sweep.push_back(varimax_criterion(result.A_tilde_rot, var_index));
        result.max_angle_by_sweep.push_back(max_angle);
        if (max_angle < options.angle_tol) {
            result.converged = true;
            break;
        }
    }

    result.T = U_tilde.transpose() * result.U_tilde_rot;
    result.lambda_rot = result.A_tilde_rot.colwise().squaredNorm().transpose();
    const Eigen::VectorXd sv_rot = result.lambda_rot.array().sqrt();
    result.A_star_rot = ms.asDiagonal() * result.A_tilde_rot;
    result.F_rot = pre.N.inv_sqrt().matrix().asDiagonal() * result.U_tilde_rot *
                   sv_rot.asDiagonal();
    // F_rot = Z V_rot with V_rot = M V Lambda^{-1} T Lambda_rot.
    result.V_rot = pre.M.weights.asDiagonal() * model.decomposition.V.leftCols(k) *
                   sv.cwiseInverse().asDiagonal() * result.T * sv_rot.asDiagonal();
    result.beta_rot = prediction_coefficients(pre, result.V_rot);
    result.pre = pre;
    return result;
}

Eigen::MatrixXd predict_rotated(const RotationResult& result, const MixedTable& new_table) {
    return predict_with_coefficients(result.pre, result.beta_rot, new_table);
}

Eigen::MatrixXd rotated_sqload(const RotationResult& result) {
    return contributions(result.A_tilde_rot, Eigen::VectorXd::Ones(result.pre.n_zcols()),
                         result.pre.variables);
}

}  // namespace mixfactor
