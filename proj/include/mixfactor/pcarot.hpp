#pragma once

#include <vector>

#include <Eigen/Dense>

#include "mixfactor/pcamix.hpp"

namespace mixfactor {

struct RotationOptions {
    double angle_tol = 1e-8;  // convergence: every |theta| in a sweep below this
    int max_sweeps = 100;
};

/// Varimax-type rotation of the first k PCAmix components.
struct RotationResult {
    Preprocessed pre;
    Eigen::Index k = 0;
    Eigen::MatrixXd T;            // k x k accumulated rotation, U~^t U~_rot
    Eigen::MatrixXd U_tilde_rot;  // n x k
    Eigen::MatrixXd A_tilde_rot;  // (p1+m) x k
    Eigen::VectorXd lambda_rot;   // ||a~_i,rot||^2, not necessarily decreasing
    Eigen::MatrixXd F_rot;        // n x k rotated observation scores
    Eigen::MatrixXd A_star_rot;   // (p1+m) x k, M^{1/2} A~_rot
    Eigen::MatrixXd V_rot;        // (p1+m) x k, F_rot = Z V_rot
    Eigen::MatrixXd beta_rot;     // (1+p1+m) x k
    int sweeps = 0;
    bool converged = false;
    std::vector<double> criterion_by_sweep;  // entry 0 is the unrotated value
    std::vector<double> max_angle_by_sweep;  // largest |theta| seen in each sweep
};

/// Varimax criterion of a tilde-loadings matrix: sum over components of
/// p * sum_j c_ji^2 - (sum_j c_ji)^2 with c_ji the per-variable squared
/// loadings sum_{s in I_j} a~_si^2.
double varimax_criterion(const Eigen::MatrixXd& A_tilde,
                         const std::vector<std::vector<Eigen::Index>>& var_index);

/// Closed-form optimal angle for the (l, t) plane: theta = psi / 4 with
/// psi = sign(g) * arccos(h / sqrt(g^2 + h^2)). Returns 0 when the
/// criterion is locally flat (g and h both ~ 0).
double planar_angle(const Eigen::MatrixXd& A_tilde_rot, Eigen::Index l, Eigen::Index t,
                    const std::vector<std::vector<Eigen::Index>>& var_index);

/// Iterative pairwise rotation over all k(k-1)/2 planes until a full sweep
/// produces only angles below the tolerance. Requires 2 <= k <= rank.
RotationResult rotate(const FactorModel& model, Eigen::Index k,
                      const RotationOptions& options = {});

/// Rotated scores of new observations via beta_rot; reproduces F_rot on
/// the training rows and equals Z_new V_rot.
Eigen::MatrixXd predict_rotated(const RotationResult& result, const MixedTable& new_table);

/// Rotated squared loadings c_ji,rot; per component they sum to
/// lambda_i,rot and equal r^2 / eta^2 against the rotated components.
Eigen::MatrixXd rotated_sqload(const RotationResult& result);

}  // namespace mixfactor
