#pragma once

#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "mixfactor/pcamix.hpp"

namespace mixfactor {

/// Variable -> group assignment as listed in a groups file.
using GroupMap = std::vector<std::pair<std::string, std::string>>;

/// Group layout over the Z columns plus the weighting metric P built from
/// the first eigenvalue of each group's separate PCAmix.
struct GroupStructure {
    std::vector<std::string> group_names;  // ordered by first appearance in the table
    std::vector<int> var_group;            // per variable
    std::vector<int> col_group;            // t_k per Z column
    Eigen::VectorXd lambda1;               // first separate eigenvalue per group
    Eigen::VectorXd P;                     // per Z column, 1 / lambda1[t_k]

    int n_groups() const { return static_cast<int>(group_names.size()); }
};

/// Separate PCAmix of one group, kept for partial axes and eig_separate.
struct SeparateModel {
    Eigen::VectorXd eigenvalues;
    Eigen::MatrixXd F;  // n x rank_g
};

/// Per-group partial-axes correlations r(f_i^{(g)}, f_j) with a degeneracy
/// flag for constant components (reported as 0).
struct PartialAxes {
    Eigen::MatrixXd corr;  // rank_g x ndim
    std::vector<bool> degenerate;  // per group component
};

struct MfamixModel {
    Preprocessed pre;
    GroupStructure groups;
    GsvdResult decomposition;      // metrics N and M* = M P
    Eigen::Index ndim = 0;
    Eigen::VectorXd eigenvalues;   // full rank
    Eigen::MatrixXd F;             // n x ndim
    Eigen::MatrixXd A;             // V Lambda
    Eigen::MatrixXd A_star;        // M V Lambda (M, not M*)
    Eigen::MatrixXd contrib;       // p x ndim with the 1/lambda1 factors
    Eigen::MatrixXd contrib_pct;
    Eigen::MatrixXd sqload;        // r^2 / eta^2 against the global components
    Eigen::MatrixXd group_contrib; // G x ndim
    std::vector<Eigen::MatrixXd> F_partial;  // per group, n x ndim
    std::vector<PartialAxes> partial_axes;   // per group
    std::vector<SeparateModel> separate;     // per group
    Eigen::MatrixXd beta;          // (1+p1+m) x ndim

    Eigen::VectorXd mstar_weights() const { return pre.M.weights.cwiseProduct(groups.P); }
};

inline constexpr Eigen::Index kDefaultMfaDims = -1;  // min(5, rank)

/// Fits MFAmix: separate PCAmix per group for the weights, then the global
/// GSVD of Z under N and M* = M P. The group map must cover every variable
/// exactly once.
MfamixModel fit_mfamix(const MixedTable& table, const GroupMap& group_map,
                       Eigen::Index ndim = kDefaultMfaDims, bool rename_levels = false,
                       double rank_tol = kDefaultRankTol);

/// Per-component contribution of each group (sum of its variables'
/// contributions); columns sum to lambda_i.
Eigen::MatrixXd group_contributions(const MfamixModel& model);

/// Partial observation scores F_part^{(g)} = G x Z_part^{(g)} M* V; their
/// mean over groups is F.
std::vector<Eigen::MatrixXd> partial_observations(const MfamixModel& model);

/// Correlations between each group's separate components and the global
/// components.
std::vector<PartialAxes> partial_axes(const MfamixModel& model);

/// Scores of new observations; reproduces F on training rows and equals
/// Z_new M* V.
Eigen::MatrixXd predict_mfamix(const MfamixModel& model, const MixedTable& new_table);

}  // namespace mixfactor
