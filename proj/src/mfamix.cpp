#include "mixfactor/mfamix.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_map>
#include <utility>

namespace mixfactor {

namespace {

GroupStructure build_groups(const Preprocessed& pre, const GroupMap& group_map) {
    std::unordered_map<std::string, std::string> var_to_group;
    for (const auto& [var, group] : group_map) {
        if (!var_to_group.emplace(var, group).second) {
            throw SchemaError("variable " + var + " listed twice in the group map");
        }
    }
    for (const auto& [var, group] : group_map) {
        const bool known = std::any_of(pre.variables.begin(), pre.variables.end(),
                                       [&](const VariableInfo& v) { return v.name == var; });
        if (!known) {
            throw SchemaError("unknown variable " + var + " in group map");
        }
    }

    GroupStructure groups;
    std::unordered_map<std::string, int> group_id;
    groups.var_group.reserve(pre.variables.size());
    groups.col_group.assign(static_cast<std::size_t>(pre.n_zcols()), 0);
    for (const auto& var : pre.variables) {
        auto it = var_to_group.find(var.name);
        if (it == var_to_group.end()) {
            throw SchemaError("variable " + var.name + " missing from group map");
        }
        auto [gid_it, inserted] = group_id.emplace(it->second, groups.n_groups());
        if (inserted) {
            groups.group_names.push_back(it->second);
        }
        const int gid = gid_it->second;
        groups.var_group.push_back(gid);
        for (Eigen::Index c : var.z_cols) {
            groups.col_group[static_cast<std::size_t>(c)] = gid;
        }
    }
    return groups;
}

// Restriction of a fitted preprocessing to one group's variables, keeping
// the training statistics so the step-1 weights stay consistent with the
// global Z.
Preprocessed slice_preprocessed(const Preprocessed& pre, const GroupStructure& groups,
                                int gid) {
    Preprocessed out;
    std::vector<Eigen::Index> numeric_cols;
    std::vector<Eigen::Index> level_cols;
    for (std::size_t j = 0; j < pre.variables.size(); ++j) {
        if (groups.var_group[j] != gid) {
            continue;
        }
        const auto& var = pre.variables[j];
        VariableInfo info = var;
        info.z_cols.clear();
        if (var.kind == VarKind::Numeric) {
            info.z_cols.push_back(static_cast<Eigen::Index>(numeric_cols.size()));
            numeric_cols.push_back(var.z_cols[0]);
            out.numeric_names.push_back(var.name);
        } else {
            for (Eigen::Index c : var.z_cols) {
                info.z_cols.push_back(static_cast<Eigen::Index>(level_cols.size()));
                level_cols.push_back(c);
            }
            ++out.n_categorical;
        }
        out.variables.push_back(std::move(info));
    }

    const Eigen::Index p1 = static_cast<Eigen::Index>(numeric_cols.size());
    const Eigen::Index m = static_cast<Eigen::Index>(level_cols.size());
    out.n_rows = pre.n_rows;
    out.n_numeric = p1;
    out.n_levels = m;
    out.total_inertia = static_cast<double>(p1 + m - out.n_categorical);
    out.Z.resize(pre.n_rows, p1 + m);
    out.N = pre.N;
    Eigen::VectorXd mw(p1 + m);
    out.col_means.resize(p1);
    out.col_sds.resize(p1);
    out.level_counts.resize(m);
    for (Eigen::Index j = 0; j < p1; ++j) {
        out.Z.col(j) = pre.Z.col(numeric_cols[j]);
        mw[j] = pre.M.weights[numeric_cols[j]];
        out.col_means[j] = pre.col_means[numeric_cols[j]];
        out.col_sds[j] = pre.col_sds[numeric_cols[j]];
    }
    for (Eigen::Index s = 0; s < m; ++s) {
        out.Z.col(p1 + s) = pre.Z.col(level_cols[s]);
        mw[p1 + s] = pre.M.weights[level_cols[s]];
        out.level_counts[s] = pre.level_counts[level_cols[s] - pre.n_numeric];
        out.level_names.push_back(
            pre.level_names[static_cast<std::size_t>(level_cols[s] - pre.n_numeric)]);
    }
    // Fix z_cols of categorical infos to their final positions after p1.
    for (auto& var : out.variables) {
        if (var.kind == VarKind::Categorical) {
            for (auto& c : var.z_cols) {
                c += p1;
            }
        }
    }
    out.M = DiagMetric(std::move(mw));
    return out;
}

}  // namespace

MfamixModel fit_mfamix(const MixedTable& table, const GroupMap& group_map, Eigen::Index ndim,
                       bool rename_levels, double rank_tol) {
    Preprocessed pre = build_preprocessed(table, rename_levels);
    GroupStructure groups = build_groups(pre, group_map);
    const int n_groups = groups.n_groups();
    if (n_groups == 0) {
        throw SchemaError("group map defines no groups");
    }

    MfamixModel model;
    model.separate.reserve(static_cast<std::size_t>(n_groups));
    groups.lambda1.resize(n_groups);
    for (int g = 0; g < n_groups; ++g) {
        Preprocessed sliced = slice_preprocessed(pre, groups, g);
        FactorModel separate = fit_pcamix(std::move(sliced), kAllComponents, rank_tol);
        groups.lambda1[g] = separate.eigenvalues[0];
        if (!(groups.lambda1[g] > 0.0)) {
            throw NumericError("group " + groups.group_names[static_cast<std::size_t>(g)] +
                               " has a zero first eigenvalue");
        }
        model.separate.push_back({separate.eigenvalues, std::move(separate.F)});
    }
    groups.P.resize(pre.n_zcols());
    for (Eigen::Index c = 0; c < pre.n_zcols(); ++c) {
        groups.P[c] = 1.0 / groups.lambda1[groups.col_group[static_cast<std::size_t>(c)]];
    }

    const DiagMetric m_star(pre.M.weights.cwiseProduct(groups.P));
    model.decomposition = gsvd(pre.Z, pre.N, m_star, rank_tol);
    const Eigen::Index rank = model.decomposition.rank;
    if (ndim == kDefaultMfaDims) {
        ndim = std::min<Eigen::Index>(5, rank);
    }
    if (ndim < 1 || ndim > rank) {
        throw SchemaError("ndim " + std::to_string(ndim) + " is out of range [1, " +
                          std::to_string(rank) + "]");
    }
    model.ndim = ndim;
    model.eigenvalues = model.decomposition.eigenvalues();

    const Eigen::VectorXd sv_head = model.decomposition.singular_values.head(ndim);
    model.F = model.decomposition.U.leftCols(ndim) * sv_head.asDiagonal();
    model.A = model.decomposition.V.leftCols(ndim) * sv_head.asDiagonal();
    model.A_star = pre.M.weights.asDiagonal() * model.A;  // M, not M*
    model.contrib = contributions(model.A, m_star.weights, pre.variables);
    model.contrib_pct =
        100.0 * model.contrib * model.eigenvalues.head(ndim).cwiseInverse().asDiagonal();
    model.beta = prediction_coefficients(
        pre, m_star.weights.asDiagonal() * model.decomposition.V.leftCols(ndim));
    model.sqload = squared_loadings_direct(pre, model.F);
    model.groups = std::move(groups);
    model.pre = std::move(pre);
    model.group_contrib = group_contributions(model);
    model.F_partial = partial_observations(model);
    model.partial_axes = partial_axes(model);
    return model;
}

Eigen::MatrixXd group_contributions(const MfamixModel& model) {
    Eigen::MatrixXd out = Eigen::MatrixXd::Zero(model.groups.n_groups(), model.contrib.cols());
    for (std::size_t j = 0; j < model.groups.var_group.size(); ++j) {
        out.row(model.groups.var_group[j]) += model.contrib.row(static_cast<Eigen::Index>(j));
    }
    return out;
}

std::vector<Eigen::MatrixXd> partial_observations(const MfamixModel& model) {
    const int n_groups = model.groups.n_groups();
    const Eigen::VectorXd m_star = model.mstar_weights();
    const Eigen::MatrixXd& V = model.decomposition.V;
    std::vector<Eigen::MatrixXd> partial;
    partial.reserve(static_cast<std::size_t>(n_groups));
    for (int g = 0; g < n_groups; ++g) {
        // Z with the other groups' columns set to zero, projected like Z.
        Eigen::MatrixXd scores = Eigen::MatrixXd::Zero(model.pre.n_rows, model.ndim);
        for (Eigen::Index c = 0; c < model.pre.n_zcols(); ++c) {
            if (model.groups.col_group[static_cast<std::size_t>(c)] == g) {
                scores.noalias() +=
                    model.pre.Z.col(c) * (m_star[c] * V.row(c).head(model.ndim));
            }
        }
        partial.push_back(static_cast<double>(n_groups) * scores);
    }
    return partial;
}

std::vector<PartialAxes> partial_axes(const MfamixModel& model) {
    const double inv_n = 1.0 / static_cast<double>(model.pre.n_rows);
    std::vector<PartialAxes> axes;
    axes.reserve(model.separate.size());
    for (const auto& sep : model.separate) {
        PartialAxes pa;
        pa.corr.resize(sep.F.cols(), model.ndim);
        pa.degenerate.assign(static_cast<std::size_t>(sep.F.cols()), false);
        for (Eigen::Index i = 0; i < sep.F.cols(); ++i) {
            const double var_g = inv_n * sep.F.col(i).squaredNorm();
            for (Eigen::Index j = 0; j < model.ndim; ++j) {
                const double var_f = inv_n * model.F.col(j).squaredNorm();
                if (var_g <= 0.0 || var_f <= 0.0) {
                    pa.corr(i, j) = 0.0;
                    pa.degenerate[static_cast<std::size_t>(i)] = true;
                } else {
                    pa.corr(i, j) =
                        inv_n * sep.F.col(i).dot(model.F.col(j)) / std::sqrt(var_g * var_f);
                }
            }
        }
        axes.push_back(std::move(pa));
    }
    return axes;
}

Eigen::MatrixXd predict_mfamix(const MfamixModel& model, const MixedTable& new_table) {
    return predict_with_coefficients(model.pre, model.beta, new_table);
}

}  // namespace mixfactor
