#include "oracles.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>

namespace oracles {

double Rng::normal() {
    if (have_spare_) {
        have_spare_ = false;
        return spare_;
    }
    double u1 = uniform();
    while (u1 <= 0.0) {
        u1 = uniform();
    }
    const double u2 = uniform();
    const double radius = std::sqrt(-2.0 * std::log(u1));
    const double angle = 2.0 * 3.141592653589793238462643383279502884 * u2;
    spare_ = radius * std::sin(angle);
    have_spare_ = true;
    return radius * std::cos(angle);
}

Eigen::MatrixXd random_matrix(Rng& rng, Eigen::Index rows, Eigen::Index cols) {
    Eigen::MatrixXd Z(rows, cols);
    for (Eigen::Index i = 0; i < rows; ++i) {
        for (Eigen::Index j = 0; j < cols; ++j) {
            Z(i, j) = rng.normal();
        }
    }
    return Z;
}

Eigen::VectorXd random_weights(Rng& rng, Eigen::Index size, double lo, double hi) {
    Eigen::VectorXd w(size);
    for (Eigen::Index i = 0; i < size; ++i) {
        w[i] = rng.uniform(lo, hi);
    }
    return w;
}

mixfactor::MixedTable random_mixed_table(Rng& rng, std::size_t n, int p1, int p2,
                                         int max_levels) {
    mixfactor::MixedTable table;
    table.n_rows = n;
    for (int j = 0; j < p1; ++j) {
        mixfactor::Column col;
        col.name = "x" + std::to_string(j + 1);
        col.kind = mixfactor::VarKind::Numeric;
        col.values.resize(n);
        const double scale = rng.uniform(0.5, 3.0);
        const double shift = rng.uniform(-2.0, 2.0);
        for (auto& v : col.values) {
            v = shift + scale * rng.normal();
        }
        table.columns.push_back(std::move(col));
    }
    for (int j = 0; j < p2; ++j) {
        mixfactor::Column col;
        col.name = "c" + std::to_string(j + 1);
        col.kind = mixfactor::VarKind::Categorical;
        const int levels = rng.uniform_int(2, max_levels);
        col.labels.reserve(n);
        // One forced occurrence per level, the rest uniform.
        for (std::size_t i = 0; i < n; ++i) {
            const int level = i < static_cast<std::size_t>(levels)
                                  ? static_cast<int>(i)
                                  : rng.uniform_int(0, levels - 1);
            col.labels.push_back("v" + std::to_string(level + 1));
        }
        table.columns.push_back(std::move(col));
    }
    return table;
}

Eigen::VectorXd weighted_product_eigenvalues(const Eigen::MatrixXd& Z,
                                             const Eigen::VectorXd& n_weights,
                                             const Eigen::VectorXd& m_weights) {
    const Eigen::VectorXd ms = m_weights.array().sqrt().matrix();
    const Eigen::MatrixXd inner = Z.transpose() * n_weights.asDiagonal() * Z;
    const Eigen::MatrixXd sym = ms.asDiagonal() * inner * ms.asDiagonal();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(sym);
    Eigen::VectorXd values = solver.eigenvalues();
    std::sort(values.data(), values.data() + values.size(), std::greater<double>());
    return values;
}

namespace {

// GSVD computed locally with direct Eigen calls (kept separate from the
// library's implementation on purpose).
struct LocalGsvd {
    Eigen::MatrixXd U;
    Eigen::VectorXd sv;
    Eigen::MatrixXd V;
};

LocalGsvd local_gsvd(const Eigen::MatrixXd& X, const Eigen::VectorXd& row_w,
                     const Eigen::VectorXd& col_w, double rel_tol = 1e-10) {
    const Eigen::VectorXd rs = row_w.array().sqrt().matrix();
    const Eigen::VectorXd cs = col_w.array().sqrt().matrix();
    const Eigen::MatrixXd scaled = rs.asDiagonal() * X * cs.asDiagonal();
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(scaled, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const Eigen::VectorXd& s = svd.singularValues();
    Eigen::Index rank = 0;
    while (rank < s.size() && s[rank] > rel_tol * s[0]) {
        ++rank;
    }
    LocalGsvd out;
    out.sv = s.head(rank);
    out.U = rs.cwiseInverse().asDiagonal() * svd.matrixU().leftCols(rank);
    out.V = cs.cwiseInverse().asDiagonal() * svd.matrixV().leftCols(rank);
    return out;
}

}  // namespace

CaResult ca_oracle(const mixfactor::MixedTable& table) {
    for (const auto& col : table.columns) {
        if (col.kind != mixfactor::VarKind::Categorical) {
            throw std::invalid_argument("ca_oracle: numeric column " + col.name);
        }
    }
    const Eigen::Index n = static_cast<Eigen::Index>(table.n_rows);
    const double p = static_cast<double>(table.columns.size());

    // Indicator matrix built straight from the labels, levels in
    // first-appearance order to line up with the rows under test.
    std::vector<Eigen::Index> offsets;
    Eigen::Index m = 0;
    std::vector<std::vector<std::string>> dictionaries;
    for (const auto& col : table.columns) {
        offsets.push_back(m);
        std::vector<std::string> dict;
        for (const auto& label : col.labels) {
            if (std::find(dict.begin(), dict.end(), label) == dict.end()) {
                dict.push_back(label);
                ++m;
            }
        }
        dictionaries.push_back(std::move(dict));
    }
    Eigen::MatrixXd G = Eigen::MatrixXd::Zero(n, m);
    for (std::size_t j = 0; j < table.columns.size(); ++j) {
        const auto& dict = dictionaries[j];
        for (Eigen::Index i = 0; i < n; ++i) {
            const auto& label = table.columns[j].labels[static_cast<std::size_t>(i)];
            const Eigen::Index s =
                offsets[j] + (std::find(dict.begin(), dict.end(), label) - dict.begin());
            G(i, s) = 1.0;
        }
    }
    const Eigen::VectorXd ns = G.colwise().sum();

    CaResult out;
    out.col_masses = ns / (static_cast<double>(n) * p);

    // Row profiles L = G / p centered at the column masses; metrics D_r
    // and D_c^{-1}.
    const Eigen::MatrixXd L = G / p;
    const Eigen::MatrixXd Lc = L.rowwise() - out.col_masses.transpose();
    const Eigen::VectorXd dr = Eigen::VectorXd::Constant(n, 1.0 / static_cast<double>(n));
    const LocalGsvd row_side = local_gsvd(Lc, dr, out.col_masses.cwiseInverse());
    out.eigenvalues = row_side.sv.array().square();
    out.obs_scores = row_side.U * row_side.sv.asDiagonal();
    out.V_L = row_side.V;

    // Column profiles C = G D_c^{-1} / (n p) centered at 1/n; metrics
    // D_r^{-1} and D_c.
    Eigen::MatrixXd C = G * ns.cwiseInverse().asDiagonal();
    C.array() -= 1.0 / static_cast<double>(n);
    const LocalGsvd col_side =
        local_gsvd(C, Eigen::VectorXd::Constant(n, static_cast<double>(n)), out.col_masses);
    out.level_scores = col_side.V * col_side.sv.asDiagonal();
    out.V_C = col_side.V;
    return out;
}

double criterion(const Eigen::MatrixXd& A,
                 const std::vector<std::vector<Eigen::Index>>& var_index) {
    const double p = static_cast<double>(var_index.size());
    double total = 0.0;
    for (Eigen::Index i = 0; i < A.cols(); ++i) {
        double sum = 0.0;
        double sum_sq = 0.0;
        for (const auto& cols : var_index) {
            double c = 0.0;
            for (Eigen::Index s : cols) {
                c += A(s, i) * A(s, i);
            }
            sum += c;
            sum_sq += c * c;
        }
        total += p * sum_sq - sum * sum;
    }
    return total;
}

void apply_plane_rotation(Eigen::MatrixXd& A, Eigen::Index l, Eigen::Index t, double theta) {
    const double c = std::cos(theta);
    const double s = std::sin(theta);
    const Eigen::VectorXd al = A.col(l);
    A.col(l) = c * al + s * A.col(t);
    A.col(t) = -s * al + c * A.col(t);
}

double grid_search_angle(const Eigen::MatrixXd& A,
                         const std::vector<std::vector<Eigen::Index>>& var_index,
                         Eigen::Index l, Eigen::Index t, double step) {
    const double quarter_pi = std::atan(1.0);
    double best_angle = -quarter_pi;
    double best_value = -std::numeric_limits<double>::infinity();
    for (double theta = -quarter_pi; theta <= quarter_pi; theta += step) {
        Eigen::MatrixXd rotated = A;
        apply_plane_rotation(rotated, l, t, theta);
        const double value = criterion(rotated, var_index);
        if (value > best_value) {
            best_value = value;
            best_angle = theta;
        }
    }
    return best_angle;
}

Eigen::MatrixXd reference_varimax(Eigen::MatrixXd loadings, int max_sweeps, double angle_tol) {
    const Eigen::Index p = loadings.rows();
    const Eigen::Index k = loadings.cols();
    const double fp = static_cast<double>(p);
    for (int sweep = 0; sweep < max_sweeps; ++sweep) {
        double max_angle = 0.0;
        for (Eigen::Index l = 0; l + 1 < k; ++l) {
            for (Eigen::Index t = l + 1; t < k; ++t) {
                double su = 0.0, sv = 0.0, suv = 0.0, su2v2 = 0.0;
                for (Eigen::Index j = 0; j < p; ++j) {
                    const double u = loadings(j, l) * loadings(j, l) -
                                     loadings(j, t) * loadings(j, t);
                    const double v = 2.0 * loadings(j, l) * loadings(j, t);
                    su += u;
                    sv += v;
                    suv += u * v;
                    su2v2 += u * u - v * v;
                }
                const double num = 2.0 * (fp * suv - su * sv);
                const double den = fp * su2v2 - su * su + sv * sv;
                if (num * num + den * den < 1e-24) {
                    continue;
                }
                const double theta = std::atan2(num, den) / 4.0;
                max_angle = std::max(max_angle, std::abs(theta));
                apply_plane_rotation(loadings, l, t, theta);
            }
        }
        if (max_angle < angle_tol) {
            break;
        }
    }
    return loadings;
}

double direct_eta_sq(const std::vector<std::string>& labels, const Eigen::VectorXd& f) {
    const double n = static_cast<double>(f.size());
    const double grand_mean = f.mean();
    std::map<std::string, std::pair<double, double>> per_level;  // sum, count
    for (Eigen::Index i = 0; i < f.size(); ++i) {
        auto& [sum, count] = per_level[labels[static_cast<std::size_t>(i)]];
        sum += f[i];
        count += 1.0;
    }
    double between = 0.0;
    for (const auto& [label, agg] : per_level) {
        (void)label;
        const double mean = agg.first / agg.second;
        between += (agg.second / n) * (mean - grand_mean) * (mean - grand_mean);
    }
    const double total = (f.array() - grand_mean).square().sum() / n;
    return total > 0.0 ? between / total : 0.0;
}

double direct_r_sq(const Eigen::VectorXd& x, const Eigen::VectorXd& f) {
    const double n = static_cast<double>(x.size());
    const double mx = x.mean();
    const double mf = f.mean();
    const double cov = ((x.array() - mx) * (f.array() - mf)).sum() / n;
    const double vx = (x.array() - mx).square().sum() / n;
    const double vf = (f.array() - mf).square().sum() / n;
    return (vx > 0.0 && vf > 0.0) ? cov * cov / (vx * vf) : 0.0;
}

}  // namespace oracles
