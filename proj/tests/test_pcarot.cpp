#include <doctest.h>

#include <cmath>
#include <numeric>

#include "mixfactor/pcarot.hpp"
#include "oracles.hpp"
#include "test_util.hpp"

using namespace mixfactor;
using testutil::categorical_column;
using testutil::make_table;
using testutil::numeric_column;

namespace {

double max_abs(const Eigen::MatrixXd& m) {
    return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff();
}

constexpr double kQuarterPi = 0.78539816339744830961;

// Angle distance modulo the pi/2 period of the planar criterion.
double angle_distance(double a, double b) {
    const double diff = std::abs(a - b);
    return std::min(diff, 2.0 * kQuarterPi - diff);
}

// Orthogonal latent design: vars 1 and 2 on one factor, var 3 on another,
// loadings exactly axis-aligned with distinct eigenvalues (2, 1).
MixedTable axis_aligned_table() {
    return testutil::make_table(4, {numeric_column("x1", {1, 1, -1, -1}),
                                    numeric_column("x2", {1, 1, -1, -1}),
                                    numeric_column("x3", {1, -1, 1, -1})});
}

}  // namespace

TEST_SUITE("pcarot") {

TEST_CASE("planar angle is zero on axis-aligned loadings") {
    Eigen::MatrixXd A(3, 2);
    A << 2, 0, 0, 3, 1, 0;
    const std::vector<std::vector<Eigen::Index>> vars = {{0}, {1}, {2}};
    CHECK(planar_angle(A, 0, 1, vars) == 0.0);
}

TEST_CASE("planar angle is zero when the criterion is flat") {
    // Identical columns with equal per-variable norms: every rotation of
    // the plane leaves the criterion unchanged.
    Eigen::MatrixXd A(2, 2);
    A << 1, 1, 1, 1;
    const std::vector<std::vector<Eigen::Index>> vars = {{0}, {1}};
    CHECK(planar_angle(A, 0, 1, vars) == 0.0);
    const double before = varimax_criterion(A, vars);
    Eigen::MatrixXd rotated = A;
    oracles::apply_plane_rotation(rotated, 0, 1, 0.3);
    CHECK(varimax_criterion(rotated, vars) == doctest::Approx(before).epsilon(1e-12));
}

TEST_CASE("planar angle matches the grid-search oracle on mixed data") {
    oracles::Rng rng(43);
    for (int trial = 0; trial < 5; ++trial) {
        const auto table = oracles::random_mixed_table(rng, 40, 5, 3);
        const auto model = fit_pcamix(table);
        REQUIRE(model.decomposition.rank >= 2);
        const auto result = rotate(model, 2, {.angle_tol = 1.0, .max_sweeps = 0});
        // max_sweeps = 0 keeps A_tilde_rot unrotated; evaluate the first step.
        const auto vars = model.pre.var_index();
        const double theta = planar_angle(result.A_tilde_rot, 0, 1, vars);
        const double oracle =
            oracles::grid_search_angle(result.A_tilde_rot, vars, 0, 1, 1e-4);
        CHECK(angle_distance(theta, oracle) < 1e-3);

        // The closed form cannot be beaten by the grid.
        Eigen::MatrixXd ours = result.A_tilde_rot;
        oracles::apply_plane_rotation(ours, 0, 1, theta);
        Eigen::MatrixXd grid = result.A_tilde_rot;
        oracles::apply_plane_rotation(grid, 0, 1, oracle);
        CHECK(oracles::criterion(ours, vars) >= oracles::criterion(grid, vars) - 1e-9);
    }
}

TEST_CASE("already-simple structure keeps T = I and the truncated scores") {
    const auto model = fit_pcamix(axis_aligned_table());
    REQUIRE(model.decomposition.rank == 2);
    const auto result = rotate(model, 2);
    CHECK(result.converged);
    CHECK(max_abs(result.T - Eigen::MatrixXd::Identity(2, 2)) < 1e-12);
    CHECK(max_abs(result.F_rot - model.F.leftCols(2)) < 1e-10);
    CHECK(max_abs(result.lambda_rot - model.eigenvalues.head(2)) < 1e-10);

    SUBCASE("identity rotation predicts like truncated PCAmix") {
        const Eigen::MatrixXd rotated = predict_rotated(result, axis_aligned_table());
        const Eigen::MatrixXd plain =
            predict_scores(model, axis_aligned_table()).leftCols(2);
        CHECK(max_abs(rotated - plain) < 1e-10);
    }
}

TEST_CASE("rotation invariants on random mixed data") {
    oracles::Rng rng(47);
    for (int trial = 0; trial < 5; ++trial) {
        const auto table = oracles::random_mixed_table(rng, 60, 4, 3);
        const auto model = fit_pcamix(table);
        const Eigen::Index k = std::min<Eigen::Index>(3, model.decomposition.rank);
        REQUIRE(k >= 2);
        const auto result = rotate(model, k);
        CHECK(result.converged);

        // T is orthonormal.
        CHECK(max_abs(result.T.transpose() * result.T -
                      Eigen::MatrixXd::Identity(k, k)) < 1e-10);

        // Total variance of the first k components is preserved.
        CHECK(result.lambda_rot.sum() ==
              doctest::Approx(model.eigenvalues.head(k).sum()).epsilon(1e-8));

        // The criterion never decreases over sweeps.
        for (std::size_t s = 1; s < result.criterion_by_sweep.size(); ++s) {
            CHECK(result.criterion_by_sweep[s] >=
                  result.criterion_by_sweep[s - 1] - 1e-10);
        }

        // Normalized scores rotate by T: U_rot = U T.
        const Eigen::MatrixXd u_rot =
            model.pre.N.inv_sqrt().matrix().asDiagonal() * result.U_tilde_rot;
        CHECK(max_abs(u_rot - model.decomposition.U.leftCols(k) * result.T) < 1e-10);

        // The rotated components span the same subspace.
        const Eigen::MatrixXd u_tilde =
            model.pre.N.sqrt().matrix().asDiagonal() * model.decomposition.U.leftCols(k);
        CHECK(max_abs(result.U_tilde_rot * result.U_tilde_rot.transpose() -
                      u_tilde * u_tilde.transpose()) < 1e-8);

        // Rotated components stay uncorrelated with variances lambda_rot.
        const double n = static_cast<double>(model.pre.n_rows);
        const Eigen::MatrixXd cov = result.F_rot.transpose() * result.F_rot / n;
        CHECK(max_abs(cov - Eigen::MatrixXd(result.lambda_rot.asDiagonal())) < 1e-8);

        // F_rot = Z V_rot.
        CHECK(max_abs(result.F_rot - model.pre.Z * result.V_rot) < 1e-10);
    }
}

TEST_CASE("final criterion dominates random rotations") {
    oracles::Rng rng(53);
    const auto table = oracles::random_mixed_table(rng, 50, 4, 2);
    const auto model = fit_pcamix(table);
    REQUIRE(model.decomposition.rank >= 2);
    const auto result = rotate(model, 2);
    const auto vars = model.pre.var_index();
    const double best = oracles::criterion(result.A_tilde_rot, vars);

    const Eigen::MatrixXd start = (model.pre.M.sqrt().matrix().asDiagonal() *
                                   model.decomposition.V.leftCols(2)) *
                                  model.decomposition.singular_values.head(2).asDiagonal();
    for (int i = 0; i < 10000; ++i) {
        Eigen::MatrixXd candidate = start;
        oracles::apply_plane_rotation(candidate, 0, 1, rng.uniform(-2.0, 2.0) * kQuarterPi);
        CHECK(oracles::criterion(candidate, vars) <= best + 1e-9);
    }
}

TEST_CASE("rotated squared loadings match direct measures and close to lambda_rot") {
    oracles::Rng rng(59);
    const auto table = oracles::random_mixed_table(rng, 70, 3, 2);
    const auto model = fit_pcamix(table);
    const Eigen::Index k = std::min<Eigen::Index>(3, model.decomposition.rank);
    const auto result = rotate(model, k);
    const Eigen::MatrixXd sq = rotated_sqload(result);

    for (Eigen::Index i = 0; i < k; ++i) {
        CHECK(sq.col(i).sum() == doctest::Approx(result.lambda_rot[i]).epsilon(1e-8));
    }
    for (std::size_t j = 0; j < table.columns.size(); ++j) {
        const auto& col = table.columns[j];
        for (Eigen::Index i = 0; i < k; ++i) {
            double direct = 0.0;
            if (col.kind == VarKind::Numeric) {
                const Eigen::VectorXd x = Eigen::Map<const Eigen::VectorXd>(
                    col.values.data(), static_cast<Eigen::Index>(col.values.size()));
                direct = oracles::direct_r_sq(x, result.F_rot.col(i));
            } else {
                direct = oracles::direct_eta_sq(col.labels, result.F_rot.col(i));
            }
            CHECK(sq(static_cast<Eigen::Index>(j), i) ==
                  doctest::Approx(direct).epsilon(1e-8));
        }
    }
}

TEST_CASE("rotated prediction") {
    oracles::Rng rng(61);
    const auto table = oracles::random_mixed_table(rng, 45, 4, 2);
    const auto model = fit_pcamix(table);
    const auto result = rotate(model, 2);

    SUBCASE("training rows reproduce F_rot") {
        CHECK(max_abs(predict_rotated(result, table) - result.F_rot) < 1e-10);
    }
    SUBCASE("beta path equals the Z_new V_rot path on new rows") {
        for (int trial = 0; trial < 50; ++trial) {
            auto one = table;
            one.n_rows = 1;
            for (std::size_t c = 0; c < one.columns.size(); ++c) {
                auto& col = one.columns[c];
                if (col.kind == VarKind::Numeric) {
                    col.values = {rng.uniform(-4.0, 4.0)};
                } else {
                    const auto levels = observed_levels(table.columns[c]);
                    col.labels = {levels[static_cast<std::size_t>(
                        rng.uniform_int(0, static_cast<int>(levels.size()) - 1))]};
                }
            }
            const Eigen::MatrixXd via_beta = predict_rotated(result, one);
            const Eigen::MatrixXd via_projection =
                apply_preprocess(one, model.pre) * result.V_rot;
            CHECK(max_abs(via_beta - via_projection) < 1e-10);
        }
    }
}

TEST_CASE("pure numeric rotation matches a reference varimax") {
    oracles::Rng rng(67);
    const auto table = oracles::random_mixed_table(rng, 40, 6, 0);
    const auto model = fit_pcamix(table);
    const Eigen::Index k = 3;
    const auto result = rotate(model, k);

    const Eigen::MatrixXd start = (model.pre.M.sqrt().matrix().asDiagonal() *
                                   model.decomposition.V.leftCols(k)) *
                                  model.decomposition.singular_values.head(k).asDiagonal();
    const Eigen::MatrixXd reference = oracles::reference_varimax(start);

    // Compare up to column permutation and sign.
    std::vector<bool> used(static_cast<std::size_t>(k), false);
    for (Eigen::Index i = 0; i < k; ++i) {
        bool matched = false;
        for (Eigen::Index j = 0; j < k && !matched; ++j) {
            if (used[static_cast<std::size_t>(j)]) {
                continue;
            }
            const double same = max_abs(result.A_tilde_rot.col(i) - reference.col(j));
            const double flipped = max_abs(result.A_tilde_rot.col(i) + reference.col(j));
            if (std::min(same, flipped) < 1e-6) {
                used[static_cast<std::size_t>(j)] = true;
                matched = true;
            }
        }
        CHECK(matched);
    }
}

TEST_CASE("k out of range is rejected") {
    oracles::Rng rng(71);
    const auto table = oracles::random_mixed_table(rng, 20, 3, 1);
    const auto model = fit_pcamix(table);
    CHECK_THROWS_AS(rotate(model, 1), SchemaError);
    CHECK_THROWS_AS(rotate(model, model.decomposition.rank + 1), SchemaError);
}

}  // TEST_SUITE
