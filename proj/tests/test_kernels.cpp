#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

#include "fracstep/kernels.hpp"
#include "fracstep/timegrid.hpp"
#include "oracles.hpp"

using namespace fracstep;

TEST_CASE("omega weight") {
    CHECK(omega_weight(1.0, 0.3) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(omega_weight(0.5, 1.0) == doctest::Approx(0.564189583548).epsilon(1e-11));
    CHECK(omega_weight(0.5, 4.0) == doctest::Approx(0.282094791774).epsilon(1e-11));
    CHECK_THROWS_AS(omega_weight(0.5, 0.0), std::domain_error);
    CHECK_THROWS_AS(omega_weight(0.5, -1.0), std::domain_error);
}

TEST_CASE("first-step coefficient on the unit-step mesh") {
    // a_0^{(1)} = (t_{1-theta})^{1-beta} / (tau_1 Gamma(2-beta)), beta = 1/2
    TimeMesh mesh = build_custom({0.0, 1.0}, 0.25);
    KernelRow row = alikhanov_row(mesh, 0.5, 1);
    REQUIRE(row.coeffs.size() == 1);
    CHECK(row.coeffs[0] == doctest::Approx(0.977205023806).epsilon(1e-11));
    CHECK(row.coeffs[0] == doctest::Approx(oracles::kernel_a_quad(mesh, 0.5, 1, 1)).epsilon(1e-12));
}

TEST_CASE("closed-form cell integrals match quadrature") {
    std::mt19937 rng(7);
    std::uniform_real_distribution<double> beta_pick(0.05, 0.95);
    for (int trial = 0; trial < 60; ++trial) {
        const double beta = beta_pick(rng);
        TimeMesh mesh = oracles::random_admissible_mesh(rng, 10, 1.0, beta / 2.0);
        std::uniform_int_distribution<int> n_pick(1, 10);
        const int n = n_pick(rng);
        std::uniform_int_distribution<int> k_pick(1, n);
        const int k = k_pick(rng);
        const double a_exact = oracles::kernel_a_quad(mesh, beta, n, k);
        CHECK(kernel_a(mesh, beta, n, k) == doctest::Approx(a_exact).epsilon(1e-11));
        if (k <= n - 1) {
            const double b_exact = oracles::kernel_b_quad(mesh, beta, n, k);
            CHECK(kernel_b(mesh, beta, n, k) == doctest::Approx(b_exact).epsilon(1e-9));
        }
    }
}

TEST_CASE("row positivity and monotonicity on admissible meshes") {
    std::mt19937 rng(11);
    for (int trial = 0; trial < 50; ++trial) {
        std::uniform_real_distribution<double> beta_pick(0.05, 0.95);
        const double beta = beta_pick(rng);
        TimeMesh mesh = oracles::random_admissible_mesh(rng, 12, 1.5, beta / 2.0);
        REQUIRE(mesh.ratio_bound_ok());
        for (int n = 1; n <= 12; ++n) {
            KernelRow row = alikhanov_row(mesh, beta, n);
            CHECK(row.monotone());
        }
    }
}

TEST_CASE("kernel lower bound against the exact integral mean") {
    const double piA = 11.0 / 4.0;
    TimeMesh mesh = build_graded(8, 1.0, 3.0, 0.35);
    const double beta = 0.7;
    KernelRow row = alikhanov_row(mesh, beta, 8);
    for (int k = 1; k <= 8; ++k) {
        const double lower =
            (std::pow(mesh.t(8) - mesh.t(k - 1), 1.0 - beta) -
             std::pow(mesh.t(8) - mesh.t(k), 1.0 - beta)) /
            (mesh.tau(k) * std::tgamma(2.0 - beta));
        CHECK(row.coeffs[static_cast<size_t>(8 - k)] >= lower / piA);
    }
}

TEST_CASE("discrete caputo: constants annihilated, single step, linearity") {
    TimeMesh mesh = build_graded(6, 1.0, 2.0, 0.2);
    const double beta = 0.4;
    KernelTable table(mesh, beta);

    std::vector<double> constant(7, 3.7);
    CHECK(discrete_caputo(table.row(6), constant) == doctest::Approx(0.0));

    std::vector<double> step{0.0, 1.0};
    CHECK(discrete_caputo(table.row(1), step) == doctest::Approx(table.row(1).a0()));

    std::mt19937 rng(3);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    std::vector<double> g1(7), g2(7), sum(7);
    for (int i = 0; i < 7; ++i) {
        g1[static_cast<size_t>(i)] = u(rng);
        g2[static_cast<size_t>(i)] = u(rng);
        sum[static_cast<size_t>(i)] = 2.0 * g1[static_cast<size_t>(i)] - 0.5 * g2[static_cast<size_t>(i)];
    }
    const double lin = 2.0 * discrete_caputo(table.row(6), g1) - 0.5 * discrete_caputo(table.row(6), g2);
    CHECK(discrete_caputo(table.row(6), sum) == doctest::Approx(lin).epsilon(1e-13));

    std::vector<double> bad(3, 0.0);
    CHECK_THROWS_AS(discrete_caputo(table.row(6), bad), std::invalid_argument);
}

TEST_CASE("discrete caputo reproduces the derivative of t exactly") {
    // the offset-point formula integrates linear functions exactly, so the
    // discrete value equals t_{n-theta}^{1-beta}/Gamma(2-beta)
    TimeMesh mesh = build_graded(8, 1.0, 1.0, 0.25);
    const double beta = 0.5;
    KernelTable table(mesh, beta);
    std::vector<double> g(9);
    for (int k = 0; k <= 8; ++k) g[static_cast<size_t>(k)] = mesh.t(k);
    for (int n : {1, 4, 8}) {
        const double exact = std::pow(mesh.t_offset(n), 1.0 - beta) / std::tgamma(2.0 - beta);
        CHECK(discrete_caputo(table.row(n), std::span<const double>(g.data(), static_cast<size_t>(n + 1))) ==
              doctest::Approx(exact).epsilon(1e-12));
    }
}

TEST_CASE("mesh/fractional-order coupling enforced") {
    TimeMesh mesh = build_graded(4, 1.0, 2.0, 0.25);  // theta 0.25 -> beta 0.5
    CHECK_THROWS_AS(alikhanov_row(mesh, 0.7, 2), std::invalid_argument);
    CHECK_NOTHROW(alikhanov_row(mesh, 0.5, 2));
}

TEST_CASE("complementary kernels: orthogonality and bounds") {
    const double piA = 11.0 / 4.0;
    for (double gamma : {1.0, 2.0, 4.0}) {
        for (double beta : {0.3, 0.5, 0.8}) {
            TimeMesh mesh = build_graded(16, 1.0, gamma, beta / 2.0);
            KernelTable table(mesh, beta);
            ComplementaryRow prow = complementary_row(table, 16);

            // n = 1 special case
            ComplementaryRow p1 = complementary_row(table, 1);
            CHECK(p1.coeffs[0] == doctest::Approx(1.0 / table.row(1).a0()).epsilon(1e-14));

            const int n = 16;
            for (int k = 1; k <= n; ++k) {
                double s = 0.0;
                for (int j = k; j <= n; ++j)
                    s += prow.coeffs[static_cast<size_t>(n - j)] *
                         table.row(j).coeffs[static_cast<size_t>(j - k)];
                CHECK(s == doctest::Approx(1.0).epsilon(1e-12));
            }
            double wsum = 0.0;
            for (int j = 1; j <= n; ++j) {
                const double pj = prow.coeffs[static_cast<size_t>(n - j)];
                CHECK(pj >= 0.0);
                CHECK(pj <= piA * std::tgamma(2.0 - beta) * std::pow(mesh.tau(j), beta) * (1.0 + 1e-12));
                wsum += pj * omega_weight(1.0 - beta, mesh.t(j));
            }
            CHECK(wsum <= piA);
        }
    }
}

TEST_CASE("quadratic form inequality: zero sequence gives equality") {
    TimeMesh mesh = build_graded(6, 1.0, 2.0, 0.25);
    KernelTable table(mesh, 0.5);
    std::vector<Eigen::VectorXd> q(7, Eigen::VectorXd::Ones(3));
    std::vector<Eigen::VectorXd> z(7, Eigen::VectorXd::Zero(3));
    auto chk = check_quadratic_form_inequality(table, 6, q, z);
    CHECK(chk.lhs == 0.0);
    CHECK(chk.rhs == 0.0);
    CHECK(chk.holds());
}

TEST_CASE("quadratic form inequality: identity weights, random vectors") {
    std::mt19937 rng(19);
    std::normal_distribution<double> gauss;
    TimeMesh mesh = build_graded(6, 1.0, 1.0, 0.25);
    KernelTable table(mesh, 0.5);
    std::vector<Eigen::VectorXd> q(7, Eigen::VectorXd::Ones(4));
    for (int trial = 0; trial < 200; ++trial) {
        std::vector<Eigen::VectorXd> z;
        for (int k = 0; k <= 6; ++k)
            z.push_back(Eigen::VectorXd::NullaryExpr(4, [&](Eigen::Index) { return gauss(rng); }));
        CHECK(check_quadratic_form_inequality(table, 6, q, z).holds());
    }
}

TEST_CASE("quadratic form inequality: precondition violations throw") {
    TimeMesh mesh = build_graded(4, 1.0, 2.0, 0.25);
    KernelTable table(mesh, 0.5);
    std::vector<Eigen::VectorXd> q(5, Eigen::VectorXd::Ones(2));
    std::vector<Eigen::VectorXd> z(5, Eigen::VectorXd::Zero(2));

    auto qneg = q;
    qneg[2][0] = -1.0;
    CHECK_THROWS_AS(check_quadratic_form_inequality(table, 4, qneg, z), std::invalid_argument);

    auto qgrow = q;
    qgrow[3][1] = 2.0;  // increases from level 2 to 3
    CHECK_THROWS_AS(check_quadratic_form_inequality(table, 4, qgrow, z), std::invalid_argument);

    TimeMesh bad = build_custom({0.0, 0.8, 1.0}, 0.25);  // rho_1 = 4 > 7/4
    KernelTable tbad(bad, 0.5);
    std::vector<Eigen::VectorXd> q2(3, Eigen::VectorXd::Ones(2));
    std::vector<Eigen::VectorXd> z2(3, Eigen::VectorXd::Zero(2));
    CHECK_THROWS_AS(check_quadratic_form_inequality(tbad, 2, q2, z2), std::invalid_argument);
}

TEST_CASE("quadratic form inequality: monte carlo with decaying weights") {
    std::mt19937 rng(23);
    std::normal_distribution<double> gauss;
    std::uniform_real_distribution<double> u01(0.0, 1.0);
    int trials = 0;
    while (trials < 500) {
        const double beta = 0.1 + 0.8 * u01(rng);
        std::uniform_int_distribution<int> n_pick(1, 8);
        const int n = n_pick(rng);
        TimeMesh mesh = oracles::random_admissible_mesh(rng, 8, 1.0, beta / 2.0);
        KernelTable table(mesh, beta);
        const int m = 3;
        std::vector<Eigen::VectorXd> q, z;
        Eigen::VectorXd qk = Eigen::VectorXd::NullaryExpr(m, [&](Eigen::Index) { return 0.2 + u01(rng); });
        for (int k = 0; k <= 8; ++k) {
            q.push_back(qk);
            qk = qk.cwiseProduct(
                Eigen::VectorXd::NullaryExpr(m, [&](Eigen::Index) { return 0.5 + 0.5 * u01(rng); }));
            z.push_back(Eigen::VectorXd::NullaryExpr(m, [&](Eigen::Index) { return gauss(rng); }));
        }
        CHECK(check_quadratic_form_inequality(table, n, q, z).holds());
        ++trials;
    }
}
