#include <doctest.h>

#include <cmath>
#include <random>

#include "fracstep/errors.hpp"
#include "fracstep/kernels.hpp"
#include "fracstep/soe.hpp"
#include "fracstep/timegrid.hpp"

using namespace fracstep;

TEST_CASE("exponential sum meets the target accuracy") {
    SoeApprox soe = soe_build(0.5, 1e-12, 1e-4, 1.0);
    CHECK(soe.max_relative_error() <= 1e-12);
    for (double s : soe.nodes) CHECK(s > 0.0);
    for (double w : soe.weights) CHECK(w > 0.0);
}

TEST_CASE("looser tolerance needs fewer terms") {
    SoeApprox tight = soe_build(0.9, 1e-12, 1e-3, 1.0);
    SoeApprox loose = soe_build(0.9, 1e-8, 1e-3, 1.0);
    CHECK(loose.max_relative_error() <= 1e-8);
    CHECK(loose.terms() < tight.terms());
}

TEST_CASE("argument validation") {
    CHECK_THROWS_AS(soe_build(0.5, 1e-12, 1.0, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(soe_build(0.5, 1e-12, 2.0, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(soe_build(1.5, 1e-12, 1e-3, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(soe_build(0.5, 0.0, 1e-3, 1.0), std::invalid_argument);
}

TEST_CASE("severe cut-offs and extreme exponents stay accurate") {
    for (double beta : {0.05, 0.5, 0.95}) {
        SoeApprox soe = soe_build(beta, 1e-12, 1e-10, 1.0);
        CHECK(soe.max_relative_error() <= 1e-12);
        CHECK(soe.terms() < 400);
    }
}

namespace {

double direct_value(KernelTable& table, const std::vector<double>& g, int n) {
    return discrete_caputo(table.row(n), std::span<const double>(g.data(), static_cast<size_t>(n + 1)));
}

}  // namespace

TEST_CASE("fast path: first step identical to direct, zero history gives zero") {
    TimeMesh mesh = build_graded(8, 1.0, 2.0, 0.25);
    const double beta = 0.5;
    SoeApprox soe = soe_build(beta, 1e-12, mesh.min_step(), mesh.horizon());
    FastCaputo fast(mesh, beta, soe, 1);
    KernelTable table(mesh, beta);

    Eigen::VectorXd zero1 = Eigen::VectorXd::Zero(1);
    fast.set_initial(zero1);
    Eigen::VectorXd one1 = Eigen::VectorXd::Ones(1);
    std::vector<double> g{0.0, 1.0};
    CHECK(fast.value(1, one1)[0] == doctest::Approx(direct_value(table, g, 1)).epsilon(1e-15));

    // constant (zero-difference) history stays exactly zero
    FastCaputo fz(mesh, beta, soe, 1);
    fz.set_initial(zero1);
    for (int n = 1; n <= 8; ++n) {
        CHECK(fz.value(n, zero1)[0] == 0.0);
        fz.push(n, zero1);
    }
}

TEST_CASE("fast path matches the direct sum along whole meshes") {
    std::mt19937 rng(5);
    std::normal_distribution<double> gauss;
    struct Case {
        int N;
        double gamma, beta;
    };
    for (const auto& c : {Case{64, 3.0, 0.5}, Case{64, 1.0, 0.25}, Case{32, 4.0, 0.9}}) {
        TimeMesh mesh = build_graded(c.N, 1.0, c.gamma, c.beta / 2.0);
        SoeApprox soe = soe_build(c.beta, 1e-12, mesh.min_step(), mesh.horizon());
        KernelTable table(mesh, c.beta);
        // smooth-ish random history
        const double c0 = gauss(rng), c1 = gauss(rng), c2 = gauss(rng), c3 = gauss(rng);
        std::vector<double> g(static_cast<size_t>(c.N) + 1);
        for (int k = 0; k <= c.N; ++k) {
            const double t = mesh.t(k);
            g[static_cast<size_t>(k)] = c0 + c1 * t + c2 * t * t + c3 * std::sin(3.0 * t);
        }
        FastCaputo fast(mesh, c.beta, soe, 1);
        Eigen::VectorXd v(1);
        v[0] = g[0];
        fast.set_initial(v);
        double scale = 0.0;
        for (int n = 1; n <= c.N; ++n) {
            const KernelRow& row = table.row(n);
            for (int k = 1; k <= n; ++k)
                scale = std::max(scale, std::abs(row.coeffs[static_cast<size_t>(n - k)] *
                                                 (g[static_cast<size_t>(k)] - g[static_cast<size_t>(k - 1)])));
            const double direct = direct_value(table, g, n);
            v[0] = g[static_cast<size_t>(n)];
            const double fastv = fast.value(n, v)[0];
            // deviation measured against the natural magnitude of the sum
            CHECK(std::abs(direct - fastv) <= 1e-10 * std::max(scale, std::abs(direct)));
            fast.push(n, v);
        }
    }
}

TEST_CASE("fast path enforces the cut-off against the smallest step") {
    TimeMesh mesh = build_graded(8, 1.0, 2.0, 0.25);
    SoeApprox coarse = soe_build(0.5, 1e-12, 0.5, 1.0);  // cut-off far above min step
    CHECK_THROWS_AS(FastCaputo(mesh, 0.5, coarse, 1), std::invalid_argument);
}
