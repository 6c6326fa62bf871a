#include <doctest.h>

#include <cmath>

#include "fracstep/errors.hpp"
#include "fracstep/timegrid.hpp"

using namespace fracstep;

TEST_CASE("graded mesh: uniform case gamma=1") {
    TimeMesh mesh = build_graded(4, 1.0, 1.0, 0.25);
    const double expect[] = {0.0, 0.25, 0.5, 0.75, 1.0};
    for (int k = 0; k <= 4; ++k) CHECK(mesh.t(k) == doctest::Approx(expect[k]).epsilon(1e-15));
    CHECK(mesh.t(0) == 0.0);
    CHECK(mesh.t(4) == 1.0);
}

TEST_CASE("graded mesh: gamma=2 nodes") {
    TimeMesh mesh = build_graded(4, 1.0, 2.0, 0.25);
    CHECK(mesh.t(1) == doctest::Approx(1.0 / 16).epsilon(1e-14));
    CHECK(mesh.t(2) == doctest::Approx(1.0 / 4).epsilon(1e-14));
    CHECK(mesh.t(3) == doctest::Approx(9.0 / 16).epsilon(1e-14));
    CHECK(mesh.t(4) == 1.0);
}

TEST_CASE("graded mesh: steps increase, all ratios below one") {
    TimeMesh mesh = build_graded(8, 1.0, 4.0, 0.25);
    for (int k = 1; k <= 7; ++k) CHECK(mesh.rho(k) < 1.0);
    CHECK(mesh.ratio_bound_ok());
    for (int k = 2; k <= 8; ++k) CHECK(mesh.tau(k) > mesh.tau(k - 1));
}

TEST_CASE("offset nodes: t_{n-theta} = (1-theta) t_n + theta t_{n-1} exactly") {
    const double theta = 0.35;
    TimeMesh mesh = build_graded(16, 2.0, 3.0, theta);
    for (int n = 1; n <= 16; ++n) {
        const double expect = (1.0 - theta) * mesh.t(n) + theta * mesh.t(n - 1);
        CHECK(mesh.t_offset(n) == doctest::Approx(expect).epsilon(1e-15));
        CHECK(mesh.t_offset(n) > mesh.t(n - 1));
        CHECK(mesh.t_offset(n) < mesh.t(n));
    }
}

TEST_CASE("custom mesh: derived fields") {
    TimeMesh mesh = build_custom({0.0, 0.5, 1.0}, 0.25);
    CHECK(mesh.tau(1) == doctest::Approx(0.5));
    CHECK(mesh.tau(2) == doctest::Approx(0.5));
    CHECK(mesh.rho(1) == doctest::Approx(1.0));

    TimeMesh mesh2 = build_custom({0.0, 0.1, 0.5, 1.0}, 0.25);
    CHECK(mesh2.rho(1) == doctest::Approx(0.25));
    CHECK(mesh2.rho(2) == doctest::Approx(0.8));
}

TEST_CASE("custom mesh: non-monotone nodes rejected") {
    CHECK_THROWS_AS(build_custom({0.0, 0.5, 0.4}, 0.25), NonMonotoneNodes);
    CHECK_THROWS_AS(build_custom({0.1, 0.5, 1.0}, 0.25), NonMonotoneNodes);
    CHECK_THROWS_AS(build_custom({0.0, 0.5, 0.5}, 0.25), NonMonotoneNodes);
}

TEST_CASE("mesh assumption: graded meshes satisfy it with a finite constant") {
    TimeMesh mesh = build_graded(8, 1.0, 2.0, 0.25);
    MAReport rep = validate_ma(mesh, 2.0, 10.0);
    CHECK(rep.satisfied());
    CHECK(rep.c_gamma_estimate >= 1.0);
    CHECK(std::isfinite(rep.c_gamma_estimate));
}

TEST_CASE("mesh assumption: uniform mesh needs C >= 2 from the node-growth condition") {
    TimeMesh mesh = build_graded(8, 1.0, 1.0, 0.25);
    MAReport rep = validate_ma(mesh, 1.0, 10.0);
    CHECK(rep.satisfied());
    // t_2/t_1 = 2 is the binding case
    CHECK(rep.c_node_growth == doctest::Approx(2.0).epsilon(1e-13));
    CHECK(rep.c_gamma_estimate >= 2.0 - 1e-12);
}

TEST_CASE("mesh assumption: abrupt jump fails any modest ceiling") {
    TimeMesh mesh = build_custom({0.0, 1e-9, 1.0}, 0.25);
    MAReport rep = validate_ma(mesh, 1.0, 10.0);
    CHECK_FALSE(rep.satisfied());
    CHECK(rep.c_gamma_estimate > 1e6);
}

TEST_CASE("mesh assumption: estimate stable under refinement for graded meshes") {
    // same gamma used to build and validate: the constant stays within a
    // bounded factor across N
    for (double gamma : {1.0, 2.0, 3.0}) {
        double lo = 1e300, hi = 0.0;
        for (int N : {8, 16, 32, 64}) {
            MAReport rep = validate_ma(build_graded(N, 1.0, gamma, 0.25), gamma, 100.0);
            CHECK(rep.satisfied());
            lo = std::min(lo, rep.c_gamma_estimate);
            hi = std::max(hi, rep.c_gamma_estimate);
        }
        CHECK(hi / lo < 2.0);
    }
}

TEST_CASE("graded mesh: argument validation") {
    CHECK_THROWS_AS(build_graded(0, 1.0, 2.0, 0.25), std::invalid_argument);
    CHECK_THROWS_AS(build_graded(4, -1.0, 2.0, 0.25), std::invalid_argument);
    CHECK_THROWS_AS(build_graded(4, 1.0, 0.5, 0.25), std::invalid_argument);
    CHECK_THROWS_AS(build_graded(4, 1.0, 2.0, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(build_graded(4, 1.0, 2.0, 1.0), std::invalid_argument);
}
