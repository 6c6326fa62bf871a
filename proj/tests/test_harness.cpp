#include <doctest.h>

#include <cmath>
#include <random>
#include <sstream>

#include "fracstep/harness.hpp"

using namespace fracstep;

namespace {

constexpr double kPi = 3.14159265358979323846;

// analytic residual D_t^alpha u - A u - f for the manufactured problems,
// everything evaluated symbolically
double manufactured_residual(const ProblemSpec& p, double x, double y, double t) {
    const double s = std::sin(kPi * x) * std::sin(kPi * y);
    const double sx = kPi * std::cos(kPi * x) * std::sin(kPi * y);
    const double sy = kPi * std::sin(kPi * x) * std::cos(kPi * y);
    const double g = 1.0 + t + std::pow(t, p.alpha);
    double dfrac;
    if (p.kind == ProblemKind::Subdiffusion)
        dfrac = s * (std::tgamma(p.alpha + 1.0) +
                     std::pow(t, 1.0 - p.alpha) / std::tgamma(2.0 - p.alpha));
    else
        dfrac = s * std::tgamma(p.alpha + 1.0);
    const auto& c = p.coeffs;
    const double Au = c.a1(x, y, t) * (-kPi * kPi * s * g) + c.a2(x, y, t) * (-kPi * kPi * s * g) +
                      c.b1(x, y, t) * sx * g + c.b2(x, y, t) * sy * g + c.b3(x, y, t) * s * g;
    return dfrac - Au - p.f(x, y, t);
}

}  // namespace

TEST_CASE("manufactured sub-diffusion: exact values and initial data") {
    ProblemSpec p = manufactured_subdiffusion(0.5);
    CHECK((*p.exact)(0.5, 0.5, 1.0) == doctest::Approx(3.0).epsilon(1e-14));
    CHECK(p.phi(0.5, 0.5, 0.0) == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(p.sigma1.value() == doctest::Approx(0.5));
    CHECK_THROWS_AS(manufactured_subdiffusion(1.2), std::invalid_argument);
}

TEST_CASE("manufactured diffusion-wave: initial slope and grading exponent") {
    ProblemSpec p = manufactured_diffwave(1.5);
    CHECK(p.psi(0.5, 0.5, 0.0) == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(gamma_opt(p) == doctest::Approx(4.0 / 1.5).epsilon(1e-14));
    CHECK(p.sigma2.value() == doctest::Approx(1.5));
    CHECK(p.sigma3.value() == doctest::Approx(0.75));
    CHECK_THROWS_AS(manufactured_diffwave(0.5), std::invalid_argument);
}

TEST_CASE("source terms satisfy the equations identically") {
    std::mt19937 rng(21);
    std::uniform_real_distribution<double> u01(0.02, 0.98);
    for (double alpha : {0.3, 0.7}) {
        ProblemSpec p = manufactured_subdiffusion(alpha);
        for (int i = 0; i < 20; ++i)
            CHECK(std::abs(manufactured_residual(p, u01(rng), u01(rng), u01(rng))) <= 1e-10);
    }
    for (double alpha : {1.1, 1.9}) {
        ProblemSpec p = manufactured_diffwave(alpha);
        for (int i = 0; i < 20; ++i)
            CHECK(std::abs(manufactured_residual(p, u01(rng), u01(rng), u01(rng))) <= 1e-10);
    }
}

TEST_CASE("expected orders follow the grading") {
    ProblemSpec sub = manufactured_subdiffusion(0.5);
    CHECK(expected_order(sub, 1.0) == doctest::Approx(0.5));
    CHECK(expected_order(sub, 4.0) == doctest::Approx(2.0));
    CHECK(gamma_opt(sub) == doctest::Approx(4.0));
    ProblemSpec dw = manufactured_diffwave(1.01);
    CHECK(expected_order(dw, 1.0) == doctest::Approx(0.505));
    CHECK(expected_order(dw, 4.0 / 1.01) == doctest::Approx(2.0));
}

TEST_CASE("convergence study fills orders and metadata") {
    ExperimentConfig cfg;
    cfg.kind = ProblemKind::Subdiffusion;
    cfg.alphas = {0.5};
    cfg.gammas = {0.0};
    cfg.gamma_is_opt = {true};
    cfg.Ns = {4, 8};
    cfg.Ms = {8};
    cfg.title = "tiny";
    ErrorTable table = run_convergence_study(cfg);
    REQUIRE(table.rows.size() == 2);
    CHECK(table.rows[0].gamma == doctest::Approx(4.0));
    CHECK(table.rows[0].error.empty());
    CHECK_FALSE(table.rows[0].order_tau.has_value());
    REQUIRE(table.rows[1].order_tau.has_value());
    CHECK(*table.rows[1].order_tau > 0.0);
    CHECK(table.rows[1].expected == doctest::Approx(2.0));
}

TEST_CASE("order arithmetic: a factor four gives order two") {
    ExperimentConfig cfg;
    cfg.alphas = {0.5};
    cfg.gammas = {4.0};
    cfg.gamma_is_opt = {false};
    cfg.Ns = {4};
    cfg.Ms = {4};
    ErrorTable t = run_convergence_study(cfg);
    t.rows.clear();
    ErrorRow a;
    a.alpha = 0.5;
    a.gamma = 4;
    a.N = 8;
    a.M = 4;
    a.e1 = 4e-2;
    ErrorRow b = a;
    b.N = 16;
    b.e1 = 1e-2;
    t.rows = {a, b};
    // recompute as the study does
    const double order = std::log2(t.rows[0].e1 / t.rows[1].e1);
    CHECK(order == doctest::Approx(2.0));
}

TEST_CASE("table emission: csv and markdown shapes, empty table rejected") {
    ErrorTable t;
    t.title = "demo";
    t.kernel_mode = "direct";
    t.h1_mode = "full";
    ErrorRow r;
    r.alpha = 0.7;
    r.gamma = 1.0;
    r.N = 500;
    r.M = 4;
    r.e1 = 3.6943e-1;
    r.expected = 2.0;
    r.kernel_mode = "direct";
    t.rows = {r};

    std::ostringstream csv;
    emit_table(t, TableFormat::Csv, csv);
    CHECK(csv.str().find("alpha,gamma,N,M,E1,") == 0);
    CHECK(csv.str().find("3.6943e-01") != std::string::npos);

    std::ostringstream md;
    emit_table(t, TableFormat::Markdown, md);
    CHECK(md.str().find("## demo") == 0);
    CHECK(md.str().find("| alpha | gamma | N | M | E1 |") != std::string::npos);
    CHECK(md.str().find("3.6943e-01") != std::string::npos);

    ErrorTable empty;
    std::ostringstream sink;
    CHECK_THROWS_AS(emit_table(empty, TableFormat::Csv, sink), std::invalid_argument);
}

TEST_CASE("config parsing: overrides and the opt sentinel") {
    const std::string text = R"json({
        "problem": "diffusionwave",
        "alphas": [1.5],
        "gammas": [1.0, "opt"],
        "N": [8, 16],
        "M": [32],
        "kernel": "soe",
        "h1_norm": "semi",
        "solver": {"mode": "iterative", "rel_tol": 1e-10},
        "title": "custom"
    })json";
    ExperimentConfig cfg = ExperimentConfig::from_json_text(text);
    CHECK(cfg.kind == ProblemKind::DiffusionWave);
    CHECK(cfg.gammas.size() == 2);
    CHECK(cfg.gamma_is_opt[1]);
    CHECK(cfg.kernel_mode == KernelMode::Soe);
    CHECK(cfg.h1_mode == H1Mode::Semi);
    CHECK(cfg.solver.rel_tol == doctest::Approx(1e-10));
    CHECK(cfg.title == "custom");

    CHECK_THROWS_AS(ExperimentConfig::from_json_text(R"({"alphas": []})"), std::invalid_argument);
    CHECK_THROWS_AS(ExperimentConfig::from_json_text(R"({"problem": "heat"})"), std::invalid_argument);
}

TEST_CASE("reproduction presets cover the nine tables") {
    ExperimentConfig t4 = reproduce_config(4, false);
    CHECK(t4.kind == ProblemKind::Subdiffusion);
    CHECK(t4.Ns == std::vector<int>{500});
    CHECK(t4.Ms == std::vector<int>{4, 8, 16, 32});
    CHECK(t4.alphas[0] == doctest::Approx(0.7));

    ExperimentConfig t1 = reproduce_config(1, false);
    CHECK(t1.Ms == std::vector<int>{400});
    ExperimentConfig t1p = reproduce_config(1, true);
    CHECK(t1p.Ms == std::vector<int>{1000});

    ExperimentConfig t9 = reproduce_config(9, false);
    CHECK(t9.kind == ProblemKind::DiffusionWave);
    CHECK(t9.alphas[0] == doctest::Approx(1.5));

    CHECK_THROWS_AS(reproduce_config(0, false), std::invalid_argument);
    CHECK_THROWS_AS(reproduce_config(10, false), std::invalid_argument);
}
