// fracstep: benchmark CLI for the nonuniform fractional-evolution solvers.
//
//   fracstep run --config cfg.json [--paper-scale] [--kernel soe|direct]
//                [--format csv|markdown] [--out DIR]
//   fracstep reproduce --table K [--paper-scale] [...]
//   fracstep verify
//
// Exit codes: 0 success, 2 property-suite failure, 3 solver failure.

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <random>
#include <string>

#include <CLI11.hpp>

#include "fracstep/errors.hpp"
#include "fracstep/harness.hpp"
#include "fracstep/kernels.hpp"
#include "fracstep/soe.hpp"

using namespace fracstep;

namespace {

int run_study(ExperimentConfig cfg, const std::string& kernel, const std::string& format,
              const std::string& out_dir, bool paper_scale) {
    if (!kernel.empty()) cfg.kernel_mode = kernel == "soe" ? KernelMode::Soe : KernelMode::Direct;
    if (!out_dir.empty()) cfg.out_dir = out_dir;
    if (paper_scale)
        for (auto& M : cfg.Ms)
            if (M == 400) M = 1000;

    std::filesystem::create_directories(cfg.out_dir);
    ErrorTable table = run_convergence_study(cfg);

    const auto base = std::filesystem::path(cfg.out_dir) / table.title;
    emit_table_file(table, TableFormat::Csv, base.string() + ".csv");
    emit_table_file(table, TableFormat::Markdown, base.string() + ".md");
    emit_plot_data(table, base.string() + "_plot.csv");
    if (format == "markdown")
        emit_table(table, TableFormat::Markdown, std::cout);
    else
        emit_table(table, TableFormat::Csv, std::cout);

    bool solver_failed = false;
    for (const auto& row : table.rows)
        if (!row.error.empty()) {
            solver_failed = true;
            std::fprintf(stderr, "cell alpha=%g gamma=%g N=%d M=%d failed: %s\n", row.alpha,
                         row.gamma, row.N, row.M, row.error.c_str());
        }
    std::fprintf(stderr, "wrote %s.{csv,md} and %s_plot.csv\n", base.string().c_str(),
                 base.string().c_str());
    return solver_failed ? 3 : 0;
}

std::vector<double> random_admissible_nodes(std::mt19937& rng, int N) {
    std::uniform_real_distribution<double> jump(std::log(1.0 / 1.7), std::log(2.2));
    std::vector<double> steps(static_cast<size_t>(N), 1.0);
    for (int k = 1; k < N; ++k)
        steps[static_cast<size_t>(k)] = steps[static_cast<size_t>(k - 1)] * std::exp(jump(rng));
    double sum = 0.0;
    for (double s : steps) sum += s;
    std::vector<double> nodes(static_cast<size_t>(N) + 1, 0.0);
    for (int k = 1; k <= N; ++k)
        nodes[static_cast<size_t>(k)] =
            nodes[static_cast<size_t>(k - 1)] + steps[static_cast<size_t>(k - 1)] / sum;
    nodes.back() = 1.0;
    return nodes;
}

bool verify_kernel_properties() {
    std::mt19937 rng(1);
    const double piA = 11.0 / 4.0;
    for (int trial = 0; trial < 300; ++trial) {
        const int N = 2 + trial % 14;
        const std::vector<double> nodes = random_admissible_nodes(rng, N);
        for (int bi = 1; bi <= 19; ++bi) {
            const double beta = 0.05 * bi;
            TimeMesh mesh(nodes, beta / 2.0);
            for (int n = 1; n <= N; ++n) {
                KernelRow row = alikhanov_row(mesh, beta, n);
                if (!row.monotone()) return false;
                for (int k = 1; k <= n; ++k) {
                    const double lower =
                        (std::pow(mesh.t(n) - mesh.t(k - 1), 1.0 - beta) -
                         std::pow(mesh.t(n) - mesh.t(k), 1.0 - beta)) /
                        (mesh.tau(k) * std::tgamma(2.0 - beta) * piA);
                    if (row.coeffs[static_cast<size_t>(n - k)] < lower) return false;
                }
            }
        }
    }
    return true;
}

bool verify_inequality() {
    std::mt19937 rng(2);
    std::normal_distribution<double> gauss;
    std::uniform_real_distribution<double> u01(0.0, 1.0);
    for (int trial = 0; trial < 3000; ++trial) {
        const double beta = 0.1 + 0.8 * u01(rng);
        const int N = 8;
        TimeMesh mesh(random_admissible_nodes(rng, N), beta / 2.0);
        KernelTable table(mesh, beta);
        std::vector<Eigen::VectorXd> q, z;
        Eigen::VectorXd qk =
            Eigen::VectorXd::NullaryExpr(3, [&](Eigen::Index) { return 0.1 + u01(rng); });
        for (int k = 0; k <= N; ++k) {
            q.push_back(qk);
            qk = qk.cwiseProduct(Eigen::VectorXd::NullaryExpr(
                3, [&](Eigen::Index) { return 0.4 + 0.6 * u01(rng); }));
            z.push_back(Eigen::VectorXd::NullaryExpr(3, [&](Eigen::Index) { return gauss(rng); }));
        }
        if (!check_quadratic_form_inequality(table, 1 + trial % N, q, z).holds()) return false;
    }
    return true;
}

bool verify_complementary() {
    const double piA = 11.0 / 4.0;
    for (double gamma : {1.0, 2.0, 4.0}) {
        for (double beta : {0.3, 0.6}) {
            TimeMesh mesh = build_graded(48, 1.0, gamma, beta / 2.0);
            KernelTable table(mesh, beta);
            ComplementaryRow prow = complementary_row(table, 48);
            for (int k = 1; k <= 48; ++k) {
                double s = 0.0;
                for (int j = k; j <= 48; ++j)
                    s += prow.coeffs[static_cast<size_t>(48 - j)] *
                         table.row(j).coeffs[static_cast<size_t>(j - k)];
                if (std::abs(s - 1.0) > 1e-12) return false;
            }
            for (int j = 1; j <= 48; ++j) {
                const double pj = prow.coeffs[static_cast<size_t>(48 - j)];
                if (pj < 0.0 ||
                    pj > piA * std::tgamma(2.0 - beta) * std::pow(mesh.tau(j), beta) * (1 + 1e-12))
                    return false;
            }
        }
    }
    return true;
}

bool verify_coefficients() {
    const Domain dom{0.0, 1.0, 0.0, 1.0};
    for (const char* name : {"identity", "constant", "paper_section5"}) {
        CoefficientSet c = coefficient_preset(name);
        AuxFields aux = build_aux(c);
        std::mt19937 rng(3);
        std::uniform_real_distribution<double> u01(0.02, 0.98);
        for (int trial = 0; trial < 50; ++trial) {
            const double x = u01(rng), y = u01(rng), t = u01(rng);
            if (std::abs(aux.p(x, y, t) * c.a1(x, y, t) - aux.p1(x, y, t)) >
                1e-12 * aux.p1(x, y, t))
                return false;
            if (std::abs(aux.p(x, y, t) * c.a2(x, y, t) - aux.p2(x, y, t)) >
                1e-12 * aux.p2(x, y, t))
                return false;
            if (!(aux.p(x, y, t) > 0.0)) return false;
        }
        AssumptionReport rep = verify_assumptions(c, dom, 1.0, 12);
        if (!rep.v1_positivity.pass || !rep.v2_bounded.pass) return false;
    }
    return true;
}

int run_verify() {
    struct Suite {
        const char* name;
        bool (*fn)();
    };
    const Suite suites[] = {
        {"kernel positivity/monotonicity/lower bound", verify_kernel_properties},
        {"weighted quadratic-form inequality", verify_inequality},
        {"complementary kernels", verify_complementary},
        {"coefficient identities and assumptions", verify_coefficients},
    };
    bool all = true;
    for (const auto& s : suites) {
        const bool ok = s.fn();
        std::printf("[%s] %s\n", ok ? "PASS" : "FAIL", s.name);
        if (!ok) all = false;
    }
    return all ? 0 : 2;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Nonuniform time-stepping benchmark for fractional evolution equations"};
    app.require_subcommand(1);

    std::string config_path, kernel, format = "csv", out_dir;
    bool paper_scale = false;
    int table_no = 0;

    auto add_common = [&](CLI::App* cmd) {
        cmd->add_flag("--paper-scale", paper_scale,
                      "use the full spatial resolution (M=1000) in temporal studies");
        cmd->add_option("--kernel", kernel, "history evaluation: soe|direct")
            ->check(CLI::IsMember({"soe", "direct"}));
        cmd->add_option("--format", format, "stdout table format")
            ->check(CLI::IsMember({"csv", "markdown"}));
        cmd->add_option("--out", out_dir, "output directory");
    };

    CLI::App* run = app.add_subcommand("run", "run a convergence study from a JSON config");
    run->add_option("--config", config_path, "JSON experiment config")->required();
    add_common(run);

    CLI::App* rep = app.add_subcommand("reproduce", "regenerate a built-in benchmark table");
    rep->add_option("--table", table_no, "table number 1..9")->required()->check(CLI::Range(1, 9));
    add_common(rep);

    app.add_subcommand("verify", "run the kernel/inequality/coefficient suites");

    CLI11_PARSE(app, argc, argv);

    try {
        if (app.got_subcommand("verify")) return run_verify();
        if (app.got_subcommand("run"))
            return run_study(ExperimentConfig::from_json_file(config_path), kernel, format,
                             out_dir, paper_scale);
        return run_study(reproduce_config(table_no, paper_scale), kernel, format, out_dir,
                         paper_scale);
    } catch (const SolverBreakdown& e) {
        std::fprintf(stderr, "solver failure: %s\n", e.what());
        return 3;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
}
