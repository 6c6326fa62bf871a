#include "fracstep/harness.hpp"

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <stdexcept>

#include <nlohmann/json.hpp>

namespace fracstep {

namespace {

constexpr double kPi = 3.14159265358979323846;

double shape(double x, double y) { return std::sin(kPi * x) * std::sin(kPi * y); }

// A applied to sin(pi x) sin(pi y) with the coefficient fields of `c`.
double elliptic_on_shape(const CoefficientSet& c, double x, double y, double t) {
    const double s = shape(x, y);
    const double sx = kPi * std::cos(kPi * x) * std::sin(kPi * y);
    const double sy = kPi * std::sin(kPi * x) * std::cos(kPi * y);
    return -kPi * kPi * (c.a1(x, y, t) + c.a2(x, y, t)) * s + c.b1(x, y, t) * sx +
           c.b2(x, y, t) * sy + c.b3(x, y, t) * s;
}

}  // namespace

ProblemSpec manufactured_subdiffusion(double alpha) {
    if (!(alpha > 0.0 && alpha < 1.0))
        throw std::invalid_argument("manufactured_subdiffusion: alpha must lie in (0,1)");
    ProblemSpec p;
    p.kind = ProblemKind::Subdiffusion;
    p.alpha = alpha;
    p.coeffs = preset_paper_section5();
    p.dom = Domain{0.0, 1.0, 0.0, 1.0};
    p.T = 1.0;
    const double gA = std::tgamma(alpha + 1.0);
    const double g2A = std::tgamma(2.0 - alpha);
    CoefficientSet coeffs = p.coeffs;
    p.f = [alpha, gA, g2A, coeffs](double x, double y, double t) {
        const double dfrac = gA + (t > 0.0 ? std::pow(t, 1.0 - alpha) / g2A : 0.0);
        return shape(x, y) * dfrac - elliptic_on_shape(coeffs, x, y, t) *
                                         (1.0 + t + std::pow(t, alpha));
    };
    p.phi = [](double x, double y, double) { return shape(x, y); };
    p.exact = [alpha](double x, double y, double t) {
        return shape(x, y) * (1.0 + t + std::pow(t, alpha));
    };
    p.sigma1 = alpha;
    return p;
}

ProblemSpec manufactured_diffwave(double alpha) {
    if (!(alpha > 1.0 && alpha < 2.0))
        throw std::invalid_argument("manufactured_diffwave: alpha must lie in (1,2)");
    ProblemSpec p;
    p.kind = ProblemKind::DiffusionWave;
    p.alpha = alpha;
    p.coeffs = preset_paper_section5();
    p.dom = Domain{0.0, 1.0, 0.0, 1.0};
    p.T = 1.0;
    const double gA = std::tgamma(alpha + 1.0);
    CoefficientSet coeffs = p.coeffs;
    p.f = [alpha, gA, coeffs](double x, double y, double t) {
        return gA * shape(x, y) -
               elliptic_on_shape(coeffs, x, y, t) * (1.0 + t + std::pow(t, alpha));
    };
    p.phi = [](double x, double y, double) { return shape(x, y); };
    p.psi = [](double x, double y, double) { return shape(x, y); };
    p.psi_elliptic = [coeffs](double x, double y, double t) {
        return elliptic_on_shape(coeffs, x, y, t);
    };
    p.exact = [alpha](double x, double y, double t) {
        return shape(x, y) * (1.0 + t + std::pow(t, alpha));
    };
    p.sigma2 = alpha;
    p.sigma3 = alpha / 2.0;
    return p;
}

double gamma_opt(const ProblemSpec& problem) {
    if (problem.kind == ProblemKind::Subdiffusion)
        return 2.0 / problem.sigma1.value_or(problem.alpha);
    return 4.0 / problem.alpha;
}

double expected_order(const ProblemSpec& problem, double gamma) {
    if (problem.kind == ProblemKind::Subdiffusion)
        return std::min(2.0, gamma * problem.sigma1.value_or(problem.alpha));
    const double s2 = problem.sigma2.value_or(problem.alpha);
    const double s3 = problem.sigma3.value_or(problem.alpha / 2.0);
    return std::min({2.0, gamma * s2, gamma * s3});
}

double measure_e1(const SolutionHistory& history, const ProblemSpec& problem, H1Mode mode) {
    if (!problem.exact) throw std::invalid_argument("measure_e1: problem has no exact solution");
    const Grid2D& grid = *history.grid;
    const TimeMesh& mesh = *history.mesh;
    double worst = 0.0;
    for (int n = 1; n <= mesh.levels(); ++n) {
        Vector diff = history.u(n) - grid.sample(*problem.exact, mesh.t(n));
        worst = std::max(worst, error_norm(grid, diff, mode));
    }
    return worst;
}

namespace {

ProblemSpec make_problem(const ExperimentConfig& cfg, double alpha) {
    ProblemSpec p = cfg.kind == ProblemKind::Subdiffusion ? manufactured_subdiffusion(alpha)
                                                          : manufactured_diffwave(alpha);
    if (cfg.coefficient_preset != "paper_section5") {
        // keep the manufactured source consistent with the coefficients
        throw std::invalid_argument(
            "run_convergence_study: only the paper_section5 preset carries a manufactured source");
    }
    return p;
}

}  // namespace

ErrorTable run_convergence_study(const ExperimentConfig& config) {
    ErrorTable table;
    table.title = config.title;
    table.kernel_mode = config.kernel_mode == KernelMode::Soe ? "soe" : "direct";
    table.solver_tol = config.solver.rel_tol;
    table.h1_mode = config.h1_mode == H1Mode::Full ? "full" : "semi";

    for (double alpha : config.alphas) {
        ProblemSpec problem = make_problem(config, alpha);
        for (size_t gi = 0; gi < config.gammas.size(); ++gi) {
            const double gamma = (gi < config.gamma_is_opt.size() && config.gamma_is_opt[gi])
                                     ? gamma_opt(problem)
                                     : config.gammas[gi];
            for (int M : config.Ms) {
                Grid2D grid(M, M, problem.dom);
                for (int N : config.Ns) {
                    ErrorRow row;
                    row.alpha = alpha;
                    row.gamma = gamma;
                    row.N = N;
                    row.M = M;
                    row.expected = expected_order(problem, gamma);
                    row.kernel_mode = table.kernel_mode;
                    const auto t0 = std::chrono::steady_clock::now();
                    try {
                        TimeMesh mesh = build_graded(N, problem.T, gamma, problem.theta());
                        SolutionHistory hist =
                            solve(problem, mesh, grid, config.solver, config.kernel_mode);
                        row.e1 = measure_e1(hist, problem, config.h1_mode);
                        row.solver_iterations = hist.stats.total_solver_iterations;
                        if (config.emit_snapshots) {
                            std::ostringstream name;
                            name << config.title << "_a" << alpha << "_g" << gamma << "_N" << N
                                 << "_M" << M << "_final.txt";
                            write_snapshot(hist, N,
                                           (std::filesystem::path(config.out_dir) / name.str())
                                               .string(),
                                           false);
                        }
                    } catch (const std::exception& e) {
                        row.error = e.what();
                    }
                    row.seconds = std::chrono::duration<double>(
                                      std::chrono::steady_clock::now() - t0)
                                      .count();
                    table.rows.push_back(row);
                }
            }
        }
    }
    // fill orders where the half-resolution row exists
    for (auto& row : table.rows) {
        if (!row.error.empty()) continue;
        for (const auto& prev : table.rows) {
            if (!prev.error.empty()) continue;
            if (prev.alpha == row.alpha && prev.gamma == row.gamma && prev.M == row.M &&
                prev.N * 2 == row.N && row.e1 > 0.0)
                row.order_tau = std::log2(prev.e1 / row.e1);
            if (prev.alpha == row.alpha && prev.gamma == row.gamma && prev.N == row.N &&
                prev.M * 2 == row.M && row.e1 > 0.0)
                row.order_h = std::log2(prev.e1 / row.e1);
        }
    }
    return table;
}

namespace {

std::string sci(double v) {
    std::ostringstream os;
    os << std::scientific << std::setprecision(4) << v;
    return os.str();
}

std::string ord(const std::optional<double>& v) {
    if (!v) return "*";
    std::ostringstream os;
    os << std::fixed << std::setprecision(2) << *v;
    return os.str();
}

}  // namespace

void emit_table(const ErrorTable& table, TableFormat format, std::ostream& os) {
    if (table.rows.empty()) throw std::invalid_argument("emit_table: empty table");
    if (format == TableFormat::Csv) {
        os << "alpha,gamma,N,M,E1,order_tau,order_h,expected_order,seconds,solver_iterations,"
              "kernel,error\n";
        for (const auto& r : table.rows) {
            os << r.alpha << "," << r.gamma << "," << r.N << "," << r.M << ","
               << (r.error.empty() ? sci(r.e1) : "") << "," << ord(r.order_tau) << ","
               << ord(r.order_h) << "," << r.expected << "," << std::fixed
               << std::setprecision(3) << r.seconds << "," << r.solver_iterations << ","
               << r.kernel_mode << "," << r.error << "\n";
            os.unsetf(std::ios::fixed);
        }
        return;
    }
    os << "## " << table.title << "\n\n";
    os << "kernel: " << table.kernel_mode << ", solver tol: " << table.solver_tol
       << ", error norm: " << table.h1_mode << "\n\n";
    os << "| alpha | gamma | N | M | E1 | Order_tau | Order_h | expected | seconds |\n";
    os << "|---|---|---|---|---|---|---|---|---|\n";
    for (const auto& r : table.rows) {
        os << "| " << r.alpha << " | " << std::setprecision(4) << r.gamma << " | " << r.N
           << " | " << r.M << " | " << (r.error.empty() ? sci(r.e1) : ("failed: " + r.error))
           << " | " << ord(r.order_tau) << " | " << ord(r.order_h) << " | " << r.expected
           << " | " << std::fixed << std::setprecision(2) << r.seconds << " |\n";
        os.unsetf(std::ios::fixed);
        os << std::setprecision(6);
    }
}

void emit_table_file(const ErrorTable& table, TableFormat format, const std::string& path) {
    std::ofstream os(path);
    if (!os) throw std::runtime_error("cannot open " + path);
    emit_table(table, format, os);
}

void emit_plot_data(const ErrorTable& table, const std::string& path) {
    std::ofstream os(path);
    if (!os) throw std::runtime_error("cannot open " + path);
    os << "alpha,gamma,M,N,E1,log10_N,log10_E1\n";
    for (const auto& r : table.rows) {
        if (!r.error.empty()) continue;
        os << r.alpha << "," << r.gamma << "," << r.M << "," << r.N << "," << sci(r.e1) << ","
           << std::log10(static_cast<double>(r.N)) << "," << std::log10(r.e1) << "\n";
    }
}

ExperimentConfig reproduce_config(int tableno, bool paper_scale) {
    ExperimentConfig cfg;
    cfg.coefficient_preset = "paper_section5";
    cfg.title = "table" + std::to_string(tableno);
    auto temporal = [&](ProblemKind kind, double alpha, double third_gamma) {
        cfg.kind = kind;
        cfg.alphas = {alpha};
        cfg.gammas = {1.0, 0.0, third_gamma};
        cfg.gamma_is_opt = {false, true, false};
        cfg.Ns = {4, 8, 16, 32};
        cfg.Ms = {paper_scale ? 1000 : 400};
        cfg.kernel_mode = KernelMode::Direct;
    };
    auto spatial = [&](ProblemKind kind, double alpha, double third_gamma) {
        cfg.kind = kind;
        cfg.alphas = {alpha};
        cfg.gammas = {1.0, 0.0, third_gamma};
        cfg.gamma_is_opt = {false, true, false};
        cfg.Ns = {500};
        cfg.Ms = {4, 8, 16, 32};
        cfg.kernel_mode = KernelMode::Soe;
    };
    switch (tableno) {
        case 1: temporal(ProblemKind::Subdiffusion, 0.5, 2.5 / 0.5); break;
        case 2: temporal(ProblemKind::Subdiffusion, 0.7, 2.5 / 0.7); break;
        case 3: temporal(ProblemKind::Subdiffusion, 0.9, 2.5 / 0.9); break;
        case 4: spatial(ProblemKind::Subdiffusion, 0.7, 2.5 / 0.7); break;
        case 5: temporal(ProblemKind::DiffusionWave, 1.01, 4.5 / 1.01); break;
        case 6: temporal(ProblemKind::DiffusionWave, 1.1, 4.5 / 1.1); break;
        case 7: temporal(ProblemKind::DiffusionWave, 1.5, 4.5 / 1.5); break;
        case 8: temporal(ProblemKind::DiffusionWave, 1.9, 4.5 / 1.9); break;
        case 9: spatial(ProblemKind::DiffusionWave, 1.5, 4.5 / 1.5); break;
        default: throw std::invalid_argument("reproduce_config: table must be 1..9");
    }
    return cfg;
}

ExperimentConfig ExperimentConfig::from_json_text(const std::string& text) {
    nlohmann::json j = nlohmann::json::parse(text);
    ExperimentConfig cfg;
    if (j.contains("problem")) {
        const std::string k = j["problem"];
        if (k == "subdiffusion")
            cfg.kind = ProblemKind::Subdiffusion;
        else if (k == "diffusionwave")
            cfg.kind = ProblemKind::DiffusionWave;
        else
            throw std::invalid_argument("config: problem must be subdiffusion|diffusionwave");
    }
    if (j.contains("coefficients")) cfg.coefficient_preset = j["coefficients"];
    if (j.contains("alphas")) cfg.alphas = j["alphas"].get<std::vector<double>>();
    if (j.contains("gammas")) {
        cfg.gammas.clear();
        cfg.gamma_is_opt.clear();
        for (const auto& g : j["gammas"]) {
            if (g.is_string() && g.get<std::string>() == "opt") {
                cfg.gammas.push_back(0.0);
                cfg.gamma_is_opt.push_back(true);
            } else {
                cfg.gammas.push_back(g.get<double>());
                cfg.gamma_is_opt.push_back(false);
            }
        }
    }
    if (j.contains("N")) cfg.Ns = j["N"].get<std::vector<int>>();
    if (j.contains("M")) cfg.Ms = j["M"].get<std::vector<int>>();
    if (j.contains("kernel"))
        cfg.kernel_mode = j["kernel"] == "soe" ? KernelMode::Soe : KernelMode::Direct;
    if (j.contains("h1_norm")) cfg.h1_mode = j["h1_norm"] == "semi" ? H1Mode::Semi : H1Mode::Full;
    if (j.contains("solver")) {
        const auto& s = j["solver"];
        if (s.contains("mode")) {
            const std::string m = s["mode"];
            cfg.solver.mode = m == "direct"      ? SolverOptions::Mode::Direct
                              : m == "iterative" ? SolverOptions::Mode::Iterative
                                                 : SolverOptions::Mode::Auto;
        }
        if (s.contains("rel_tol")) cfg.solver.rel_tol = s["rel_tol"];
        if (s.contains("max_iter")) cfg.solver.max_iter = s["max_iter"];
    }
    if (j.contains("out_dir")) cfg.out_dir = j["out_dir"];
    if (j.contains("title")) cfg.title = j["title"];
    if (cfg.alphas.empty() || cfg.gammas.empty() || cfg.Ns.empty() || cfg.Ms.empty())
        throw std::invalid_argument("config: alphas/gammas/N/M must be non-empty");
    return cfg;
}

ExperimentConfig ExperimentConfig::from_json_file(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw std::runtime_error("cannot open config " + path);
    std::stringstream ss;
    ss << is.rdbuf();
    return from_json_text(ss.str());
}

}  // namespace fracstep
