#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "fracstep/steppers.hpp"

namespace fracstep {

// Benchmark problems on (0,1)^2 with exact solution
//   u = sin(pi x) sin(pi y) (1 + t + t^alpha)
// and the time-space dependent coefficient preset; the source term is chosen
// so the exact solution satisfies the equation identically.
ProblemSpec manufactured_subdiffusion(double alpha);
ProblemSpec manufactured_diffwave(double alpha);

/// Grading exponent at which the schemes recover full second order in time:
/// 2/sigma1 for sub-diffusion, 4/alpha for diffusion-wave.
double gamma_opt(const ProblemSpec& problem);

/// min{2, gamma*sigma1} or min{2, gamma*sigma2, gamma*sigma3}.
double expected_order(const ProblemSpec& problem, double gamma);

struct ErrorRow {
    double alpha = 0.0;
    double gamma = 0.0;
    int N = 0;
    int M = 0;
    double e1 = 0.0;
    std::optional<double> order_tau;
    std::optional<double> order_h;
    double expected = 0.0;
    double seconds = 0.0;
    long solver_iterations = 0;
    std::string kernel_mode;
    std::string error;  // non-empty if this cell failed
};

struct ErrorTable {
    std::string title;
    std::vector<ErrorRow> rows;
    std::string kernel_mode;
    double solver_tol = 0.0;
    std::string h1_mode;
};

struct ExperimentConfig {
    ProblemKind kind = ProblemKind::Subdiffusion;
    std::string coefficient_preset = "paper_section5";
    std::vector<double> alphas{0.5};
    std::vector<double> gammas{1.0};     // empty entries resolved via gamma_opt
    std::vector<bool> gamma_is_opt;      // parallel to gammas
    std::vector<int> Ns{8, 16, 32};
    std::vector<int> Ms{400};
    KernelMode kernel_mode = KernelMode::Direct;
    SolverOptions solver;
    // the benchmark's H1 error is the gradient seminorm; see measure_e1
    H1Mode h1_mode = H1Mode::Semi;
    double T = 1.0;
    std::string out_dir = ".";
    std::string title = "study";
    bool emit_snapshots = false;

    static ExperimentConfig from_json_file(const std::string& path);
    static ExperimentConfig from_json_text(const std::string& text);
};

/// Max-over-time discrete H1 error of a solved history against problem.exact.
double measure_e1(const SolutionHistory& history, const ProblemSpec& problem, H1Mode mode);

/// Runs every (alpha, gamma, N, M) cell; failures are recorded per row.
ErrorTable run_convergence_study(const ExperimentConfig& config);

enum class TableFormat { Csv, Markdown };
void emit_table(const ErrorTable& table, TableFormat format, std::ostream& os);
void emit_table_file(const ErrorTable& table, TableFormat format, const std::string& path);
/// log-log columns (N vs E1) for external plotting.
void emit_plot_data(const ErrorTable& table, const std::string& path);

// Built-in reproduction presets for the nine benchmark tables: 1-3 temporal
// sub-diffusion (alpha = 0.5, 0.7, 0.9), 4 spatial sub-diffusion, 5-8 temporal
// diffusion-wave (alpha = 1.01, 1.1, 1.5, 1.9), 9 spatial diffusion-wave.
// Desk scale replaces M = 1000 by M = 400 in the temporal studies.
ExperimentConfig reproduce_config(int table, bool paper_scale);

}  // namespace fracstep
