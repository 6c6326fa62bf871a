#pragma once

#include <optional>
#include <string>
#include <vector>

#include "fracstep/coefficients.hpp"
#include "fracstep/spatial.hpp"
#include "fracstep/timegrid.hpp"

namespace fracstep {

enum class ProblemKind { Subdiffusion, DiffusionWave };
enum class KernelMode { Direct, Soe };

// One initial-boundary value problem
//   D_t^alpha u = A u + f   on (xl,xr) x (yl,yr) x (0,T],  u = 0 on the boundary,
// with u(.,0) = phi, plus u_t(.,0) = psi when alpha in (1,2).
struct ProblemSpec {
    ProblemKind kind = ProblemKind::Subdiffusion;
    double alpha = 0.5;
    CoefficientSet coeffs;
    Domain dom;
    double T = 1.0;
    ScalarField f;
    ScalarField phi;
    ScalarField psi;                     // diffusion-wave only
    // analytic (A psi)(x,y,t) when available; the initial-slope forcing then
    // uses t * A(psi) exactly instead of the discrete operator on psi
    std::optional<ScalarField> psi_elliptic;
    std::optional<ScalarField> exact;    // for error measurement

    // regularity exponents near t = 0, when known (drive the expected orders)
    std::optional<double> sigma1, sigma2, sigma3;

    /// Order of the single-level fractional derivative the scheme discretizes.
    double beta() const { return kind == ProblemKind::Subdiffusion ? alpha : alpha / 2.0; }
    double theta() const { return beta() / 2.0; }
    void validate() const;
};

struct StepStats {
    long total_solver_iterations = 0;
    int preconditioner_builds = 0;
    int soe_terms = 0;
    double assemble_seconds = 0.0;
    double solve_seconds = 0.0;
};

struct SolutionHistory {
    std::vector<Vector> u_levels;  // u^0..u^N
    std::vector<Vector> v_levels;  // diffusion-wave only, v^0 = 0
    const TimeMesh* mesh = nullptr;
    const Grid2D* grid = nullptr;
    KernelMode kernel_mode = KernelMode::Direct;
    StepStats stats;

    const Vector& u(int n) const { return u_levels[static_cast<size_t>(n)]; }
    const Vector& v(int n) const { return v_levels[static_cast<size_t>(n)]; }
};

SolutionHistory subdiffusion_solve(const ProblemSpec& problem, const TimeMesh& mesh,
                                   const Grid2D& grid, const SolverOptions& solver_opts = {},
                                   KernelMode kernel_mode = KernelMode::Direct);

SolutionHistory diffwave_solve(const ProblemSpec& problem, const TimeMesh& mesh,
                               const Grid2D& grid, const SolverOptions& solver_opts = {},
                               KernelMode kernel_mode = KernelMode::Direct);

/// Dispatch on problem.kind.
SolutionHistory solve(const ProblemSpec& problem, const TimeMesh& mesh, const Grid2D& grid,
                      const SolverOptions& solver_opts = {},
                      KernelMode kernel_mode = KernelMode::Direct);

// Discrete residual norms of the scheme equations re-evaluated at level n
// from the stored history (independent of the solver path).
struct StepResiduals {
    double primary = 0.0;    // momentum / flux equation
    double coupling = 0.0;   // v = D_tau^beta u-tilde (diffusion-wave only)
};

StepResiduals step_residual_check(const SolutionHistory& history, const ProblemSpec& problem, int n);

/// Interior-grid snapshot of level n: text ("%d %d %d %.17g" header, then
/// row-major values) or raw binary (int32 Mx, My, n; float64 t_n; values).
void write_snapshot(const SolutionHistory& history, int n, const std::string& path, bool binary);

}  // namespace fracstep
