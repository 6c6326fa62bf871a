#include "fracstep/steppers.hpp"

#include <chrono>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <stdexcept>

#include "fracstep/errors.hpp"
#include "fracstep/kernels.hpp"
#include "fracstep/soe.hpp"

namespace fracstep {

void ProblemSpec::validate() const {
    if (kind == ProblemKind::Subdiffusion) {
        if (!(alpha > 0.0 && alpha < 1.0))
            throw std::invalid_argument("subdiffusion requires alpha in (0,1)");
    } else {
        if (!(alpha > 1.0 && alpha < 2.0))
            throw std::invalid_argument("diffusion-wave requires alpha in (1,2)");
        if (!psi) throw std::invalid_argument("diffusion-wave requires psi");
    }
    if (!f || !phi) throw std::invalid_argument("problem requires f and phi");
    if (!(T > 0.0)) throw std::invalid_argument("problem requires T > 0");
}

namespace {

using clock_type = std::chrono::steady_clock;

double seconds_since(clock_type::time_point t0) {
    return std::chrono::duration<double>(clock_type::now() - t0).count();
}

void check_mesh(const ProblemSpec& problem, const TimeMesh& mesh) {
    problem.validate();
    if (std::abs(mesh.theta() - problem.theta()) > 1e-12)
        throw std::invalid_argument("mesh offset theta must equal beta/2 for this problem");
    if (std::abs(mesh.horizon() - problem.T) > 1e-12 * std::max(1.0, problem.T))
        throw std::invalid_argument("mesh horizon does not match the problem horizon");
}

// Direct-kernel history term sum_{k=1}^{n-1} A^{(n)}_{n-k} (g^k - g^{k-1}).
Vector history_sum(const KernelRow& row, const std::vector<Vector>& g, int n) {
    Vector h = Vector::Zero(g[0].size());
    for (int k = 1; k <= n - 1; ++k)
        h += row.coeffs[static_cast<size_t>(n - k)] * (g[static_cast<size_t>(k)] - g[static_cast<size_t>(k - 1)]);
    return h;
}

struct StepContext {
    const ProblemSpec* problem;
    const TimeMesh* mesh;
    const Grid2D* grid;
    AuxFields aux;
    LinearSolver solver;
    KernelMode mode;
    std::optional<KernelTable> table;   // direct mode
    std::optional<SoeApprox> soe;       // SOE mode
    std::optional<FastCaputo> fast;
    StepStats stats;

    StepContext(const ProblemSpec& p, const TimeMesh& m, const Grid2D& g,
                const SolverOptions& opts, KernelMode km)
        : problem(&p), mesh(&m), grid(&g), aux(build_aux(p.coeffs)), solver(opts), mode(km) {
        // with two levels or fewer there is no history to compress
        if (mode == KernelMode::Soe && m.levels() <= 2) mode = KernelMode::Direct;
        if (mode == KernelMode::Direct) {
            table.emplace(m, p.beta());
        } else {
            soe.emplace(soe_build(p.beta(), 1e-12, m.min_step(), m.horizon()));
            fast.emplace(m, p.beta(), *soe, g.interior());
            stats.soe_terms = soe->terms();
        }
    }

    double newest_coeff(int n) {
        return mode == KernelMode::Direct ? table->row(n).a0() : fast->newest_coeff(n);
    }

    /// Terms of (D_tau^beta g)^{n-theta} not involving g^n.
    Vector history(int n, const std::vector<Vector>& g) {
        return mode == KernelMode::Direct ? history_sum(table->row(n), g, n)
                                          : fast->history_part(n);
    }
};

}  // namespace

SolutionHistory subdiffusion_solve(const ProblemSpec& problem, const TimeMesh& mesh,
                                   const Grid2D& grid, const SolverOptions& solver_opts,
                                   KernelMode kernel_mode) {
    if (problem.kind != ProblemKind::Subdiffusion)
        throw std::invalid_argument("subdiffusion_solve: wrong problem kind");
    check_mesh(problem, mesh);

    const int N = mesh.levels();
    const int m = grid.interior();
    const double theta = problem.theta();

    StepContext ctx(problem, mesh, grid, solver_opts, kernel_mode);

    SolutionHistory hist;
    hist.mesh = &mesh;
    hist.grid = &grid;
    hist.kernel_mode = ctx.mode;
    hist.u_levels.reserve(static_cast<size_t>(N) + 1);
    hist.u_levels.push_back(grid.sample(problem.phi, 0.0));
    if (ctx.fast) ctx.fast->set_initial(hist.u_levels[0]);

    for (int n = 1; n <= N; ++n) {
        const double t_off = mesh.t_offset(n);
        auto t0 = clock_type::now();
        const OperatorSet ops = assemble_operators(grid, ctx.aux, problem.coeffs, t_off);
        const SpMat M = ops.elliptic_matrix();
        const double a0 = ctx.newest_coeff(n);

        SpMat K = M * (-(1.0 - theta));
        for (int i = 0; i < m; ++i) K.coeffRef(i, i) += a0;
        K.makeCompressed();

        Vector rhs = a0 * hist.u_levels.back() - ctx.history(n, hist.u_levels);
        rhs += theta * (M * hist.u_levels.back());
        rhs += grid.sample(problem.f, t_off);
        ctx.stats.assemble_seconds += seconds_since(t0);

        t0 = clock_type::now();
        Vector u;
        try {
            u = ctx.solver.solve(K, rhs, &hist.u_levels.back());
        } catch (SolverBreakdown& e) {
            throw SolverBreakdown(std::string(e.what()) + " at level " + std::to_string(n),
                                  e.iterations, e.final_residual, n);
        }
        ctx.stats.solve_seconds += seconds_since(t0);

        hist.u_levels.push_back(std::move(u));
        if (ctx.fast) ctx.fast->push(n, hist.u_levels.back());
    }
    ctx.stats.total_solver_iterations = ctx.solver.total_iterations();
    ctx.stats.preconditioner_builds = ctx.solver.preconditioner_builds();
    hist.stats = ctx.stats;
    return hist;
}

SolutionHistory diffwave_solve(const ProblemSpec& problem, const TimeMesh& mesh,
                               const Grid2D& grid, const SolverOptions& solver_opts,
                               KernelMode kernel_mode) {
    if (problem.kind != ProblemKind::DiffusionWave)
        throw std::invalid_argument("diffwave_solve: wrong problem kind");
    check_mesh(problem, mesh);

    const int N = mesh.levels();
    const int m = grid.interior();
    const double theta = problem.theta();

    StepContext ctx(problem, mesh, grid, solver_opts, kernel_mode);
    std::optional<FastCaputo> fast_v;
    if (ctx.mode == KernelMode::Soe) fast_v.emplace(mesh, problem.beta(), *ctx.soe, m);

    const Vector psi_h = grid.sample(problem.psi, 0.0);

    SolutionHistory hist;
    hist.mesh = &mesh;
    hist.grid = &grid;
    hist.kernel_mode = ctx.mode;

    // march the shifted unknown (u - t psi); recover u per level
    std::vector<Vector> ut_levels;  // u-tilde
    ut_levels.push_back(grid.sample(problem.phi, 0.0));
    hist.u_levels.push_back(ut_levels[0]);
    hist.v_levels.push_back(Vector::Zero(m));
    if (ctx.fast) ctx.fast->set_initial(ut_levels[0]);
    if (fast_v) fast_v->set_initial(hist.v_levels[0]);

    for (int n = 1; n <= N; ++n) {
        const double t_off = mesh.t_offset(n);
        auto t0 = clock_type::now();
        const OperatorSet ops = assemble_operators(grid, ctx.aux, problem.coeffs, t_off);
        const SpMat M = ops.elliptic_matrix();
        const double a0 = ctx.newest_coeff(n);
        const double lead = a0 * a0 / (1.0 - theta);

        SpMat K = M * (-(1.0 - theta));
        for (int i = 0; i < m; ++i) K.coeffRef(i, i) += lead;
        K.makeCompressed();

        const Vector hist_u = ctx.mode == KernelMode::Direct
                                  ? history_sum(ctx.table->row(n), ut_levels, n)
                                  : ctx.fast->history_part(n);
        const Vector hist_v = ctx.mode == KernelMode::Direct
                                  ? history_sum(ctx.table->row(n), hist.v_levels, n)
                                  : fast_v->history_part(n);

        const Vector& ut_prev = ut_levels.back();
        const Vector& v_prev = hist.v_levels.back();

        Vector rhs = lead * ut_prev - (a0 / (1.0 - theta)) * hist_u;
        rhs += (a0 / (1.0 - theta)) * v_prev - hist_v;
        rhs += theta * (M * ut_prev);
        rhs += grid.sample(problem.f, t_off);
        if (problem.psi_elliptic)
            rhs += t_off * grid.sample(*problem.psi_elliptic, t_off);
        else
            rhs += t_off * (M * psi_h);  // discrete action on t*psi
        ctx.stats.assemble_seconds += seconds_since(t0);

        t0 = clock_type::now();
        Vector ut;
        try {
            ut = ctx.solver.solve(K, rhs, &ut_prev);
        } catch (SolverBreakdown& e) {
            throw SolverBreakdown(std::string(e.what()) + " at level " + std::to_string(n),
                                  e.iterations, e.final_residual, n);
        }
        ctx.stats.solve_seconds += seconds_since(t0);

        // recover v^n from the coupling equation
        Vector v = (a0 * (ut - ut_prev) + hist_u - theta * v_prev) / (1.0 - theta);

        ut_levels.push_back(std::move(ut));
        hist.v_levels.push_back(std::move(v));
        hist.u_levels.push_back(ut_levels.back() + mesh.t(n) * psi_h);
        if (ctx.fast) ctx.fast->push(n, ut_levels.back());
        if (fast_v) fast_v->push(n, hist.v_levels.back());
    }
    ctx.stats.total_solver_iterations = ctx.solver.total_iterations();
    ctx.stats.preconditioner_builds = ctx.solver.preconditioner_builds();
    hist.stats = ctx.stats;
    return hist;
}

SolutionHistory solve(const ProblemSpec& problem, const TimeMesh& mesh, const Grid2D& grid,
                      const SolverOptions& solver_opts, KernelMode kernel_mode) {
    return problem.kind == ProblemKind::Subdiffusion
               ? subdiffusion_solve(problem, mesh, grid, solver_opts, kernel_mode)
               : diffwave_solve(problem, mesh, grid, solver_opts, kernel_mode);
}

StepResiduals step_residual_check(const SolutionHistory& history, const ProblemSpec& problem, int n) {
    StepResiduals res;
    if (n == 0) return res;  // initial data satisfies the scheme by definition
    const TimeMesh& mesh = *history.mesh;
    const Grid2D& grid = *history.grid;
    const double theta = problem.theta();
    const double t_off = mesh.t_offset(n);

    AuxFields aux = build_aux(problem.coeffs);
    const OperatorSet ops = assemble_operators(grid, aux, problem.coeffs, t_off);
    KernelTable table(mesh, problem.beta());
    const KernelRow& row = table.row(n);

    if (problem.kind == ProblemKind::Subdiffusion) {
        const Vector& un = history.u(n);
        const Vector& um = history.u(n - 1);
        Vector caputo = row.a0() * (un - um) + history_sum(row, history.u_levels, n);
        Vector u_off = (1.0 - theta) * un + theta * um;
        Vector r = caputo - ops.apply_elliptic(u_off) - grid.sample(problem.f, t_off);
        res.primary = l2_norm(grid, r);
        return res;
    }

    const Vector psi_h = grid.sample(problem.psi, 0.0);
    auto ut = [&](int k) { return Vector(history.u(k) - mesh.t(k) * psi_h); };
    std::vector<Vector> ut_levels;
    for (int k = 0; k <= n; ++k) ut_levels.push_back(ut(k));

    Vector caputo_v = row.a0() * (history.v(n) - history.v(n - 1)) +
                      history_sum(row, history.v_levels, n);
    Vector ut_off = (1.0 - theta) * ut_levels[static_cast<size_t>(n)] +
                    theta * ut_levels[static_cast<size_t>(n - 1)];
    Vector psi_term = problem.psi_elliptic ? Vector(t_off * grid.sample(*problem.psi_elliptic, t_off))
                                           : Vector(t_off * ops.apply_elliptic(psi_h));
    Vector r1 = caputo_v - ops.apply_elliptic(ut_off) - grid.sample(problem.f, t_off) - psi_term;
    res.primary = l2_norm(grid, r1);

    Vector caputo_u = row.a0() * (ut_levels[static_cast<size_t>(n)] - ut_levels[static_cast<size_t>(n - 1)]) +
                      history_sum(row, ut_levels, n);
    Vector v_off = (1.0 - theta) * history.v(n) + theta * history.v(n - 1);
    res.coupling = l2_norm(grid, Vector(v_off - caputo_u));
    return res;
}

void write_snapshot(const SolutionHistory& history, int n, const std::string& path, bool binary) {
    const Grid2D& grid = *history.grid;
    const Vector& u = history.u(n);
    const double tn = history.mesh->t(n);
    if (binary) {
        std::ofstream os(path, std::ios::binary);
        if (!os) throw std::runtime_error("cannot open " + path);
        const std::int32_t header[3] = {static_cast<std::int32_t>(grid.Mx),
                                        static_cast<std::int32_t>(grid.My),
                                        static_cast<std::int32_t>(n)};
        os.write(reinterpret_cast<const char*>(header), sizeof(header));
        os.write(reinterpret_cast<const char*>(&tn), sizeof(tn));
        os.write(reinterpret_cast<const char*>(u.data()),
                 static_cast<std::streamsize>(sizeof(double)) * u.size());
        return;
    }
    std::ofstream os(path);
    if (!os) throw std::runtime_error("cannot open " + path);
    os.precision(17);
    os << grid.Mx << " " << grid.My << " " << n << " " << tn << "\n";
    for (int j = 1; j <= grid.My - 1; ++j) {
        for (int i = 1; i <= grid.Mx - 1; ++i) {
            os << u[grid.index(i, j)];
            os << (i == grid.Mx - 1 ? '\n' : ' ');
        }
    }
}

}  // namespace fracstep
