#pragma once

#include <iosfwd>
#include <string>

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include "fracstep/coefficients.hpp"

namespace fracstep {

using SpMat = Eigen::SparseMatrix<double>;
using Vector = Eigen::VectorXd;

// Uniform tensor grid on (xl,xr) x (yl,yr) with homogeneous Dirichlet
// boundary eliminated: unknowns live at the (Mx-1)(My-1) interior nodes,
// ordered x-fastest: index = (j-1)*(Mx-1) + (i-1).
struct Grid2D {
    int Mx = 2, My = 2;
    Domain dom;
    double hx = 0.0, hy = 0.0;

    Grid2D() = default;
    Grid2D(int mx, int my, const Domain& d);

    int interior() const { return (Mx - 1) * (My - 1); }
    double x(int i) const { return dom.xl + hx * i; }
    double y(int j) const { return dom.yl + hy * j; }
    int index(int i, int j) const { return (j - 1) * (Mx - 1) + (i - 1); }

    /// Interior samples of a scalar field at time t, in grid ordering.
    Vector sample(const ScalarField& f, double t) const;
};

// Spatial operators frozen at one offset time t_{n-theta}:
//   A_stiff  = (I (x) Sx)^T P1 (I (x) Sx) + (Sy (x) I)^T P2 (Sy (x) I)   (SPD part)
//   B_adv    = P3 [I (x) (Shat_x - Shat_x^T)] + P4 [(Shat_y - Shat_y^T) (x) I]
//   C_reac   = diag(b3)
// The discrete elliptic operator acts as M = -P^{-1} A_stiff + B_adv + C_reac.
struct OperatorSet {
    double t_offset = 0.0;
    const Grid2D* grid = nullptr;
    Vector pdiag;              // p at interior nodes
    Vector p1_face, p2_face;   // p1 at (x_{i+1/2}, y_j), p2 at (x_i, y_{j+1/2})
    Vector p3, p4, b3;         // interior nodes
    SpMat A_stiff;
    SpMat B_adv;

    /// M u = (-P^{-1} A_stiff + B_adv + C_reac) u.
    Vector apply_elliptic(const Vector& u) const;
    /// Explicit sparse M (5-point pattern).
    SpMat elliptic_matrix() const;
};

/// Evaluates all weights at t_offset and assembles the matrices.
/// Throws NonPositiveWeight if p, p1 or p2 is not positive at a sample.
OperatorSet assemble_operators(const Grid2D& grid, const AuxFields& aux,
                               const CoefficientSet& coeffs, double t_offset);

Vector apply_discrete_elliptic(const OperatorSet& ops, const Vector& u);

// Difference factors; exposed for the factored-form assembly used in tests
// and for the seminorm identities. Sx is Mx x (Mx-1), Shat_x is
// (Mx-1) x (Mx-1), as acted on one grid line.
SpMat make_Sx(const Grid2D& grid);
SpMat make_Sy(const Grid2D& grid);
SpMat make_Shat_x(const Grid2D& grid);
SpMat make_Shat_y(const Grid2D& grid);

// Discrete inner product and norms over interior grid functions with an
// implicit zero boundary: <u,v> = hx hy sum u v; the seminorm sums forward
// differences over all faces including the boundary-adjacent ones.
double inner(const Grid2D& grid, const Vector& u, const Vector& v);
double l2_norm(const Grid2D& grid, const Vector& u);
double h1_semi(const Grid2D& grid, const Vector& u);
double h1_norm(const Grid2D& grid, const Vector& u);

enum class H1Mode { Full, Semi };
double error_norm(const Grid2D& grid, const Vector& u, H1Mode mode);

struct SolverOptions {
    enum class Mode { Auto, Direct, Iterative };
    Mode mode = Mode::Auto;
    double rel_tol = 1e-12;
    int max_iter = 2000;
    int direct_threshold = 40000;  // Auto: direct factorization up to this many unknowns
    // Iterative runs keep the incomplete factorization across steps and
    // refresh it only when the iteration count degrades.
    bool reuse_preconditioner = true;
    int refresh_iters = 120;
    double ilut_droptol = 1e-5;
    int ilut_fill = 12;
};

/// One-shot sparse solve. Throws SolverBreakdown on failure.
Vector solve_sparse(const SpMat& A, const Vector& rhs, const SolverOptions& opts = {});

// Persistent solver for time stepping: the matrix changes every step but
// keeps its pattern, so the iterative path can reuse the preconditioner.
class LinearSolver {
public:
    explicit LinearSolver(const SolverOptions& opts) : opts_(opts) {}

    /// `guess` warm-starts the Krylov iteration (ignored by the direct path).
    Vector solve(const SpMat& A, const Vector& rhs, const Vector* guess = nullptr);

    int last_iterations() const { return last_iters_; }
    double last_residual() const { return last_residual_; }
    long total_iterations() const { return total_iters_; }
    int preconditioner_builds() const { return precond_builds_; }

private:
    Vector solve_iterative(const SpMat& A, const Vector& rhs, const Vector* guess);

    SolverOptions opts_;
    Eigen::IncompleteLUT<double> ilut_;
    bool precond_ready_ = false;
    int last_iters_ = 0;
    double last_residual_ = 0.0;
    long total_iters_ = 0;
    int precond_builds_ = 0;
};

/// Coordinate-format text export of a sparse matrix.
void write_matrix_market(const SpMat& A, std::ostream& os);
void write_matrix_market(const SpMat& A, const std::string& path);

}  // namespace fracstep
