#include "fracstep/spatial.hpp"

#include <cmath>
#include <fstream>
#include <ostream>
#include <stdexcept>
#include <vector>

#include <Eigen/SparseLU>

#include "fracstep/errors.hpp"

namespace fracstep {

Grid2D::Grid2D(int mx, int my, const Domain& d) : Mx(mx), My(my), dom(d) {
    if (Mx < 2 || My < 2) throw std::invalid_argument("Grid2D: Mx, My must be >= 2");
    if (!(dom.width() > 0.0) || !(dom.height() > 0.0))
        throw std::invalid_argument("Grid2D: empty domain");
    hx = dom.width() / Mx;
    hy = dom.height() / My;
}

Vector Grid2D::sample(const ScalarField& f, double t) const {
    Vector v(interior());
    for (int j = 1; j <= My - 1; ++j)
        for (int i = 1; i <= Mx - 1; ++i) v[index(i, j)] = f(x(i), y(j), t);
    return v;
}

OperatorSet assemble_operators(const Grid2D& grid, const AuxFields& aux,
                               const CoefficientSet& coeffs, double t_offset) {
    OperatorSet ops;
    ops.t_offset = t_offset;
    ops.grid = &grid;
    const int nx = grid.Mx - 1, ny = grid.My - 1;
    const int m = grid.interior();

    auto check_positive = [&](double v, const char* what, double x, double y) {
        if (!(v > 0.0)) throw NonPositiveWeight(std::string(what) + " non-positive", x, y, t_offset, v);
    };

    ops.pdiag.resize(m);
    ops.p3.resize(m);
    ops.p4.resize(m);
    ops.b3.resize(m);
    for (int j = 1; j <= ny; ++j)
        for (int i = 1; i <= nx; ++i) {
            const double x = grid.x(i), y = grid.y(j);
            const int id = grid.index(i, j);
            ops.pdiag[id] = aux.p(x, y, t_offset);
            check_positive(ops.pdiag[id], "p", x, y);
            ops.p3[id] = aux.p3(x, y, t_offset);
            ops.p4[id] = aux.p4(x, y, t_offset);
            ops.b3[id] = coeffs.b3(x, y, t_offset);
        }

    // face weights: p1 at (x_{i-1/2}, y_j) for i=1..Mx, p2 at (x_i, y_{j-1/2}) for j=1..My
    ops.p1_face.resize(grid.Mx * ny);
    for (int j = 1; j <= ny; ++j)
        for (int i = 1; i <= grid.Mx; ++i) {
            const double x = grid.dom.xl + grid.hx * (i - 0.5);
            const double v = aux.p1(x, grid.y(j), t_offset);
            check_positive(v, "p1", x, grid.y(j));
            ops.p1_face[(j - 1) * grid.Mx + (i - 1)] = v;
        }
    ops.p2_face.resize(nx * grid.My);
    for (int j = 1; j <= grid.My; ++j)
        for (int i = 1; i <= nx; ++i) {
            const double y = grid.dom.yl + grid.hy * (j - 0.5);
            const double v = aux.p2(grid.x(i), y, t_offset);
            check_positive(v, "p2", grid.x(i), y);
            ops.p2_face[(j - 1) * nx + (i - 1)] = v;
        }

    // A_stiff by its 5-point stencil (the factored Gram form gives the same
    // values; tests assemble both and compare entrywise)
    const double ihx2 = 1.0 / (grid.hx * grid.hx), ihy2 = 1.0 / (grid.hy * grid.hy);
    std::vector<Eigen::Triplet<double>> ta, tb;
    ta.reserve(static_cast<size_t>(5 * m));
    tb.reserve(static_cast<size_t>(4 * m));
    for (int j = 1; j <= ny; ++j)
        for (int i = 1; i <= nx; ++i) {
            const int id = grid.index(i, j);
            const double pw = ops.p1_face[(j - 1) * grid.Mx + (i - 1)];  // x_{i-1/2}
            const double pe = ops.p1_face[(j - 1) * grid.Mx + i];        // x_{i+1/2}
            const double ps = ops.p2_face[(j - 1) * nx + (i - 1)];       // y_{j-1/2}
            const double pn = ops.p2_face[j * nx + (i - 1)];             // y_{j+1/2}
            ta.emplace_back(id, id, (pw + pe) * ihx2 + (ps + pn) * ihy2);
            if (i > 1) ta.emplace_back(id, grid.index(i - 1, j), -pw * ihx2);
            if (i < nx) ta.emplace_back(id, grid.index(i + 1, j), -pe * ihx2);
            if (j > 1) ta.emplace_back(id, grid.index(i, j - 1), -ps * ihy2);
            if (j < ny) ta.emplace_back(id, grid.index(i, j + 1), -pn * ihy2);

            const double cx = ops.p3[id] / (2.0 * grid.hx);
            const double cy = ops.p4[id] / (2.0 * grid.hy);
            if (i < nx) tb.emplace_back(id, grid.index(i + 1, j), cx);
            if (i > 1) tb.emplace_back(id, grid.index(i - 1, j), -cx);
            if (j < ny) tb.emplace_back(id, grid.index(i, j + 1), cy);
            if (j > 1) tb.emplace_back(id, grid.index(i, j - 1), -cy);
        }
    ops.A_stiff.resize(m, m);
    ops.A_stiff.setFromTriplets(ta.begin(), ta.end());
    ops.B_adv.resize(m, m);
    ops.B_adv.setFromTriplets(tb.begin(), tb.end());
    return ops;
}

Vector OperatorSet::apply_elliptic(const Vector& u) const {
    if (u.size() != pdiag.size()) throw std::invalid_argument("apply_elliptic: length mismatch");
    Vector r = B_adv * u + b3.cwiseProduct(u);
    r -= pdiag.cwiseInverse().cwiseProduct(A_stiff * u);
    return r;
}

SpMat OperatorSet::elliptic_matrix() const {
    SpMat M = B_adv;
    const Vector pinv = pdiag.cwiseInverse();
    SpMat scaledA = pinv.asDiagonal() * A_stiff;
    M -= scaledA;
    SpMat C(pdiag.size(), pdiag.size());
    std::vector<Eigen::Triplet<double>> tc;
    tc.reserve(static_cast<size_t>(pdiag.size()));
    for (int i = 0; i < pdiag.size(); ++i) tc.emplace_back(i, i, b3[i]);
    C.setFromTriplets(tc.begin(), tc.end());
    M += C;
    M.makeCompressed();
    return M;
}

Vector apply_discrete_elliptic(const OperatorSet& ops, const Vector& u) {
    return ops.apply_elliptic(u);
}

SpMat make_Sx(const Grid2D& grid) {
    const int Mx = grid.Mx;
    SpMat S(Mx, Mx - 1);
    std::vector<Eigen::Triplet<double>> t;
    const double ih = 1.0 / grid.hx;
    for (int r = 0; r < Mx; ++r) {
        if (r < Mx - 1) t.emplace_back(r, r, -ih);
        if (r > 0) t.emplace_back(r, r - 1, ih);
    }
    S.setFromTriplets(t.begin(), t.end());
    return S;
}

SpMat make_Sy(const Grid2D& grid) {
    const int My = grid.My;
    SpMat S(My, My - 1);
    std::vector<Eigen::Triplet<double>> t;
    const double ih = 1.0 / grid.hy;
    for (int r = 0; r < My; ++r) {
        if (r < My - 1) t.emplace_back(r, r, -ih);
        if (r > 0) t.emplace_back(r, r - 1, ih);
    }
    S.setFromTriplets(t.begin(), t.end());
    return S;
}

SpMat make_Shat_x(const Grid2D& grid) {
    const int n = grid.Mx - 1;
    SpMat S(n, n);
    std::vector<Eigen::Triplet<double>> t;
    const double c = 1.0 / (2.0 * grid.hx);
    for (int r = 0; r < n; ++r) {
        t.emplace_back(r, r, -c);
        if (r + 1 < n) t.emplace_back(r, r + 1, c);
    }
    S.setFromTriplets(t.begin(), t.end());
    return S;
}

SpMat make_Shat_y(const Grid2D& grid) {
    const int n = grid.My - 1;
    SpMat S(n, n);
    std::vector<Eigen::Triplet<double>> t;
    const double c = 1.0 / (2.0 * grid.hy);
    for (int r = 0; r < n; ++r) {
        t.emplace_back(r, r, -c);
        if (r + 1 < n) t.emplace_back(r, r + 1, c);
    }
    S.setFromTriplets(t.begin(), t.end());
    return S;
}

double inner(const Grid2D& grid, const Vector& u, const Vector& v) {
    return grid.hx * grid.hy * u.dot(v);
}

double l2_norm(const Grid2D& grid, const Vector& u) { return std::sqrt(inner(grid, u, u)); }

double h1_semi(const Grid2D& grid, const Vector& u) {
    const int nx = grid.Mx - 1, ny = grid.My - 1;
    double acc = 0.0;
    auto at = [&](int i, int j) -> double {
        return (i >= 1 && i <= nx && j >= 1 && j <= ny) ? u[grid.index(i, j)] : 0.0;
    };
    for (int j = 1; j <= ny; ++j)
        for (int i = 0; i <= nx; ++i) {
            const double d = (at(i + 1, j) - at(i, j)) / grid.hx;
            acc += d * d;
        }
    for (int j = 0; j <= ny; ++j)
        for (int i = 1; i <= nx; ++i) {
            const double d = (at(i, j + 1) - at(i, j)) / grid.hy;
            acc += d * d;
        }
    return std::sqrt(grid.hx * grid.hy * acc);
}

double h1_norm(const Grid2D& grid, const Vector& u) {
    const double l2 = l2_norm(grid, u), h1 = h1_semi(grid, u);
    return std::sqrt(l2 * l2 + h1 * h1);
}

double error_norm(const Grid2D& grid, const Vector& u, H1Mode mode) {
    return mode == H1Mode::Full ? h1_norm(grid, u) : h1_semi(grid, u);
}

namespace {

Vector solve_direct(const SpMat& A, const Vector& rhs) {
    Eigen::SparseLU<SpMat> lu;
    lu.compute(A);
    if (lu.info() != Eigen::Success)
        throw SolverBreakdown("sparse LU factorization failed", 0,
                              std::numeric_limits<double>::infinity());
    Vector x = lu.solve(rhs);
    if (lu.info() != Eigen::Success)
        throw SolverBreakdown("sparse LU solve failed", 0, std::numeric_limits<double>::infinity());
    return x;
}

// Right-preconditioned BiCGSTAB; M approximates A^{-1} via ILUT solves.
template <typename Precond>
Vector bicgstab(const SpMat& A, const Vector& b, const Precond& M, double rel_tol, int max_iter,
                int& iters, double& resid, const Vector* guess = nullptr) {
    const double bnorm = b.norm();
    Vector x = guess ? *guess : Vector::Zero(b.size());
    if (bnorm == 0.0) {
        iters = 0;
        resid = 0.0;
        return Vector::Zero(b.size());
    }
    Vector r = guess ? Vector(b - A * x) : b;
    const Vector r0 = r;
    double rho = 1.0, alpha = 1.0, omega = 1.0;
    Vector v = Vector::Zero(b.size()), p = Vector::Zero(b.size());
    resid = r.norm() / bnorm;
    for (iters = 0; iters < max_iter && resid > rel_tol; ++iters) {
        const double rho1 = r0.dot(r);
        if (std::abs(rho1) < 1e-300) break;
        if (iters == 0)
            p = r;
        else {
            const double beta = (rho1 / rho) * (alpha / omega);
            p = r + beta * (p - omega * v);
        }
        rho = rho1;
        const Vector phat = M.solve(p);
        v = A * phat;
        const double r0v = r0.dot(v);
        if (std::abs(r0v) < 1e-300) break;
        alpha = rho / r0v;
        const Vector s = r - alpha * v;
        if (s.norm() / bnorm <= rel_tol) {
            x += alpha * phat;
            resid = s.norm() / bnorm;
            ++iters;
            return x;
        }
        const Vector shat = M.solve(s);
        const Vector t = A * shat;
        const double tt = t.squaredNorm();
        if (tt < 1e-300) break;
        omega = t.dot(s) / tt;
        x += alpha * phat + omega * shat;
        r = s - omega * t;
        resid = r.norm() / bnorm;
        if (std::abs(omega) < 1e-300) break;
    }
    return x;
}

}  // namespace

Vector LinearSolver::solve(const SpMat& A, const Vector& rhs, const Vector* guess) {
    const bool direct = opts_.mode == SolverOptions::Mode::Direct ||
                        (opts_.mode == SolverOptions::Mode::Auto &&
                         A.rows() <= opts_.direct_threshold);
    if (direct) {
        last_iters_ = 0;
        last_residual_ = 0.0;
        return solve_direct(A, rhs);
    }
    return solve_iterative(A, rhs, guess);
}

Vector LinearSolver::solve_iterative(const SpMat& A, const Vector& rhs, const Vector* guess) {
    if (!precond_ready_ || !opts_.reuse_preconditioner) {
        ilut_.setDroptol(opts_.ilut_droptol);
        ilut_.setFillfactor(opts_.ilut_fill);
        ilut_.compute(A);
        if (ilut_.info() != Eigen::Success)
            throw SolverBreakdown("incomplete LU setup failed", 0,
                                  std::numeric_limits<double>::infinity());
        precond_ready_ = true;
        ++precond_builds_;
    }
    int iters = 0;
    double resid = 0.0;
    Vector x = bicgstab(A, rhs, ilut_, opts_.rel_tol, opts_.max_iter, iters, resid, guess);
    if (resid > opts_.rel_tol && opts_.reuse_preconditioner && precond_builds_ > 0) {
        // stale preconditioner; rebuild once and retry
        ilut_.setDroptol(opts_.ilut_droptol);
        ilut_.setFillfactor(opts_.ilut_fill);
        ilut_.compute(A);
        ++precond_builds_;
        x = bicgstab(A, rhs, ilut_, opts_.rel_tol, opts_.max_iter, iters, resid, guess);
    }
    last_iters_ = iters;
    last_residual_ = resid;
    total_iters_ += iters;
    if (resid > opts_.rel_tol)
        throw SolverBreakdown("BiCGSTAB stalled", iters, resid);
    if (iters > opts_.refresh_iters) precond_ready_ = false;  // refresh next step
    return x;
}

Vector solve_sparse(const SpMat& A, const Vector& rhs, const SolverOptions& opts) {
    if (A.rows() != A.cols() || A.rows() != rhs.size())
        throw std::invalid_argument("solve_sparse: dimension mismatch");
    LinearSolver solver(opts);
    return solver.solve(A, rhs);
}

void write_matrix_market(const SpMat& A, std::ostream& os) {
    os << "%%MatrixMarket matrix coordinate real general\n";
    os << A.rows() << " " << A.cols() << " " << A.nonZeros() << "\n";
    for (int k = 0; k < A.outerSize(); ++k)
        for (SpMat::InnerIterator it(A, k); it; ++it)
            os << it.row() + 1 << " " << it.col() + 1 << " " << it.value() << "\n";
}

void write_matrix_market(const SpMat& A, const std::string& path) {
    std::ofstream os(path);
    if (!os) throw std::runtime_error("cannot open " + path);
    write_matrix_market(A, os);
}

}  // namespace fracstep
