#pragma once

#include <vector>

#include <Eigen/Dense>

#include "fracstep/kernels.hpp"
#include "fracstep/timegrid.hpp"

namespace fracstep {

// Exponential-sum approximation t^{-beta} ~= sum_i w_i exp(-s_i t), valid to
// relative accuracy epsilon on [delta_t, horizon]. Built from the integral
// representation t^{-beta} = (1/Gamma(beta)) int_0^inf e^{-st} s^{beta-1} ds
// via Gauss-Jacobi quadrature on the singular head interval and Gauss-Legendre
// panels in log s, then pruned and validated by dense sampling.
struct SoeApprox {
    double beta = 0.0;
    double epsilon = 0.0;
    double delta_t = 0.0;
    double horizon = 0.0;
    std::vector<double> nodes;    // decay rates s_i > 0
    std::vector<double> weights;  // w_i > 0

    int terms() const { return static_cast<int>(nodes.size()); }
    double eval(double t) const;
    /// max over a dense log-spaced sample of |eval(t) - t^{-beta}| * t^beta.
    double max_relative_error(int samples = 2000) const;
};

/// Throws ConvergenceFailure if epsilon cannot be met within the refinement cap.
SoeApprox soe_build(double beta, double epsilon, double delta_t, double T);

// Incremental evaluator of the discrete Caputo derivative with exponential-sum
// history compression. Cells n and n-1 keep the exact kernel integrals; cells
// 1..n-2 are folded into per-exponential accumulators updated in O(terms) work
// per step, so a full sweep costs O(N * terms) instead of O(N^2).
//
// Usage (vectors of fixed dimension m): set_initial(g^0), then per level
// n = 1..N, in order:
//   value at n = newest_coeff(n) * (g^n - g^{n-1}) + history_part(n)
//   push(n, g^n) once g^n is known (updates the accumulators for level n+1).
class FastCaputo {
public:
    FastCaputo(const TimeMesh& mesh, double beta, const SoeApprox& soe, Eigen::Index dim);

    void set_initial(const Eigen::VectorXd& g0);

    /// Coefficient multiplying (g^n - g^{n-1}); equals the direct A^{(n)}_0.
    double newest_coeff(int n) const;

    /// All terms of (D_tau^beta g)^{n-theta} not involving g^n.
    Eigen::VectorXd history_part(int n) const;

    /// Full value at level n given g^n (callable before push(n)).
    Eigen::VectorXd value(int n, const Eigen::VectorXd& g_n) const;

    /// Record the solved level n and advance the accumulators for level n+1.
    void push(int n, const Eigen::VectorXd& g_n);

private:
    const TimeMesh* mesh_;
    double beta_;
    const SoeApprox* soe_;
    Eigen::Index dim_;
    int level_ = -1;              // last pushed level, -1 before set_initial
    Eigen::MatrixXd acc_;         // dim x terms, history accumulators
    Eigen::VectorXd g_prev2_;     // g^{n-2} after push(n)... g^{level-1}
    Eigen::VectorXd g_prev_;      // g^{level}
    Eigen::VectorXd scaled_w_;    // w_i / Gamma(1-beta)
};

}  // namespace fracstep
