#pragma once

#include <span>
#include <vector>

#include <Eigen/Dense>

#include "fracstep/timegrid.hpp"

namespace fracstep {

/// omega_mu(t) = t^{mu-1} / Gamma(mu), the weakly singular convolution weight.
double omega_weight(double mu, double t);

// One row of convolution coefficients of the offset-point (L2-1sigma type)
// discrete Caputo derivative on a general mesh:
//   (D_tau^beta g)^{n-theta} = sum_{k=1}^n coeffs[n-k] * (g^k - g^{k-1}),
// with coeffs[j] = A^{(n)}_j, j = 0 (newest cell) .. n-1 (oldest).
struct KernelRow {
    int n = 0;
    double beta = 0.0;
    std::vector<double> coeffs;

    double a0() const { return coeffs.front(); }

    /// Positivity and monotonicity A_0 >= A_1 >= ... > 0.
    bool monotone() const;
};

// Interpolation-weight integrals behind the kernel row; exposed so tests can
// compare the closed forms against numerical quadrature of the definitions.
//   a_{n-k}^{(n)} = (1/tau_k) int_{t_{k-1}}^{min(t_k, t_{n-theta})} omega_{1-beta}(t_{n-theta} - s) ds
//   b_{n-k}^{(n)} = 2/(tau_k(tau_k+tau_{k+1})) int_{t_{k-1}}^{t_k} omega_{1-beta}(t_{n-theta} - s)(s - t_{k-1/2}) ds
double kernel_a(const TimeMesh& mesh, double beta, int n, int k);
double kernel_b(const TimeMesh& mesh, double beta, int n, int k);

/// Row n of the convolution kernels. Requires mesh.theta() == beta/2.
KernelRow alikhanov_row(const TimeMesh& mesh, double beta, int n);

// Lazily computed, cached rows 1..N for a fixed (mesh, beta). Rows are
// immutable once computed; the cache itself is not thread-safe.
class KernelTable {
public:
    KernelTable(const TimeMesh& mesh, double beta);

    const KernelRow& row(int n);
    const TimeMesh& mesh() const { return *mesh_; }
    double beta() const { return beta_; }

private:
    const TimeMesh* mesh_;
    double beta_;
    std::vector<KernelRow> rows_;  // rows_[n-1], empty coeffs until computed
};

/// sum_{k=1}^n A^{(n)}_{n-k} (g^k - g^{k-1}); history holds g^0..g^n.
double discrete_caputo(const KernelRow& row, std::span<const double> history);

// Complementary convolution kernels P^{(n)}_{n-j}, defined by the discrete
// orthogonality sum_{j=k}^n P^{(n)}_{n-j} A^{(j)}_{j-k} = 1 for 1 <= k <= n
// and computed by backward substitution.
struct ComplementaryRow {
    int n = 0;
    std::vector<double> coeffs;  // coeffs[n-j] = P^{(n)}_{n-j}
};

ComplementaryRow complementary_row(KernelTable& table, int n);

// Quadratic-form lower bound satisfied by the kernels: with diagonal positive
// weights Q^{(k)} that are entrywise non-increasing in k,
//   (z^{n-theta})^T Q^{(n)} (D_tau^beta z)^{n-theta}
//     >= 1/2 sum_{k=1}^n A^{(n)}_{n-k} [ (z^k)^T Q^{(k)} z^k - (z^{k-1})^T Q^{(k-1)} z^{k-1} ].
// Returns both sides; holds() allows a tiny floating-point slack.
struct QuadraticFormCheck {
    double lhs = 0.0;
    double rhs = 0.0;
    bool holds(double slack = 1e-12) const {
        const double scale = std::max({std::abs(lhs), std::abs(rhs), 1e-300});
        return lhs - rhs >= -slack * scale;
    }
};

// Preconditions (diagonal positivity, monotone Q, step-ratio bound 7/4) are
// violations of the caller contract and throw; a false result from holds()
// means the inequality itself failed.
QuadraticFormCheck check_quadratic_form_inequality(KernelTable& table, int n,
                                                   const std::vector<Eigen::VectorXd>& q_diag,
                                                   const std::vector<Eigen::VectorXd>& z);

}  // namespace fracstep
