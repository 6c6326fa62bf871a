#include "fracstep/kernels.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace fracstep {

double omega_weight(double mu, double t) {
    if (!(t > 0.0)) throw std::domain_error("omega_weight: t must be positive");
    if (!(mu > 0.0)) throw std::domain_error("omega_weight: mu must be positive");
    return std::pow(t, mu - 1.0) / std::tgamma(mu);
}

namespace {

// X^p - Y^p with X = Y + tau, evaluated without cancellation for tau << Y.
double pow_diff(double Y, double tau, double p) {
    if (Y <= 0.0) return std::pow(tau, p);
    return std::pow(Y, p) * std::expm1(p * std::log1p(tau / Y));
}

void check_theta(const TimeMesh& mesh, double beta) {
    if (std::abs(mesh.theta() - beta / 2.0) > 1e-12)
        throw std::invalid_argument("kernels: mesh offset theta must equal beta/2 (got theta=" +
                                    std::to_string(mesh.theta()) + ", beta=" + std::to_string(beta) + ")");
}

}  // namespace

double kernel_a(const TimeMesh& mesh, double beta, int n, int k) {
    const double toff = mesh.t_offset(n);
    const double tau_k = mesh.tau(k);
    const double Y = toff - std::min(mesh.t(k), toff);
    // int omega_{1-beta}(toff - s) ds over the cell = (X^{1-beta} - Y^{1-beta}) / Gamma(2-beta)
    const double X_minus_Y = std::min(mesh.t(k), toff) - mesh.t(k - 1);
    return pow_diff(Y, X_minus_Y, 1.0 - beta) / (tau_k * std::tgamma(2.0 - beta));
}

double kernel_b(const TimeMesh& mesh, double beta, int n, int k) {
    // 2/(tau_k(tau_k+tau_{k+1})) * int omega_{1-beta}(toff-s)(s - t_{k-1/2}) ds
    //   = 2 tau_k Y^{1-beta} F(r) / (tau_k(tau_k+tau_{k+1})),  r = tau_k / Y,
    // F(r) = [ ((1+r)^{2-beta}-1)/(r Gamma(3-beta)) - ((1+r)^{1-beta}+1)/(2 Gamma(2-beta)) ]
    //      = (1/Gamma(2-beta)) sum_{m>=2} C(1-beta, m) (1/(m+1) - 1/2) r^m,
    // where the series form avoids the O(r^2) cancellation of the direct one.
    const double toff = mesh.t_offset(n);
    const double tau_k = mesh.tau(k);
    const double tau_k1 = mesh.tau(k + 1);
    const double Y = toff - mesh.t(k);
    const double r = tau_k / Y;
    const double g2 = std::tgamma(2.0 - beta);

    double integral;  // int omega_{1-beta}(toff-s)(s - t_{k-1/2}) ds over the cell
    if (r <= 0.5) {
        // C(1-beta, m) by the running product; terms decay at least geometrically.
        double binom = (1.0 - beta) * (-beta) / 2.0;  // m = 2
        double rm = r * r;
        double F = 0.0;
        for (int m = 2; m < 200; ++m) {
            const double term = binom * rm * (1.0 / (m + 1.0) - 0.5);
            F += term;
            if (std::abs(term) < 1e-17 * std::abs(F) + 1e-300) break;
            binom *= (1.0 - beta - m) / (m + 1.0);
            rm *= r;
        }
        integral = tau_k * std::pow(Y, 1.0 - beta) * F / g2;
    } else {
        const double X = Y + tau_k;
        const double g3 = std::tgamma(3.0 - beta);
        integral = (std::pow(X, 2.0 - beta) - std::pow(Y, 2.0 - beta)) / g3 -
                   0.5 * tau_k * (std::pow(X, 1.0 - beta) + std::pow(Y, 1.0 - beta)) / g2;
    }
    return 2.0 * integral / (tau_k * (tau_k + tau_k1));
}

bool KernelRow::monotone() const {
    if (coeffs.empty() || !(coeffs.back() > 0.0)) return false;
    for (size_t j = 0; j + 1 < coeffs.size(); ++j)
        if (coeffs[j] < coeffs[j + 1]) return false;
    return true;
}

KernelRow alikhanov_row(const TimeMesh& mesh, double beta, int n) {
    if (!(beta > 0.0 && beta < 1.0)) throw std::invalid_argument("alikhanov_row: beta must lie in (0,1)");
    if (n < 1 || n > mesh.levels()) throw std::invalid_argument("alikhanov_row: n out of range");
    check_theta(mesh, beta);

    KernelRow row;
    row.n = n;
    row.beta = beta;
    row.coeffs.resize(static_cast<size_t>(n));

    if (n == 1) {
        row.coeffs[0] = kernel_a(mesh, beta, 1, 1);
        return row;
    }
    // k = n
    row.coeffs[0] = kernel_a(mesh, beta, n, n) + mesh.rho(n - 1) * kernel_b(mesh, beta, n, n - 1);
    // 2 <= k <= n-1
    for (int k = 2; k <= n - 1; ++k)
        row.coeffs[static_cast<size_t>(n - k)] = kernel_a(mesh, beta, n, k) +
                                                 mesh.rho(k - 1) * kernel_b(mesh, beta, n, k - 1) -
                                                 kernel_b(mesh, beta, n, k);
    // k = 1
    row.coeffs[static_cast<size_t>(n - 1)] = kernel_a(mesh, beta, n, 1) - kernel_b(mesh, beta, n, 1);
    return row;
}

KernelTable::KernelTable(const TimeMesh& mesh, double beta) : mesh_(&mesh), beta_(beta) {
    check_theta(mesh, beta);
    rows_.resize(static_cast<size_t>(mesh.levels()));
}

const KernelRow& KernelTable::row(int n) {
    if (n < 1 || n > mesh_->levels()) throw std::invalid_argument("KernelTable::row: n out of range");
    KernelRow& r = rows_[static_cast<size_t>(n - 1)];
    if (r.coeffs.empty()) r = alikhanov_row(*mesh_, beta_, n);
    return r;
}

double discrete_caputo(const KernelRow& row, std::span<const double> history) {
    const int n = row.n;
    if (static_cast<int>(history.size()) != n + 1)
        throw std::invalid_argument("discrete_caputo: history must hold g^0..g^n (" +
                                    std::to_string(n + 1) + " values, got " +
                                    std::to_string(history.size()) + ")");
    double acc = 0.0;
    for (int k = 1; k <= n; ++k)
        acc += row.coeffs[static_cast<size_t>(n - k)] *
               (history[static_cast<size_t>(k)] - history[static_cast<size_t>(k - 1)]);
    return acc;
}

ComplementaryRow complementary_row(KernelTable& table, int n) {
    ComplementaryRow out;
    out.n = n;
    out.coeffs.assign(static_cast<size_t>(n), 0.0);
    out.coeffs[0] = 1.0 / table.row(n).a0();
    for (int k = n - 1; k >= 1; --k) {
        double s = 1.0;
        for (int j = k + 1; j <= n; ++j)
            s -= out.coeffs[static_cast<size_t>(n - j)] * table.row(j).coeffs[static_cast<size_t>(j - k)];
        out.coeffs[static_cast<size_t>(n - k)] = s / table.row(k).a0();
    }
    return out;
}

QuadraticFormCheck check_quadratic_form_inequality(KernelTable& table, int n,
                                                   const std::vector<Eigen::VectorXd>& q_diag,
                                                   const std::vector<Eigen::VectorXd>& z) {
    if (n < 1 || n > table.mesh().levels())
        throw std::invalid_argument("check_quadratic_form_inequality: n out of range");
    if (static_cast<int>(q_diag.size()) < n + 1 || static_cast<int>(z.size()) < n + 1)
        throw std::invalid_argument("check_quadratic_form_inequality: need Q^0..Q^n and z^0..z^n");
    if (!table.mesh().ratio_bound_ok())
        throw std::invalid_argument("check_quadratic_form_inequality: step ratio bound 7/4 violated");
    const Eigen::Index m = z[0].size();
    for (int k = 0; k <= n; ++k) {
        if (q_diag[static_cast<size_t>(k)].size() != m || z[static_cast<size_t>(k)].size() != m)
            throw std::invalid_argument("check_quadratic_form_inequality: inconsistent dimensions");
        if ((q_diag[static_cast<size_t>(k)].array() <= 0.0).any())
            throw std::invalid_argument("check_quadratic_form_inequality: Q must be positive");
        if (k > 0 && (q_diag[static_cast<size_t>(k)].array() > q_diag[static_cast<size_t>(k - 1)].array()).any())
            throw std::invalid_argument("check_quadratic_form_inequality: Q must be entrywise non-increasing");
    }

    const KernelRow& row = table.row(n);
    const double theta = table.mesh().theta();

    Eigen::VectorXd caputo = Eigen::VectorXd::Zero(m);
    for (int k = 1; k <= n; ++k)
        caputo += row.coeffs[static_cast<size_t>(n - k)] *
                  (z[static_cast<size_t>(k)] - z[static_cast<size_t>(k - 1)]);
    const Eigen::VectorXd z_off = (1.0 - theta) * z[static_cast<size_t>(n)] + theta * z[static_cast<size_t>(n - 1)];

    QuadraticFormCheck chk;
    chk.lhs = z_off.dot(q_diag[static_cast<size_t>(n)].cwiseProduct(caputo));
    auto quad = [&](int k) {
        return z[static_cast<size_t>(k)].dot(
            q_diag[static_cast<size_t>(k)].cwiseProduct(z[static_cast<size_t>(k)]));
    };
    double rhs = 0.0;
    for (int k = 1; k <= n; ++k)
        rhs += row.coeffs[static_cast<size_t>(n - k)] * (quad(k) - quad(k - 1));
    chk.rhs = 0.5 * rhs;
    return chk;
}

}  // namespace fracstep
