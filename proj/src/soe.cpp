#include "fracstep/soe.hpp"

#include <cmath>
#include <stdexcept>

#include <Eigen/Eigenvalues>

#include "fracstep/errors.hpp"

namespace fracstep {

namespace {

// Gauss-Legendre nodes/weights on [-1,1] by Newton iteration on P_n.
void gauss_legendre(int n, std::vector<double>& x, std::vector<double>& w) {
    x.resize(static_cast<size_t>(n));
    w.resize(static_cast<size_t>(n));
    for (int i = 0; i < (n + 1) / 2; ++i) {
        double xi = std::cos(M_PI * (i + 0.75) / (n + 0.5));
        double pp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = xi;
            for (int k = 2; k <= n; ++k) {
                const double p2 = ((2.0 * k - 1.0) * xi * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            pp = n * (xi * p1 - p0) / (xi * xi - 1.0);
            const double dx = p1 / pp;
            xi -= dx;
            if (std::abs(dx) < 1e-15) break;
        }
        x[static_cast<size_t>(i)] = -xi;
        x[static_cast<size_t>(n - 1 - i)] = xi;
        const double wi = 2.0 / ((1.0 - xi * xi) * pp * pp);
        w[static_cast<size_t>(i)] = wi;
        w[static_cast<size_t>(n - 1 - i)] = wi;
    }
}

// Gauss-Jacobi rule for weight (1-x)^a (1+x)^b on [-1,1] via Golub-Welsch.
void gauss_jacobi(int n, double a, double b, std::vector<double>& x, std::vector<double>& w) {
    Eigen::VectorXd diag(n), off(std::max(0, n - 1));
    const double apb = a + b;
    diag[0] = (b - a) / (apb + 2.0);
    for (int k = 1; k < n; ++k) {
        const double d = 2.0 * k + apb;
        diag[k] = (b * b - a * a) / (d * (d + 2.0));
    }
    for (int k = 1; k < n; ++k) {
        double bk;
        if (k == 1)
            bk = 4.0 * (a + 1.0) * (b + 1.0) / ((apb + 2.0) * (apb + 2.0) * (apb + 3.0));
        else {
            const double d = 2.0 * k + apb;
            bk = 4.0 * k * (k + a) * (k + b) * (k + apb) / (d * d * (d + 1.0) * (d - 1.0));
        }
        off[k - 1] = std::sqrt(bk);
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es;
    es.computeFromTridiagonal(diag, off);
    if (es.info() != Eigen::Success)
        throw std::runtime_error("gauss_jacobi: eigen decomposition failed");
    const double mu0 = std::pow(2.0, apb + 1.0) * std::tgamma(a + 1.0) * std::tgamma(b + 1.0) /
                       std::tgamma(apb + 2.0);
    x.resize(static_cast<size_t>(n));
    w.resize(static_cast<size_t>(n));
    for (int i = 0; i < n; ++i) {
        x[static_cast<size_t>(i)] = es.eigenvalues()[i];
        const double v0 = es.eigenvectors()(0, i);
        w[static_cast<size_t>(i)] = mu0 * v0 * v0;
    }
}

SoeApprox build_once(double beta, double epsilon, double delta_t, double T, int q, double L, int njac) {
    SoeApprox soe;
    soe.beta = beta;
    soe.epsilon = epsilon;
    soe.delta_t = delta_t;
    soe.horizon = T;

    const double gbeta = std::tgamma(beta);
    const double s0 = 0.05 / T;
    // smallest x with x^{beta-1} e^{-x} / Gamma(beta) below 0.01*epsilon
    double xcut = 35.0;
    for (int it = 0; it < 5; ++it)
        xcut = -std::log(std::max(1e-300, 0.01 * epsilon * gbeta)) + (1.0 - beta) * std::log(xcut);
    const double smax = xcut / delta_t;

    // head [0, s0]: Gauss-Jacobi absorbs the s^{beta-1} endpoint singularity
    std::vector<double> xj, wj;
    gauss_jacobi(njac, 0.0, beta - 1.0, xj, wj);
    for (int i = 0; i < njac; ++i) {
        const double s = s0 * (xj[static_cast<size_t>(i)] + 1.0) / 2.0;
        soe.nodes.push_back(s);
        soe.weights.push_back(wj[static_cast<size_t>(i)] * std::pow(s0 / 2.0, beta) / gbeta);
    }
    // tail [s0, smax]: Legendre panels in y = ln s
    std::vector<double> xg, wg;
    gauss_legendre(q, xg, wg);
    const double ya = std::log(s0), yb = std::log(smax);
    const int npan = static_cast<int>(std::ceil((yb - ya) / L));
    for (int p = 0; p < npan; ++p) {
        const double lo = ya + (yb - ya) * p / npan;
        const double hi = ya + (yb - ya) * (p + 1) / npan;
        const double mid = 0.5 * (lo + hi), half = 0.5 * (hi - lo);
        for (int i = 0; i < q; ++i) {
            const double s = std::exp(mid + half * xg[static_cast<size_t>(i)]);
            soe.nodes.push_back(s);
            soe.weights.push_back(wg[static_cast<size_t>(i)] * half * std::pow(s, beta) / gbeta);
        }
    }
    // prune terms that cannot contribute anywhere on [delta_t, T]
    const double floor = epsilon * 1e-4 * std::pow(T, -beta) / static_cast<double>(soe.nodes.size());
    std::vector<double> ns, nw;
    for (size_t i = 0; i < soe.nodes.size(); ++i) {
        if (soe.weights[i] * std::exp(-soe.nodes[i] * delta_t) > floor) {
            ns.push_back(soe.nodes[i]);
            nw.push_back(soe.weights[i]);
        }
    }
    soe.nodes = std::move(ns);
    soe.weights = std::move(nw);
    return soe;
}

}  // namespace

double SoeApprox::eval(double t) const {
    double acc = 0.0;
    for (size_t i = 0; i < nodes.size(); ++i) acc += weights[i] * std::exp(-nodes[i] * t);
    return acc;
}

double SoeApprox::max_relative_error(int samples) const {
    const double la = std::log(delta_t), lb = std::log(horizon);
    double worst = 0.0;
    for (int i = 0; i < samples; ++i) {
        const double t = std::exp(la + (lb - la) * i / (samples - 1.0));
        const double exact = std::pow(t, -beta);
        worst = std::max(worst, std::abs(eval(t) - exact) / exact);
    }
    return worst;
}

SoeApprox soe_build(double beta, double epsilon, double delta_t, double T) {
    if (!(beta > 0.0 && beta < 1.0)) throw std::invalid_argument("soe_build: beta must lie in (0,1)");
    if (!(epsilon > 0.0 && epsilon < 1.0)) throw std::invalid_argument("soe_build: epsilon must lie in (0,1)");
    if (!(delta_t > 0.0 && delta_t < T)) throw std::invalid_argument("soe_build: need 0 < delta_t < T");

    // panel order and length scale with the demanded accuracy; the length
    // comes from the convergence-factor relation L = 4 b rho / (rho^2 - 1)
    // with strip half-width b and rho = exp(log(1e4/eps) / (2q))
    const double digits = -std::log10(epsilon);
    int q = std::max(8, static_cast<int>(std::ceil(2.25 * digits)));
    int njac = std::max(6, static_cast<int>(digits) + 2);
    double achieved = 0.0;
    for (int attempt = 0; attempt < 4; ++attempt) {
        const double b = 1.27;
        const double rho = std::exp(std::log(1e4 / epsilon) / (2.0 * q));
        const double L = 4.0 * b * rho / (rho * rho - 1.0);
        SoeApprox soe = build_once(beta, epsilon, delta_t, T, q, L, njac);
        achieved = soe.max_relative_error();
        if (achieved <= epsilon) return soe;
        q += 8;
        njac += 6;
    }
    throw ConvergenceFailure("soe_build: target accuracy not reached", achieved, epsilon);
}

namespace {

// (1 - e^{-x})/x
double phi1(double x) { return x > 1e-30 ? -std::expm1(-x) / x : 1.0; }

// (x/2)(1 + e^{-x}) - (1 - e^{-x}) = sum_{m>=3} (-1)^{m-1} (m-2)/(2 m!) x^m
double phi2(double x) {
    if (x < 0.7) {
        double fact = 6.0;  // m!
        double xm = x * x * x;
        double sign = 1.0;
        double acc = 0.0;
        for (int m = 3; m < 40; ++m) {
            const double term = sign * (m - 2.0) / (2.0 * fact) * xm;
            acc += term;
            if (std::abs(term) < 1e-18 * std::abs(acc) + 1e-300) break;
            xm *= x;
            fact *= (m + 1.0);
            sign = -sign;
        }
        return acc;
    }
    return 0.5 * x * (1.0 + std::exp(-x)) + std::expm1(-x);
}

}  // namespace

FastCaputo::FastCaputo(const TimeMesh& mesh, double beta, const SoeApprox& soe, Eigen::Index dim)
    : mesh_(&mesh), beta_(beta), soe_(&soe), dim_(dim) {
    if (std::abs(mesh.theta() - beta / 2.0) > 1e-12)
        throw std::invalid_argument("FastCaputo: mesh offset theta must equal beta/2");
    if (soe.delta_t > mesh.min_step() * (1.0 + 1e-12))
        throw std::invalid_argument("FastCaputo: exponential sum cut-off exceeds the smallest step");
    acc_ = Eigen::MatrixXd::Zero(dim_, soe_->terms());
    scaled_w_ = Eigen::Map<const Eigen::VectorXd>(soe_->weights.data(), soe_->terms()) /
                std::tgamma(1.0 - beta_);
}

void FastCaputo::set_initial(const Eigen::VectorXd& g0) {
    if (level_ != -1) throw std::logic_error("FastCaputo::set_initial: already started");
    if (g0.size() != dim_) throw std::invalid_argument("FastCaputo::set_initial: bad dimension");
    g_prev_ = g0;
    level_ = 0;
}

double FastCaputo::newest_coeff(int n) const {
    if (n == 1) return kernel_a(*mesh_, beta_, 1, 1);
    return kernel_a(*mesh_, beta_, n, n) + mesh_->rho(n - 1) * kernel_b(*mesh_, beta_, n, n - 1);
}

Eigen::VectorXd FastCaputo::history_part(int n) const {
    if (n != level_ + 1)
        throw std::logic_error("FastCaputo::history_part: levels must be visited in order");
    Eigen::VectorXd h = Eigen::VectorXd::Zero(dim_);
    if (n >= 2) {
        // exact cell n-1 contribution to the coefficient of grad g^{n-1}
        const double c = kernel_a(*mesh_, beta_, n, n - 1) - kernel_b(*mesh_, beta_, n, n - 1);
        h = c * (g_prev_ - g_prev2_) + acc_ * scaled_w_;
    }
    return h;
}

Eigen::VectorXd FastCaputo::value(int n, const Eigen::VectorXd& g_n) const {
    return newest_coeff(n) * (g_n - g_prev_) + history_part(n);
}

void FastCaputo::push(int n, const Eigen::VectorXd& g_n) {
    if (n != level_ + 1) throw std::logic_error("FastCaputo::push: levels must be pushed in order");
    if (g_n.size() != dim_) throw std::invalid_argument("FastCaputo::push: bad dimension");

    if (n < mesh_->levels() && n >= 2) {
        const Eigen::VectorXd grad_prev = g_prev_ - g_prev2_;  // grad g^{n-1}
        const Eigen::VectorXd grad_new = g_n - g_prev_;        // grad g^n
        const double t_new = mesh_->t_offset(n + 1);
        const double t_old = mesh_->t_offset(n);
        const int k = n - 1;  // cell folded into the accumulators for level n+1
        const double tau = mesh_->tau(k), tau1 = mesh_->tau(k + 1);
        const double dist = t_new - mesh_->t(k);
        const double rho_k = tau / tau1;
        for (int i = 0; i < soe_->terms(); ++i) {
            const double s = soe_->nodes[static_cast<size_t>(i)];
            acc_.col(i) *= std::exp(-s * (t_new - t_old));
            const double x = s * tau;
            const double damp = std::exp(-s * dist);
            const double a_cell = damp * phi1(x);
            const double b_cell = damp * 2.0 * tau / ((tau + tau1) * x * x) * phi2(x);
            acc_.col(i) += (a_cell - b_cell) * grad_prev + rho_k * b_cell * grad_new;
        }
    }
    g_prev2_.swap(g_prev_);
    g_prev_ = g_n;
    level_ = n;
}

}  // namespace fracstep
