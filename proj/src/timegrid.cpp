#include "fracstep/timegrid.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "fracstep/errors.hpp"

namespace fracstep {

TimeMesh::TimeMesh(std::vector<double> nodes, double theta)
    : nodes_(std::move(nodes)), theta_(theta) {
    if (nodes_.size() < 2) throw std::invalid_argument("TimeMesh: need at least two nodes");
    if (nodes_.front() != 0.0) throw NonMonotoneNodes("TimeMesh: first node must be 0");
    if (!(theta > 0.0 && theta < 1.0)) throw std::invalid_argument("TimeMesh: theta must lie in (0,1)");

    const int N = levels();
    steps_.resize(static_cast<size_t>(N));
    for (int k = 1; k <= N; ++k) {
        const double tau = nodes_[static_cast<size_t>(k)] - nodes_[static_cast<size_t>(k - 1)];
        if (!(tau > 0.0))
            throw NonMonotoneNodes("TimeMesh: nodes must be strictly increasing (step " +
                                   std::to_string(k) + " is " + std::to_string(tau) + ")");
        steps_[static_cast<size_t>(k - 1)] = tau;
    }
    ratios_.resize(static_cast<size_t>(std::max(0, N - 1)));
    for (int k = 1; k <= N - 1; ++k)
        ratios_[static_cast<size_t>(k - 1)] = steps_[static_cast<size_t>(k - 1)] / steps_[static_cast<size_t>(k)];

    offset_nodes_.resize(static_cast<size_t>(N));
    for (int n = 1; n <= N; ++n)
        offset_nodes_[static_cast<size_t>(n - 1)] =
            nodes_[static_cast<size_t>(n)] - theta_ * steps_[static_cast<size_t>(n - 1)];

    max_step_ = *std::max_element(steps_.begin(), steps_.end());
    min_step_ = *std::min_element(steps_.begin(), steps_.end());
    max_ratio_ = ratios_.empty() ? 0.0 : *std::max_element(ratios_.begin(), ratios_.end());
}

TimeMesh build_graded(int N, double T, double gamma, double theta) {
    if (N < 1) throw std::invalid_argument("build_graded: N must be >= 1");
    if (!(T > 0.0)) throw std::invalid_argument("build_graded: T must be positive");
    if (!(gamma >= 1.0)) throw std::invalid_argument("build_graded: gamma must be >= 1");

    std::vector<double> nodes(static_cast<size_t>(N) + 1);
    nodes[0] = 0.0;
    for (int k = 1; k < N; ++k) {
        // exp(gamma*log(k/N)) rather than pow: keeps t_N == T exact and avoids
        // pow() drift for large gamma.
        nodes[static_cast<size_t>(k)] =
            T * std::exp(gamma * std::log(static_cast<double>(k) / static_cast<double>(N)));
    }
    nodes[static_cast<size_t>(N)] = T;
    return TimeMesh(std::move(nodes), theta);
}

TimeMesh build_custom(std::vector<double> nodes, double theta) {
    return TimeMesh(std::move(nodes), theta);
}

MAReport validate_ma(const TimeMesh& mesh, double gamma, double ceiling) {
    if (!(gamma >= 1.0)) throw std::invalid_argument("validate_ma: gamma must be >= 1");
    MAReport rep;
    rep.gamma = gamma;
    rep.ceiling = ceiling;

    const int N = mesh.levels();
    const double tau_max = mesh.max_step();
    double c1 = 0.0, c2 = 0.0, c3 = 0.0;
    for (int k = 1; k <= N; ++k) {
        const double cap = std::min(1.0, std::pow(mesh.t(k), 1.0 - 1.0 / gamma));
        c1 = std::max(c1, mesh.tau(k) / (tau_max * cap));
    }
    for (int k = 2; k <= N; ++k) {
        c2 = std::max(c2, mesh.t(k) / mesh.t(k - 1));
        const double lhs = mesh.tau(k) / mesh.t(k);
        const double rhs = mesh.tau(k - 1) / mesh.t(k - 1);
        c3 = std::max(c3, lhs / rhs);
    }
    rep.c_step_bound = c1;
    rep.c_node_growth = c2;
    rep.c_ratio_decay = c3;
    rep.c_gamma_estimate = std::max({c1, c2, c3});
    rep.step_bound_ok = c1 <= ceiling;
    rep.node_growth_ok = c2 <= ceiling;
    rep.ratio_decay_ok = c3 <= ceiling;
    return rep;
}

}  // namespace fracstep
