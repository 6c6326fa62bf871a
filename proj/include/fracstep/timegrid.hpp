#pragma once

#include <vector>

namespace fracstep {

// Nonuniform time partition 0 = t_0 < t_1 < ... < t_N = T together with the
// derived quantities every scheme consumes: step sizes tau_k, local step
// ratios rho_k = tau_k/tau_{k+1}, and the offset evaluation points
// t_{n-theta} = t_n - theta*tau_n. Immutable after construction.
class TimeMesh {
public:
    TimeMesh(std::vector<double> nodes, double theta);

    int levels() const { return static_cast<int>(nodes_.size()) - 1; }
    double horizon() const { return nodes_.back(); }
    double theta() const { return theta_; }

    /// t_k for 0 <= k <= N.
    double t(int k) const { return nodes_[static_cast<size_t>(k)]; }
    /// tau_k = t_k - t_{k-1} for 1 <= k <= N.
    double tau(int k) const { return steps_[static_cast<size_t>(k - 1)]; }
    /// rho_k = tau_k / tau_{k+1} for 1 <= k <= N-1.
    double rho(int k) const { return ratios_[static_cast<size_t>(k - 1)]; }
    /// t_{n-theta} = t_n - theta*tau_n for 1 <= n <= N.
    double t_offset(int n) const { return offset_nodes_[static_cast<size_t>(n - 1)]; }

    const std::vector<double>& nodes() const { return nodes_; }
    const std::vector<double>& steps() const { return steps_; }
    const std::vector<double>& ratios() const { return ratios_; }
    const std::vector<double>& offset_nodes() const { return offset_nodes_; }

    double max_step() const { return max_step_; }
    double min_step() const { return min_step_; }
    double max_ratio() const { return max_ratio_; }

    // The kernel monotonicity theory assumes max_k rho_k <= 7/4. Meshes
    // violating it are usable but flagged.
    static constexpr double kRatioBound = 1.75;
    bool ratio_bound_ok() const { return max_ratio_ <= kRatioBound; }

private:
    std::vector<double> nodes_;
    std::vector<double> steps_;
    std::vector<double> ratios_;
    std::vector<double> offset_nodes_;
    double theta_;
    double max_step_ = 0.0, min_step_ = 0.0, max_ratio_ = 0.0;
};

/// Graded partition t_k = T*(k/N)^gamma. gamma = 1 is the uniform mesh;
/// larger gamma concentrates steps near t = 0.
TimeMesh build_graded(int N, double T, double gamma, double theta);

/// Mesh from user-supplied nodes (strictly increasing, first node 0).
TimeMesh build_custom(std::vector<double> nodes, double theta);

// Result of checking the weak mesh assumption
//   tau_k <= C * tau * min{1, t_k^{1-1/gamma}},   1 <= k <= N,
//   t_k   <= C * t_{k-1},                          2 <= k <= N,
//   tau_k/t_k <= C * tau_{k-1}/t_{k-1},            2 <= k <= N.
// c_gamma_estimate is the smallest C making all three hold on the mesh;
// the per-condition flags compare each condition against `ceiling`.
struct MAReport {
    double gamma = 1.0;
    double ceiling = 0.0;
    double c_gamma_estimate = 0.0;
    double c_step_bound = 0.0;   // first condition
    double c_node_growth = 0.0;  // second condition
    double c_ratio_decay = 0.0;  // third condition
    bool step_bound_ok = false;
    bool node_growth_ok = false;
    bool ratio_decay_ok = false;
    bool satisfied() const { return step_bound_ok && node_growth_ok && ratio_decay_ok; }
};

MAReport validate_ma(const TimeMesh& mesh, double gamma, double ceiling = 10.0);

}  // namespace fracstep
