#pragma once

#include <functional>
#include <optional>
#include <string>

namespace fracstep {

using ScalarField = std::function<double(double x, double y, double t)>;

struct Domain {
    double xl = 0.0, xr = 1.0, yl = 0.0, yr = 1.0;
    double width() const { return xr - xl; }
    double height() const { return yr - yl; }
};

// A scalar coefficient with optional analytic partials. Missing partials fall
// back to fourth-order central differences so the O(h^2) spatial accuracy of
// the schemes is never limited by the differentiation.
struct Field {
    ScalarField f;
    std::optional<ScalarField> dx, dy, dt;

    double operator()(double x, double y, double t) const { return f(x, y, t); }
};

// Variable coefficients of the elliptic operator
//   A u = a1 u_xx + a2 u_yy + b1 u_x + b2 u_y + b3 u,
// plus the symmetrizer ingredients: a positive spatial weight d(x,y) and the
// damping constant c_p used by the auxiliary fields.
struct CoefficientSet {
    Field a1, a2;        // diffusivities, must stay positive
    Field b1, b2, b3;    // advection and reaction
    Field d;             // positive spatial weight
    double c_p = 0.0;
    bool fd_fallback = true;   // allow finite-difference partials
    double fd_step = 1e-4;

    std::string name = "custom";

    // Partials used by the assembled operator; analytic when supplied.
    double a1_t(double x, double y, double t) const;
    double a2_t(double x, double y, double t) const;
    double a2_x(double x, double y, double t) const;
    double a1_y(double x, double y, double t) const;
    double d_x(double x, double y) const;
    double d_y(double x, double y) const;
};

// Auxiliary weight fields
//   p  = d e^{-c_p t} / (a1 a2),  p1 = d e^{-c_p t} / a2,  p2 = d e^{-c_p t} / a1,
//   p3 = b1 - p^{-1} (p1)_x,      p4 = b2 - p^{-1} (p2)_y.
// p, p1, p2 are positive and non-increasing in t whenever
// |(a1)_t/a1| + |(a2)_t/a2| <= c_p. The derivative terms expand to
//   p^{-1}(p1)_x = a1 (d_x/d - (a2)_x/a2),   p^{-1}(p2)_y = a2 (d_y/d - (a1)_y/a1),
// so none of the fields depends on c_p except through the explicit e^{-c_p t}
// factor, which cancels from every ratio the discrete operator uses.
class AuxFields {
public:
    explicit AuxFields(const CoefficientSet& coeffs);

    double p(double x, double y, double t) const;
    double p1(double x, double y, double t) const;
    double p2(double x, double y, double t) const;
    double p3(double x, double y, double t) const;
    double p4(double x, double y, double t) const;

    const CoefficientSet& coeffs() const { return *coeffs_; }

private:
    const CoefficientSet* coeffs_;
};

AuxFields build_aux(const CoefficientSet& coeffs);

/// Sampled supremum of |(a1)_t/a1| + |(a2)_t/a2| over a tensor lattice
/// (a lower bound on the true supremum; callers may inflate).
double estimate_cp(const CoefficientSet& coeffs, const Domain& dom, double T, int density = 40);

struct AssumptionCheck {
    bool pass = true;
    double worst_value = 0.0;
    double worst_x = 0.0, worst_y = 0.0, worst_t = 0.0;
};

// V1 positivity: a1, a2 > 0 at all samples.
// V1 ratio bound: |(a1)_t/a1| + |(a2)_t/a2| <= c_p at all samples.
// V2 boundedness: max |b_l| finite (reported; fails only on non-finite values).
struct AssumptionReport {
    AssumptionCheck v1_positivity;
    AssumptionCheck v1_ratio_bound;
    AssumptionCheck v2_bounded;
    bool all_pass() const { return v1_positivity.pass && v1_ratio_bound.pass && v2_bounded.pass; }
};

AssumptionReport verify_assumptions(const CoefficientSet& coeffs, const Domain& dom, double T,
                                    int density = 24);

// Named presets selectable from the CLI.
CoefficientSet preset_identity();        // a1 = a2 = 1, b = 0, d = 1, c_p = 0
CoefficientSet preset_constant();        // constant anisotropic diffusivities + reaction
CoefficientSet preset_paper_section5();  // the benchmark's time-space dependent set
CoefficientSet coefficient_preset(const std::string& name);

}  // namespace fracstep
