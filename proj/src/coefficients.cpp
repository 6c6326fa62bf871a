#include "fracstep/coefficients.hpp"

#include <cmath>
#include <stdexcept>

#include "fracstep/errors.hpp"

namespace fracstep {

namespace {

// Fourth-order central difference of a single argument.
template <typename F>
double fd4(const F& f, double h) {
    return (8.0 * (f(h) - f(-h)) - (f(2.0 * h) - f(-2.0 * h))) / (12.0 * h);
}

double partial_or_fd(const Field& fld, const std::optional<ScalarField>& part, int which,
                     double x, double y, double t, bool fallback, double h, const char* name) {
    if (part) return (*part)(x, y, t);
    if (!fallback) throw MissingPartial(std::string("missing analytic partial: ") + name);
    switch (which) {
        case 0: return fd4([&](double e) { return fld(x + e, y, t); }, h);
        case 1: return fd4([&](double e) { return fld(x, y + e, t); }, h);
        default: {
            // one-sided shrink near t = 0 so sampling never leaves [0, T]
            const double hh = std::min(h, t > 4.0 * h ? h : std::max(t / 4.0, 1e-8));
            return fd4([&](double e) { return fld(x, y, std::max(t + e, 0.0)); }, hh);
        }
    }
}

}  // namespace

double CoefficientSet::a1_t(double x, double y, double t) const {
    return partial_or_fd(a1, a1.dt, 2, x, y, t, fd_fallback, fd_step, "(a1)_t");
}
double CoefficientSet::a2_t(double x, double y, double t) const {
    return partial_or_fd(a2, a2.dt, 2, x, y, t, fd_fallback, fd_step, "(a2)_t");
}
double CoefficientSet::a2_x(double x, double y, double t) const {
    return partial_or_fd(a2, a2.dx, 0, x, y, t, fd_fallback, fd_step, "(a2)_x");
}
double CoefficientSet::a1_y(double x, double y, double t) const {
    return partial_or_fd(a1, a1.dy, 1, x, y, t, fd_fallback, fd_step, "(a1)_y");
}
double CoefficientSet::d_x(double x, double y) const {
    return partial_or_fd(d, d.dx, 0, x, y, 0.0, fd_fallback, fd_step, "d_x");
}
double CoefficientSet::d_y(double x, double y) const {
    return partial_or_fd(d, d.dy, 1, x, y, 0.0, fd_fallback, fd_step, "d_y");
}

AuxFields::AuxFields(const CoefficientSet& coeffs) : coeffs_(&coeffs) {}

double AuxFields::p(double x, double y, double t) const {
    const auto& c = *coeffs_;
    return c.d(x, y, 0.0) * std::exp(-c.c_p * t) / (c.a1(x, y, t) * c.a2(x, y, t));
}
double AuxFields::p1(double x, double y, double t) const {
    const auto& c = *coeffs_;
    return c.d(x, y, 0.0) * std::exp(-c.c_p * t) / c.a2(x, y, t);
}
double AuxFields::p2(double x, double y, double t) const {
    const auto& c = *coeffs_;
    return c.d(x, y, 0.0) * std::exp(-c.c_p * t) / c.a1(x, y, t);
}
double AuxFields::p3(double x, double y, double t) const {
    const auto& c = *coeffs_;
    const double a1 = c.a1(x, y, t), a2 = c.a2(x, y, t);
    const double dval = c.d(x, y, 0.0);
    return c.b1(x, y, t) - a1 * (c.d_x(x, y) / dval - c.a2_x(x, y, t) / a2);
}
double AuxFields::p4(double x, double y, double t) const {
    const auto& c = *coeffs_;
    const double a1 = c.a1(x, y, t), a2 = c.a2(x, y, t);
    const double dval = c.d(x, y, 0.0);
    return c.b2(x, y, t) - a2 * (c.d_y(x, y) / dval - c.a1_y(x, y, t) / a1);
}

AuxFields build_aux(const CoefficientSet& coeffs) {
    if (!coeffs.fd_fallback) {
        // fail fast if anything the operator needs is absent
        if (!coeffs.a2.dx) throw MissingPartial("build_aux: (a2)_x required");
        if (!coeffs.a1.dy) throw MissingPartial("build_aux: (a1)_y required");
        if (!coeffs.d.dx || !coeffs.d.dy) throw MissingPartial("build_aux: d_x, d_y required");
    }
    return AuxFields(coeffs);
}

double estimate_cp(const CoefficientSet& coeffs, const Domain& dom, double T, int density) {
    double sup = 0.0;
    for (int i = 1; i < density; ++i) {
        const double x = dom.xl + dom.width() * i / density;
        for (int j = 1; j < density; ++j) {
            const double y = dom.yl + dom.height() * j / density;
            for (int k = 0; k <= density; ++k) {
                const double t = T * k / density;
                const double a1 = coeffs.a1(x, y, t), a2 = coeffs.a2(x, y, t);
                const double r = std::abs(coeffs.a1_t(x, y, t) / a1) +
                                 std::abs(coeffs.a2_t(x, y, t) / a2);
                sup = std::max(sup, r);
            }
        }
    }
    return sup;
}

AssumptionReport verify_assumptions(const CoefficientSet& coeffs, const Domain& dom, double T,
                                    int density) {
    AssumptionReport rep;
    rep.v1_positivity.worst_value = 1e300;
    auto record = [](AssumptionCheck& chk, bool worse, double val, double x, double y, double t) {
        if (worse) {
            chk.worst_value = val;
            chk.worst_x = x;
            chk.worst_y = y;
            chk.worst_t = t;
        }
    };
    for (int i = 1; i < density; ++i) {
        const double x = dom.xl + dom.width() * i / density;
        for (int j = 1; j < density; ++j) {
            const double y = dom.yl + dom.height() * j / density;
            for (int k = 0; k <= density; ++k) {
                const double t = T * k / density;
                const double a1 = coeffs.a1(x, y, t), a2 = coeffs.a2(x, y, t);
                record(rep.v1_positivity, std::min(a1, a2) < rep.v1_positivity.worst_value,
                       std::min(a1, a2), x, y, t);
                const double ratio = std::abs(coeffs.a1_t(x, y, t) / a1) +
                                     std::abs(coeffs.a2_t(x, y, t) / a2);
                record(rep.v1_ratio_bound, ratio > rep.v1_ratio_bound.worst_value, ratio, x, y, t);
                const double bmax = std::max({std::abs(coeffs.b1(x, y, t)),
                                              std::abs(coeffs.b2(x, y, t)),
                                              std::abs(coeffs.b3(x, y, t))});
                record(rep.v2_bounded, bmax > rep.v2_bounded.worst_value, bmax, x, y, t);
            }
        }
    }
    rep.v1_positivity.pass = rep.v1_positivity.worst_value > 0.0;
    rep.v1_ratio_bound.pass = rep.v1_ratio_bound.worst_value <= coeffs.c_p + 1e-12;
    rep.v2_bounded.pass = std::isfinite(rep.v2_bounded.worst_value);
    return rep;
}

namespace {

Field constant_field(double v) {
    Field f;
    f.f = [v](double, double, double) { return v; };
    f.dx = f.dy = f.dt = [](double, double, double) { return 0.0; };
    return f;
}

}  // namespace

CoefficientSet preset_identity() {
    CoefficientSet c;
    c.a1 = c.a2 = constant_field(1.0);
    c.b1 = c.b2 = c.b3 = constant_field(0.0);
    c.d = constant_field(1.0);
    c.c_p = 0.0;
    c.name = "identity";
    return c;
}

CoefficientSet preset_constant() {
    CoefficientSet c;
    c.a1 = constant_field(2.0);
    c.a2 = constant_field(3.0);
    c.b1 = c.b2 = constant_field(0.0);
    c.b3 = constant_field(1.0);
    c.d = constant_field(1.0);
    c.c_p = 0.0;
    c.name = "constant";
    return c;
}

CoefficientSet preset_paper_section5() {
    CoefficientSet c;
    c.a1.f = [](double x, double y, double t) { return std::exp(x + y) * (1.0 + std::cos(t)); };
    c.a1.dt = [](double x, double y, double t) { return -std::exp(x + y) * std::sin(t); };
    c.a1.dy = [](double x, double y, double t) { return std::exp(x + y) * (1.0 + std::cos(t)); };
    c.a1.dx = c.a1.dy;

    c.a2.f = [](double x, double y, double t) {
        return std::exp((x + y) * t) * (1.0 + t * std::sqrt(t));
    };
    c.a2.dt = [](double x, double y, double t) {
        return std::exp((x + y) * t) * ((x + y) * (1.0 + t * std::sqrt(t)) + 1.5 * std::sqrt(t));
    };
    c.a2.dx = [](double x, double y, double t) {
        return t * std::exp((x + y) * t) * (1.0 + t * std::sqrt(t));
    };
    c.a2.dy = c.a2.dx;

    c.b1.f = [](double x, double y, double t) { return std::sin(x * y * t); };
    c.b2.f = [](double x, double y, double t) { return std::cos(x * y * t); };
    c.b3.f = [](double x, double y, double t) { return (x * x + y * y) * t; };

    c.d.f = [](double x, double y, double) { return std::exp(std::sin(x + y)); };
    c.d.dx = [](double x, double y, double) { return std::cos(x + y) * std::exp(std::sin(x + y)); };
    c.d.dy = c.d.dx;

    c.c_p = 3.0;
    c.name = "paper_section5";
    return c;
}

CoefficientSet coefficient_preset(const std::string& name) {
    if (name == "identity") return preset_identity();
    if (name == "constant") return preset_constant();
    if (name == "paper_section5") return preset_paper_section5();
    throw std::invalid_argument("unknown coefficient preset: " + name);
}

}  // namespace fracstep
