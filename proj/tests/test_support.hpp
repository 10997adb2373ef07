#pragma once

#include <cmath>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "folab/expr.hpp"
#include "folab/sampling.hpp"

namespace folab::testing {

using ScalarFn = std::function<double(std::span<const double>)>;

/// Central-difference gradient, the independent oracle for jet first
/// derivatives.
inline std::vector<double> fd_gradient(const ScalarFn& f, std::span<const double> x, double h) {
    std::vector<double> g(x.size());
    std::vector<double> p(x.begin(), x.end());
    for (std::size_t a = 0; a < x.size(); ++a) {
        p[a] = x[a] + h;
        const double fp = f(p);
        p[a] = x[a] - h;
        const double fm = f(p);
        p[a] = x[a];
        g[a] = (fp - fm) / (2.0 * h);
    }
    return g;
}

/// Central-difference Hessian (diagonal: 3-point, off-diagonal: 4-point).
inline std::vector<double> fd_hessian(const ScalarFn& f, std::span<const double> x, double h) {
    const std::size_t n = x.size();
    std::vector<double> H(n * n, 0.0);
    std::vector<double> p(x.begin(), x.end());
    const double f0 = f(p);
    for (std::size_t a = 0; a < n; ++a) {
        p[a] = x[a] + h;
        const double fp = f(p);
        p[a] = x[a] - h;
        const double fm = f(p);
        p[a] = x[a];
        H[a * n + a] = (fp - 2.0 * f0 + fm) / (h * h);
        for (std::size_t b = a + 1; b < n; ++b) {
            p[a] = x[a] + h; p[b] = x[b] + h;
            const double fpp = f(p);
            p[b] = x[b] - h;
            const double fpm = f(p);
            p[a] = x[a] - h; p[b] = x[b] + h;
            const double fmp = f(p);
            p[b] = x[b] - h;
            const double fmm = f(p);
            p[a] = x[a]; p[b] = x[b];
            H[a * n + b] = H[b * n + a] = (fpp - fpm - fmp + fmm) / (4.0 * h * h);
        }
    }
    return H;
}

/// Self-validating finite-difference probe: every derivative is computed
/// at two step sizes and the sample only counts when the two stencils
/// agree, which rejects points too close to a domain singularity (or with
/// runaway higher derivatives) where central differences stop being a
/// trustworthy oracle.
struct FdProbe {
    bool ok = false;
    std::vector<double> grad, hess;
};

inline FdProbe fd_probe(const ScalarFn& f, std::span<const double> x, double grad_step,
                        double hess_step, double consistency_tol) {
    FdProbe probe;
    const std::vector<double> g1 = fd_gradient(f, x, grad_step);
    const std::vector<double> g2 = fd_gradient(f, x, grad_step / 2.0);
    const std::vector<double> h1 = fd_hessian(f, x, hess_step);
    const std::vector<double> h2 = fd_hessian(f, x, hess_step / 2.0);
    auto consistent = [&](const std::vector<double>& a, const std::vector<double>& b) {
        for (std::size_t i = 0; i < a.size(); ++i) {
            if (!std::isfinite(a[i]) || !std::isfinite(b[i])) return false;
            const double scale = std::max({1.0, std::abs(a[i]), std::abs(b[i])});
            if (std::abs(a[i] - b[i]) > consistency_tol * scale) return false;
        }
        return true;
    };
    probe.ok = consistent(g1, g2) && consistent(h1, h2);
    probe.grad = std::move(g2);
    probe.hess = std::move(h2);
    return probe;
}

/// Random expression of bounded depth over the given symbols. Covers the
/// whole grammar; domain-restricted constructs (log, sqrt, division,
/// fractional powers) appear behind rejection at evaluation time.
inline Expression random_expression(SplitMix64& rng, const std::vector<std::string>& syms,
                                    int depth) {
    using K = ExprNode::Kind;
    if (depth <= 0) {
        const std::uint64_t pick = rng.next() % 4;
        if (pick == 0) return Expression::number(std::round(rng.uniform(-2.0, 2.0) * 16.0) / 16.0);
        if (pick == 1) return Expression::pi();
        return Expression::symbol(syms[rng.next() % syms.size()]);
    }
    switch (rng.next() % 10) {
        case 0: return Expression::binary(K::Add, random_expression(rng, syms, depth - 1),
                                          random_expression(rng, syms, depth - 1));
        case 1: return Expression::binary(K::Sub, random_expression(rng, syms, depth - 1),
                                          random_expression(rng, syms, depth - 1));
        case 2: return Expression::binary(K::Mul, random_expression(rng, syms, depth - 1),
                                          random_expression(rng, syms, depth - 1));
        case 3: return Expression::binary(K::Div, random_expression(rng, syms, depth - 1),
                                          random_expression(rng, syms, depth - 1));
        case 4: {
            const long long e = static_cast<long long>(rng.next() % 3) + 1;
            return Expression::binary(K::Pow, random_expression(rng, syms, depth - 1),
                                      Expression::number(static_cast<double>(e)));
        }
        case 5: return Expression::unary(K::Neg, random_expression(rng, syms, depth - 1));
        default: {
            constexpr Fn fns[] = {Fn::Sin, Fn::Cos, Fn::Tan,  Fn::Exp,  Fn::Log,
                                  Fn::Sqrt, Fn::Sinh, Fn::Cosh, Fn::Tanh, Fn::Atan};
            return Expression::call(fns[rng.next() % 10], random_expression(rng, syms, depth - 1));
        }
    }
}

/// Scaled comparison used throughout the finite-difference checks.
inline bool close_rel(double a, double b, double tol) {
    return std::abs(a - b) <= tol * std::max({1.0, std::abs(a), std::abs(b)});
}

} // namespace folab::testing

#include "folab/chart.hpp"

namespace folab::testing {

constexpr double kTwoPi = 6.283185307179586476925286766559;

inline CoordSpec periodic_coord(const std::string& name, double lo, double hi) {
    return {name, true, lo, hi};
}
inline CoordSpec interval_coord(const std::string& name, double lo, double hi) {
    return {name, false, lo, hi};
}

/// Flat 3-torus (R/2piZ)^3 with the identity metric.
inline Chart chart_torus3() {
    std::vector<CoordSpec> cs = {periodic_coord("x", 0, kTwoPi), periodic_coord("y", 0, kTwoPi),
                                 periodic_coord("z", 0, kTwoPi)};
    std::vector<MetricEntry> g;
    for (int i = 0; i < 3; ++i) g.push_back({i, i, parse_expression("1")});
    return Chart(std::move(cs), std::move(g));
}

/// T^3 with g = dx^2 + dy^2 + e^{2f} dz^2, f = amp * sin(x) cos(y).
inline Chart chart_warped(double amp = 1.0) {
    std::vector<CoordSpec> cs = {periodic_coord("x", 0, kTwoPi), periodic_coord("y", 0, kTwoPi),
                                 periodic_coord("z", 0, kTwoPi)};
    const std::string two_f = std::to_string(2.0 * amp) + "*sin(x)*cos(y)";
    std::vector<MetricEntry> g = {{0, 0, parse_expression("1")},
                                  {1, 1, parse_expression("1")},
                                  {2, 2, parse_expression("exp(" + two_f + ")")}};
    return Chart(std::move(cs), std::move(g));
}

/// Unit round 3-sphere in Hopf coordinates, away from the degenerate circles.
inline Chart chart_hopf(double delta = 0.1) {
    std::vector<CoordSpec> cs = {interval_coord("eta", delta, kTwoPi / 4.0 - delta),
                                 periodic_coord("xi1", 0, kTwoPi),
                                 periodic_coord("xi2", 0, kTwoPi)};
    std::vector<MetricEntry> g = {{0, 0, parse_expression("1")},
                                  {1, 1, parse_expression("cos(eta)^2")},
                                  {2, 2, parse_expression("sin(eta)^2")}};
    return Chart(std::move(cs), std::move(g));
}

/// Round 2-sphere g = dtheta^2 + sin^2(theta) dphi^2 away from the poles.
inline Chart chart_sphere2(double delta = 0.05) {
    std::vector<CoordSpec> cs = {interval_coord("theta", delta, kTwoPi / 2.0 - delta),
                                 periodic_coord("phi", 0, kTwoPi)};
    std::vector<MetricEntry> g = {{0, 0, parse_expression("1")},
                                  {1, 1, parse_expression("sin(theta)^2")}};
    return Chart(std::move(cs), std::move(g));
}

/// Flat annulus 1 < r < 2 in spherical coordinates (r, theta, phi).
inline Chart chart_spherical_annulus(double band = 0.15) {
    std::vector<CoordSpec> cs = {interval_coord("r", 1.0, 2.0),
                                 interval_coord("theta", band, kTwoPi / 2.0 - band),
                                 periodic_coord("phi", 0, kTwoPi)};
    std::vector<MetricEntry> g = {{0, 0, parse_expression("1")},
                                  {1, 1, parse_expression("r^2")},
                                  {2, 2, parse_expression("r^2*sin(theta)^2")}};
    return Chart(std::move(cs), std::move(g));
}

inline VectorFieldSpec field3(const std::string& a, const std::string& b, const std::string& c) {
    return VectorFieldSpec::parse({a, b, c});
}
inline VectorFieldSpec field2(const std::string& a, const std::string& b) {
    return VectorFieldSpec::parse({a, b});
}

/// Seeded trigonometric polynomial (degree <= 2 per coordinate), the smooth
/// periodic test-field family.
inline Expression random_trig_scalar(SplitMix64& rng, const std::vector<std::string>& coords) {
    std::string s = std::to_string(rng.symmetric());
    for (const std::string& u : coords) {
        for (int k = 1; k <= 2; ++k) {
            const std::string arg = k == 1 ? u : "2*" + u;
            s += "+" + std::to_string(rng.symmetric()) + "*sin(" + arg + ")";
            s += "+" + std::to_string(rng.symmetric()) + "*cos(" + arg + ")";
        }
    }
    return parse_expression(s);
}

inline VectorFieldSpec random_trig_field(SplitMix64& rng, const std::vector<std::string>& coords) {
    VectorFieldSpec spec;
    for (std::size_t c = 0; c < coords.size(); ++c)
        spec.components.push_back(random_trig_scalar(rng, coords));
    return spec;
}

} // namespace folab::testing
