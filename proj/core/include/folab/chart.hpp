#pragma once

#include <functional>
#include <limits>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "folab/expr.hpp"
#include "folab/jet.hpp"
#include "folab/linalg.hpp"

namespace folab {

/// One chart coordinate: either periodic with domain [lo, hi) and period
/// hi - lo, or a plain interval (lo, hi) used for sampling and for
/// boundary-exit detection along geodesics.
struct CoordSpec {
    std::string name;
    bool periodic = false;
    double lo = -std::numeric_limits<double>::infinity();
    double hi = std::numeric_limits<double>::infinity();

    double period() const { return hi - lo; }
};

struct Point {
    std::vector<double> x;
};

struct TangentVector {
    Point base;
    std::vector<double> v;
};

/// A vector field given by one component expression per coordinate.
struct VectorFieldSpec {
    std::vector<Expression> components;

    static VectorFieldSpec parse(const std::vector<std::string>& sources);
};

struct MetricEntry {
    int i = 0, j = 0;
    Expression expr;
};

/// Christoffel symbols and their first derivatives at a point.
/// gamma(k,i,j) = Gamma^k_ij, dgamma(a,k,i,j) = d_a Gamma^k_ij; both come
/// from second-order jets of the metric, no finite differences involved.
template <class R>
struct ConnectionT {
    int m = 0;
    std::vector<R> gamma;   // m^3, [k][i][j]
    std::vector<R> dgamma;  // m^4, [a][k][i][j]

    R G(int k, int i, int j) const { return gamma[(k * m + i) * m + j]; }
    R dG(int a, int k, int i, int j) const { return dgamma[((a * m + k) * m + i) * m + j]; }

    /// Gamma^k_ij as a first-order dual carrying its coordinate gradient.
    DualT<R> dual(int k, int i, int j) const {
        std::vector<R> grad(m);
        for (int a = 0; a < m; ++a) grad[a] = dG(a, k, i, j);
        return {G(k, i, j), std::move(grad)};
    }
};

using Connection = ConnectionT<double>;

/// Riemann tensor components at a point, stored as
/// R(d_a, d_b) d_c = comp(d, c, a, b) * d_d with the convention
/// R(X,Y)Z = nabla_X nabla_Y Z - nabla_Y nabla_X Z - nabla_[X,Y] Z.
struct RiemannTensor {
    int m = 0;
    std::vector<double> comp;  // m^4, [d][c][a][b]

    double R(int d, int c, int a, int b) const { return comp[((d * m + c) * m + a) * m + b]; }
};

/// A single coordinate chart with a symmetric metric given by expressions.
/// Charts are immutable after construction; every operation is a pure
/// function of (chart, point), safe to call concurrently.
class Chart {
public:
    Chart() = default;  // empty chart; assign before use
    Chart(std::vector<CoordSpec> coords, std::vector<MetricEntry> metric);

    int dim() const { return static_cast<int>(coords_.size()); }
    const std::vector<CoordSpec>& coords() const { return coords_; }
    const std::vector<std::string>& coord_names() const { return names_; }
    int coord_index(const std::string& name) const;

    const Expression& metric_expr(int i, int j) const { return metric_[i * dim() + j]; }

    /// Reduce periodic coordinates into their fundamental domain.
    Point wrap(Point p) const;
    /// True when every non-periodic coordinate lies inside its interval.
    bool in_domain(const Point& p) const;

    /// Seed coordinates of a (wrapped) point for jet evaluation.
    template <class T>
    std::vector<T> seed(const Point& wrapped) const;

    /// Metric components over any scalar type at pre-seeded coordinates.
    template <class T>
    SquareMat<T> metric_eval(std::span<const T> seeded) const;

    /// g(p); checks positive definiteness and throws ScenarioError if the
    /// scenario is misconfigured.
    Mat metric_at(const Point& p) const;

    /// Metric components as 2-jets at p (value, gradient, Hessian).
    std::vector<Jet2> metric_jets(const Point& p) const;

    Connection connection_at(const Point& p) const;
    RiemannTensor riemann_at(const Point& p) const;

    double inner(const Point& p, const std::vector<double>& u, const std::vector<double>& v) const;
    double norm(const TangentVector& t) const;

private:
    std::vector<CoordSpec> coords_;
    std::vector<std::string> names_;
    std::vector<Expression> metric_;          // full m*m, mirrored
    std::vector<std::vector<int>> bindings_;  // per metric entry: symbol -> coord
};

/// Assemble the curvature tensor from an already-computed connection.
RiemannTensor riemann_from_connection(const Connection& c);

/// A bound, evaluable vector field: components with full 2-jets at any
/// point. Backed by expressions, by a windowed (bump-multiplied) base
/// field, or by synthesized test fields; all backends are pure functions.
class VectorField {
public:
    VectorField() = default;

    static VectorField from_spec(const Chart& chart, const VectorFieldSpec& spec);
    static VectorField from_fn(int dim, std::function<std::vector<Jet2>(const Point&)> fn);

    int dim() const { return dim_; }
    bool valid() const { return static_cast<bool>(fn_); }

    /// Component 2-jets at p (p is wrapped internally by expression backends).
    std::vector<Jet2> jets(const Point& p) const { return fn_(p); }
    std::vector<Dual> duals(const Point& p) const;
    std::vector<double> values(const Point& p) const;

private:
    int dim_ = 0;
    std::function<std::vector<Jet2>(const Point&)> fn_;
};

// --- pointwise differential operators on fields ---

TangentVector covariant_derivative(const Chart& chart, const VectorField& X,
                                   const VectorField& Y, const Point& p);
TangentVector covariant_derivative(const Chart& chart, const VectorFieldSpec& X,
                                   const VectorFieldSpec& Y, const Point& p);

TangentVector lie_bracket(const Chart& chart, const VectorField& X, const VectorField& Y,
                          const Point& p);
TangentVector lie_bracket(const Chart& chart, const VectorFieldSpec& X, const VectorFieldSpec& Y,
                          const Point& p);

/// R(X,Y)Z at p via the curvature tensor components (tensorial: only the
/// point values of X, Y, Z enter).
TangentVector riemann(const Chart& chart, const VectorFieldSpec& X, const VectorFieldSpec& Y,
                      const VectorFieldSpec& Z, const Point& p);
TangentVector riemann_vec(const Chart& chart, const std::vector<double>& X,
                          const std::vector<double>& Y, const std::vector<double>& Z,
                          const Point& p);

/// Full-trace divergence div_M(X) = d_a X^a + Gamma^a_ab X^b.
double divergence_full(const Chart& chart, const VectorField& X, const Point& p);
double divergence_full(const Chart& chart, const VectorFieldSpec& X, const Point& p);

// --- geodesics ---

struct GeodesicState {
    Point position;
    std::vector<double> velocity;
};

/// Integrate the geodesic equation with classical fixed-step RK4 from
/// (p, v) for time t. Throws BoundaryExitError when a non-periodic
/// coordinate leaves its interval, reporting the exit time.
GeodesicState geodesic_flow(const Chart& chart, const Point& p, const std::vector<double>& v,
                            double t, double step);

template <class R>
struct DualGeodesicStateT {
    std::vector<DualT<R>> position;
    std::vector<DualT<R>> velocity;
};

using DualGeodesicState = DualGeodesicStateT<double>;

/// Same integrator over first-order duals seeded in external parameters
/// (e.g. leaf parameters), so the flow's parameter Jacobian is advected
/// exactly alongside the trajectory.
DualGeodesicState geodesic_flow_dual(const Chart& chart, std::vector<Dual> pos,
                                     std::vector<Dual> vel, double t, double step);

// --- small vector helpers used across modules ---

inline std::vector<double> vec_add(const std::vector<double>& a, const std::vector<double>& b) {
    std::vector<double> r = a;
    for (std::size_t i = 0; i < r.size(); ++i) r[i] += b[i];
    return r;
}
inline std::vector<double> vec_sub(const std::vector<double>& a, const std::vector<double>& b) {
    std::vector<double> r = a;
    for (std::size_t i = 0; i < r.size(); ++i) r[i] -= b[i];
    return r;
}
inline std::vector<double> vec_scale(double c, const std::vector<double>& a) {
    std::vector<double> r = a;
    for (double& x : r) x *= c;
    return r;
}

// --- template implementations ---

template <class T>
std::vector<T> Chart::seed(const Point& wrapped) const {
    const int m = dim();
    std::vector<T> out;
    out.reserve(m);
    for (int a = 0; a < m; ++a) {
        if constexpr (std::is_same_v<T, double>)
            out.push_back(wrapped.x[a]);
        else
            out.push_back(T::variable(wrapped.x[a], a, m));
    }
    return out;
}

template <class T>
SquareMat<T> Chart::metric_eval(std::span<const T> seeded) const {
    const int m = dim();
    const int seed_dims = seeded.empty() ? 0 : detail::ScalarTraits<T>::dims(seeded[0]);
    SquareMat<T> g(m, detail::ScalarTraits<T>::make(0.0, seed_dims));
    for (int i = 0; i < m; ++i) {
        for (int j = i; j < m; ++j) {
            T v = metric_[i * m + j].eval(seeded, bindings_[i * m + j]);
            g(i, j) = v;
            if (j != i) g(j, i) = v;
        }
    }
    return g;
}

/// Periodic reduction of raw coordinates at any precision.
template <class R>
std::vector<R> wrap_coords(const Chart& chart, std::vector<R> x) {
    for (int a = 0; a < chart.dim(); ++a) {
        const CoordSpec& c = chart.coords()[a];
        if (!c.periodic) continue;
        const R period = static_cast<R>(c.hi) - static_cast<R>(c.lo);
        R r = std::fmod(x[a] - static_cast<R>(c.lo), period);
        if (r < R(0)) r += period;
        x[a] = static_cast<R>(c.lo) + r;
    }
    return x;
}

template <class R>
bool in_domain_coords(const Chart& chart, std::span<const R> x) {
    for (int a = 0; a < chart.dim(); ++a) {
        const CoordSpec& c = chart.coords()[a];
        if (c.periodic) continue;
        if (x[a] < static_cast<R>(c.lo) || x[a] > static_cast<R>(c.hi)) return false;
    }
    return true;
}

/// Christoffel symbols and their derivatives at already-wrapped
/// coordinates, at any precision R. The double-precision
/// Chart::connection_at delegates here.
template <class R>
ConnectionT<R> connection_eval(const Chart& chart, std::span<const R> wrapped) {
    const int m = chart.dim();
    std::vector<Jet2T<R>> seeds;
    seeds.reserve(m);
    for (int a = 0; a < m; ++a) seeds.push_back(Jet2T<R>::variable(wrapped[a], a, m));
    const SquareMat<Jet2T<R>> gj = chart.metric_eval<Jet2T<R>>(seeds);

    SquareMat<R> g(m, R(0));
    Mat g_dbl(m, 0.0);
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j) {
            g(i, j) = gj(i, j).v;
            g_dbl(i, j) = static_cast<double>(gj(i, j).v);
        }
    if (!is_positive_definite(g_dbl))
        throw ScenarioError("metric is not positive definite at a sampled point "
                            "(scenario misconfiguration)");
    const SquareMat<R> ginv = inverse(g);

    auto dg = [&](int a, int i, int j) { return gj(i, j).d[a]; };
    auto d2g = [&](int a, int b, int i, int j) { return gj(i, j).hess(a, b); };

    // d_a g^{kl} = -g^{ki} (d_a g_{ij}) g^{jl}
    std::vector<R> dginv(static_cast<std::size_t>(m) * m * m, R(0));
    for (int a = 0; a < m; ++a)
        for (int k = 0; k < m; ++k)
            for (int l = 0; l < m; ++l) {
                R s = 0;
                for (int i = 0; i < m; ++i)
                    for (int j = 0; j < m; ++j) s += ginv(k, i) * dg(a, i, j) * ginv(j, l);
                dginv[(a * m + k) * m + l] = -s;
            }

    ConnectionT<R> conn;
    conn.m = m;
    conn.gamma.assign(static_cast<std::size_t>(m) * m * m, R(0));
    conn.dgamma.assign(static_cast<std::size_t>(m) * m * m * m, R(0));
    for (int k = 0; k < m; ++k)
        for (int i = 0; i < m; ++i)
            for (int j = i; j < m; ++j) {
                R s = 0;
                for (int l = 0; l < m; ++l)
                    s += ginv(k, l) * (dg(i, j, l) + dg(j, i, l) - dg(l, i, j));
                s *= R(0.5);
                conn.gamma[(k * m + i) * m + j] = s;
                conn.gamma[(k * m + j) * m + i] = s;
                for (int a = 0; a < m; ++a) {
                    R t = 0;
                    for (int l = 0; l < m; ++l) {
                        t += dginv[(a * m + k) * m + l] *
                                 (dg(i, j, l) + dg(j, i, l) - dg(l, i, j)) +
                             ginv(k, l) * (d2g(a, i, j, l) + d2g(a, j, i, l) - d2g(a, l, i, j));
                    }
                    t *= R(0.5);
                    conn.dgamma[((a * m + k) * m + i) * m + j] = t;
                    conn.dgamma[((a * m + k) * m + j) * m + i] = t;
                }
            }
    return conn;
}

namespace detail {

template <class R>
struct FlowState {
    std::vector<DualT<R>> x, v;
};

template <class R>
FlowState<R> flow_deriv(const Chart& chart, const FlowState<R>& s) {
    const int m = chart.dim();
    std::vector<R> pos(m);
    for (int a = 0; a < m; ++a) pos[a] = s.x[a].v;
    const std::vector<R> wrapped = wrap_coords(chart, pos);
    const ConnectionT<R> conn = connection_eval<R>(chart, wrapped);

    const int dims = s.x[0].dims();
    FlowState<R> d;
    d.x = s.v;
    d.v.assign(m, DualT<R>::constant(0, dims));
    for (int k = 0; k < m; ++k) {
        DualT<R> acc = DualT<R>::constant(0, dims);
        for (int i = 0; i < m; ++i)
            for (int j = 0; j < m; ++j) {
                // lift Gamma(x) to the seed duals: dGamma/du = dGamma/dx . dx/du
                DualT<R> gij = DualT<R>::constant(conn.G(k, i, j), dims);
                for (int a = 0; a < m; ++a) {
                    const R dg = conn.dG(a, k, i, j);
                    for (int u = 0; u < dims; ++u) gij.d[u] += dg * s.x[a].d[u];
                }
                acc += gij * s.v[i] * s.v[j];
            }
        d.v[k] = -acc;
    }
    return d;
}

template <class R>
FlowState<R> flow_saxpy(const FlowState<R>& s, R h, const FlowState<R>& d) {
    FlowState<R> r = s;
    for (std::size_t i = 0; i < r.x.size(); ++i) {
        r.x[i] += h * d.x[i];
        r.v[i] += h * d.v[i];
    }
    return r;
}

} // namespace detail

template <class R>
DualGeodesicStateT<R> geodesic_flow_dual_t(const Chart& chart, std::vector<DualT<R>> pos,
                                           std::vector<DualT<R>> vel, double t, double step) {
    if (step <= 0.0) throw MisuseError("geodesic step must be positive");
    detail::FlowState<R> s{std::move(pos), std::move(vel)};
    if (t == 0.0) return {s.x, s.v};
    const int nsteps = std::max(1, static_cast<int>(std::llround(std::abs(t) / step)));
    const R h = static_cast<R>(t) / nsteps;
    for (int n = 0; n < nsteps; ++n) {
        const detail::FlowState<R> k1 = detail::flow_deriv(chart, s);
        const detail::FlowState<R> k2 = detail::flow_deriv(chart, detail::flow_saxpy(s, R(0.5) * h, k1));
        const detail::FlowState<R> k3 = detail::flow_deriv(chart, detail::flow_saxpy(s, R(0.5) * h, k2));
        const detail::FlowState<R> k4 = detail::flow_deriv(chart, detail::flow_saxpy(s, h, k3));
        for (std::size_t i = 0; i < s.x.size(); ++i) {
            s.x[i] += (h / R(6)) * (k1.x[i] + R(2) * (k2.x[i] + k3.x[i]) + k4.x[i]);
            s.v[i] += (h / R(6)) * (k1.v[i] + R(2) * (k2.v[i] + k3.v[i]) + k4.v[i]);
        }
        std::vector<R> xs(s.x.size());
        for (std::size_t a = 0; a < s.x.size(); ++a) xs[a] = s.x[a].v;
        if (!in_domain_coords<R>(chart, xs)) {
            const double t_exit = static_cast<double>(h) * (n + 1);
            throw BoundaryExitError(t_exit, "geodesic left the chart domain at t = " +
                                                std::to_string(t_exit));
        }
    }
    return {s.x, s.v};
}

} // namespace folab
