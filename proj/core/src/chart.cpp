#include "folab/chart.hpp"

#include <cmath>
#include <sstream>

#include "folab/error.hpp"

namespace folab {

namespace {

std::string point_str(const Point& p) {
    std::ostringstream os;
    os << "(";
    for (std::size_t i = 0; i < p.x.size(); ++i) {
        if (i) os << ", ";
        os << p.x[i];
    }
    os << ")";
    return os.str();
}

} // namespace

VectorFieldSpec VectorFieldSpec::parse(const std::vector<std::string>& sources) {
    VectorFieldSpec spec;
    spec.components.reserve(sources.size());
    for (const std::string& s : sources) spec.components.push_back(parse_expression(s));
    return spec;
}

Chart::Chart(std::vector<CoordSpec> coords, std::vector<MetricEntry> metric)
    : coords_(std::move(coords)) {
    const int m = dim();
    if (m <= 0) throw ScenarioError("chart must have at least one coordinate");
    names_.reserve(m);
    for (const CoordSpec& c : coords_) {
        if (c.name.empty()) throw ScenarioError("chart coordinate with empty name");
        if (!(c.lo < c.hi))
            throw ScenarioError("coordinate '" + c.name + "' has an empty domain interval");
        names_.push_back(c.name);
    }

    metric_.assign(static_cast<std::size_t>(m) * m, Expression{});
    std::vector<bool> given(static_cast<std::size_t>(m) * m, false);
    for (MetricEntry& e : metric) {
        if (e.i < 0 || e.i >= m || e.j < 0 || e.j >= m)
            throw ScenarioError("metric entry index out of range");
        const int i = e.i, j = e.j;
        if (given[i * m + j]) {
            if (!(metric_[i * m + j] == e.expr))
                throw ScenarioError("metric entry g_" + std::to_string(i + 1) + "_" +
                                    std::to_string(j + 1) + " given twice with different values");
            continue;
        }
        if (given[j * m + i] && !(metric_[j * m + i] == e.expr))
            throw ScenarioError("metric not symmetric: g_" + std::to_string(i + 1) + "_" +
                                std::to_string(j + 1) + " differs from its mirror entry");
        metric_[i * m + j] = e.expr;
        metric_[j * m + i] = e.expr;
        given[i * m + j] = true;
        given[j * m + i] = true;
    }
    const Expression zero = Expression::number(0.0);
    for (int i = 0; i < m; ++i) {
        if (!given[i * m + i])
            throw ScenarioError("metric diagonal entry g_" + std::to_string(i + 1) + "_" +
                                std::to_string(i + 1) + " is missing");
        for (int j = i + 1; j < m; ++j) {
            if (!given[i * m + j]) {
                metric_[i * m + j] = zero;
                metric_[j * m + i] = zero;
            }
        }
    }

    bindings_.resize(static_cast<std::size_t>(m) * m);
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j) bindings_[i * m + j] = metric_[i * m + j].bind(names_);
}

int Chart::coord_index(const std::string& name) const {
    for (int i = 0; i < dim(); ++i)
        if (names_[i] == name) return i;
    throw ScenarioError("unknown coordinate '" + name + "'");
}

Point Chart::wrap(Point p) const {
    for (int a = 0; a < dim(); ++a) {
        const CoordSpec& c = coords_[a];
        if (!c.periodic) continue;
        const double period = c.period();
        double r = std::fmod(p.x[a] - c.lo, period);
        if (r < 0.0) r += period;
        p.x[a] = c.lo + r;
    }
    return p;
}

bool Chart::in_domain(const Point& p) const {
    for (int a = 0; a < dim(); ++a) {
        const CoordSpec& c = coords_[a];
        if (c.periodic) continue;
        if (p.x[a] < c.lo || p.x[a] > c.hi) return false;
    }
    return true;
}

Mat Chart::metric_at(const Point& p) const {
    const Point w = wrap(p);
    const std::vector<double> seeded = seed<double>(w);
    Mat g = metric_eval<double>(seeded);
    if (!is_positive_definite(g))
        throw ScenarioError("metric is not positive definite at " + point_str(w) +
                            " (scenario misconfiguration)");
    return g;
}

std::vector<Jet2> Chart::metric_jets(const Point& p) const {
    const Point w = wrap(p);
    const int m = dim();
    const std::vector<Jet2> seeded = seed<Jet2>(w);
    SquareMat<Jet2> g = metric_eval<Jet2>(seeded);
    std::vector<Jet2> out;
    out.reserve(static_cast<std::size_t>(m) * m);
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j) out.push_back(g(i, j));
    return out;
}

Connection Chart::connection_at(const Point& p) const {
    const Point w = wrap(p);
    return connection_eval<double>(*this, w.x);
}

RiemannTensor riemann_from_connection(const Connection& c) {
    const int m = c.m;
    RiemannTensor R;
    R.m = m;
    R.comp.assign(static_cast<std::size_t>(m) * m * m * m, 0.0);
    for (int d = 0; d < m; ++d)
        for (int cc = 0; cc < m; ++cc)
            for (int a = 0; a < m; ++a)
                for (int b = 0; b < m; ++b) {
                    double s = c.dG(a, d, b, cc) - c.dG(b, d, a, cc);
                    for (int e = 0; e < m; ++e)
                        s += c.G(d, a, e) * c.G(e, b, cc) - c.G(d, b, e) * c.G(e, a, cc);
                    R.comp[((d * m + cc) * m + a) * m + b] = s;
                }
    return R;
}

RiemannTensor Chart::riemann_at(const Point& p) const { return riemann_from_connection(connection_at(p)); }

double Chart::inner(const Point& p, const std::vector<double>& u,
                    const std::vector<double>& v) const {
    const Mat g = metric_at(p);
    double s = 0.0;
    for (int i = 0; i < dim(); ++i)
        for (int j = 0; j < dim(); ++j) s += g(i, j) * u[i] * v[j];
    return s;
}

double Chart::norm(const TangentVector& t) const {
    const double q = inner(t.base, t.v, t.v);
    return q <= 0.0 ? 0.0 : std::sqrt(q);
}

// --- VectorField ---

VectorField VectorField::from_spec(const Chart& chart, const VectorFieldSpec& spec) {
    const int m = chart.dim();
    if (static_cast<int>(spec.components.size()) != m)
        throw ScenarioError("vector field has " + std::to_string(spec.components.size()) +
                            " components on a chart of dimension " + std::to_string(m));
    std::vector<std::vector<int>> binds;
    binds.reserve(m);
    for (const Expression& e : spec.components) binds.push_back(e.bind(chart.coord_names()));

    // The lambda owns copies of everything it touches; fields outlive the
    // expressions and charts they were built from.
    auto comps = spec.components;
    Chart local = chart;
    VectorField f;
    f.dim_ = m;
    f.fn_ = [comps = std::move(comps), binds = std::move(binds),
             local = std::move(local)](const Point& p) {
        const Point w = local.wrap(p);
        const std::vector<Jet2> seeded = local.seed<Jet2>(w);
        std::vector<Jet2> out;
        out.reserve(comps.size());
        for (std::size_t k = 0; k < comps.size(); ++k)
            out.push_back(comps[k].eval<Jet2>(seeded, binds[k]));
        return out;
    };
    return f;
}

VectorField VectorField::from_fn(int dim, std::function<std::vector<Jet2>(const Point&)> fn) {
    VectorField f;
    f.dim_ = dim;
    f.fn_ = std::move(fn);
    return f;
}

std::vector<Dual> VectorField::duals(const Point& p) const {
    const std::vector<Jet2> js = jets(p);
    std::vector<Dual> out;
    out.reserve(js.size());
    for (const Jet2& j : js) out.push_back(j.dual());
    return out;
}

std::vector<double> VectorField::values(const Point& p) const {
    const std::vector<Jet2> js = jets(p);
    std::vector<double> out;
    out.reserve(js.size());
    for (const Jet2& j : js) out.push_back(j.v);
    return out;
}

// --- field operators ---

TangentVector covariant_derivative(const Chart& chart, const VectorField& X, const VectorField& Y,
                                   const Point& p) {
    const int m = chart.dim();
    const Connection conn = chart.connection_at(p);
    const std::vector<double> xv = X.values(p);
    const std::vector<Dual> yd = Y.duals(p);
    std::vector<double> out(m, 0.0);
    for (int k = 0; k < m; ++k) {
        double s = 0.0;
        for (int a = 0; a < m; ++a) {
            double t = yd[k].d[a];
            for (int b = 0; b < m; ++b) t += conn.G(k, a, b) * yd[b].v;
            s += xv[a] * t;
        }
        out[k] = s;
    }
    return {p, std::move(out)};
}

TangentVector covariant_derivative(const Chart& chart, const VectorFieldSpec& X,
                                   const VectorFieldSpec& Y, const Point& p) {
    return covariant_derivative(chart, VectorField::from_spec(chart, X),
                                VectorField::from_spec(chart, Y), p);
}

TangentVector lie_bracket(const Chart& chart, const VectorField& X, const VectorField& Y,
                          const Point& p) {
    const int m = chart.dim();
    const std::vector<Dual> xd = X.duals(p);
    const std::vector<Dual> yd = Y.duals(p);
    std::vector<double> out(m, 0.0);
    for (int k = 0; k < m; ++k) {
        double s = 0.0;
        for (int a = 0; a < m; ++a) s += xd[a].v * yd[k].d[a] - yd[a].v * xd[k].d[a];
        out[k] = s;
    }
    return {p, std::move(out)};
}

TangentVector lie_bracket(const Chart& chart, const VectorFieldSpec& X, const VectorFieldSpec& Y,
                          const Point& p) {
    return lie_bracket(chart, VectorField::from_spec(chart, X), VectorField::from_spec(chart, Y),
                       p);
}

TangentVector riemann_vec(const Chart& chart, const std::vector<double>& X,
                          const std::vector<double>& Y, const std::vector<double>& Z,
                          const Point& p) {
    const int m = chart.dim();
    const RiemannTensor R = chart.riemann_at(p);
    std::vector<double> out(m, 0.0);
    for (int d = 0; d < m; ++d) {
        double s = 0.0;
        for (int c = 0; c < m; ++c)
            for (int a = 0; a < m; ++a)
                for (int b = 0; b < m; ++b) s += R.R(d, c, a, b) * X[a] * Y[b] * Z[c];
        out[d] = s;
    }
    return {p, std::move(out)};
}

TangentVector riemann(const Chart& chart, const VectorFieldSpec& X, const VectorFieldSpec& Y,
                      const VectorFieldSpec& Z, const Point& p) {
    return riemann_vec(chart, VectorField::from_spec(chart, X).values(p),
                       VectorField::from_spec(chart, Y).values(p),
                       VectorField::from_spec(chart, Z).values(p), p);
}

double divergence_full(const Chart& chart, const VectorField& X, const Point& p) {
    const int m = chart.dim();
    const Connection conn = chart.connection_at(p);
    const std::vector<Dual> xd = X.duals(p);
    double s = 0.0;
    for (int a = 0; a < m; ++a) {
        s += xd[a].d[a];
        for (int b = 0; b < m; ++b) s += conn.G(a, a, b) * xd[b].v;
    }
    return s;
}

double divergence_full(const Chart& chart, const VectorFieldSpec& X, const Point& p) {
    return divergence_full(chart, VectorField::from_spec(chart, X), p);
}

// --- geodesics ---

namespace {

struct State {
    std::vector<double> x, v;
};

State deriv(const Chart& chart, const State& s) {
    const int m = chart.dim();
    const Connection conn = chart.connection_at({s.x});
    State d;
    d.x = s.v;
    d.v.assign(m, 0.0);
    for (int k = 0; k < m; ++k) {
        double acc = 0.0;
        for (int i = 0; i < m; ++i)
            for (int j = 0; j < m; ++j) acc += conn.G(k, i, j) * s.v[i] * s.v[j];
        d.v[k] = -acc;
    }
    return d;
}

State saxpy(const State& s, double h, const State& d) {
    State r = s;
    for (std::size_t i = 0; i < r.x.size(); ++i) {
        r.x[i] += h * d.x[i];
        r.v[i] += h * d.v[i];
    }
    return r;
}

} // namespace

GeodesicState geodesic_flow(const Chart& chart, const Point& p, const std::vector<double>& v,
                            double t, double step) {
    if (step <= 0.0) throw MisuseError("geodesic step must be positive");
    State s{p.x, v};
    if (t == 0.0) return {Point{s.x}, s.v};
    const int nsteps = std::max(1, static_cast<int>(std::llround(std::abs(t) / step)));
    const double h = t / nsteps;
    for (int n = 0; n < nsteps; ++n) {
        const State k1 = deriv(chart, s);
        const State k2 = deriv(chart, saxpy(s, 0.5 * h, k1));
        const State k3 = deriv(chart, saxpy(s, 0.5 * h, k2));
        const State k4 = deriv(chart, saxpy(s, h, k3));
        for (std::size_t i = 0; i < s.x.size(); ++i) {
            s.x[i] += h / 6.0 * (k1.x[i] + 2.0 * (k2.x[i] + k3.x[i]) + k4.x[i]);
            s.v[i] += h / 6.0 * (k1.v[i] + 2.0 * (k2.v[i] + k3.v[i]) + k4.v[i]);
        }
        if (!chart.in_domain({s.x})) {
            const double t_exit = h * (n + 1);
            throw BoundaryExitError(t_exit, "geodesic left the chart domain at t = " +
                                                std::to_string(t_exit));
        }
    }
    return {Point{s.x}, s.v};
}

DualGeodesicState geodesic_flow_dual(const Chart& chart, std::vector<Dual> pos,
                                     std::vector<Dual> vel, double t, double step) {
    return geodesic_flow_dual_t<double>(chart, std::move(pos), std::move(vel), t, step);
}

} // namespace folab
