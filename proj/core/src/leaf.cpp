#include "folab/leaf.hpp"

#include <cmath>

#include "folab/operators.hpp"

namespace folab {

Jet2 bump_jet(const Jet2& x, double lo, double hi) {
    const double scale = 2.0 / (hi - lo);
    Jet2 s = (x - lo) * scale - 1.0;
    Jet2 t = 1.0 - s * s;
    // exp(1 - 1/t) underflows to an exact zero well before t reaches 0;
    // cutting early keeps 0 * (1/t^2)-type products finite.
    if (t.v < 1.4e-3) return Jet2::constant(0.0, x.dims());
    return exp(1.0 - inv(t));
}

VectorField VariationField::bind(const Chart& chart) const {
    VectorField base = VectorField::from_spec(chart, spec);
    if (windows.empty()) return base;
    auto windows_copy = windows;
    Chart local = chart;
    const int m = chart.dim();
    return VectorField::from_fn(m, [base, windows_copy, local, m](const Point& p) {
        const Point w = local.wrap(p);
        std::vector<Jet2> out = base.jets(w);
        const std::vector<Jet2> seeds = local.seed<Jet2>(w);
        Jet2 factor = Jet2::constant(1.0, m);
        for (const BumpWindow& win : windows_copy)
            factor = factor * bump_jet(seeds[win.coord], win.lo, win.hi);
        for (Jet2& c : out) c = c * factor;
        return out;
    });
}

namespace {

struct Grid {
    std::vector<std::vector<double>> nodes;    // per axis
    std::vector<std::vector<double>> weights;  // per axis
    int total = 1;
};

Grid make_grid(const LeafPatch& leaf, int resolution_override) {
    Grid g;
    for (const LeafParamSpec& a : leaf.params) {
        const int n = resolution_override > 0 ? resolution_override : a.resolution;
        if (n < 2) throw ScenarioError("leaf grid resolution must be at least 2");
        const double h = (a.hi - a.lo) / n;
        std::vector<double> nodes, weights;
        if (a.periodic) {
            for (int i = 0; i < n; ++i) {
                nodes.push_back(a.lo + i * h);
                weights.push_back(h);
            }
        } else {
            for (int i = 0; i <= n; ++i) {
                nodes.push_back(a.lo + i * h);
                weights.push_back(i == 0 || i == n ? 0.5 * h : h);
            }
        }
        g.total *= static_cast<int>(nodes.size());
        g.nodes.push_back(std::move(nodes));
        g.weights.push_back(std::move(weights));
    }
    return g;
}

struct EmbeddedNode {
    Point position;                        // phi(u)
    std::vector<std::vector<double>> jac;  // d phi^k / d u_a, [k][a]
    double weight = 0.0;
};

/// Walk the tensor grid in row-major order, evaluating the embedding and
/// its parameter Jacobian with dual seeds.
template <class Fn>
void for_each_node(const Chart& chart, const LeafPatch& leaf, const Grid& grid, Fn&& fn) {
    const int k = leaf.param_dim();
    const int m = chart.dim();
    if (static_cast<int>(leaf.embedding.size()) != m)
        throw ScenarioError("leaf embedding must supply one expression per chart coordinate");

    std::vector<std::string> names;
    for (const LeafParamSpec& a : leaf.params) names.push_back(a.name);
    std::vector<std::vector<int>> binds;
    for (const Expression& e : leaf.embedding) binds.push_back(e.bind(names));

    std::vector<int> idx(k, 0);
    for (;;) {
        std::vector<Dual> seeds;
        double weight = 1.0;
        for (int a = 0; a < k; ++a) {
            seeds.push_back(Dual::variable(grid.nodes[a][idx[a]], a, k));
            weight *= grid.weights[a][idx[a]];
        }
        EmbeddedNode node;
        node.weight = weight;
        node.position.x.resize(m);
        node.jac.assign(m, std::vector<double>(k, 0.0));
        for (int c = 0; c < m; ++c) {
            const Dual val = leaf.embedding[c].eval<Dual>(seeds, binds[c]);
            node.position.x[c] = val.v;
            for (int a = 0; a < k; ++a) node.jac[c][a] = val.d[a];
        }
        fn(node);

        int axis = k - 1;
        for (; axis >= 0; --axis) {
            if (++idx[axis] < static_cast<int>(grid.nodes[axis].size())) break;
            idx[axis] = 0;
        }
        if (axis < 0) break;
    }
}

double area_element(const Chart& chart, const EmbeddedNode& node) {
    const int m = chart.dim();
    const int k = static_cast<int>(node.jac[0].size());
    const Mat g = chart.metric_at(node.position);
    Mat G(k, 0.0);
    for (int a = 0; a < k; ++a)
        for (int b = 0; b < k; ++b) {
            double s = 0.0;
            for (int i = 0; i < m; ++i)
                for (int j = 0; j < m; ++j) s += node.jac[i][a] * g(i, j) * node.jac[j][b];
            G(a, b) = s;
        }
    const double det = determinant(G);
    if (det <= 0.0)
        throw ScenarioError("leaf embedding is rank-deficient at a quadrature node");
    return std::sqrt(det);
}

} // namespace

void validate_patch(const Chart& chart, const FoliationSpec& fol, const LeafPatch& leaf) {
    LeafPatch coarse = leaf;
    for (LeafParamSpec& a : coarse.params) a.resolution = std::min(a.resolution, 8);
    const Grid grid = make_grid(coarse, 0);
    const std::vector<VectorField> spanning = bind_spanning(chart, fol);
    for_each_node(chart, coarse, grid, [&](const EmbeddedNode& node) {
        area_element(chart, node);  // throws on rank deficiency
        const Frame<double> F = adapted_frame<double>(chart, spanning, node.position);
        for (std::size_t a = 0; a < node.jac[0].size(); ++a) {
            std::vector<double> partial(chart.dim());
            for (int c = 0; c < chart.dim(); ++c) partial[c] = node.jac[c][a];
            const std::vector<double> np = normal_part(F, partial);
            if (std::sqrt(std::max(0.0, metric_inner(F.g, np, np))) > 1e-8)
                throw ScenarioError("leaf patch '" + leaf.name +
                                    "' is not tangent to the foliation at a sampled node");
        }
    });
}

double leaf_volume(const Chart& chart, const LeafPatch& leaf, int resolution_override) {
    const Grid grid = make_grid(leaf, resolution_override);
    std::vector<double> terms;
    terms.reserve(grid.total);
    for_each_node(chart, leaf, grid, [&](const EmbeddedNode& node) {
        terms.push_back(node.weight * area_element(chart, node));
    });
    return pairwise_sum(terms);
}

double integrate_leaf(const Chart& chart, const LeafPatch& leaf,
                      const std::function<double(const Point&)>& scalar,
                      int resolution_override) {
    const Grid grid = make_grid(leaf, resolution_override);
    std::vector<double> terms;
    terms.reserve(grid.total);
    for_each_node(chart, leaf, grid, [&](const EmbeddedNode& node) {
        terms.push_back(node.weight * area_element(chart, node) * scalar(node.position));
    });
    return pairwise_sum(terms);
}

StabilityReport stability_report(const Chart& chart, const FoliationSpec& fol,
                                 const LeafPatch& leaf, const VectorField& V,
                                 int resolution_override, double tol) {
    StabilityReport rep;

    // hypothesis probes at a coarse subset of the patch
    {
        LeafPatch coarse = leaf;
        for (LeafParamSpec& a : coarse.params) a.resolution = 4;
        const Grid grid = make_grid(coarse, 0);
        const std::vector<VectorField> spanning = bind_spanning(chart, fol);
        double worst_h = 0.0, worst_frob = 0.0, worst_vtan = 0.0;
        for_each_node(chart, coarse, grid, [&](const EmbeddedNode& node) {
            worst_h = std::max(worst_h, chart.norm(mean_curvature(chart, fol, node.position)));
            worst_frob =
                std::max(worst_frob, frobenius_residual_perp(chart, fol, node.position));
            const Frame<double> F = adapted_frame<double>(chart, spanning, node.position);
            const std::vector<double> vt = tangent_part(F, V.values(node.position));
            worst_vtan =
                std::max(worst_vtan, std::sqrt(std::max(0.0, metric_inner(F.g, vt, vt))));
        });
        rep.hypothesis_minimal = worst_h < 1e-8;
        rep.hypothesis_integrable_perp = worst_frob < 1e-8;
        if (!rep.hypothesis_minimal)
            rep.warnings.push_back("foliation is not minimal on this patch (max |H| = " +
                                   std::to_string(worst_h) + ")");
        if (!rep.hypothesis_integrable_perp)
            rep.warnings.push_back("normal bundle is not integrable on this patch (residual " +
                                   std::to_string(worst_frob) + ")");
        if (worst_vtan > 1e-8)
            rep.warnings.push_back(
                "variation field has a tangential component (projected internally)");
    }

    rep.I_f = integrate_leaf(
        chart, leaf, [&](const Point& p) { return f_vw(chart, fol, V, V, p); },
        resolution_override);
    rep.I_alpha = integrate_leaf(
        chart, leaf, [&](const Point& p) { return alpha_inner(chart, fol, V, V, p); },
        resolution_override);
    rep.residual = std::abs(rep.I_f - rep.I_alpha);
    rep.stable = rep.I_f >= -tol;
    return rep;
}

namespace {

// The deformed volumes feed a second difference that divides by t_step^2,
// which amplifies any rounding of the per-node area elements by ~1e6. The
// whole deformation pipeline therefore runs in long double: the extra
// mantissa bits push the noise floor well below the O(t^2) stencil error
// the convergence checks measure.
using Real = long double;
using RDual = DualT<Real>;

/// Volume of the patch deformed along the geodesic flow for time t.
Real deformed_volume(const Chart& chart, const LeafPatch& leaf, const VectorField& V,
                     const Grid& grid, double t, double geodesic_step) {
    const int m = chart.dim();
    std::vector<Real> terms;
    terms.reserve(grid.total);
    for_each_node(chart, leaf, grid, [&](const EmbeddedNode& node) {
        const int k = static_cast<int>(node.jac[0].size());
        // seed position and velocity with the parameter Jacobian
        std::vector<RDual> pos, vel;
        pos.reserve(m);
        vel.reserve(m);
        const std::vector<Jet2> vj = V.jets(node.position);
        for (int c = 0; c < m; ++c) {
            RDual d = RDual::constant(static_cast<Real>(node.position.x[c]), k);
            for (int a = 0; a < k; ++a) d.d[a] = static_cast<Real>(node.jac[c][a]);
            pos.push_back(std::move(d));
        }
        for (int c = 0; c < m; ++c) {
            RDual d = RDual::constant(static_cast<Real>(vj[c].v), k);
            for (int a = 0; a < k; ++a) {
                Real chain = 0;
                for (int b = 0; b < m; ++b)
                    chain += static_cast<Real>(vj[c].d[b]) * static_cast<Real>(node.jac[b][a]);
                d.d[a] = chain;
            }
            vel.push_back(std::move(d));
        }

        std::vector<RDual> flowed = std::move(pos);
        if (t != 0.0) {
            DualGeodesicStateT<Real> s =
                geodesic_flow_dual_t<Real>(chart, flowed, vel, t, geodesic_step);
            flowed = std::move(s.position);
        }

        // pullback area element at the flowed point, still in long double
        std::vector<Real> coords(m);
        for (int c = 0; c < m; ++c) coords[c] = flowed[c].v;
        const std::vector<Real> wrapped = wrap_coords(chart, coords);
        const SquareMat<Real> g = chart.metric_eval<Real>(wrapped);
        SquareMat<Real> G(k, Real(0));
        for (int a = 0; a < k; ++a)
            for (int b = 0; b < k; ++b) {
                Real sacc = 0;
                for (int i = 0; i < m; ++i)
                    for (int j = 0; j < m; ++j)
                        sacc += flowed[i].d[a] * g(i, j) * flowed[j].d[b];
                G(a, b) = sacc;
            }
        const Real det = determinant(G);
        if (det <= Real(0))
            throw ScenarioError("deformed leaf became rank-deficient at a quadrature node");
        terms.push_back(static_cast<Real>(node.weight) * std::sqrt(det));
    });
    return pairwise_sum(std::span<const Real>(terms));
}

} // namespace

SecondVariationReport second_variation_direct(const Chart& chart, const FoliationSpec& fol,
                                              const LeafPatch& leaf, const VectorField& V,
                                              double t_step, int resolution_override,
                                              double geodesic_step) {
    if (t_step <= 0.0) throw MisuseError("second variation requires a positive t_step");
    const Grid grid = make_grid(leaf, resolution_override);

    const Real v_plus = deformed_volume(chart, leaf, V, grid, t_step, geodesic_step);
    const Real v_zero = deformed_volume(chart, leaf, V, grid, 0.0, geodesic_step);
    const Real v_minus = deformed_volume(chart, leaf, V, grid, -t_step, geodesic_step);

    SecondVariationReport rep;
    rep.d2vol = static_cast<double>((v_plus - Real(2) * v_zero + v_minus) /
                                    (static_cast<Real>(t_step) * static_cast<Real>(t_step)));
    rep.I_f = integrate_leaf(
        chart, leaf, [&](const Point& p) { return f_vw(chart, fol, V, V, p); },
        resolution_override);
    rep.rel_error = std::abs(rep.d2vol - rep.I_f) / std::max(1.0, std::abs(rep.I_f));
    return rep;
}

} // namespace folab
