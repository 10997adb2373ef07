#include "doctest.h"

#include <cmath>

#include "folab/operators.hpp"
#include "folab/sampling.hpp"
#include "test_support.hpp"

using namespace folab;
using namespace folab::testing;

namespace {

Point pt(std::vector<double> x) { return {std::move(x)}; }

FoliationSpec fol_xy() { return {{field3("1", "0", "0"), field3("0", "1", "0")}}; }
FoliationSpec fol_spheres() { return {{field3("0", "1", "0"), field3("0", "0", "1")}}; }

const char* kExpMinusF = "exp(-(sin(x)*cos(y)))";  // e^{-f} for the warp f = sin(x)cos(y)

Point random_torus_point(SplitMix64& rng) {
    return pt({rng.uniform(0, kTwoPi), rng.uniform(0, kTwoPi), rng.uniform(0, kTwoPi)});
}

} // namespace

TEST_CASE("alpha closed forms") {
    Chart torus = chart_torus3();
    // V = sin(x) d_z, X = d_x -> -cos(x) d_z
    const double x = 0.8;
    TangentVector a = alpha(torus, fol_xy(), field3("0", "0", "sin(x)"), field3("1", "0", "0"),
                            pt({x, 0.3, 0.1}));
    CHECK(a.v[0] == doctest::Approx(0.0));
    CHECK(a.v[1] == doctest::Approx(0.0));
    CHECK(a.v[2] == doctest::Approx(-std::cos(x)).epsilon(1e-12));

    // constant V against a coordinate field
    TangentVector z = alpha(torus, fol_xy(), field3("0", "0", "1"), field3("1", "0", "0"),
                            pt({x, 0.3, 0.1}));
    for (double v : z.v) CHECK(std::abs(v) < 1e-14);

    // warped chart: V = e^{-f} d_z, X = d_x -> f_x e^{-f} d_z
    Chart warped = chart_warped();
    const double wx = 0.7, wy = -0.4;
    const double f = std::sin(wx) * std::cos(wy);
    const double f_x = std::cos(wx) * std::cos(wy);
    TangentVector aw = alpha(warped, fol_xy(), field3("0", "0", kExpMinusF),
                             field3("1", "0", "0"), pt({wx, wy, 0.5}));
    CHECK(aw.v[2] == doctest::Approx(f_x * std::exp(-f)).epsilon(1e-11));
}

TEST_CASE("alpha_transpose closed form and adjoint property") {
    Chart torus = chart_torus3();
    const double x = 1.1;
    TangentVector t = alpha_transpose(torus, fol_xy(), field3("0", "0", "sin(x)"),
                                      field3("0", "0", "sin(x)"), pt({x, 0.0, 0.0}));
    CHECK(t.v[0] == doctest::Approx(-std::sin(x) * std::cos(x)).epsilon(1e-12));
    CHECK(t.v[1] == doctest::Approx(0.0));
    CHECK(t.v[2] == doctest::Approx(0.0));

    // <alpha_V^t(W), X> == <W, alpha_V(X_tan)> for random fields
    Chart warped = chart_warped(0.3);
    SplitMix64 rng(61);
    const std::vector<std::string> cs = {"x", "y", "z"};
    for (int trial = 0; trial < 10; ++trial) {
        VectorFieldSpec V = random_trig_field(rng, cs);
        VectorFieldSpec W = random_trig_field(rng, cs);
        VectorFieldSpec X = random_trig_field(rng, cs);
        Point p = random_torus_point(rng);
        TangentVector at = alpha_transpose(warped, fol_xy(), V, W, p);
        TangentVector ax = alpha(warped, fol_xy(), V, X, p);
        const VectorField Wf = VectorField::from_spec(warped, W);
        const VectorField Xf = VectorField::from_spec(warped, X);
        const double lhs = warped.inner(p, at.v, Xf.values(warped.wrap(p)));
        const std::vector<double> w_vals = Wf.values(warped.wrap(p));
        const double rhs = warped.inner(p, w_vals, ax.v);
        CHECK(std::abs(lhs - rhs) < 1e-9);
    }
}

TEST_CASE("nabla_perp closed forms and Gauss-Weingarten split") {
    Chart torus = chart_torus3();
    const double x = 0.4;
    TangentVector n = nabla_perp(torus, fol_xy(), field3("0", "0", "sin(x)"),
                                 field3("1", "0", "0"), pt({x, 0.0, 0.0}));
    CHECK(n.v[2] == doctest::Approx(std::cos(x)).epsilon(1e-12));

    Chart warped = chart_warped();
    TangentVector nw = nabla_perp(warped, fol_xy(), field3("0", "0", kExpMinusF),
                                  field3("0.7", "0.3", "0"), pt({0.7, -0.4, 0.5}));
    for (double v : nw.v) CHECK(std::abs(v) < 1e-12);

    // nabla_X V = -A_V(X) + nabla_perp_X V for normal V, tangent X
    SplitMix64 rng(71);
    for (int trial = 0; trial < 10; ++trial) {
        const double a = rng.symmetric(), b = rng.symmetric();
        VectorFieldSpec V{{parse_expression("0"), parse_expression("0"),
                           random_trig_scalar(rng, {"x", "y", "z"})}};
        VectorFieldSpec X{{parse_expression(std::to_string(a) + "+sin(y)"),
                           parse_expression(std::to_string(b) + "*cos(x)"),
                           parse_expression("0")}};
        Point p = random_torus_point(rng);
        TangentVector full = covariant_derivative(warped, X, V, p);
        TangentVector shape = shape_operator(warped, fol_xy(), V, X, p);
        TangentVector norm_conn = nabla_perp(warped, fol_xy(), V, X, p);
        for (int k = 0; k < 3; ++k)
            CHECK(std::abs(full.v[k] - (-shape.v[k] + norm_conn.v[k])) < 1e-9);
    }
}

TEST_CASE("curvature_trace: flat, warped closed form, frame independence") {
    Chart torus = chart_torus3();
    TangentVector z = curvature_trace(torus, fol_xy(), field3("0", "0", "sin(x)"),
                                      pt({0.5, 0.2, 0.9}));
    for (double v : z.v) CHECK(std::abs(v) < 1e-13);

    Chart warped = chart_warped();
    SplitMix64 rng(81);
    for (int trial = 0; trial < 10; ++trial) {
        const double x = rng.uniform(0, kTwoPi), y = rng.uniform(0, kTwoPi);
        Point p = pt({x, y, 0.3});
        TangentVector rv = curvature_trace(warped, fol_xy(), field3("0", "0", kExpMinusF), p);
        const VectorField Vf = VectorField::from_spec(warped, field3("0", "0", kExpMinusF));
        const double got = warped.inner(p, rv.v, Vf.values(p));
        // <R(V),V> = laplacian(f) + |grad f|^2 for f = sin(x)cos(y)
        const double lap = -2.0 * std::sin(x) * std::cos(y);
        const double grad2 = std::pow(std::cos(x) * std::cos(y), 2) +
                             std::pow(std::sin(x) * std::sin(y), 2);
        CHECK(std::abs(got - (lap + grad2)) < 1e-10);
    }

    // smooth invertible recombination of the spanning fields
    FoliationSpec mixed{{field3("1+0.3*sin(y)", "0.2*cos(x)", "0"),
                         field3("0.1*sin(x)", "1+0.2*cos(y)", "0")}};
    for (int trial = 0; trial < 10; ++trial) {
        Point p = random_torus_point(rng);
        TangentVector r1 = curvature_trace(warped, fol_xy(), field3("0", "0", kExpMinusF), p);
        TangentVector r2 = curvature_trace(warped, mixed, field3("0", "0", kExpMinusF), p);
        for (int k = 0; k < 3; ++k) CHECK(std::abs(r1.v[k] - r2.v[k]) < 1e-8);
    }
}

TEST_CASE("a_hat: vanishing, sphere closed form, self-adjointness") {
    Chart torus = chart_torus3();
    TangentVector z = a_hat(torus, fol_xy(), field3("0", "0", "sin(x)"), pt({0.3, 0.1, 0.2}));
    for (double v : z.v) CHECK(std::abs(v) < 1e-13);

    Chart annulus = chart_spherical_annulus();
    const double r = 1.5;
    TangentVector av = a_hat(annulus, fol_spheres(), field3("1", "0", "0"), pt({r, 1.2, 0.3}));
    CHECK(av.v[0] == doctest::Approx(2.0 / (r * r)).epsilon(1e-10));
    CHECK(std::abs(av.v[1]) < 1e-12);
    CHECK(std::abs(av.v[2]) < 1e-12);

    // <A-hat(V), W> = <A-hat(W), V>
    SplitMix64 rng(91);
    const std::vector<std::string> cs = {"r", "theta", "phi"};
    for (int trial = 0; trial < 10; ++trial) {
        VectorFieldSpec V = random_trig_field(rng, cs);
        VectorFieldSpec W = random_trig_field(rng, cs);
        Point p = pt({rng.uniform(1.1, 1.9), rng.uniform(0.3, 2.8), rng.uniform(0, kTwoPi)});
        TangentVector av1 = a_hat(annulus, fol_spheres(), V, p);
        TangentVector av2 = a_hat(annulus, fol_spheres(), W, p);
        const VectorField Vf = VectorField::from_spec(annulus, V);
        const VectorField Wf = VectorField::from_spec(annulus, W);
        // pair against the projected fields (A-hat lives on the normal bundle)
        const std::vector<VectorField> span_b = bind_spanning(annulus, fol_spheres());
        Frame<double> F = adapted_frame<double>(annulus, span_b, p);
        const std::vector<double> wp = normal_part(F, Wf.values(annulus.wrap(p)));
        const std::vector<double> vp = normal_part(F, Vf.values(annulus.wrap(p)));
        const double lhs = annulus.inner(p, av1.v, wp);
        const double rhs = annulus.inner(p, av2.v, vp);
        CHECK(std::abs(lhs - rhs) < 1e-9);
    }
}

TEST_CASE("a_hat pairing is consistent with the shape-operator trace product") {
    // <A-hat(V), W> = sum_i <A_V(e_i), A_W(e_i)>
    Chart annulus = chart_spherical_annulus();
    FoliationSpec fol = fol_spheres();
    SplitMix64 rng(505);
    const std::vector<std::string> cs = {"r", "theta", "phi"};
    for (int trial = 0; trial < 10; ++trial) {
        VectorFieldSpec Vs = random_trig_field(rng, cs);
        VectorFieldSpec Ws = random_trig_field(rng, cs);
        const VectorField V = VectorField::from_spec(annulus, Vs);
        const VectorField W = VectorField::from_spec(annulus, Ws);
        Point p = pt({rng.uniform(1.1, 1.9), rng.uniform(0.3, 2.8), rng.uniform(0, kTwoPi)});

        TangentVector av = a_hat(annulus, fol, V, p);
        const std::vector<VectorField> span_b = bind_spanning(annulus, fol);
        const Frame<Dual> Fd = adapted_frame<Dual>(annulus, span_b, p);
        const Frame<double> F = frame_values(Fd);
        const Point w = annulus.wrap(p);
        const std::vector<Dual> v_perp = normal_part(Fd, V.duals(w));
        const std::vector<Dual> w_perp = normal_part(Fd, W.duals(w));
        const Connection conn = annulus.connection_at(w);

        double trace_product = 0.0;
        for (int i = 0; i < F.n; ++i) {
            std::vector<double> av_i = tangent_part(F, cov_deriv_val(conn, F.e[i], v_perp));
            std::vector<double> aw_i = tangent_part(F, cov_deriv_val(conn, F.e[i], w_perp));
            trace_product += metric_inner(F.g, av_i, aw_i);  // signs cancel in the product
        }
        std::vector<double> wp(w_perp.size());
        for (std::size_t k = 0; k < w_perp.size(); ++k) wp[k] = w_perp[k].v;
        CHECK(std::abs(annulus.inner(w, av.v, wp) - trace_product) < 1e-9);
    }
}

TEST_CASE("scalar traces are invariant under smooth recombination of the span") {
    Chart warped = chart_warped(0.3);
    FoliationSpec plain = fol_xy();
    FoliationSpec mixed{{field3("1+0.3*sin(y)", "0.2*cos(x)", "0"),
                         field3("0.1*sin(x)", "1+0.2*cos(y)", "0")}};
    SplitMix64 rng(515);
    const std::vector<std::string> cs = {"x", "y", "z"};
    for (int trial = 0; trial < 8; ++trial) {
        VectorFieldSpec V = random_trig_field(rng, cs);
        VectorFieldSpec W = random_trig_field(rng, cs);
        VectorFieldSpec X = random_trig_field(rng, cs);
        Point p = random_torus_point(rng);
        CHECK(std::abs(f_vw(warped, plain, V, W, p) - f_vw(warped, mixed, V, W, p)) < 1e-7);
        CHECK(std::abs(div_leaf(warped, plain, X, p) - div_leaf(warped, mixed, X, p)) < 1e-7);
        const VectorField Vf = VectorField::from_spec(warped, V);
        const VectorField Wf = VectorField::from_spec(warped, W);
        CHECK(std::abs(alpha_inner(warped, plain, Vf, Wf, p) -
                       alpha_inner(warped, mixed, Vf, Wf, p)) < 1e-7);
    }
}

TEST_CASE("nabla_perp_squared: flat closed forms and frame invariance") {
    Chart torus = chart_torus3();
    const double x = 0.9;
    TangentVector n = nabla_perp_squared(torus, fol_xy(), field3("0", "0", "sin(x)"),
                                         pt({x, 0.0, 0.0}));
    CHECK(n.v[2] == doctest::Approx(-std::sin(x)).epsilon(1e-11));

    TangentVector c = nabla_perp_squared(torus, fol_xy(), field3("0", "0", "1"),
                                         pt({x, 0.0, 0.0}));
    for (double v : c.v) CHECK(std::abs(v) < 1e-13);

    Chart warped = chart_warped(0.3);
    FoliationSpec mixed{{field3("1+0.3*sin(y)", "0.2*cos(x)", "0"),
                         field3("0.1*sin(x)", "1+0.2*cos(y)", "0")}};
    SplitMix64 rng(101);
    const std::vector<std::string> cs = {"x", "y", "z"};
    for (int trial = 0; trial < 10; ++trial) {
        VectorFieldSpec V = random_trig_field(rng, cs);
        Point p = random_torus_point(rng);
        TangentVector n1 = nabla_perp_squared(warped, fol_xy(), V, p);
        TangentVector n2 = nabla_perp_squared(warped, mixed, V, p);
        for (int k = 0; k < 3; ++k) CHECK(std::abs(n1.v[k] - n2.v[k]) < 1e-7);
    }
}

TEST_CASE("jacobi operator: flat closed forms") {
    Chart torus = chart_torus3();
    const double x = 1.3;
    TangentVector j = jacobi(torus, fol_xy(), field3("0", "0", "sin(x)"), pt({x, 0.2, 0.4}));
    CHECK(j.v[2] == doctest::Approx(std::sin(x)).epsilon(1e-11));

    TangentVector j0 = jacobi(torus, fol_xy(), field3("0", "0", "1"), pt({x, 0.2, 0.4}));
    for (double v : j0.v) CHECK(std::abs(v) < 1e-13);
}

TEST_CASE("jacobi operator annihilates the isometry generator on the warped chart") {
    // g = dx^2 + dy^2 + e^{2*0.3*sin(x)} dz^2 is z-independent, so d_z is a
    // normal field with J(d_z) = 0.
    std::vector<CoordSpec> cs = {periodic_coord("x", 0, kTwoPi), periodic_coord("y", 0, kTwoPi),
                                 periodic_coord("z", 0, kTwoPi)};
    std::vector<MetricEntry> g = {{0, 0, parse_expression("1")},
                                  {1, 1, parse_expression("1")},
                                  {2, 2, parse_expression("exp(0.6*sin(x))")}};
    Chart warped_x(std::move(cs), std::move(g));
    SplitMix64 rng(111);
    for (int trial = 0; trial < 20; ++trial) {
        Point p = random_torus_point(rng);
        TangentVector j = jacobi(warped_x, fol_xy(), field3("0", "0", "1"), p);
        CHECK(warped_x.norm(j) < 1e-9);
    }
}

TEST_CASE("f_vw closed forms and symmetry") {
    Chart torus = chart_torus3();
    const double x = 0.6;
    CHECK(f_vw(torus, fol_xy(), field3("0", "0", "sin(x)"), field3("0", "0", "sin(x)"),
               pt({x, 0.1, 0.2})) == doctest::Approx(std::cos(x) * std::cos(x)).epsilon(1e-12));

    Chart warped = chart_warped();
    SplitMix64 rng(121);
    for (int trial = 0; trial < 10; ++trial) {
        const double wx = rng.uniform(0, kTwoPi), wy = rng.uniform(0, kTwoPi);
        const double lap = -2.0 * std::sin(wx) * std::cos(wy);
        const double grad2 = std::pow(std::cos(wx) * std::cos(wy), 2) +
                             std::pow(std::sin(wx) * std::sin(wy), 2);
        CHECK(std::abs(f_vw(warped, fol_xy(), field3("0", "0", kExpMinusF),
                            field3("0", "0", kExpMinusF), pt({wx, wy, 0.0})) -
                       (lap + grad2)) < 1e-10);
    }

    const std::vector<std::string> names = {"x", "y", "z"};
    for (int trial = 0; trial < 10; ++trial) {
        VectorFieldSpec V = random_trig_field(rng, names);
        VectorFieldSpec W = random_trig_field(rng, names);
        Point p = random_torus_point(rng);
        CHECK(std::abs(f_vw(warped, fol_xy(), V, W, p) - f_vw(warped, fol_xy(), W, V, p)) <
              1e-9);
    }
}

TEST_CASE("leaf divergence closed forms") {
    Chart torus = chart_torus3();
    const double x = 0.35;
    CHECK(div_leaf(torus, fol_xy(), field3("sin(x)", "0", "0"), pt({x, 0, 0})) ==
          doctest::Approx(std::cos(x)).epsilon(1e-12));
    CHECK(div_leaf(torus, fol_xy(), field3("1", "0", "0"), pt({x, 0, 0})) ==
          doctest::Approx(0.0));

    // warped chart, X = -grad f (tangent): div_L(X) = -lap f on the flat leaves
    Chart warped = chart_warped();
    SplitMix64 rng(131);
    for (int trial = 0; trial < 10; ++trial) {
        const double wx = rng.uniform(0, kTwoPi), wy = rng.uniform(0, kTwoPi);
        const VectorFieldSpec mgrad =
            field3("-(cos(x)*cos(y))", "sin(x)*sin(y)", "0");  // -grad(sin x cos y)
        const double lap = -2.0 * std::sin(wx) * std::cos(wy);
        CHECK(std::abs(div_leaf(warped, fol_xy(), mgrad, pt({wx, wy, 0.4})) - (-lap)) < 1e-10);
    }
}

TEST_CASE("divergence decomposition on the flat torus pair") {
    // two orthogonal coordinate foliations on T^2: for tangent Y,
    // div_L(Y) = div_M(Y) + <Y, H_perp> with H_perp = 0
    std::vector<CoordSpec> cs = {periodic_coord("x", 0, kTwoPi), periodic_coord("y", 0, kTwoPi)};
    std::vector<MetricEntry> g = {{0, 0, parse_expression("1")}, {1, 1, parse_expression("1")}};
    Chart t2(std::move(cs), std::move(g));
    FoliationSpec fx{{field2("1", "0")}};
    SplitMix64 rng(141);
    for (int trial = 0; trial < 10; ++trial) {
        Expression u = random_trig_scalar(rng, {"x", "y"});
        VectorFieldSpec Y{{u, parse_expression("0")}};
        Point p = pt({rng.uniform(0, kTwoPi), rng.uniform(0, kTwoPi)});
        const double dl = div_leaf(t2, fx, Y, p);
        const double dm = divergence_full(t2, Y, p);
        TangentVector Hp = mean_curvature(t2, FoliationSpec{{field2("0", "1")}}, p);
        const VectorField Yf = VectorField::from_spec(t2, Y);
        const double corr = t2.inner(p, Yf.values(p), Hp.v);
        CHECK(std::abs(dl - dm - corr) < 1e-8);
    }
}

TEST_CASE("lemma-style identities hold pointwise with random normal pairs") {
    // the two divergence identities behind the stability results:
    //   f_{V,W}            = <alpha_V, alpha_W> - div_L((nabla_V W)_tan)
    //   <J(V), W>          = <alpha_V, alpha_W> + div_L(alpha_V^t(W))
    struct Case {
        Chart chart;
        FoliationSpec fol;
        std::vector<std::string> names;
    };
    std::vector<Case> cases;
    cases.push_back({chart_torus3(), fol_xy(), {"x", "y", "z"}});
    cases.push_back({chart_warped(0.3), fol_xy(), {"x", "y", "z"}});

    SplitMix64 rng(151);
    for (const Case& c : cases) {
        for (int trial = 0; trial < 6; ++trial) {
            VectorFieldSpec V = random_trig_field(rng, c.names);
            VectorFieldSpec W = random_trig_field(rng, c.names);
            const VectorField Vf = VectorField::from_spec(c.chart, V);
            const VectorField Wf = VectorField::from_spec(c.chart, W);
            for (int k = 0; k < 8; ++k) {
                Point p = random_torus_point(rng);
                const double lhs2 = f_vw(c.chart, c.fol, Vf, Wf, p);
                const double rhs2 = alpha_inner(c.chart, c.fol, Vf, Wf, p) -
                                    div_leaf_nabla_tan(c.chart, c.fol, Vf, Wf, p);
                CHECK(std::abs(lhs2 - rhs2) < 1e-8);

                TangentVector JV = jacobi(c.chart, c.fol, Vf, p);
                const std::vector<VectorField> span_b = bind_spanning(c.chart, c.fol);
                Frame<double> F = adapted_frame<double>(c.chart, span_b, p);
                const std::vector<double> wp =
                    normal_part(F, Wf.values(c.chart.wrap(p)));
                const double lhs3 = c.chart.inner(p, JV.v, wp);
                const double rhs3 = alpha_inner(c.chart, c.fol, Vf, Wf, p) +
                                    div_leaf_alpha_transpose(c.chart, c.fol, Vf, Wf, p);
                CHECK(std::abs(lhs3 - rhs3) < 1e-8);
            }
        }
    }
}

TEST_CASE("flat-torus closed forms for the second divergence identity") {
    // V = W = sin(x) d_z: <J(V),V> = sin^2, <alpha_V,alpha_V> = cos^2,
    // div_L(alpha_V^t(V)) = -cos(2x)
    Chart torus = chart_torus3();
    SplitMix64 rng(161);
    for (int trial = 0; trial < 10; ++trial) {
        const double x = rng.uniform(0, kTwoPi);
        Point p = pt({x, rng.uniform(0, kTwoPi), rng.uniform(0, kTwoPi)});
        const VectorField V =
            VectorField::from_spec(torus, field3("0", "0", "sin(x)"));
        CHECK(std::abs(alpha_inner(torus, fol_xy(), V, V, p) - std::pow(std::cos(x), 2)) <
              1e-12);
        CHECK(std::abs(div_leaf_alpha_transpose(torus, fol_xy(), V, V, p) -
                       (-std::cos(2 * x))) < 1e-11);
        TangentVector JV = jacobi(torus, fol_xy(), V, p);
        CHECK(std::abs(torus.inner(p, JV.v, V.values(p)) - std::pow(std::sin(x), 2)) < 1e-11);
    }
}
