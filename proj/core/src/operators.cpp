#include "folab/operators.hpp"

#include <cmath>

namespace folab {

namespace {

/// Everything the operators need at one point, built once per call.
struct Ctx {
    Point w;
    int m = 0, n = 0;
    Connection conn;
    Frame<Jet2> Fj;
    Frame<Dual> Fd;
    Frame<double> Fv;

    Ctx(const Chart& chart, const FoliationSpec& fol, const Point& p) {
        w = chart.wrap(p);
        m = chart.dim();
        n = fol.leaf_dim();
        conn = chart.connection_at(w);
        Fj = adapted_frame<Jet2>(chart, bind_spanning(chart, fol), w);
        Fd = frame_duals(Fj);
        Fv = frame_values(Fd);
    }

    std::vector<double> vals(const std::vector<Dual>& d) const {
        std::vector<double> out(d.size());
        for (std::size_t k = 0; k < d.size(); ++k) out[k] = d[k].v;
        return out;
    }
    std::vector<Dual> duals_of(const std::vector<Jet2>& j) const {
        std::vector<Dual> out;
        out.reserve(j.size());
        for (const Jet2& x : j) out.push_back(x.dual());
        return out;
    }

    // alpha_V(e_i) values from the dual-level bracket
    std::vector<double> alpha_on_frame_val(const std::vector<Dual>& v_perp, int i) const {
        std::vector<double> br = bracket_val(v_perp, Fd.e[i]);
        return normal_part(Fv, br);
    }

    // alpha_V(e_i) as duals (consumes one jet order)
    std::vector<Dual> alpha_on_frame_dual(const std::vector<Jet2>& v_perp_j2, int i) const {
        std::vector<Dual> br = bracket_dual(v_perp_j2, Fj.e[i]);
        return normal_part(Fd, br);
    }

    // A_V(e_i) = -(nabla_{e_i} V)_tan from V duals
    std::vector<double> shape_on_frame(const std::vector<Dual>& v_perp, int i) const {
        std::vector<double> nab = cov_deriv_val(conn, Fv.e[i], v_perp);
        std::vector<double> t = tangent_part(Fv, nab);
        for (double& c : t) c = -c;
        return t;
    }

    double g_inner(const std::vector<double>& a, const std::vector<double>& b) const {
        return metric_inner(Fv.g, a, b);
    }

    // div_L of a derivative-carrying tangent field
    double div_leaf_of(const std::vector<Dual>& T) const {
        double s = 0.0;
        for (int i = 0; i < n; ++i) s += g_inner(cov_deriv_val(conn, Fv.e[i], T), Fv.e[i]);
        return s;
    }
};

} // namespace

TangentVector alpha(const Chart& chart, const FoliationSpec& fol, const VectorField& V,
                    const VectorField& X, const Point& p) {
    Ctx c(chart, fol, p);
    const std::vector<Dual> v_perp = normal_part(c.Fd, V.duals(c.w));
    const std::vector<Dual> x_tan = tangent_part(c.Fd, X.duals(c.w));
    std::vector<double> br = bracket_val(v_perp, x_tan);
    return {c.w, normal_part(c.Fv, br)};
}

TangentVector alpha(const Chart& chart, const FoliationSpec& fol, const VectorFieldSpec& V,
                    const VectorFieldSpec& X, const Point& p) {
    return alpha(chart, fol, VectorField::from_spec(chart, V), VectorField::from_spec(chart, X),
                 p);
}

TangentVector alpha_transpose(const Chart& chart, const FoliationSpec& fol, const VectorField& V,
                              const VectorField& W, const Point& p) {
    Ctx c(chart, fol, p);
    const std::vector<Dual> v_perp = normal_part(c.Fd, V.duals(c.w));
    const std::vector<double> w_perp = normal_part(c.Fv, W.values(c.w));
    std::vector<double> out(c.m, 0.0);
    for (int i = 0; i < c.n; ++i) {
        const double coeff = c.g_inner(w_perp, c.alpha_on_frame_val(v_perp, i));
        for (int k = 0; k < c.m; ++k) out[k] += coeff * c.Fv.e[i][k];
    }
    return {c.w, std::move(out)};
}

TangentVector alpha_transpose(const Chart& chart, const FoliationSpec& fol,
                              const VectorFieldSpec& V, const VectorFieldSpec& W,
                              const Point& p) {
    return alpha_transpose(chart, fol, VectorField::from_spec(chart, V),
                           VectorField::from_spec(chart, W), p);
}

double alpha_inner(const Chart& chart, const FoliationSpec& fol, const VectorField& V,
                   const VectorField& W, const Point& p) {
    Ctx c(chart, fol, p);
    const std::vector<Dual> v_perp = normal_part(c.Fd, V.duals(c.w));
    const std::vector<Dual> w_perp = normal_part(c.Fd, W.duals(c.w));
    double s = 0.0;
    for (int i = 0; i < c.n; ++i)
        s += c.g_inner(c.alpha_on_frame_val(v_perp, i), c.alpha_on_frame_val(w_perp, i));
    return s;
}

TangentVector nabla_perp(const Chart& chart, const FoliationSpec& fol, const VectorField& V,
                         const VectorField& X, const Point& p) {
    Ctx c(chart, fol, p);
    const std::vector<Dual> v_perp = normal_part(c.Fd, V.duals(c.w));
    const std::vector<double> x_tan = tangent_part(c.Fv, X.values(c.w));
    std::vector<double> nab = cov_deriv_val(c.conn, x_tan, v_perp);
    return {c.w, normal_part(c.Fv, nab)};
}

TangentVector nabla_perp(const Chart& chart, const FoliationSpec& fol, const VectorFieldSpec& V,
                         const VectorFieldSpec& X, const Point& p) {
    return nabla_perp(chart, fol, VectorField::from_spec(chart, V),
                      VectorField::from_spec(chart, X), p);
}

TangentVector curvature_trace(const Chart& chart, const FoliationSpec& fol, const VectorField& V,
                              const Point& p) {
    Ctx c(chart, fol, p);
    const RiemannTensor R = riemann_from_connection(c.conn);
    const std::vector<double> v_perp = normal_part(c.Fv, V.values(c.w));
    std::vector<double> acc(c.m, 0.0);
    for (int i = 0; i < c.n; ++i)
        for (int d = 0; d < c.m; ++d) {
            double s = 0.0;
            for (int cc = 0; cc < c.m; ++cc)
                for (int a = 0; a < c.m; ++a)
                    for (int b = 0; b < c.m; ++b)
                        s += R.R(d, cc, a, b) * c.Fv.e[i][a] * v_perp[b] * c.Fv.e[i][cc];
            acc[d] += s;
        }
    return {c.w, normal_part(c.Fv, acc)};
}

TangentVector curvature_trace(const Chart& chart, const FoliationSpec& fol,
                              const VectorFieldSpec& V, const Point& p) {
    return curvature_trace(chart, fol, VectorField::from_spec(chart, V), p);
}

TangentVector a_hat(const Chart& chart, const FoliationSpec& fol, const VectorField& V,
                    const Point& p) {
    Ctx c(chart, fol, p);
    const std::vector<Dual> v_perp = normal_part(c.Fd, V.duals(c.w));
    std::vector<double> out(c.m, 0.0);
    for (int al = c.n; al < c.m; ++al) {
        double coeff = 0.0;
        for (int i = 0; i < c.n; ++i)
            coeff += c.g_inner(c.shape_on_frame(v_perp, i), c.shape_on_frame(c.Fd.e[al], i));
        for (int k = 0; k < c.m; ++k) out[k] += coeff * c.Fv.e[al][k];
    }
    return {c.w, std::move(out)};
}

TangentVector a_hat(const Chart& chart, const FoliationSpec& fol, const VectorFieldSpec& V,
                    const Point& p) {
    return a_hat(chart, fol, VectorField::from_spec(chart, V), p);
}

namespace {

std::vector<double> nabla_perp_squared_impl(const Ctx& c, const VectorField& V) {
    const std::vector<Jet2> vj = V.jets(c.w);
    const std::vector<Jet2> v_perp_j2 = normal_part(c.Fj, vj);
    const std::vector<Dual> v_perp_d = c.duals_of(v_perp_j2);

    std::vector<double> term1(c.m, 0.0);
    std::vector<double> Z(c.m, 0.0);
    for (int i = 0; i < c.n; ++i) {
        // U_i(q) = ((nabla_{e_i} V_perp)(q))_perp carried to first order
        std::vector<Dual> U = cov_deriv_dual(c.conn, c.Fd.e[i], v_perp_j2);
        U = normal_part(c.Fd, U);
        const std::vector<double> outer = normal_part(c.Fv, cov_deriv_val(c.conn, c.Fv.e[i], U));
        for (int k = 0; k < c.m; ++k) term1[k] += outer[k];

        const std::vector<double> conn_term =
            tangent_part(c.Fv, cov_deriv_val(c.conn, c.Fv.e[i], c.Fd.e[i]));
        for (int k = 0; k < c.m; ++k) Z[k] += conn_term[k];
    }
    const std::vector<double> term2 = normal_part(c.Fv, cov_deriv_val(c.conn, Z, v_perp_d));
    std::vector<double> out(c.m);
    for (int k = 0; k < c.m; ++k) out[k] = term1[k] - term2[k];
    return out;
}

} // namespace

TangentVector nabla_perp_squared(const Chart& chart, const FoliationSpec& fol,
                                 const VectorField& V, const Point& p) {
    Ctx c(chart, fol, p);
    return {c.w, nabla_perp_squared_impl(c, V)};
}

TangentVector nabla_perp_squared(const Chart& chart, const FoliationSpec& fol,
                                 const VectorFieldSpec& V, const Point& p) {
    return nabla_perp_squared(chart, fol, VectorField::from_spec(chart, V), p);
}

TangentVector jacobi(const Chart& chart, const FoliationSpec& fol, const VectorField& V,
                     const Point& p) {
    Ctx c(chart, fol, p);
    const std::vector<double> nps = nabla_perp_squared_impl(c, V);
    const TangentVector rv = curvature_trace(chart, fol, V, p);
    const TangentVector av = a_hat(chart, fol, V, p);
    std::vector<double> out(c.m);
    for (int k = 0; k < c.m; ++k) out[k] = -nps[k] + rv.v[k] - av.v[k];
    return {c.w, std::move(out)};
}

TangentVector jacobi(const Chart& chart, const FoliationSpec& fol, const VectorFieldSpec& V,
                     const Point& p) {
    return jacobi(chart, fol, VectorField::from_spec(chart, V), p);
}

double f_vw(const Chart& chart, const FoliationSpec& fol, const VectorField& V,
            const VectorField& W, const Point& p) {
    Ctx c(chart, fol, p);
    const std::vector<Dual> v_perp = normal_part(c.Fd, V.duals(c.w));
    const std::vector<Dual> w_perp = normal_part(c.Fd, W.duals(c.w));
    const std::vector<double> w_perp_v = c.vals(w_perp);

    double grad_term = 0.0, shape_term = 0.0;
    for (int i = 0; i < c.n; ++i) {
        const std::vector<double> nv = normal_part(c.Fv, cov_deriv_val(c.conn, c.Fv.e[i], v_perp));
        const std::vector<double> nw = normal_part(c.Fv, cov_deriv_val(c.conn, c.Fv.e[i], w_perp));
        grad_term += c.g_inner(nv, nw);
        shape_term += c.g_inner(c.shape_on_frame(v_perp, i), c.shape_on_frame(w_perp, i));
    }
    const TangentVector rv = curvature_trace(chart, fol, V, p);
    const double curv_term = c.g_inner(rv.v, w_perp_v);
    return grad_term + curv_term - shape_term;
}

double f_vw(const Chart& chart, const FoliationSpec& fol, const VectorFieldSpec& V,
            const VectorFieldSpec& W, const Point& p) {
    return f_vw(chart, fol, VectorField::from_spec(chart, V), VectorField::from_spec(chart, W),
                p);
}

double div_leaf(const Chart& chart, const FoliationSpec& fol, const VectorField& X,
                const Point& p) {
    Ctx c(chart, fol, p);
    const std::vector<Dual> x_tan = tangent_part(c.Fd, X.duals(c.w));
    return c.div_leaf_of(x_tan);
}

double div_leaf(const Chart& chart, const FoliationSpec& fol, const VectorFieldSpec& X,
                const Point& p) {
    return div_leaf(chart, fol, VectorField::from_spec(chart, X), p);
}

double div_leaf_nabla_tan(const Chart& chart, const FoliationSpec& fol, const VectorField& V,
                          const VectorField& W, const Point& p) {
    Ctx c(chart, fol, p);
    const std::vector<Dual> v_perp = normal_part(c.Fd, V.duals(c.w));
    const std::vector<Jet2> w_perp_j2 = normal_part(c.Fj, W.jets(c.w));
    std::vector<Dual> nab = cov_deriv_dual(c.conn, v_perp, w_perp_j2);
    nab = tangent_part(c.Fd, nab);
    return c.div_leaf_of(nab);
}

namespace {

std::vector<Dual> alpha_transpose_dual_impl(const Ctx& c, const VectorField& V,
                                            const VectorField& W) {
    const std::vector<Jet2> v_perp_j2 = normal_part(c.Fj, V.jets(c.w));
    const std::vector<Jet2> w_perp_j2 = normal_part(c.Fj, W.jets(c.w));
    const std::vector<Dual> w_perp_d = c.duals_of(w_perp_j2);

    std::vector<Dual> T(c.m, Dual::constant(0.0, c.m));
    for (int i = 0; i < c.n; ++i) {
        const std::vector<Dual> a_i = c.alpha_on_frame_dual(v_perp_j2, i);
        const Dual coeff = metric_inner(c.Fd.g, w_perp_d, a_i);
        for (int k = 0; k < c.m; ++k) T[k] += coeff * c.Fd.e[i][k];
    }
    return T;
}

} // namespace

double div_leaf_alpha_transpose(const Chart& chart, const FoliationSpec& fol,
                                const VectorField& V, const VectorField& W, const Point& p) {
    Ctx c(chart, fol, p);
    return c.div_leaf_of(alpha_transpose_dual_impl(c, V, W));
}

std::vector<Dual> alpha_transpose_dual(const Chart& chart, const FoliationSpec& fol,
                                       const VectorField& V, const VectorField& W,
                                       const Point& p) {
    Ctx c(chart, fol, p);
    return alpha_transpose_dual_impl(c, V, W);
}

double div_leaf_of_dual(const Chart& chart, const FoliationSpec& fol, std::span<const Dual> T,
                        const Point& p) {
    Ctx c(chart, fol, p);
    std::vector<Dual> t(T.begin(), T.end());
    return c.div_leaf_of(t);
}

double div_full_of_dual(const Chart& chart, std::span<const Dual> T, const Point& p) {
    const Connection conn = chart.connection_at(p);
    double s = 0.0;
    for (int a = 0; a < conn.m; ++a) {
        s += T[a].d[a];
        for (int b = 0; b < conn.m; ++b) s += conn.G(a, a, b) * T[b].v;
    }
    return s;
}

} // namespace folab
