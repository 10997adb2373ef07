#include "folab/foliation.hpp"

#include <limits>
#include <cmath>
#include <sstream>

namespace folab {

std::vector<VectorField> bind_spanning(const Chart& chart, const FoliationSpec& fol) {
    std::vector<VectorField> out;
    out.reserve(fol.spanning.size());
    for (const VectorFieldSpec& s : fol.spanning) out.push_back(VectorField::from_spec(chart, s));
    return out;
}

Frame<double> frame_values(const Frame<Dual>& F) {
    Frame<double> out;
    out.n = F.n;
    const int m = F.dim();
    out.g = Mat(m, 0.0);
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j) out.g(i, j) = F.g(i, j).v;
    out.e.reserve(m);
    for (const auto& e : F.e) {
        std::vector<double> v(m);
        for (int k = 0; k < m; ++k) v[k] = e[k].v;
        out.e.push_back(std::move(v));
    }
    return out;
}

Frame<Dual> frame_duals(const Frame<Jet2>& F) {
    Frame<Dual> out;
    out.n = F.n;
    const int m = F.dim();
    out.g = SquareMat<Dual>(m, Dual::constant(0.0, m));
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j) out.g(i, j) = F.g(i, j).dual();
    out.e.reserve(m);
    for (const auto& e : F.e) {
        std::vector<Dual> v;
        v.reserve(m);
        for (int k = 0; k < m; ++k) v.push_back(e[k].dual());
        out.e.push_back(std::move(v));
    }
    return out;
}

std::vector<double> cov_deriv_val(const Connection& conn, std::span<const double> X,
                                  std::span<const Dual> Y) {
    const int m = conn.m;
    std::vector<double> out(m, 0.0);
    for (int k = 0; k < m; ++k) {
        double s = 0.0;
        for (int a = 0; a < m; ++a) {
            double t = Y[k].d[a];
            for (int b = 0; b < m; ++b) t += conn.G(k, a, b) * Y[b].v;
            s += X[a] * t;
        }
        out[k] = s;
    }
    return out;
}

std::vector<Dual> cov_deriv_dual(const Connection& conn, std::span<const Dual> X,
                                 std::span<const Jet2> Y) {
    const int m = conn.m;
    std::vector<Dual> out(m, Dual::constant(0.0, X[0].dims()));
    for (int k = 0; k < m; ++k) {
        Dual s = Dual::constant(0.0, X[0].dims());
        for (int a = 0; a < m; ++a) {
            Dual t = Y[k].partial(a);
            for (int b = 0; b < m; ++b) t += conn.dual(k, a, b) * Y[b].dual();
            s += X[a] * t;
        }
        out[k] = s;
    }
    return out;
}

std::vector<double> bracket_val(std::span<const Dual> X, std::span<const Dual> Y) {
    const int m = static_cast<int>(X.size());
    std::vector<double> out(m, 0.0);
    for (int k = 0; k < m; ++k) {
        double s = 0.0;
        for (int a = 0; a < m; ++a) s += X[a].v * Y[k].d[a] - Y[a].v * X[k].d[a];
        out[k] = s;
    }
    return out;
}

std::vector<Dual> bracket_dual(std::span<const Jet2> X, std::span<const Jet2> Y) {
    const int m = static_cast<int>(X.size());
    const int dims = X[0].dims();
    std::vector<Dual> out(m, Dual::constant(0.0, dims));
    for (int k = 0; k < m; ++k) {
        Dual s = Dual::constant(0.0, dims);
        for (int a = 0; a < m; ++a) {
            s += X[a].dual() * Y[k].partial(a);
            s -= Y[a].dual() * X[k].partial(a);
        }
        out[k] = s;
    }
    return out;
}

AdaptedFrame adapted_frame_at(const Chart& chart, const FoliationSpec& fol, const Point& p) {
    const std::vector<VectorField> spanning = bind_spanning(chart, fol);
    const Frame<double> F = adapted_frame<double>(chart, spanning, p);
    AdaptedFrame out;
    out.point = chart.wrap(p);
    for (int a = 0; a < F.dim(); ++a) {
        TangentVector t{out.point, F.e[a]};
        if (a < F.n)
            out.tangent.push_back(std::move(t));
        else
            out.normal.push_back(std::move(t));
    }
    return out;
}

TangentVector project(const Chart& chart, const FoliationSpec& fol, const TangentVector& v,
                      ProjectWhich which) {
    const std::vector<VectorField> spanning = bind_spanning(chart, fol);
    const Frame<double> F = adapted_frame<double>(chart, spanning, v.base);
    const std::vector<double> part =
        which == ProjectWhich::Tangent ? tangent_part(F, v.v) : normal_part(F, v.v);
    return {v.base, part};
}

TangentVector shape_operator(const Chart& chart, const FoliationSpec& fol, const VectorField& V,
                             const VectorField& X, const Point& p) {
    const std::vector<VectorField> spanning = bind_spanning(chart, fol);
    const Frame<double> F = adapted_frame<double>(chart, spanning, p);
    const Point w = chart.wrap(p);

    const std::vector<Dual> vd = V.duals(w);
    std::vector<double> vv(vd.size());
    for (std::size_t k = 0; k < vd.size(); ++k) vv[k] = vd[k].v;
    const std::vector<double> v_tan = tangent_part(F, vv);
    if (std::sqrt(metric_inner(F.g, v_tan, v_tan)) > 1e-8)
        throw MisuseError("shape_operator: field V is not normal at the evaluation point");

    const std::vector<double> xv = X.values(w);
    const std::vector<double> x_nor = normal_part(F, xv);
    if (std::sqrt(metric_inner(F.g, x_nor, x_nor)) > 1e-8)
        throw MisuseError("shape_operator: field X is not tangent at the evaluation point");

    const Connection conn = chart.connection_at(w);
    std::vector<double> nab = cov_deriv_val(conn, xv, vd);
    std::vector<double> out = tangent_part(F, nab);
    for (double& c : out) c = -c;
    return {w, std::move(out)};
}

TangentVector shape_operator(const Chart& chart, const FoliationSpec& fol,
                             const VectorFieldSpec& V, const VectorFieldSpec& X, const Point& p) {
    return shape_operator(chart, fol, VectorField::from_spec(chart, V),
                          VectorField::from_spec(chart, X), p);
}

TangentVector mean_curvature(const Chart& chart, const FoliationSpec& fol, const Point& p) {
    const std::vector<VectorField> spanning = bind_spanning(chart, fol);
    const Frame<Dual> Fd = adapted_frame<Dual>(chart, spanning, p);
    const Frame<double> F = frame_values(Fd);
    const Point w = chart.wrap(p);
    const Connection conn = chart.connection_at(w);
    const int m = chart.dim();

    std::vector<double> H(m, 0.0);
    for (int alpha = F.n; alpha < m; ++alpha) {
        double tr = 0.0;
        for (int i = 0; i < F.n; ++i) {
            // A_{e_alpha}(e_i) = -(nabla_{e_i} e_alpha)^tan
            std::vector<double> nab = cov_deriv_val(conn, F.e[i], Fd.e[alpha]);
            std::vector<double> a = tangent_part(F, nab);
            tr -= metric_inner(F.g, a, F.e[i]);
        }
        for (int k = 0; k < m; ++k) H[k] += tr * F.e[alpha][k];
    }
    return {w, std::move(H)};
}

namespace {

double frobenius_of_frame(const Frame<double>& Fv, const std::vector<std::vector<Dual>>& fields,
                          int first, int count) {
    // fields are orthonormal (over Dual); bracket each pair and measure the
    // component orthogonal to their span.
    double worst = 0.0;
    for (int a = 0; a < count; ++a) {
        for (int b = a + 1; b < count; ++b) {
            std::vector<double> br = bracket_val(fields[first + a], fields[first + b]);
            // subtract the in-span component
            for (int c = 0; c < count; ++c) {
                const double coeff = metric_inner(Fv.g, br, Fv.e[first + c]);
                for (std::size_t k = 0; k < br.size(); ++k) br[k] -= coeff * Fv.e[first + c][k];
            }
            const double r = std::sqrt(std::max(0.0, metric_inner(Fv.g, br, br)));
            worst = std::max(worst, r);
        }
    }
    return worst;
}

} // namespace

double frobenius_residual(const Chart& chart, const std::vector<VectorField>& fields,
                          const Point& p) {
    if (fields.size() < 2) return 0.0;
    // adapted_frame orthonormalizes the fields (its tangent block) over Dual,
    // so the brackets below carry exact first derivatives.
    const Frame<Dual> Fd = adapted_frame<Dual>(chart, fields, p);
    const Frame<double> Fv = frame_values(Fd);
    return frobenius_of_frame(Fv, Fd.e, 0, static_cast<int>(fields.size()));
}

double frobenius_residual(const Chart& chart, const std::vector<VectorFieldSpec>& fields,
                          const Point& p) {
    std::vector<VectorField> bound;
    bound.reserve(fields.size());
    for (const VectorFieldSpec& s : fields) bound.push_back(VectorField::from_spec(chart, s));
    return frobenius_residual(chart, bound, p);
}

double frobenius_residual_perp(const Chart& chart, const FoliationSpec& fol, const Point& p) {
    const std::vector<VectorField> spanning = bind_spanning(chart, fol);
    const Frame<Dual> Fd = adapted_frame<Dual>(chart, spanning, p);
    const Frame<double> Fv = frame_values(Fd);
    const int m = chart.dim();
    if (m - Fd.n < 2) return 0.0;
    return frobenius_of_frame(Fv, Fd.e, Fd.n, m - Fd.n);
}

void validate_foliation(const Chart& chart, const FoliationSpec& fol,
                        std::span<const Point> samples) {
    const std::vector<VectorField> spanning = bind_spanning(chart, fol);
    const int n = fol.leaf_dim();
    double worst_frob = 0.0, min_det = std::numeric_limits<double>::infinity();
    Point frob_witness, det_witness;
    for (const Point& p : samples) {
        const Point w = chart.wrap(p);
        // independence via the Gram determinant of the raw spanning fields
        const Mat g = chart.metric_at(w);
        std::vector<std::vector<double>> vals;
        vals.reserve(n);
        for (const VectorField& f : spanning) vals.push_back(f.values(w));
        Mat gram(n, 0.0);
        for (int a = 0; a < n; ++a)
            for (int b = 0; b < n; ++b) {
                double s = 0.0;
                for (int i = 0; i < chart.dim(); ++i)
                    for (int j = 0; j < chart.dim(); ++j) s += g(i, j) * vals[a][i] * vals[b][j];
                gram(a, b) = s;
            }
        const double det = determinant(gram);
        if (det < min_det) {
            min_det = det;
            det_witness = w;
        }
        if (det > 1e-12) {  // involutivity is only meaningful where the span has full rank
            const double frob = frobenius_residual(chart, spanning, w);
            if (frob > worst_frob) {
                worst_frob = frob;
                frob_witness = w;
            }
        }
    }
    auto point_text = [&](const Point& w) {
        std::ostringstream os;
        os << "(";
        for (int a = 0; a < chart.dim(); ++a) os << (a ? ", " : "") << w.x[a];
        os << ")";
        return os.str();
    };
    if (!(min_det > 1e-12))
        throw ScenarioError("spanning fields are dependent (Gram determinant " +
                            std::to_string(min_det) + " at " + point_text(det_witness) + ")");
    if (!(worst_frob < 1e-8))
        throw ScenarioError("distribution is not involutive: Frobenius residual " +
                            std::to_string(worst_frob) + " at " + point_text(frob_witness));
}

} // namespace folab
