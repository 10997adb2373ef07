#pragma once

#include <span>
#include <string>
#include <vector>

#include "folab/chart.hpp"

namespace folab {

/// The tangent distribution D of a foliation, given by ordered spanning
/// fields. The orthogonal complement is always derived, never specified,
/// so the splitting v = v_tan + v_perp is exact by construction.
struct FoliationSpec {
    std::vector<VectorFieldSpec> spanning;

    int leaf_dim() const { return static_cast<int>(spanning.size()); }
};

std::vector<VectorField> bind_spanning(const Chart& chart, const FoliationSpec& fol);

/// Orthonormal adapted frame at a point over any derivative-carrying
/// scalar. e[0..n) span D (Gram-Schmidt over the spanning fields in
/// declaration order), e[n..m) span the complement (Gram-Schmidt over the
/// coordinate basis projections in coordinate order, skipping candidates
/// whose projection is shorter than the pivot tolerance). Running the same
/// construction over Dual or Jet2 scalars yields frame fields with exact
/// first or second derivatives.
template <class S>
struct Frame {
    int n = 0;                      // number of tangent members
    std::vector<std::vector<S>> e;  // m frame vectors, components in the coordinate basis
    SquareMat<S> g;                 // metric at the point over S

    int dim() const { return static_cast<int>(e.size()); }
};

/// Components of a field at p over the requested scalar order.
template <class S>
std::vector<S> field_as(const VectorField& f, const Point& p) {
    if constexpr (std::is_same_v<S, Jet2>) {
        return f.jets(p);
    } else if constexpr (std::is_same_v<S, Dual>) {
        return f.duals(p);
    } else {
        return f.values(p);
    }
}

template <class S>
std::vector<S> project_onto(const Frame<S>& F, const std::vector<S>& v, int first, int count) {
    const int m = F.dim();
    std::vector<S> out(m, zero_like(v[0]));
    for (int a = first; a < first + count; ++a) {
        const S c = metric_inner(F.g, v, F.e[a]);
        for (int k = 0; k < m; ++k) out[k] += c * F.e[a][k];
    }
    return out;
}

template <class S>
std::vector<S> tangent_part(const Frame<S>& F, const std::vector<S>& v) {
    return project_onto(F, v, 0, F.n);
}

template <class S>
std::vector<S> normal_part(const Frame<S>& F, const std::vector<S>& v) {
    std::vector<S> t = tangent_part(F, v);
    std::vector<S> out = v;
    for (std::size_t k = 0; k < out.size(); ++k) out[k] -= t[k];
    return out;
}

namespace detail {

/// Gram-Schmidt step against already-accepted frame members.
template <class S>
std::vector<S> orthogonalize(const SquareMat<S>& g, const std::vector<std::vector<S>>& accepted,
                             std::vector<S> v) {
    for (const std::vector<S>& e : accepted) {
        const S c = metric_inner(g, v, e);
        for (std::size_t k = 0; k < v.size(); ++k) v[k] -= c * e[k];
    }
    return v;
}

} // namespace detail

constexpr double kNormalPivotTol = 1e-8;

template <class S>
Frame<S> adapted_frame(const Chart& chart, const std::vector<VectorField>& spanning,
                       const Point& p) {
    const int m = chart.dim();
    const int n = static_cast<int>(spanning.size());
    const Point w = chart.wrap(p);
    const std::vector<S> seeded = chart.seed<S>(w);

    Frame<S> F;
    F.n = n;
    F.g = chart.metric_eval<S>(seeded);

    for (int j = 0; j < n; ++j) {
        std::vector<S> u = detail::orthogonalize(F.g, F.e, field_as<S>(spanning[j], w));
        const S nrm2 = metric_inner(F.g, u, u);
        if (value(nrm2) < 1e-12)
            throw ScenarioError("spanning fields are linearly dependent at a sampled point "
                                "(Gram-Schmidt pivot " +
                                std::to_string(j + 1) + ")");
        const S inv_norm = inv(sqrt(nrm2));
        for (S& c : u) c = c * inv_norm;
        F.e.push_back(std::move(u));
    }

    const int seed_dims = seeded.empty() ? 0 : folab::detail::ScalarTraits<S>::dims(seeded[0]);
    int accepted = 0;
    for (int b = 0; b < m && accepted < m - n; ++b) {
        std::vector<S> cand(m, folab::detail::ScalarTraits<S>::make(0.0, seed_dims));
        cand[b] = folab::detail::ScalarTraits<S>::make(1.0, seed_dims);
        cand = detail::orthogonalize(F.g, F.e, std::move(cand));
        const S nrm2 = metric_inner(F.g, cand, cand);
        if (value(nrm2) < kNormalPivotTol * kNormalPivotTol) continue;  // deterministic pivot skip
        const S inv_norm = inv(sqrt(nrm2));
        for (S& c : cand) c = c * inv_norm;
        F.e.push_back(std::move(cand));
        ++accepted;
    }
    if (accepted < m - n)
        throw ScenarioError("could not complete the normal frame (rank deficiency)");
    return F;
}

Frame<double> frame_values(const Frame<Dual>& F);
Frame<Dual> frame_duals(const Frame<Jet2>& F);

// --- covariant-derivative kernels shared by the operator modules ---

/// (nabla_X Y)(p) from X values and Y first derivatives.
std::vector<double> cov_deriv_val(const Connection& conn, std::span<const double> X,
                                  std::span<const Dual> Y);

/// (nabla_X Y) as duals: X duals, Y 2-jets, connection with derivatives.
std::vector<Dual> cov_deriv_dual(const Connection& conn, std::span<const Dual> X,
                                 std::span<const Jet2> Y);

/// [X, Y](p) from first derivatives.
std::vector<double> bracket_val(std::span<const Dual> X, std::span<const Dual> Y);

/// [X, Y] as duals from 2-jets (one derivative order is consumed).
std::vector<Dual> bracket_dual(std::span<const Jet2> X, std::span<const Jet2> Y);

// --- public foliation operations ---

struct AdaptedFrame {
    Point point;
    std::vector<TangentVector> tangent;
    std::vector<TangentVector> normal;
};

AdaptedFrame adapted_frame_at(const Chart& chart, const FoliationSpec& fol, const Point& p);

enum class ProjectWhich { Tangent, Normal };

TangentVector project(const Chart& chart, const FoliationSpec& fol, const TangentVector& v,
                      ProjectWhich which);

/// Shape operator A_V(X) = -(nabla_X V)^tan. Requires V normal and X
/// tangent at p (within 1e-8); violations raise MisuseError naming the
/// offending argument. Tensorial: only V(p), X(p) matter.
TangentVector shape_operator(const Chart& chart, const FoliationSpec& fol, const VectorField& V,
                             const VectorField& X, const Point& p);
TangentVector shape_operator(const Chart& chart, const FoliationSpec& fol,
                             const VectorFieldSpec& V, const VectorFieldSpec& X, const Point& p);

/// Mean curvature H = sum_alpha tr(A_{e_alpha}) e_alpha; zero iff the
/// foliation is minimal at p.
TangentVector mean_curvature(const Chart& chart, const FoliationSpec& fol, const Point& p);

/// Involutivity defect of span(fields): orthonormalize the fields at p,
/// bracket each pair, and take the largest norm of the bracket component
/// orthogonal to the span. Zero iff the distribution is involutive at p;
/// orthonormalizing first makes the residual invariant under invertible
/// recombinations of the spanning set.
double frobenius_residual(const Chart& chart, const std::vector<VectorField>& fields,
                          const Point& p);
double frobenius_residual(const Chart& chart, const std::vector<VectorFieldSpec>& fields,
                          const Point& p);

/// Involutivity defect of the derived normal bundle of the foliation.
double frobenius_residual_perp(const Chart& chart, const FoliationSpec& fol, const Point& p);

/// Check spanning-field independence and involutivity at the given sample
/// points; throws ScenarioError citing a witness point on failure.
void validate_foliation(const Chart& chart, const FoliationSpec& fol,
                        std::span<const Point> samples);

} // namespace folab
