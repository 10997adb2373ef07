#pragma once

#include "folab/foliation.hpp"

namespace folab {

/// Pointwise operators built from the adapted frame. Every operator
/// silently projects its field arguments onto the bundle it expects
/// (V to the normal bundle, X to the tangent one); the shape operator in
/// foliation.hpp is the one entry point that enforces its preconditions
/// instead.
///
/// Frame-dependent intermediates only ever leave these functions through
/// traces, which are invariant under smooth recombinations of the
/// spanning fields.

/// alpha_V(X) = ([V_perp, X_tan])_perp.
TangentVector alpha(const Chart& chart, const FoliationSpec& fol, const VectorField& V,
                    const VectorField& X, const Point& p);
TangentVector alpha(const Chart& chart, const FoliationSpec& fol, const VectorFieldSpec& V,
                    const VectorFieldSpec& X, const Point& p);

/// alpha_V^t(W) = sum_i <W, alpha_V(e_i)> e_i, tangent to the leaves.
TangentVector alpha_transpose(const Chart& chart, const FoliationSpec& fol, const VectorField& V,
                              const VectorField& W, const Point& p);
TangentVector alpha_transpose(const Chart& chart, const FoliationSpec& fol,
                              const VectorFieldSpec& V, const VectorFieldSpec& W, const Point& p);

/// <alpha_V, alpha_W> = sum_i <alpha_V(e_i), alpha_W(e_i)>.
double alpha_inner(const Chart& chart, const FoliationSpec& fol, const VectorField& V,
                   const VectorField& W, const Point& p);

/// Normal connection applied to V along X: (nabla_{X_tan} V_perp)_perp.
TangentVector nabla_perp(const Chart& chart, const FoliationSpec& fol, const VectorField& V,
                         const VectorField& X, const Point& p);
TangentVector nabla_perp(const Chart& chart, const FoliationSpec& fol, const VectorFieldSpec& V,
                         const VectorFieldSpec& X, const Point& p);

/// Curvature trace R(V) = sum_i (R(e_i, V_perp) e_i)_perp.
TangentVector curvature_trace(const Chart& chart, const FoliationSpec& fol, const VectorField& V,
                              const Point& p);
TangentVector curvature_trace(const Chart& chart, const FoliationSpec& fol,
                              const VectorFieldSpec& V, const Point& p);

/// A-hat(V) = sum_alpha <A_V, A_{e_alpha}> e_alpha with the trace inner
/// product <A,B> = sum_i <A(e_i), B(e_i)>.
TangentVector a_hat(const Chart& chart, const FoliationSpec& fol, const VectorField& V,
                    const Point& p);
TangentVector a_hat(const Chart& chart, const FoliationSpec& fol, const VectorFieldSpec& V,
                    const Point& p);

/// Trace of the second normal derivative,
///   sum_i [ nabla^perp_{e_i} nabla^perp_{e_i} V - nabla^perp_{(nabla_{e_i} e_i)_tan} V ].
/// The inner field q -> (nabla_{e_i} V)(q)_perp is differentiated through
/// jet-valued frames, so no finite-difference stencil (and no pivot-switch
/// hazard) exists here.
TangentVector nabla_perp_squared(const Chart& chart, const FoliationSpec& fol,
                                 const VectorField& V, const Point& p);
TangentVector nabla_perp_squared(const Chart& chart, const FoliationSpec& fol,
                                 const VectorFieldSpec& V, const Point& p);

/// Jacobi operator J(V) = -nabla_perp_squared(V) + R(V) - A-hat(V).
TangentVector jacobi(const Chart& chart, const FoliationSpec& fol, const VectorField& V,
                     const Point& p);
TangentVector jacobi(const Chart& chart, const FoliationSpec& fol, const VectorFieldSpec& V,
                     const Point& p);

/// Index-form integrand
///   f_{V,W} = <nabla_perp V, nabla_perp W> + <R(V), W> - <A_V, A_W>.
double f_vw(const Chart& chart, const FoliationSpec& fol, const VectorField& V,
            const VectorField& W, const Point& p);
double f_vw(const Chart& chart, const FoliationSpec& fol, const VectorFieldSpec& V,
            const VectorFieldSpec& W, const Point& p);

/// Leaf divergence div_L(X) = sum_i <nabla_{e_i} X_tan, e_i>.
double div_leaf(const Chart& chart, const FoliationSpec& fol, const VectorField& X,
                const Point& p);
double div_leaf(const Chart& chart, const FoliationSpec& fol, const VectorFieldSpec& X,
                const Point& p);

/// div_L((nabla_V W)_tan): the tangential part of nabla_V W is assembled as
/// a derivative-carrying field before the divergence trace.
double div_leaf_nabla_tan(const Chart& chart, const FoliationSpec& fol, const VectorField& V,
                          const VectorField& W, const Point& p);

/// div_L(alpha_V^t(W)), likewise through a derivative-carrying field.
double div_leaf_alpha_transpose(const Chart& chart, const FoliationSpec& fol,
                                const VectorField& V, const VectorField& W, const Point& p);

/// alpha_V^t(W) as a derivative-carrying field at p, for use with the
/// divergence helpers below.
std::vector<Dual> alpha_transpose_dual(const Chart& chart, const FoliationSpec& fol,
                                       const VectorField& V, const VectorField& W,
                                       const Point& p);

/// Divergences of an externally assembled derivative-carrying field.
double div_leaf_of_dual(const Chart& chart, const FoliationSpec& fol, std::span<const Dual> T,
                        const Point& p);
double div_full_of_dual(const Chart& chart, std::span<const Dual> T, const Point& p);

} // namespace folab
