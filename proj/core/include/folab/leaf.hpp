#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "folab/foliation.hpp"

namespace folab {

/// One parameter axis of a leaf patch.
struct LeafParamSpec {
    std::string name;
    bool periodic = false;
    double lo = 0.0, hi = 1.0;
    int resolution = 64;  // grid intervals along this axis
};

/// A parametrized compact piece of one leaf: a parameter box plus an
/// embedding into chart coordinates. Quadrature is tensor-product
/// trapezoidal, which on fully periodic boxes integrates smooth fields to
/// spectral accuracy; non-periodic axes get standard trapezoid weights
/// (O(h^2) unless the integrand is flat at the boundary, which the bump
/// windows below guarantee).
struct LeafPatch {
    std::string name;
    std::vector<LeafParamSpec> params;
    std::vector<Expression> embedding;  // one expression per chart coordinate

    int param_dim() const { return static_cast<int>(params.size()); }
};

/// Compact-support window over one chart coordinate: the C-infinity bump
/// exp(1 - 1/(1 - s^2)) on the normalized coordinate s in (-1, 1), zero
/// outside with all derivatives vanishing at the edges.
struct BumpWindow {
    int coord = 0;
    double lo = 0.0, hi = 1.0;
};

/// The bump factor as a 2-jet in the windowed coordinate's jet.
Jet2 bump_jet(const Jet2& x, double lo, double hi);

/// A section of the normal bundle used as the variation direction:
/// component expressions plus optional bump windows that realize compact
/// support on non-periodic patches.
struct VariationField {
    VectorFieldSpec spec;
    std::vector<BumpWindow> windows;

    VectorField bind(const Chart& chart) const;
};

/// Check the patch invariants at a coarse sample of grid nodes: embedding
/// rank n everywhere, and tangency of every embedding partial to the
/// foliation (projection to the normal bundle below 1e-8).
void validate_patch(const Chart& chart, const FoliationSpec& fol, const LeafPatch& leaf);

/// Volume of the patch: integral of sqrt(det(Dphi^T g Dphi)).
double leaf_volume(const Chart& chart, const LeafPatch& leaf, int resolution_override = 0);

/// Integral of a pointwise scalar against the induced volume element.
double integrate_leaf(const Chart& chart, const LeafPatch& leaf,
                      const std::function<double(const Point&)>& scalar,
                      int resolution_override = 0);

struct StabilityReport {
    double I_f = 0.0;      // integral of the index form f_{V,V}
    double I_alpha = 0.0;  // integral of |alpha_V|^2
    double residual = 0.0;
    bool stable = false;
    bool hypothesis_minimal = true;
    bool hypothesis_integrable_perp = true;
    std::vector<std::string> warnings;
};

/// Evaluate the two sides of the leaf-stability identity: the integrated
/// index form and the integrated |alpha_V|^2. On a minimal foliation with
/// integrable complement the two agree and I_f >= 0; violated hypotheses
/// attach warnings instead of failing.
StabilityReport stability_report(const Chart& chart, const FoliationSpec& fol,
                                 const LeafPatch& leaf, const VectorField& V,
                                 int resolution_override = 0, double tol = 1e-8);

struct SecondVariationReport {
    double d2vol = 0.0;     // central second difference of the deformed volume
    double I_f = 0.0;       // index-form prediction
    double rel_error = 0.0; // |d2vol - I_f| / max(1, |I_f|)
};

/// Deform the patch along the geodesic flow in direction V for times
/// {-t, 0, +t}, measure the volumes, and compare the second difference
/// against the index form. The parameter Jacobian of the deformed
/// embedding is advected through the flow with dual numbers, so the only
/// discretization errors are the O(t^2) stencil and the quadrature.
SecondVariationReport second_variation_direct(const Chart& chart, const FoliationSpec& fol,
                                              const LeafPatch& leaf, const VectorField& V,
                                              double t_step, int resolution_override = 0,
                                              double geodesic_step = 1e-3);

} // namespace folab
