#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "folab/leaf.hpp"

namespace folab {

enum class FieldTag { Killing, Preserving, Counterexample };

struct NamedField {
    std::string name;
    VectorFieldSpec spec;
    std::vector<FieldTag> tags;
    std::vector<BumpWindow> windows;  // compact-support windows for variation fields

    bool has_tag(FieldTag t) const {
        for (FieldTag x : tags)
            if (x == t) return true;
        return false;
    }
    VectorField bind(const Chart& chart) const {
        VariationField vf{spec, windows};
        return vf.bind(chart);
    }
};

/// Start data for leaf-geodesic transport checks.
struct GeodesicProbe {
    Point start;
    std::vector<double> direction;  // projected to the leaf and normalized when used
    double length = 10.0;
    double step = 1e-3;
};

/// A complete experiment setup: chart, foliation (optionally a second,
/// orthogonal one), named fields with expectation tags, leaf patches, and
/// flags describing which hypotheses the scenario is meant to satisfy.
struct Scenario {
    std::string name;
    std::string description;
    Chart chart;
    FoliationSpec foliation;
    std::optional<FoliationSpec> foliation2;
    std::vector<NamedField> fields;
    std::vector<LeafPatch> leaves;
    std::optional<GeodesicProbe> probe;
    bool leaves_compact = true;
    // what the scenario is designed to satisfy (checked by self-test)
    bool expect_minimal = true;
    bool expect_integrable_perp = true;

    const NamedField* find_field(const std::string& field_name) const;
    const LeafPatch* find_leaf(const std::string& leaf_name) const;
};

/// Built-in scenario names, in catalog order:
///   S1 flat_torus3, S2 torus_pair, S3 plane_stack, S4 hopf,
///   S5 warped_transversal, S5b warped_transversal_y, S6 sphere_leaves.
std::vector<std::string> builtin_scenario_names();

/// Construct a built-in scenario by short name (S1..S6) or full name.
Scenario builtin_scenario(const std::string& name);

/// Load a scenario from the sectioned key-value file format (see README);
/// the result is fully validated: symmetric positive-definite metric,
/// independent and involutive spanning fields, tangent leaf patches.
Scenario load_scenario(const std::string& path);

/// Validate every scenario invariant at seeded sample points; throws
/// ScenarioError naming a witness on violation.
void validate_scenario(const Scenario& s, int samples = 50, std::uint64_t seed = 7);

/// Halton sample points inside the chart's domain box (non-periodic axes
/// are shrunk by a 2% margin so samples stay strictly interior). The
/// optional sub-box restricts axis ranges: pairs of (lo, hi), one per
/// coordinate, empty pair list = full box.
std::vector<Point> sample_points(const Chart& chart, int count, std::uint64_t seed,
                                 const std::vector<std::pair<double, double>>& sub_box = {});

/// Seeded smooth periodic test field: trigonometric polynomial of degree
/// at most two per coordinate with coefficients in [-1, 1].
VectorFieldSpec seeded_trig_field(std::uint64_t seed, const std::vector<std::string>& coords);

} // namespace folab
