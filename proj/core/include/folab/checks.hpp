#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "folab/scenario.hpp"

namespace folab {

/// Deterministic sampling plan: Halton points inside the chart box (or a
/// sub-box), with the seed offsetting the sequence start.
struct SamplingPlan {
    int count = 200;
    std::uint64_t seed = 42;
    std::vector<std::pair<double, double>> sub_box;  // optional, one pair per coordinate
};

struct Hypotheses {
    bool minimal = true;
    bool integrable_perp = true;
    bool leaves_compact = true;
    double max_mean_curvature = 0.0;
    double max_frobenius_perp = 0.0;
};

struct WorstPoint {
    std::vector<double> coords;
    double residual = 0.0;
};

/// Result of one named check over one scenario. `pass` always reflects
/// max_residual <= tolerance; `informational` marks reports whose
/// hypotheses failed, where pass/fail carries no verdict about the
/// underlying statement (the CLI only counts non-informational failures
/// unless --strict).
struct CheckReport {
    std::string check;
    std::string scenario;
    std::string subject;  // field or pair the check ran on, when applicable
    Hypotheses hypotheses;
    bool informational = false;
    int samples = 0;
    std::uint64_t seed = 0;
    double max_residual = 0.0;
    double tolerance = 1e-6;
    bool pass = false;
    std::vector<WorstPoint> worst_points;  // up to five, worst first
    std::map<std::string, double> metrics;  // check-specific extras
    std::int64_t wall_ms = 0;
};

std::string report_to_json(const CheckReport& r, bool include_timing = true);
std::string reports_to_json(std::span<const CheckReport> rs, bool include_timing = true);

/// Sample the scenario's hypothesis flags (minimality, normal-bundle
/// integrability) and combine with its compact-leaves declaration.
Hypotheses assess_hypotheses(const Scenario& s, const SamplingPlan& plan);

// --- identity checks (single field pair) ---

/// Residual of f_{V,W} = <alpha_V, alpha_W> - div_L((nabla_V W)_tan).
CheckReport check_lemma2(const Scenario& s, const VectorFieldSpec& V, const VectorFieldSpec& W,
                         const SamplingPlan& plan, double tol = 1e-6);

/// Residual of <J(V), W> = <alpha_V, alpha_W> + div_L(alpha_V^t(W)).
CheckReport check_lemma3(const Scenario& s, const VectorFieldSpec& V, const VectorFieldSpec& W,
                         const SamplingPlan& plan, double tol = 1e-6);

/// Aggregate the lemma checks over `pairs` seeded normal test-field pairs.
CheckReport run_lemma2(const Scenario& s, const SamplingPlan& plan, int pairs = 10,
                       double tol = 1e-6);
CheckReport run_lemma3(const Scenario& s, const SamplingPlan& plan, int pairs = 10,
                       double tol = 1e-6);

// --- field checks ---

/// Killing criterion: max over samples and tangent pairs (coordinate
/// directions plus seeded random pairs) of |<nabla_Y X, Z> + <nabla_Z X, Y>|.
CheckReport check_killing(const Scenario& s, const VectorFieldSpec& X, const SamplingPlan& plan,
                          double tol = 1e-6);

/// Preservation criterion: max over samples and spanning fields F_j of
/// |([X, F_j])_perp|.
CheckReport check_foliation_preserving(const Scenario& s, const VectorFieldSpec& X,
                                       const SamplingPlan& plan, double tol = 1e-8);

/// max |J(X_perp)| over samples.
CheckReport check_jacobi_field(const Scenario& s, const VectorFieldSpec& X,
                               const SamplingPlan& plan, double tol = 1e-6);

// --- structure checks ---

/// Divergence decomposition div_L(Y) = div_M(Y) + <Y, H_perp> on a
/// scenario carrying two orthogonal complementary foliations; runs both
/// orientations of the pair, with Y = alpha_V^t(V) and seeded tangent
/// fields.
CheckReport check_prop3_divergence(const Scenario& s, const VectorFieldSpec& V,
                                   const SamplingPlan& plan, double tol = 1e-6);
CheckReport run_prop3(const Scenario& s, const SamplingPlan& plan, double tol = 1e-6);

/// Transport along a leaf geodesic: for a preserving field X whose normal
/// part vanishes at the start point, |X_perp| must stay zero along the
/// geodesic; reports the bracket source term, the normal-part growth, the
/// speed drift and the leaf-tangency drift.
CheckReport check_prop4_transport(const Scenario& s, const VectorFieldSpec& X,
                                  const GeodesicProbe& probe, double tol = 1e-8);

/// Hypothesis probes exposed as checks (S6 is the designed negative).
CheckReport check_minimality(const Scenario& s, const SamplingPlan& plan, double tol = 1e-8);
CheckReport check_integrability_perp(const Scenario& s, const SamplingPlan& plan,
                                     double tol = 1e-8);

/// Everything applicable to the scenario: the lemma suites, hypothesis
/// probes, tag checks for every named field, the divergence decomposition
/// when a second foliation exists, and transport for preserving fields
/// when a probe is configured.
std::vector<CheckReport> run_all_checks(const Scenario& s, const SamplingPlan& plan,
                                        double tol = 1e-6);

// --- scenario self-test ---

struct SelfTestResult {
    bool ok = true;
    std::vector<std::string> failures;
    std::vector<CheckReport> reports;
};

/// Verify that every built-in scenario passes the checks its description
/// claims and fails exactly the ones it is a counterexample for.
SelfTestResult run_self_test();

} // namespace folab
