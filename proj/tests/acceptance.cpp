// Acceptance suite: one line per criterion, nonzero exit on any failure.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <string>
#include <vector>

#include "folab/checks.hpp"
#include "folab/operators.hpp"
#include "test_support.hpp"

using namespace folab;
using Clock = std::chrono::steady_clock;

namespace {

int g_failures = 0;

void report(int criterion, bool pass, const std::string& what) {
    std::printf("[%s] criterion %2d: %s\n", pass ? "PASS" : "FAIL", criterion, what.c_str());
    if (!pass) ++g_failures;
}

double rel(double a, double b) { return std::abs(a - b) / std::max(1.0, std::abs(b)); }

// ---------------------------------------------------------------- 1 & 2

void criteria_lemmas() {
    const auto t0 = Clock::now();
    const SamplingPlan plan{200, 42, {}};
    double worst2 = 0.0, worst3 = 0.0;
    for (const char* name : {"S1", "S3", "S5", "S5b"}) {
        const Scenario s = builtin_scenario(name);
        worst2 = std::max(worst2, run_lemma2(s, plan, 10).max_residual);
        worst3 = std::max(worst3, run_lemma3(s, plan, 10).max_residual);
    }
    const double secs =
        std::chrono::duration_cast<std::chrono::milliseconds>(Clock::now() - t0).count() / 1e3;

    char buf[160];
    std::snprintf(buf, sizeof buf,
                  "lemma2 residual %.3e < 1e-6 on S1,S3,S5,S5b (10 pairs x 200 pts, %.1fs < 30s)",
                  worst2, secs);
    report(1, worst2 < 1e-6 && secs < 30.0, buf);

    // S1 closed form: both sides equal sin^2(x) to 1e-9
    const Scenario s1 = builtin_scenario("S1");
    const VectorField V =
        VectorField::from_spec(s1.chart, VectorFieldSpec::parse({"0", "0", "sin(x)"}));
    double closed = 0.0;
    for (const Point& p : sample_points(s1.chart, 200, 42)) {
        const double sin2 = std::pow(std::sin(p.x[0]), 2);
        const TangentVector JV = jacobi(s1.chart, s1.foliation, V, p);
        const double lhs = s1.chart.inner(p, JV.v, V.values(p));
        const double rhs = alpha_inner(s1.chart, s1.foliation, V, V, p) +
                           div_leaf_alpha_transpose(s1.chart, s1.foliation, V, V, p);
        closed = std::max({closed, std::abs(lhs - sin2), std::abs(rhs - sin2)});
    }
    std::snprintf(buf, sizeof buf,
                  "lemma3 residual %.3e < 1e-6; S1 closed-form defect %.3e < 1e-9", worst3,
                  closed);
    report(2, worst3 < 1e-6 && closed < 1e-9, buf);
}

// ------------------------------------------------------------------ 3

void criterion_curvature_ledger() {
    const Scenario s = builtin_scenario("S5");
    const VectorField V = s.find_field("V1")->bind(s.chart);
    double d_f = 0.0, d_alpha = 0.0, d_div = 0.0;
    for (const Point& p : sample_points(s.chart, 200, 42)) {
        const double x = p.x[0], y = p.x[1];
        const double lap = -0.6 * std::sin(x) * std::cos(y);
        const double grad2 = std::pow(0.3 * std::cos(x) * std::cos(y), 2) +
                             std::pow(0.3 * std::sin(x) * std::sin(y), 2);
        d_f = std::max(d_f,
                       std::abs(f_vw(s.chart, s.foliation, V, V, p) - (lap + grad2)));
        d_alpha = std::max(
            d_alpha, std::abs(alpha_inner(s.chart, s.foliation, V, V, p) - grad2));
        d_div = std::max(
            d_div, std::abs(div_leaf_nabla_tan(s.chart, s.foliation, V, V, p) + lap));
    }
    char buf[160];
    std::snprintf(buf, sizeof buf,
                  "S5 ledger: |f-(lap+grad2)| %.2e < 1e-7, |alpha^2-grad2| %.2e < 1e-8, "
                  "|div+lap| %.2e < 1e-7",
                  d_f, d_alpha, d_div);
    report(3, d_f < 1e-7 && d_alpha < 1e-8 && d_div < 1e-7, buf);
}

// ------------------------------------------------------------------ 4

void criterion_stability() {
    bool ok = true;
    std::string detail;
    double s1_if = 0.0;
    for (const char* name : {"S1", "S3", "S5"}) {
        const Scenario s = builtin_scenario(name);
        for (const NamedField& f : s.fields) {
            if (!f.tags.empty()) continue;
            const StabilityReport rep =
                stability_report(s.chart, s.foliation, s.leaves[0], f.bind(s.chart), 64);
            ok = ok && rep.I_f >= -1e-8 &&
                 rep.residual <= 1e-6 * std::max(1.0, rep.I_alpha);
            if (std::string(name) == "S1") s1_if = rep.I_f;
        }
    }
    const double two_pi_sq = 2.0 * std::pow(3.14159265358979323846, 2);
    ok = ok && rel(s1_if, two_pi_sq) < 1e-6;
    char buf[160];
    std::snprintf(buf, sizeof buf,
                  "stability identity on S1,S3,S5 at 64^2 (S1 I_f = %.9f vs 2*pi^2, rel %.1e)",
                  s1_if, rel(s1_if, two_pi_sq));
    report(4, ok, buf);
}

// ------------------------------------------------------------------ 5

void criterion_second_variation() {
    bool ok = true;
    double worst_rel = 0.0, worst_ratio = 1e9;
    for (const char* name : {"S1", "S5"}) {
        const Scenario s = builtin_scenario(name);
        const VectorField V = s.find_field("V1")->bind(s.chart);
        const SecondVariationReport full =
            second_variation_direct(s.chart, s.foliation, s.leaves[0], V, 1e-3, 64);
        const SecondVariationReport half =
            second_variation_direct(s.chart, s.foliation, s.leaves[0], V, 5e-4, 64);
        const double e1 = std::abs(full.d2vol - full.I_f);
        const double e2 = std::abs(half.d2vol - half.I_f);
        const double ratio = e2 > 0 ? e1 / e2 : 1e9;
        worst_rel = std::max(worst_rel, full.rel_error);
        worst_ratio = std::min(worst_ratio, ratio);
        ok = ok && full.rel_error < 0.01 && ratio >= 3.5;
    }
    char buf[160];
    std::snprintf(buf, sizeof buf,
                  "second variation on S1,S5: rel err %.2e < 1e-2, halving ratio %.2f >= 3.5",
                  worst_rel, worst_ratio);
    report(5, ok, buf);
}

// ------------------------------------------------------------------ 6

void criterion_hopf() {
    const Scenario s = builtin_scenario("S4");
    const double pi = 3.14159265358979323846;
    const SamplingPlan band{100, 42, {{0.3, pi / 2.0 - 0.3}, {0.0, 2 * pi}, {0.0, 2 * pi}}};
    double min_frob = 1e9;
    for (const Point& p : sample_points(s.chart, band.count, band.seed, band.sub_box))
        min_frob = std::min(min_frob, frobenius_residual_perp(s.chart, s.foliation, p));

    const SamplingPlan plan{100, 42, {}};
    const CheckReport k1_kill = check_killing(s, s.find_field("K1")->spec, plan);
    const CheckReport k1_pres = check_foliation_preserving(s, s.find_field("K1")->spec, plan);
    const CheckReport k0_kill = check_killing(s, s.find_field("K0")->spec, plan);
    const CheckReport k0_pres = check_foliation_preserving(s, s.find_field("K0")->spec, plan);

    const bool ok = min_frob >= 0.5 && k1_kill.pass && !k1_pres.pass &&
                    std::abs(k1_pres.max_residual - 2.0) <= 1e-6 && k0_kill.pass &&
                    k0_pres.pass;
    char buf[200];
    std::snprintf(buf, sizeof buf,
                  "hopf: frobenius >= %.2f, K1 killing %.1e, K1 preserving residual %.9f, "
                  "K0 passes both",
                  min_frob, k1_kill.max_residual, k1_pres.max_residual);
    report(6, ok, buf);
}

// ------------------------------------------------------------------ 7

void criterion_jacobi_realization() {
    bool ok = true;
    double worst_j = 0.0, worst_int = 0.0;
    const SamplingPlan plan{200, 42, {}};
    for (const char* name : {"S1", "S5b"}) {
        const Scenario s = builtin_scenario(name);
        for (const NamedField& f : s.fields) {
            if (!f.has_tag(FieldTag::Preserving)) continue;
            const CheckReport r = check_jacobi_field(s, f.spec, plan);
            worst_j = std::max(worst_j, r.max_residual);
            ok = ok && r.pass;
        }
        // integral identity for seeded normal fields on the compact leaf
        const LeafPatch& leaf = s.leaves[0];
        for (int k = 0; k < 5; ++k) {
            const VectorField V = VectorField::from_spec(
                s.chart, seeded_trig_field(plan.seed * 9 + k, s.chart.coord_names()));
            const std::vector<VectorField> span_b = bind_spanning(s.chart, s.foliation);
            const double lhs = integrate_leaf(s.chart, leaf, [&](const Point& p) {
                const TangentVector JV = jacobi(s.chart, s.foliation, V, p);
                const Frame<double> F = adapted_frame<double>(s.chart, span_b, p);
                const std::vector<double> vp = normal_part(F, V.values(p));
                return s.chart.inner(p, JV.v, vp);
            }, 64);
            const double rhs = integrate_leaf(s.chart, leaf, [&](const Point& p) {
                return alpha_inner(s.chart, s.foliation, V, V, p);
            }, 64);
            const double defect = std::abs(lhs - rhs) / std::max(1.0, rhs);
            worst_int = std::max(worst_int, defect);
            ok = ok && defect < 1e-6;
        }
    }
    char buf[160];
    std::snprintf(buf, sizeof buf,
                  "preserving fields: max |J(X_perp)| %.2e < 1e-6; integral identity defect "
                  "%.2e < 1e-6",
                  worst_j, worst_int);
    report(7, ok, buf);
}

// ------------------------------------------------------------------ 8

void criterion_prop3() {
    const SamplingPlan plan{200, 42, {}};
    const CheckReport flat = run_prop3(builtin_scenario("S2"), plan);
    const CheckReport curved = run_prop3(builtin_scenario("S6"), plan);
    char buf[160];
    std::snprintf(buf, sizeof buf,
                  "divergence decomposition: S2 residual %.2e, S6 residual %.2e (both < 1e-6)",
                  flat.max_residual, curved.max_residual);
    report(8, flat.pass && curved.pass, buf);
}

// ------------------------------------------------------------------ 9

void criterion_prop4() {
    const Scenario s = builtin_scenario("S1");
    const CheckReport r = check_prop4_transport(s, s.find_field("X2")->spec, *s.probe);
    const bool ok = r.metrics.at("perp_max") < 1e-8 && r.metrics.at("speed_drift") < 1e-6 &&
                    r.pass;
    char buf[160];
    std::snprintf(buf, sizeof buf,
                  "transport on S1 (length 10): |X_perp| max %.2e < 1e-8, speed drift %.2e < 1e-6",
                  r.metrics.at("perp_max"), r.metrics.at("speed_drift"));
    report(9, ok, buf);
}

// ----------------------------------------------------------------- 10

void criterion_negative_controls() {
    const Scenario s6 = builtin_scenario("S6");
    double worst = 0.0;
    for (const Point& p : sample_points(s6.chart, 200, 42)) {
        const double h = s6.chart.norm(mean_curvature(s6.chart, s6.foliation, p));
        worst = std::max(worst, std::abs(h - 2.0 / p.x[0]));
    }

    const Scenario s1 = builtin_scenario("S1");
    const CheckReport bad =
        check_killing(s1, VectorFieldSpec::parse({"sin(x)", "0", "0"}), {200, 42, {}});
    const bool ok = worst <= 1e-8 && !bad.pass && std::abs(bad.max_residual - 2.0) <= 1e-3;
    char buf[160];
    std::snprintf(buf, sizeof buf,
                  "negatives: S6 ||H|-2/r| %.2e <= 1e-8; sin(x)d_x killing residual %.6f = 2 "
                  "+- 1e-3",
                  worst, bad.max_residual);
    report(10, ok, buf);
}

// ----------------------------------------------------------------- 11

void criterion_expr_dsl() {
    // 500 accepted (expression, point) cases against central differences
    SplitMix64 rng(20240808);
    const std::vector<std::string> syms = {"x", "y"};
    int accepted = 0, produced = 0;
    double worst = 0.0;
    while (accepted < 500 && produced < 40000) {
        ++produced;
        const Expression e =
            folab::testing::random_expression(rng, syms, 1 + static_cast<int>(rng.next() % 5));
        const double x = rng.uniform(-2.0, 2.0), y = rng.uniform(-2.0, 2.0);
        Jet2 jet;
        try {
            jet = e.evaluate_jet2({{"x", x}, {"y", y}});
        } catch (const EvalError&) {
            continue;
        }
        bool tame = std::isfinite(jet.v) && std::abs(jet.v) < 1e4;
        for (double g : jet.d) tame = tame && std::isfinite(g) && std::abs(g) < 1e4;
        for (double h : jet.h) tame = tame && std::isfinite(h) && std::abs(h) < 1e4;
        if (!tame) continue;

        auto f = [&](std::span<const double> p) {
            return e.evaluate({{"x", p[0]}, {"y", p[1]}});
        };
        const std::vector<double> pt = {x, y};
        folab::testing::FdProbe probe;
        try {
            probe = folab::testing::fd_probe(f, pt, 1e-4, 2e-3, 3e-6);
        } catch (const EvalError&) {
            continue;  // stencil crossed a domain boundary
        }
        if (!probe.ok) continue;  // stencil not converged: too close to a singularity

        for (int a = 0; a < 2; ++a)
            worst = std::max(worst,
                             std::abs(jet.d[a] - probe.grad[a]) /
                                 std::max({1.0, std::abs(jet.d[a]), std::abs(probe.grad[a])}));
        for (int a = 0; a < 2; ++a)
            for (int b = 0; b < 2; ++b)
                worst = std::max(worst,
                                 std::abs(jet.hess(a, b) - probe.hess[a * 2 + b]) /
                                     std::max({1.0, std::abs(jet.hess(a, b)),
                                               std::abs(probe.hess[a * 2 + b])}));
        ++accepted;
    }

    // grammar golden forms, byte-exact
    const std::pair<const char*, const char*> golden[] = {
        {"sin(x)^2 + cos(x)^2", "sin(x)^2+cos(x)^2"},
        {"2*pi", "2*pi"},
        {"-(x+y)*z", "-(x+y)*z"},
        {"x^-2", "x^-2"},
        {"(x^2)^3", "(x^2)^3"},
        {"x^(2^3)", "x^2^3"},
        {"exp(0.6*sin(x)*cos(y))", "exp(0.6*sin(x)*cos(y))"},
        {"1/(2*x)", "1/(2*x)"},
    };
    bool golden_ok = true;
    for (const auto& [src, want] : golden)
        golden_ok = golden_ok && parse_expression(src).str() == want;

    const bool ok = accepted == 500 && worst < 1e-5 && golden_ok;
    char buf[160];
    std::snprintf(buf, sizeof buf,
                  "expr jets vs finite differences: %d cases, worst rel %.2e < 1e-5; golden "
                  "prints %s",
                  accepted, worst, golden_ok ? "byte-exact" : "MISMATCH");
    report(11, ok, buf);
}

} // namespace

int main() {
    const auto t0 = Clock::now();
    criteria_lemmas();            // 1, 2
    criterion_curvature_ledger(); // 3
    criterion_stability();        // 4
    criterion_second_variation(); // 5
    criterion_hopf();             // 6
    criterion_jacobi_realization(); // 7
    criterion_prop3();            // 8
    criterion_prop4();            // 9
    criterion_negative_controls(); // 10
    criterion_expr_dsl();         // 11
    const double secs =
        std::chrono::duration_cast<std::chrono::milliseconds>(Clock::now() - t0).count() / 1e3;
    std::printf("acceptance: %s (%.1fs)\n", g_failures == 0 ? "all criteria pass" : "FAILURES",
                secs);
    return g_failures == 0 ? 0 : 1;
}
