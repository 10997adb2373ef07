#include "folab/checks.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>

#include "folab/operators.hpp"
#include "folab/sampling.hpp"
#include "json.hpp"

namespace folab {

namespace {

using Clock = std::chrono::steady_clock;

std::int64_t ms_since(Clock::time_point t0) {
    return std::chrono::duration_cast<std::chrono::milliseconds>(Clock::now() - t0).count();
}

/// Keep the five worst offenders, worst first.
struct WorstTracker {
    std::vector<WorstPoint> pts;

    void add(const Point& p, double residual) {
        pts.push_back({p.x, residual});
        std::sort(pts.begin(), pts.end(),
                  [](const WorstPoint& a, const WorstPoint& b) { return a.residual > b.residual; });
        if (pts.size() > 5) pts.resize(5);
    }
};

std::vector<Point> plan_points(const Scenario& s, const SamplingPlan& plan) {
    return sample_points(s.chart, plan.count, plan.seed, plan.sub_box);
}

CheckReport base_report(const char* name, const Scenario& s, const SamplingPlan& plan,
                        double tol) {
    CheckReport r;
    r.check = name;
    r.scenario = s.name;
    r.samples = plan.count;
    r.seed = plan.seed;
    r.tolerance = tol;
    r.hypotheses = assess_hypotheses(s, plan);
    return r;
}

void finish(CheckReport& r, const WorstTracker& worst, Clock::time_point t0) {
    r.worst_points = worst.pts;
    r.pass = r.max_residual <= r.tolerance;
    r.wall_ms = ms_since(t0);
}

} // namespace

Hypotheses assess_hypotheses(const Scenario& s, const SamplingPlan& plan) {
    Hypotheses h;
    h.leaves_compact = s.leaves_compact;
    const int count = std::min(plan.count, 50);
    for (const Point& p : sample_points(s.chart, count, plan.seed, plan.sub_box)) {
        h.max_mean_curvature =
            std::max(h.max_mean_curvature, s.chart.norm(mean_curvature(s.chart, s.foliation, p)));
        h.max_frobenius_perp =
            std::max(h.max_frobenius_perp, frobenius_residual_perp(s.chart, s.foliation, p));
    }
    h.minimal = h.max_mean_curvature < 1e-8;
    h.integrable_perp = h.max_frobenius_perp < 1e-8;
    return h;
}

namespace {

CheckReport lemma_check(const char* name, const Scenario& s,
                        const std::vector<std::pair<VectorField, VectorField>>& pairs,
                        const SamplingPlan& plan, double tol, bool lemma3) {
    const auto t0 = Clock::now();
    CheckReport r = base_report(name, s, plan, tol);
    r.informational = !(r.hypotheses.minimal && r.hypotheses.integrable_perp);
    WorstTracker worst;
    const std::vector<Point> pts = plan_points(s, plan);
    for (const auto& [V, W] : pairs) {
        for (const Point& p : pts) {
            double residual = 0.0;
            if (!lemma3) {
                const double lhs = f_vw(s.chart, s.foliation, V, W, p);
                const double rhs = alpha_inner(s.chart, s.foliation, V, W, p) -
                                   div_leaf_nabla_tan(s.chart, s.foliation, V, W, p);
                residual = std::abs(lhs - rhs);
            } else {
                const TangentVector JV = jacobi(s.chart, s.foliation, V, p);
                const Point w = s.chart.wrap(p);
                const std::vector<VectorField> span_b = bind_spanning(s.chart, s.foliation);
                const Frame<double> F = adapted_frame<double>(s.chart, span_b, w);
                const std::vector<double> wp = normal_part(F, W.values(w));
                const double lhs = s.chart.inner(w, JV.v, wp);
                const double rhs = alpha_inner(s.chart, s.foliation, V, W, p) +
                                   div_leaf_alpha_transpose(s.chart, s.foliation, V, W, p);
                residual = std::abs(lhs - rhs);
            }
            if (residual > r.max_residual) r.max_residual = residual;
            if (residual > tol * 0.01) worst.add(s.chart.wrap(p), residual);
        }
    }
    r.samples = plan.count * static_cast<int>(pairs.size());
    finish(r, worst, t0);
    return r;
}

std::vector<std::pair<VectorField, VectorField>> seeded_pairs(const Scenario& s,
                                                              std::uint64_t seed, int pairs) {
    std::vector<std::pair<VectorField, VectorField>> out;
    for (int k = 0; k < pairs; ++k) {
        const VectorFieldSpec V = seeded_trig_field(seed * 1000 + 2 * k, s.chart.coord_names());
        const VectorFieldSpec W =
            seeded_trig_field(seed * 1000 + 2 * k + 1, s.chart.coord_names());
        out.emplace_back(VectorField::from_spec(s.chart, V), VectorField::from_spec(s.chart, W));
    }
    return out;
}

} // namespace

CheckReport check_lemma2(const Scenario& s, const VectorFieldSpec& V, const VectorFieldSpec& W,
                         const SamplingPlan& plan, double tol) {
    std::vector<std::pair<VectorField, VectorField>> pair;
    pair.emplace_back(VectorField::from_spec(s.chart, V), VectorField::from_spec(s.chart, W));
    return lemma_check("lemma2", s, pair, plan, tol, false);
}

CheckReport check_lemma3(const Scenario& s, const VectorFieldSpec& V, const VectorFieldSpec& W,
                         const SamplingPlan& plan, double tol) {
    std::vector<std::pair<VectorField, VectorField>> pair;
    pair.emplace_back(VectorField::from_spec(s.chart, V), VectorField::from_spec(s.chart, W));
    return lemma_check("lemma3", s, pair, plan, tol, true);
}

CheckReport run_lemma2(const Scenario& s, const SamplingPlan& plan, int pairs, double tol) {
    CheckReport r = lemma_check("lemma2", s, seeded_pairs(s, plan.seed, pairs), plan, tol, false);
    r.subject = std::to_string(pairs) + " seeded pairs";
    return r;
}

CheckReport run_lemma3(const Scenario& s, const SamplingPlan& plan, int pairs, double tol) {
    CheckReport r = lemma_check("lemma3", s, seeded_pairs(s, plan.seed, pairs), plan, tol, true);
    r.subject = std::to_string(pairs) + " seeded pairs";
    return r;
}

CheckReport check_killing(const Scenario& s, const VectorFieldSpec& X, const SamplingPlan& plan,
                          double tol) {
    const auto t0 = Clock::now();
    CheckReport r = base_report("killing", s, plan, tol);
    const VectorField Xf = VectorField::from_spec(s.chart, X);
    const int m = s.chart.dim();
    WorstTracker worst;
    SplitMix64 rng(plan.seed ^ 0x9e3779b9ULL);
    for (const Point& p : plan_points(s, plan)) {
        const Point w = s.chart.wrap(p);
        const Connection conn = s.chart.connection_at(w);
        const Mat g = s.chart.metric_at(w);
        const std::vector<Dual> xd = Xf.duals(w);

        auto bilinear = [&](const std::vector<double>& y, const std::vector<double>& z) {
            const std::vector<double> ny = cov_deriv_val(conn, y, xd);
            const std::vector<double> nz = cov_deriv_val(conn, z, xd);
            double a = 0.0, b = 0.0;
            for (int i = 0; i < m; ++i)
                for (int j = 0; j < m; ++j) {
                    a += g(i, j) * ny[i] * z[j];
                    b += g(i, j) * nz[i] * y[j];
                }
            return std::abs(a + b);
        };

        std::vector<std::vector<double>> dirs;
        for (int a = 0; a < m; ++a) {
            std::vector<double> e(m, 0.0);
            e[a] = 1.0 / std::sqrt(g(a, a));
            dirs.push_back(std::move(e));
        }
        for (int extra = 0; extra < 3; ++extra) {
            std::vector<double> y(m);
            for (int a = 0; a < m; ++a) y[a] = rng.symmetric();
            double nn = 0.0;
            for (int i = 0; i < m; ++i)
                for (int j = 0; j < m; ++j) nn += g(i, j) * y[i] * y[j];
            if (nn < 1e-6) continue;
            for (double& c : y) c /= std::sqrt(nn);
            dirs.push_back(std::move(y));
        }

        double local = 0.0;
        for (std::size_t a = 0; a < dirs.size(); ++a)
            for (std::size_t b = a; b < dirs.size(); ++b)
                local = std::max(local, bilinear(dirs[a], dirs[b]));
        if (local > r.max_residual) r.max_residual = local;
        if (local > tol * 0.01) worst.add(w, local);
    }
    finish(r, worst, t0);
    return r;
}

CheckReport check_foliation_preserving(const Scenario& s, const VectorFieldSpec& X,
                                       const SamplingPlan& plan, double tol) {
    const auto t0 = Clock::now();
    CheckReport r = base_report("preserving", s, plan, tol);
    const VectorField Xf = VectorField::from_spec(s.chart, X);
    const std::vector<VectorField> spanning = bind_spanning(s.chart, s.foliation);
    WorstTracker worst;
    for (const Point& p : plan_points(s, plan)) {
        const Point w = s.chart.wrap(p);
        const Frame<double> F = adapted_frame<double>(s.chart, spanning, w);
        const std::vector<Dual> xd = Xf.duals(w);
        double local = 0.0;
        for (const VectorField& Fj : spanning) {
            const std::vector<double> br = bracket_val(xd, Fj.duals(w));
            const std::vector<double> np = normal_part(F, br);
            local = std::max(local, std::sqrt(std::max(0.0, metric_inner(F.g, np, np))));
        }
        if (local > r.max_residual) r.max_residual = local;
        if (local > tol * 0.01) worst.add(w, local);
    }
    finish(r, worst, t0);
    return r;
}

CheckReport check_jacobi_field(const Scenario& s, const VectorFieldSpec& X,
                               const SamplingPlan& plan, double tol) {
    const auto t0 = Clock::now();
    CheckReport r = base_report("jacobi_field", s, plan, tol);
    r.informational = !(r.hypotheses.minimal && r.hypotheses.integrable_perp);
    const VectorField Xf = VectorField::from_spec(s.chart, X);
    WorstTracker worst;
    for (const Point& p : plan_points(s, plan)) {
        const TangentVector j = jacobi(s.chart, s.foliation, Xf, p);
        const double local = s.chart.norm(j);
        if (local > r.max_residual) r.max_residual = local;
        if (local > tol * 0.01) worst.add(s.chart.wrap(p), local);
    }
    finish(r, worst, t0);
    return r;
}

namespace {

double prop3_residual_at(const Scenario& s, const FoliationSpec& leaf_fol,
                         const FoliationSpec& other_fol, const VectorField& V,
                         const std::vector<VectorField>& tangent_fields, const Point& p) {
    const Point w = s.chart.wrap(p);
    const TangentVector Hp = mean_curvature(s.chart, other_fol, w);
    const std::vector<VectorField> span_b = bind_spanning(s.chart, leaf_fol);
    const Frame<Dual> Fd = adapted_frame<Dual>(s.chart, span_b, w);
    const Frame<double> Fv = frame_values(Fd);

    double worst = 0.0;
    auto test_dual_field = [&](const std::vector<Dual>& T) {
        std::vector<double> tv(T.size());
        for (std::size_t k = 0; k < T.size(); ++k) tv[k] = T[k].v;
        const double dl = div_leaf_of_dual(s.chart, leaf_fol, T, w);
        const double dm = div_full_of_dual(s.chart, T, w);
        const double corr = metric_inner(Fv.g, tv, Hp.v);
        worst = std::max(worst, std::abs(dl - dm - corr));
    };

    test_dual_field(alpha_transpose_dual(s.chart, leaf_fol, V, V, w));
    for (const VectorField& Y : tangent_fields)
        test_dual_field(tangent_part(Fd, Y.duals(w)));
    return worst;
}

} // namespace

CheckReport check_prop3_divergence(const Scenario& s, const VectorFieldSpec& V,
                                   const SamplingPlan& plan, double tol) {
    const auto t0 = Clock::now();
    if (!s.foliation2)
        throw MisuseError("prop3 check needs a scenario with two complementary foliations");
    CheckReport r = base_report("prop3", s, plan, tol);
    const VectorField Vf = VectorField::from_spec(s.chart, V);
    std::vector<VectorField> tangent_fields;
    for (int k = 0; k < 2; ++k)
        tangent_fields.push_back(VectorField::from_spec(
            s.chart, seeded_trig_field(plan.seed * 77 + k, s.chart.coord_names())));
    WorstTracker worst;
    for (const Point& p : plan_points(s, plan)) {
        const double a =
            prop3_residual_at(s, s.foliation, *s.foliation2, Vf, tangent_fields, p);
        const double b =
            prop3_residual_at(s, *s.foliation2, s.foliation, Vf, tangent_fields, p);
        const double local = std::max(a, b);
        if (local > r.max_residual) r.max_residual = local;
        if (local > tol * 0.01) worst.add(s.chart.wrap(p), local);
    }
    finish(r, worst, t0);
    return r;
}

CheckReport run_prop3(const Scenario& s, const SamplingPlan& plan, double tol) {
    // prefer a shipped untagged field as the normal section, else a seeded one
    const VectorFieldSpec* shipped = nullptr;
    for (const NamedField& f : s.fields)
        if (f.tags.empty() && f.windows.empty()) {
            shipped = &f.spec;
            break;
        }
    if (shipped) return check_prop3_divergence(s, *shipped, plan, tol);
    return check_prop3_divergence(s, seeded_trig_field(plan.seed * 31, s.chart.coord_names()),
                                  plan, tol);
}

CheckReport check_prop4_transport(const Scenario& s, const VectorFieldSpec& X,
                                  const GeodesicProbe& probe, double tol) {
    const auto t0 = Clock::now();
    SamplingPlan pre_plan{50, 7, {}};
    CheckReport r = base_report("prop4", s, pre_plan, tol);

    const CheckReport preserving = check_foliation_preserving(s, X, pre_plan, 1e-8);
    r.metrics["preserving_residual"] = preserving.max_residual;
    if (!preserving.pass) {
        r.informational = true;  // hypothesis of the transport statement fails
    }

    const VectorField Xf = VectorField::from_spec(s.chart, X);
    const std::vector<VectorField> spanning = bind_spanning(s.chart, s.foliation);

    Point pos = s.chart.wrap(probe.start);
    Frame<double> F0 = adapted_frame<double>(s.chart, spanning, pos);
    std::vector<double> vel = tangent_part(F0, probe.direction);
    const double vnorm = std::sqrt(std::max(0.0, metric_inner(F0.g, vel, vel)));
    if (vnorm < 1e-12)
        throw MisuseError("prop4 probe direction has no tangential component");
    for (double& c : vel) c /= vnorm;

    {
        const std::vector<double> x_perp = normal_part(F0, Xf.values(pos));
        r.metrics["perp_start"] =
            std::sqrt(std::max(0.0, metric_inner(F0.g, x_perp, x_perp)));
    }
    const bool vanishing_start = r.metrics["perp_start"] < 1e-10;

    const int nsteps = std::max(1, static_cast<int>(std::llround(probe.length / probe.step)));
    const double speed0 = metric_inner(F0.g, vel, vel);
    double alpha_res = 0.0, perp_max = 0.0, drift = 0.0, tangency = 0.0;
    WorstTracker worst;
    const int measure_every = std::max(1, nsteps / 512);
    for (int n = 0; n < nsteps; ++n) {
        const GeodesicState step = geodesic_flow(s.chart, pos, vel, probe.step, probe.step);
        pos = s.chart.wrap(step.position);
        vel = step.velocity;
        if (n % measure_every != 0 && n + 1 != nsteps) continue;

        const Frame<Dual> Fd = adapted_frame<Dual>(s.chart, spanning, pos);
        const Frame<double> F = frame_values(Fd);
        const std::vector<Dual> xd = Xf.duals(pos);
        const std::vector<Dual> x_perp_d = normal_part(Fd, xd);
        std::vector<double> x_perp(x_perp_d.size());
        for (std::size_t k = 0; k < x_perp_d.size(); ++k) x_perp[k] = x_perp_d[k].v;
        const double perp_norm = std::sqrt(std::max(0.0, metric_inner(F.g, x_perp, x_perp)));
        perp_max = std::max(perp_max, perp_norm);
        if (perp_norm > tol * 0.01) worst.add(pos, perp_norm);

        // alpha_{X_perp}(cdot^tan) via the frame expansion of the velocity
        std::vector<double> acc(s.chart.dim(), 0.0);
        for (int i = 0; i < F.n; ++i) {
            const double ci = metric_inner(F.g, vel, F.e[i]);
            std::vector<double> br = bracket_val(x_perp_d, Fd.e[i]);
            const std::vector<double> np = normal_part(F, br);
            for (std::size_t k = 0; k < acc.size(); ++k) acc[k] += ci * np[k];
        }
        alpha_res =
            std::max(alpha_res, std::sqrt(std::max(0.0, metric_inner(F.g, acc, acc))));

        const double speed = metric_inner(F.g, vel, vel);
        drift = std::max(drift, std::abs(speed / speed0 - 1.0));
        const std::vector<double> v_perp = normal_part(F, vel);
        const double vperp_norm = std::sqrt(std::max(0.0, metric_inner(F.g, v_perp, v_perp)));
        tangency = std::max(tangency, vperp_norm / std::sqrt(speed));
    }
    if (tangency > 1e-6)
        throw Error("leaf geodesic drifted out of the leaf (tangency defect " +
                    std::to_string(tangency) + "); reduce the step size");

    r.metrics["alpha_residual"] = alpha_res;
    r.metrics["perp_max"] = perp_max;
    r.metrics["speed_drift"] = drift;
    r.metrics["tangency_drift"] = tangency;
    r.samples = nsteps / measure_every;
    r.max_residual = vanishing_start ? std::max(alpha_res, perp_max) : alpha_res;
    finish(r, worst, t0);
    return r;
}

CheckReport check_minimality(const Scenario& s, const SamplingPlan& plan, double tol) {
    const auto t0 = Clock::now();
    CheckReport r = base_report("minimal", s, plan, tol);
    WorstTracker worst;
    for (const Point& p : plan_points(s, plan)) {
        const double h = s.chart.norm(mean_curvature(s.chart, s.foliation, p));
        if (h > r.max_residual) r.max_residual = h;
        if (h > tol * 0.01) worst.add(s.chart.wrap(p), h);
    }
    finish(r, worst, t0);
    return r;
}

CheckReport check_integrability_perp(const Scenario& s, const SamplingPlan& plan, double tol) {
    const auto t0 = Clock::now();
    CheckReport r = base_report("integrable_perp", s, plan, tol);
    WorstTracker worst;
    for (const Point& p : plan_points(s, plan)) {
        const double f = frobenius_residual_perp(s.chart, s.foliation, p);
        if (f > r.max_residual) r.max_residual = f;
        if (f > tol * 0.01) worst.add(s.chart.wrap(p), f);
    }
    finish(r, worst, t0);
    return r;
}

std::vector<CheckReport> run_all_checks(const Scenario& s, const SamplingPlan& plan,
                                        double tol) {
    std::vector<CheckReport> out;
    out.push_back(check_minimality(s, plan));
    // a designed negative (declared non-minimal / non-integrable) must not
    // fail the run: its probe is informational
    out.back().informational = !s.expect_minimal;
    out.push_back(check_integrability_perp(s, plan));
    out.back().informational = !s.expect_integrable_perp;
    out.push_back(run_lemma2(s, plan, 10, tol));
    out.push_back(run_lemma3(s, plan, 10, tol));
    for (const NamedField& f : s.fields) {
        if (f.has_tag(FieldTag::Killing) || f.has_tag(FieldTag::Counterexample)) {
            CheckReport r = check_killing(s, f.spec, plan, tol);
            r.subject = f.name;
            out.push_back(std::move(r));
        }
        if (f.has_tag(FieldTag::Preserving) || f.has_tag(FieldTag::Counterexample)) {
            CheckReport r = check_foliation_preserving(s, f.spec, plan);
            r.subject = f.name;
            // a tagged counterexample is *expected* to fail: informational
            r.informational = f.has_tag(FieldTag::Counterexample);
            out.push_back(std::move(r));
        }
        if (f.has_tag(FieldTag::Preserving)) {
            CheckReport r = check_jacobi_field(s, f.spec, plan, tol);
            r.subject = f.name;
            out.push_back(std::move(r));
        }
    }
    if (s.foliation2) out.push_back(run_prop3(s, plan, tol));
    if (s.probe) {
        for (const NamedField& f : s.fields) {
            if (!f.has_tag(FieldTag::Preserving)) continue;
            CheckReport r = check_prop4_transport(s, f.spec, *s.probe);
            r.subject = f.name;
            out.push_back(std::move(r));
        }
    }
    return out;
}

// --- JSON ---

namespace {

nlohmann::ordered_json to_json_obj(const CheckReport& r, bool include_timing) {
    nlohmann::ordered_json j;
    j["check"] = r.check;
    j["scenario"] = r.scenario;
    if (!r.subject.empty()) j["subject"] = r.subject;
    j["hypotheses"] = {{"minimal", r.hypotheses.minimal},
                       {"integrable_perp", r.hypotheses.integrable_perp},
                       {"leaves_compact", r.hypotheses.leaves_compact}};
    j["informational"] = r.informational;
    j["samples"] = r.samples;
    j["seed"] = r.seed;
    j["max_residual"] = r.max_residual;
    j["tolerance"] = r.tolerance;
    j["pass"] = r.pass;
    nlohmann::ordered_json wp = nlohmann::ordered_json::array();
    for (const WorstPoint& w : r.worst_points)
        wp.push_back({{"coords", w.coords}, {"residual", w.residual}});
    j["worst_points"] = std::move(wp);
    if (!r.metrics.empty()) {
        nlohmann::ordered_json m;
        for (const auto& [k, v] : r.metrics) m[k] = v;
        j["metrics"] = std::move(m);
    }
    j["wall_ms"] = include_timing ? r.wall_ms : 0;
    return j;
}

} // namespace

std::string report_to_json(const CheckReport& r, bool include_timing) {
    return to_json_obj(r, include_timing).dump(2);
}

std::string reports_to_json(std::span<const CheckReport> rs, bool include_timing) {
    nlohmann::ordered_json arr = nlohmann::ordered_json::array();
    for (const CheckReport& r : rs) arr.push_back(to_json_obj(r, include_timing));
    return arr.dump(2);
}

// --- self-test ---

namespace {

struct SelfTest {
    SelfTestResult result;

    void expect(bool cond, const std::string& what) {
        if (!cond) {
            result.ok = false;
            result.failures.push_back(what);
        }
    }
    void keep(CheckReport r) { result.reports.push_back(std::move(r)); }
};

} // namespace

SelfTestResult run_self_test() {
    SelfTest t;
    const SamplingPlan plan{80, 42, {}};

    for (const std::string& name : builtin_scenario_names()) {
        const Scenario s = builtin_scenario(name);
        try {
            validate_scenario(s);
        } catch (const Error& e) {
            t.expect(false, s.name + ": validation failed: " + e.what());
            continue;
        }

        const Hypotheses h = assess_hypotheses(s, plan);
        t.expect(h.minimal == s.expect_minimal,
                 s.name + ": minimality hypothesis mismatch (max |H| = " +
                     std::to_string(h.max_mean_curvature) + ")");
        t.expect(h.integrable_perp == s.expect_integrable_perp,
                 s.name + ": normal-bundle integrability mismatch (residual = " +
                     std::to_string(h.max_frobenius_perp) + ")");

        // tagged fields behave as declared
        for (const NamedField& f : s.fields) {
            if (f.has_tag(FieldTag::Killing) || f.has_tag(FieldTag::Counterexample)) {
                CheckReport r = check_killing(s, f.spec, plan, 1e-6);
                r.subject = f.name;
                t.expect(r.pass, s.name + ": " + f.name + " failed the killing check (residual " +
                                     std::to_string(r.max_residual) + ")");
                t.keep(std::move(r));
            }
            if (f.has_tag(FieldTag::Preserving)) {
                CheckReport r = check_foliation_preserving(s, f.spec, plan, 1e-8);
                r.subject = f.name;
                t.expect(r.pass, s.name + ": " + f.name + " failed the preserving check");
                t.keep(std::move(r));
                if (h.minimal && h.integrable_perp) {
                    CheckReport rj = check_jacobi_field(s, f.spec, plan, 1e-6);
                    rj.subject = f.name;
                    t.expect(rj.pass,
                             s.name + ": J(" + f.name + "_perp) is not zero (residual " +
                                 std::to_string(rj.max_residual) + ")");
                    t.keep(std::move(rj));
                }
            }
            if (f.has_tag(FieldTag::Counterexample)) {
                CheckReport r = check_foliation_preserving(s, f.spec, plan, 1e-8);
                r.subject = f.name;
                r.informational = true;
                t.expect(!r.pass, s.name + ": counterexample " + f.name +
                                      " unexpectedly preserves the foliation");
                t.expect(std::abs(r.max_residual - 2.0) <= 1e-6,
                         s.name + ": counterexample " + f.name + " residual " +
                             std::to_string(r.max_residual) + " is not 2 +- 1e-6");
                t.keep(std::move(r));
            }
        }

        // identity checks where the hypotheses hold
        if (h.minimal && h.integrable_perp) {
            CheckReport l2 = run_lemma2(s, plan, 4, 1e-6);
            t.expect(l2.pass, s.name + ": lemma2 residual " + std::to_string(l2.max_residual));
            t.keep(std::move(l2));
            CheckReport l3 = run_lemma3(s, plan, 4, 1e-6);
            t.expect(l3.pass, s.name + ": lemma3 residual " + std::to_string(l3.max_residual));
            t.keep(std::move(l3));

            // stability of every shipped leaf against every shipped variation field
            for (const LeafPatch& leaf : s.leaves) {
                for (const NamedField& f : s.fields) {
                    if (!f.tags.empty()) continue;
                    const StabilityReport rep =
                        stability_report(s.chart, s.foliation, leaf, f.bind(s.chart), 32);
                    const double rel_tol = s.leaves_compact ? 1e-6 : 1e-5;
                    t.expect(rep.I_f >= -1e-8, s.name + ": leaf " + leaf.name + " with " +
                                                   f.name + " has negative index form");
                    t.expect(rep.residual <= rel_tol * std::max(1.0, rep.I_alpha),
                             s.name + ": stability identity defect " +
                                 std::to_string(rep.residual) + " for " + f.name);
                }
            }
        }

        if (s.foliation2) {
            CheckReport p3 = run_prop3(s, plan, 1e-6);
            t.expect(p3.pass,
                     s.name + ": divergence decomposition residual " +
                         std::to_string(p3.max_residual));
            t.keep(std::move(p3));
        }

        if (s.probe) {
            for (const NamedField& f : s.fields) {
                if (!f.has_tag(FieldTag::Preserving)) continue;
                CheckReport p4 = check_prop4_transport(s, f.spec, *s.probe, 1e-8);
                p4.subject = f.name;
                t.expect(p4.pass, s.name + ": transport check failed for " + f.name);
                t.expect(p4.metrics.at("speed_drift") < 1e-6,
                         s.name + ": geodesic speed drift too large for " + f.name);
                t.keep(std::move(p4));
            }
        }

        // designed negatives
        if (s.name == "hopf") {
            t.expect(h.max_frobenius_perp >= 0.5,
                     "hopf: non-integrability residual unexpectedly small");
        }
        if (s.name == "sphere_leaves") {
            // |H| = 2/r pointwise
            for (const Point& p : sample_points(s.chart, 40, plan.seed)) {
                const double hh = s.chart.norm(mean_curvature(s.chart, s.foliation, p));
                t.expect(std::abs(hh - 2.0 / p.x[0]) <= 1e-8,
                         "sphere_leaves: |H| != 2/r at a sample");
            }
        }
    }
    return t.result;
}

} // namespace folab
