// foliation-lab: batch front end for the scenario checks, stability runs
// and second-variation experiments.

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <future>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "folab/checks.hpp"
#include "folab/operators.hpp"

namespace {

using namespace folab;

struct RunConfig {
    int samples = 200;
    std::uint64_t seed = 42;
    double tol = 1e-6;
    int grid = 64;
    double t_step = 1e-3;
    std::string json_path;
    bool strict = false;
    bool no_timestamp = false;
};

SamplingPlan plan_of(const RunConfig& cfg) { return {cfg.samples, cfg.seed, {}}; }

Scenario resolve_scenario(const std::string& name_or_path) {
    for (const std::string& n : builtin_scenario_names())
        if (n == name_or_path || builtin_scenario(n).name == name_or_path)
            return builtin_scenario(name_or_path);
    return load_scenario(name_or_path);
}

int thread_cap() {
    const char* env = std::getenv("FOLIATION_LAB_THREADS");
    if (!env) return 1;
    const int n = std::atoi(env);
    return n > 0 ? n : 1;
}

void print_report(const CheckReport& r) {
    const char* verdict = r.informational ? "INFO" : (r.pass ? "PASS" : "FAIL");
    std::printf("[%s] %-16s scenario=%s%s%s  max_residual=%.3e  tol=%.1e", verdict,
                r.check.c_str(), r.scenario.c_str(), r.subject.empty() ? "" : " subject=",
                r.subject.c_str(), r.max_residual, r.tolerance);
    if (!r.hypotheses.minimal) std::printf("  [not minimal]");
    if (!r.hypotheses.integrable_perp) std::printf("  [perp not integrable]");
    std::printf("\n");
    for (const auto& [k, v] : r.metrics) std::printf("       %s = %.6e\n", k.c_str(), v);
}

void maybe_write_json(const RunConfig& cfg, const std::vector<CheckReport>& reports) {
    if (cfg.json_path.empty()) return;
    std::ofstream out(cfg.json_path);
    if (!out) throw Error("cannot write JSON report to '" + cfg.json_path + "'");
    out << reports_to_json(reports, !cfg.no_timestamp) << "\n";
}

int verdict_of(const RunConfig& cfg, const std::vector<CheckReport>& reports) {
    bool failed = false;
    for (const CheckReport& r : reports) {
        if (!r.pass && (cfg.strict || !r.informational)) failed = true;
    }
    return failed ? 1 : 0;
}

int cmd_list() {
    for (const std::string& n : builtin_scenario_names()) {
        const Scenario s = builtin_scenario(n);
        std::printf("%-4s %-22s dim=%d leaf_dim=%d fields=%zu leaves=%zu\n", n.c_str(),
                    s.name.c_str(), s.chart.dim(), s.foliation.leaf_dim(), s.fields.size(),
                    s.leaves.size());
    }
    return 0;
}

int cmd_describe(const std::string& name, const RunConfig& cfg) {
    const Scenario s = resolve_scenario(name);
    std::printf("%s\n", s.name.c_str());
    std::printf("  %s\n", s.description.c_str());
    std::printf("  coordinates:");
    for (const CoordSpec& c : s.chart.coords()) {
        if (c.periodic)
            std::printf(" %s[period %.6g]", c.name.c_str(), c.period());
        else
            std::printf(" %s(%.6g, %.6g)", c.name.c_str(), c.lo, c.hi);
    }
    std::printf("\n  leaf dimension: %d", s.foliation.leaf_dim());
    if (s.foliation2) std::printf(" (+ second foliation of dimension %d)", s.foliation2->leaf_dim());
    std::printf("\n");
    const Hypotheses h = assess_hypotheses(s, plan_of(cfg));
    std::printf("  hypotheses: minimal=%s (max |H| %.2e), integrable_perp=%s (residual %.2e), "
                "compact leaves=%s\n",
                h.minimal ? "yes" : "no", h.max_mean_curvature,
                h.integrable_perp ? "yes" : "no", h.max_frobenius_perp,
                h.leaves_compact ? "yes" : "no");
    for (const NamedField& f : s.fields) {
        std::printf("  field %-8s", f.name.c_str());
        for (FieldTag t : f.tags)
            std::printf(" [%s]", t == FieldTag::Killing      ? "killing"
                                 : t == FieldTag::Preserving ? "preserving"
                                                             : "counterexample");
        if (!f.windows.empty()) std::printf(" [bump-supported]");
        std::printf("\n");
    }
    for (const LeafPatch& l : s.leaves) {
        std::printf("  leaf %-8s dim=%d resolution=", l.name.c_str(), l.param_dim());
        for (std::size_t a = 0; a < l.params.size(); ++a)
            std::printf("%s%d", a ? "x" : "", l.params[a].resolution);
        std::printf("\n");
    }
    return 0;
}

struct CheckSelection {
    bool all = false;
    bool lemma2 = false, lemma3 = false, prop3 = false;
    std::vector<std::string> killing, preserving, jacobi, prop4;
};

int cmd_check(const std::string& name, const CheckSelection& sel, const RunConfig& cfg) {
    const Scenario s = resolve_scenario(name);
    const SamplingPlan plan = plan_of(cfg);

    auto resolve_field = [&](const std::string& fname) -> const VectorFieldSpec& {
        const NamedField* f = s.find_field(fname);
        if (!f) throw Error("scenario '" + s.name + "' has no field named '" + fname + "'");
        return f->spec;
    };

    std::vector<std::function<CheckReport()>> jobs;
    if (sel.all) {
        // run_all_checks already fixes the ordering; treat as one job list
        for (CheckReport& r : run_all_checks(s, plan, cfg.tol)) {
            CheckReport copy = std::move(r);
            jobs.push_back([copy]() { return copy; });
        }
    } else {
        if (sel.lemma2)
            jobs.push_back([&, plan]() { return run_lemma2(s, plan, 10, cfg.tol); });
        if (sel.lemma3)
            jobs.push_back([&, plan]() { return run_lemma3(s, plan, 10, cfg.tol); });
        for (const std::string& f : sel.killing)
            jobs.push_back([&, f, plan]() {
                CheckReport r = check_killing(s, resolve_field(f), plan, cfg.tol);
                r.subject = f;
                return r;
            });
        for (const std::string& f : sel.preserving)
            jobs.push_back([&, f, plan]() {
                CheckReport r = check_foliation_preserving(s, resolve_field(f), plan);
                r.subject = f;
                return r;
            });
        for (const std::string& f : sel.jacobi)
            jobs.push_back([&, f, plan]() {
                CheckReport r = check_jacobi_field(s, resolve_field(f), plan, cfg.tol);
                r.subject = f;
                return r;
            });
        if (sel.prop3) jobs.push_back([&, plan]() { return run_prop3(s, plan, cfg.tol); });
        for (const std::string& f : sel.prop4)
            jobs.push_back([&, f, plan]() {
                if (!s.probe)
                    throw Error("scenario '" + s.name + "' has no leaf-geodesic probe");
                CheckReport r = check_prop4_transport(s, resolve_field(f), *s.probe);
                r.subject = f;
                return r;
            });
    }
    if (jobs.empty()) throw CLI::ValidationError("check", "no checks selected (try --all)");

    // independent jobs may run in parallel; results keep request order
    std::vector<CheckReport> reports(jobs.size());
    const int threads = thread_cap();
    for (std::size_t base = 0; base < jobs.size(); base += threads) {
        std::vector<std::future<CheckReport>> wave;
        const std::size_t end = std::min(jobs.size(), base + threads);
        for (std::size_t i = base; i < end; ++i)
            wave.push_back(threads > 1 ? std::async(std::launch::async, jobs[i])
                                       : std::async(std::launch::deferred, jobs[i]));
        for (std::size_t i = base; i < end; ++i) reports[i] = wave[i - base].get();
    }

    for (const CheckReport& r : reports) print_report(r);
    maybe_write_json(cfg, reports);
    return verdict_of(cfg, reports);
}

int cmd_stability(const std::string& name, const std::string& leaf_name,
                  const std::string& field_name, const RunConfig& cfg) {
    const Scenario s = resolve_scenario(name);
    const LeafPatch* leaf = s.find_leaf(leaf_name);
    if (!leaf) throw Error("scenario '" + s.name + "' has no leaf named '" + leaf_name + "'");
    const NamedField* field = s.find_field(field_name);
    if (!field) throw Error("scenario '" + s.name + "' has no field named '" + field_name + "'");

    const StabilityReport rep =
        stability_report(s.chart, s.foliation, *leaf, field->bind(s.chart), cfg.grid);
    for (const std::string& w : rep.warnings) std::printf("[WARN] %s\n", w.c_str());
    std::printf("I_f      = %.12g\n", rep.I_f);
    std::printf("I_alpha  = %.12g\n", rep.I_alpha);
    std::printf("residual = %.3e\n", rep.residual);
    std::printf("stable   = %s\n", rep.stable ? "yes" : "no");
    const bool identity_ok = rep.residual <= cfg.tol * std::max(1.0, rep.I_alpha);
    if (!cfg.json_path.empty()) {
        std::ofstream out(cfg.json_path);
        out << "{\n  \"scenario\": \"" << s.name << "\",\n  \"leaf\": \"" << leaf_name
            << "\",\n  \"field\": \"" << field_name << "\",\n  \"I_f\": " << rep.I_f
            << ",\n  \"I_alpha\": " << rep.I_alpha << ",\n  \"residual\": " << rep.residual
            << ",\n  \"stable\": " << (rep.stable ? "true" : "false") << "\n}\n";
    }
    return rep.stable && identity_ok ? 0 : 1;
}

int cmd_variation(const std::string& name, const std::string& leaf_name,
                  const std::string& field_name, const RunConfig& cfg) {
    const Scenario s = resolve_scenario(name);
    const LeafPatch* leaf = s.find_leaf(leaf_name);
    if (!leaf) throw Error("scenario '" + s.name + "' has no leaf named '" + leaf_name + "'");
    const NamedField* field = s.find_field(field_name);
    if (!field) throw Error("scenario '" + s.name + "' has no field named '" + field_name + "'");

    const SecondVariationReport rep = second_variation_direct(
        s.chart, s.foliation, *leaf, field->bind(s.chart), cfg.t_step, cfg.grid);
    std::printf("d2vol     = %.12g\n", rep.d2vol);
    std::printf("I_f       = %.12g\n", rep.I_f);
    std::printf("rel_error = %.3e\n", rep.rel_error);
    return rep.rel_error <= 0.01 ? 0 : 1;
}

int cmd_selftest() {
    const SelfTestResult r = run_self_test();
    std::printf("self-test: %zu reports, %zu failures\n", r.reports.size(), r.failures.size());
    for (const std::string& f : r.failures) std::printf("[FAIL] %s\n", f.c_str());
    std::printf("%s\n", r.ok ? "self-test OK" : "self-test FAILED");
    return r.ok ? 0 : 1;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"foliation-lab: numerical checks for minimal foliations, their Jacobi "
                 "operators, and leaf stability"};
    app.require_subcommand(1);

    RunConfig cfg;
    auto add_common = [&cfg](CLI::App* sub) {
        sub->add_option("--samples", cfg.samples, "sample count (default 200)");
        sub->add_option("--seed", cfg.seed, "sampling seed (default 42)");
        sub->add_option("--tol", cfg.tol, "residual tolerance (default 1e-6)");
        sub->add_option("--grid", cfg.grid, "quadrature grid per axis (default 64)");
        sub->add_option("--t-step", cfg.t_step, "variation step (default 1e-3)");
        sub->add_option("--json", cfg.json_path, "write a JSON report to this path");
        sub->add_flag("--strict", cfg.strict, "count hypothesis-violated checks as failures");
        sub->add_flag("--no-timestamp", cfg.no_timestamp, "zero out timings in JSON output");
    };

    CLI::App* list = app.add_subcommand("list", "list the built-in scenarios");

    std::string scen, leaf_name, field_name;
    CLI::App* describe = app.add_subcommand("describe", "describe one scenario");
    describe->add_option("scenario", scen)->required();
    add_common(describe);

    CheckSelection sel;
    CLI::App* check = app.add_subcommand("check", "run identity and field checks");
    check->add_option("scenario", scen)->required();
    check->add_flag("--all", sel.all, "every check applicable to the scenario");
    check->add_flag("--lemma2", sel.lemma2);
    check->add_flag("--lemma3", sel.lemma3);
    check->add_flag("--prop3", sel.prop3);
    check->add_option("--killing", sel.killing, "field name(s)");
    check->add_option("--preserving", sel.preserving, "field name(s)");
    check->add_option("--jacobi", sel.jacobi, "field name(s)");
    check->add_option("--prop4", sel.prop4, "field name(s)");
    add_common(check);

    CLI::App* stability = app.add_subcommand("stability", "integrated stability identity");
    stability->add_option("scenario", scen)->required();
    stability->add_option("--leaf", leaf_name)->required();
    stability->add_option("--field", field_name)->required();
    add_common(stability);

    CLI::App* variation = app.add_subcommand("variation", "direct second variation of volume");
    variation->add_option("scenario", scen)->required();
    variation->add_option("--leaf", leaf_name)->required();
    variation->add_option("--field", field_name)->required();
    add_common(variation);

    CLI::App* selftest = app.add_subcommand("selftest", "run the scenario self-test matrix");
    add_common(selftest);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        app.exit(e);  // prints help or the error text
        return e.get_exit_code() == 0 ? 0 : 2;
    }

    try {
        if (list->parsed()) return cmd_list();
        if (describe->parsed()) return cmd_describe(scen, cfg);
        if (check->parsed()) return cmd_check(scen, sel, cfg);
        if (stability->parsed()) return cmd_stability(scen, leaf_name, field_name, cfg);
        if (variation->parsed()) return cmd_variation(scen, leaf_name, field_name, cfg);
        if (selftest->parsed()) return cmd_selftest();
    } catch (const CLI::ValidationError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    } catch (const folab::Error& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    }
    return 2;
}
