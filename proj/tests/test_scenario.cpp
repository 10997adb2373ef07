#include "doctest.h"

#include <cstdio>
#include <fstream>

#include "folab/checks.hpp"
#include "folab/scenario.hpp"

using namespace folab;

namespace {

std::string scen_path(const char* file) { return std::string(FOLAB_SCENARIO_DIR "/") + file; }

void write_temp(const std::string& path, const std::string& body) {
    std::ofstream out(path);
    out << body;
}

const std::string kMinimalHeader = R"([scenario]
name = tmp
[manifold]
dim = 3
coords = x, y, z
periodic = true, true, true
period = 2*pi, 2*pi, 2*pi
[metric]
g_1_1 = 1
g_2_2 = 1
g_3_3 = 1
)";

} // namespace

TEST_CASE("all builtin scenarios construct and validate") {
    for (const std::string& name : builtin_scenario_names()) {
        Scenario s = builtin_scenario(name);
        CHECK_NOTHROW(validate_scenario(s));
        CHECK(!s.description.empty());
        CHECK(!s.leaves.empty());
    }
    CHECK_THROWS_AS(builtin_scenario("S99"), ScenarioError);
}

TEST_CASE("full names resolve to the same scenarios") {
    CHECK(builtin_scenario("flat_torus3").name == builtin_scenario("S1").name);
    CHECK(builtin_scenario("hopf").name == builtin_scenario("S4").name);
}

TEST_CASE("shipped S1 file round-trips to the builtin") {
    const Scenario file = load_scenario(scen_path("S1_flat_torus3.scn"));
    const Scenario ref = builtin_scenario("S1");

    CHECK(file.name == ref.name);
    CHECK(file.leaves_compact == ref.leaves_compact);
    REQUIRE(file.chart.dim() == ref.chart.dim());
    for (int a = 0; a < ref.chart.dim(); ++a) {
        CHECK(file.chart.coords()[a].name == ref.chart.coords()[a].name);
        CHECK(file.chart.coords()[a].periodic == ref.chart.coords()[a].periodic);
        CHECK(file.chart.coords()[a].lo == ref.chart.coords()[a].lo);
        CHECK(file.chart.coords()[a].hi == ref.chart.coords()[a].hi);
    }
    for (int i = 0; i < ref.chart.dim(); ++i)
        for (int j = 0; j < ref.chart.dim(); ++j)
            CHECK(file.chart.metric_expr(i, j).str() == ref.chart.metric_expr(i, j).str());

    REQUIRE(file.foliation.leaf_dim() == ref.foliation.leaf_dim());
    for (int k = 0; k < ref.foliation.leaf_dim(); ++k)
        for (int c = 0; c < ref.chart.dim(); ++c)
            CHECK(file.foliation.spanning[k].components[c].str() ==
                  ref.foliation.spanning[k].components[c].str());

    REQUIRE(file.fields.size() == ref.fields.size());
    for (std::size_t i = 0; i < ref.fields.size(); ++i) {
        CHECK(file.fields[i].name == ref.fields[i].name);
        CHECK(file.fields[i].tags == ref.fields[i].tags);
        for (int c = 0; c < ref.chart.dim(); ++c)
            CHECK(file.fields[i].spec.components[c].str() ==
                  ref.fields[i].spec.components[c].str());
    }

    REQUIRE(file.leaves.size() == ref.leaves.size());
    const LeafPatch &fl = file.leaves[0], &rl = ref.leaves[0];
    CHECK(fl.name == rl.name);
    REQUIRE(fl.params.size() == rl.params.size());
    for (std::size_t a = 0; a < rl.params.size(); ++a) {
        CHECK(fl.params[a].periodic == rl.params[a].periodic);
        CHECK(fl.params[a].lo == rl.params[a].lo);
        CHECK(fl.params[a].hi == rl.params[a].hi);
        CHECK(fl.params[a].resolution == rl.params[a].resolution);
    }
    for (int c = 0; c < ref.chart.dim(); ++c)
        CHECK(fl.embedding[c].str() == rl.embedding[c].str());

    REQUIRE(file.probe.has_value());
    CHECK(file.probe->start.x == ref.probe->start.x);
    CHECK(file.probe->direction == ref.probe->direction);
    CHECK(file.probe->length == ref.probe->length);
    CHECK(file.probe->step == ref.probe->step);
}

TEST_CASE("every shipped scenario file loads and validates") {
    const char* files[] = {"S1_flat_torus3.scn",  "S2_torus_pair.scn",
                           "S3_plane_stack.scn",  "S4_hopf.scn",
                           "S5_warped_transversal.scn", "S5b_warped_transversal_y.scn",
                           "S6_sphere_leaves.scn"};
    for (const char* f : files) {
        Scenario s = load_scenario(scen_path(f));
        CHECK(!s.name.empty());
    }
}

TEST_CASE("loader rejects a non-involutive distribution with a witness") {
    const std::string path = "/tmp/folab_noninvolutive.scn";
    write_temp(path, kMinimalHeader + R"([foliation]
span = (1, 0, y)
span = (0, 1, 0)
)");
    try {
        load_scenario(path);
        CHECK(false);
    } catch (const ScenarioError& e) {
        const std::string msg = e.what();
        CHECK(msg.find("not involutive") != std::string::npos);
        // residual approaches 1 near y = 0 for this span
        const std::size_t at = msg.find("residual ");
        REQUIRE(at != std::string::npos);
        const double r = std::stod(msg.substr(at + 9));
        CHECK(r > 0.2);
        CHECK(r <= 1.0 + 1e-9);
    }
    std::remove(path.c_str());
}

TEST_CASE("loader rejects an asymmetric metric") {
    const std::string path = "/tmp/folab_asym.scn";
    write_temp(path, R"([manifold]
dim = 2
coords = x, y
periodic = true, true
period = 2*pi, 2*pi
[metric]
g_1_1 = 1
g_2_2 = 1
g_1_2 = x
g_2_1 = y
[foliation]
span = (1, 0)
)");
    CHECK_THROWS_AS(load_scenario(path), ScenarioError);
    std::remove(path.c_str());
}

TEST_CASE("loader reports missing diagonals and bad keys with locations") {
    const std::string path = "/tmp/folab_baddiag.scn";
    write_temp(path, R"([manifold]
dim = 2
coords = x, y
periodic = true, true
period = 2*pi, 2*pi
[metric]
g_1_1 = 1
[foliation]
span = (1, 0)
)");
    CHECK_THROWS_AS(load_scenario(path), ScenarioError);
    std::remove(path.c_str());
}

TEST_CASE("binding rejects symbols that are not chart coordinates") {
    Scenario s = builtin_scenario("S1");
    CHECK_THROWS_AS(
        VectorField::from_spec(s.chart, VectorFieldSpec::parse({"0", "0", "sin(w)"})),
        ScenarioError);
}

TEST_CASE("seeded test fields are deterministic and smooth") {
    const VectorFieldSpec a = seeded_trig_field(1234, {"x", "y"});
    const VectorFieldSpec b = seeded_trig_field(1234, {"x", "y"});
    const VectorFieldSpec c = seeded_trig_field(1235, {"x", "y"});
    REQUIRE(a.components.size() == 2);
    for (int k = 0; k < 2; ++k) {
        CHECK(a.components[k].str() == b.components[k].str());
        CHECK(a.components[k].str() != c.components[k].str());
    }
}

TEST_CASE("sample points are deterministic and respect sub-boxes") {
    Scenario s = builtin_scenario("S4");
    const auto p1 = sample_points(s.chart, 20, 42);
    const auto p2 = sample_points(s.chart, 20, 42);
    REQUIRE(p1.size() == p2.size());
    for (std::size_t i = 0; i < p1.size(); ++i) CHECK(p1[i].x == p2[i].x);
    for (const Point& p : p1) CHECK(s.chart.in_domain(p));

    const auto boxed = sample_points(s.chart, 50, 7, {{0.3, 0.5}, {0.0, 1.0}, {0.0, 1.0}});
    for (const Point& p : boxed) {
        CHECK(p.x[0] >= 0.3);
        CHECK(p.x[0] <= 0.5);
        CHECK(p.x[1] <= 1.0);
    }
}
