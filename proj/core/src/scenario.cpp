#include "folab/scenario.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "folab/sampling.hpp"

namespace folab {

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr double kTwoPi = 2.0 * kPi;

CoordSpec periodic(const std::string& name, double period) { return {name, true, 0.0, period}; }
CoordSpec interval(const std::string& name, double lo, double hi) {
    return {name, false, lo, hi};
}

std::vector<MetricEntry> diag_metric(const std::vector<std::string>& diag) {
    std::vector<MetricEntry> g;
    for (std::size_t i = 0; i < diag.size(); ++i)
        g.push_back({static_cast<int>(i), static_cast<int>(i), parse_expression(diag[i])});
    return g;
}

VectorFieldSpec fields(const std::vector<std::string>& comps) {
    return VectorFieldSpec::parse(comps);
}

LeafPatch torus_leaf_z0() {
    LeafPatch leaf;
    leaf.name = "z0";
    leaf.params = {{"u", true, 0, kTwoPi, 64}, {"v", true, 0, kTwoPi, 64}};
    leaf.embedding = {parse_expression("u"), parse_expression("v"), parse_expression("0")};
    return leaf;
}

Scenario make_s1() {
    Scenario s;
    s.name = "flat_torus3";
    s.description =
        "Flat 3-torus, leaves z = const spanned by (d_x, d_y). Everything is flat and "
        "totally geodesic: the reference case with closed-form values for the index-form "
        "identities (lemma2, lemma3), leaf stability, the direct second variation, and "
        "transport of a preserving field along leaf geodesics (prop4).";
    s.chart = Chart({periodic("x", kTwoPi), periodic("y", kTwoPi), periodic("z", kTwoPi)},
                    diag_metric({"1", "1", "1"}));
    s.foliation = {{fields({"1", "0", "0"}), fields({"0", "1", "0"})}};
    s.fields.push_back({"V1", fields({"0", "0", "sin(x)"}), {}, {}});
    s.fields.push_back({"X1", fields({"1", "0", "0"}),
                        {FieldTag::Killing, FieldTag::Preserving}, {}});
    s.fields.push_back({"X2", fields({"0", "0", "sin(z)"}), {FieldTag::Preserving}, {}});
    s.leaves.push_back(torus_leaf_z0());
    s.probe = GeodesicProbe{{{0.0, 0.0, 0.0}}, {1.0, 0.618, 0.0}, 10.0, 1e-3};
    return s;
}

Scenario make_s2() {
    Scenario s;
    s.name = "torus_pair";
    s.description =
        "Flat 2-torus carrying two orthogonal complementary minimal foliations "
        "(x-circles and y-circles). The closed-manifold setting for the divergence "
        "decomposition (prop3) with vanishing transverse mean curvature; K = d_x + d_y "
        "is a Killing field preserving both.";
    s.chart = Chart({periodic("x", kTwoPi), periodic("y", kTwoPi)}, diag_metric({"1", "1"}));
    s.foliation = {{fields({"1", "0"})}};
    s.foliation2 = FoliationSpec{{fields({"0", "1"})}};
    s.fields.push_back({"K", fields({"1", "1"}), {FieldTag::Killing, FieldTag::Preserving}, {}});
    LeafPatch leaf;
    leaf.name = "x_circle";
    leaf.params = {{"u", true, 0, kTwoPi, 64}};
    leaf.embedding = {parse_expression("u"), parse_expression("0")};
    s.leaves.push_back(std::move(leaf));
    return s;
}

Scenario make_s3() {
    Scenario s;
    s.name = "plane_stack";
    s.description =
        "Stack of flat planes z = const in the open box (-1,1)^3. Leaves are not "
        "compact, so variation fields carry compact-support bump windows; exercises the "
        "stability identity with boundary terms suppressed to all orders.";
    s.chart = Chart({interval("x", -1, 1), interval("y", -1, 1), interval("z", -1, 1)},
                    diag_metric({"1", "1", "1"}));
    s.foliation = {{fields({"1", "0", "0"}), fields({"0", "1", "0"})}};
    s.leaves_compact = false;
    std::vector<BumpWindow> windows = {{0, -1.0, 1.0}, {1, -1.0, 1.0}};
    s.fields.push_back({"V1", fields({"0", "0", "1"}), {}, windows});
    s.fields.push_back(
        {"V2", fields({"0", "0", "1+0.5*sin(pi*x)*cos(pi*y)"}), {}, windows});
    LeafPatch leaf;
    leaf.name = "z0";
    leaf.params = {{"u", false, -1, 1, 64}, {"v", false, -1, 1, 64}};
    leaf.embedding = {parse_expression("u"), parse_expression("v"), parse_expression("0")};
    s.leaves.push_back(std::move(leaf));
    return s;
}

Scenario make_s4() {
    Scenario s;
    s.name = "hopf";
    s.description =
        "Unit round 3-sphere fibered by the great circles tangent to d_xi1 + d_xi2 "
        "(coordinates away from the two degenerate circles). The fibers are geodesics, "
        "so the foliation is minimal, but the orthogonal distribution is nowhere "
        "integrable: the counterexample scenario. K0 = d_xi1 is Killing and "
        "fiber-preserving; K1 is Killing yet fails preservation with constant residual 2.";
    s.chart = Chart({interval("eta", 0.1, kPi / 2.0 - 0.1), periodic("xi1", kTwoPi),
                     periodic("xi2", kTwoPi)},
                    diag_metric({"1", "cos(eta)^2", "sin(eta)^2"}));
    s.foliation = {{fields({"0", "1", "1"})}};
    s.expect_integrable_perp = false;
    s.fields.push_back({"K0", fields({"0", "1", "0"}),
                        {FieldTag::Killing, FieldTag::Preserving}, {}});
    s.fields.push_back({"K1",
                        fields({"cos(xi1+xi2)", "tan(eta)*sin(xi1+xi2)",
                                "-(cos(eta)/sin(eta))*sin(xi1+xi2)"}),
                        {FieldTag::Killing, FieldTag::Counterexample}, {}});
    LeafPatch leaf;
    leaf.name = "fiber";
    leaf.params = {{"u", true, 0, kTwoPi, 64}};
    leaf.embedding = {parse_expression("pi/4"), parse_expression("u"), parse_expression("u")};
    s.leaves.push_back(std::move(leaf));
    return s;
}

Scenario make_s5(bool y_independent) {
    Scenario s;
    const std::string f = y_independent ? "0.3*sin(x)" : "0.3*sin(x)*cos(y)";
    s.name = y_independent ? "warped_transversal_y" : "warped_transversal";
    s.description = y_independent
        ? "T^3 with g = dx^2 + dy^2 + e^{2f} dz^2, f = 0.3 sin(x). The metric ignores y "
          "and z, so d_y and d_z are Killing fields preserving the leaves; the flagship "
          "setting for checking that preserving fields have vanishing Jacobi operator "
          "(jacobi, prop4 corollaries)."
        : "T^3 with g = dx^2 + dy^2 + e^{2f} dz^2, f = 0.3 sin(x) cos(y). Leaves z = "
          "const are totally geodesic but the normal curvature term is nonzero: "
          "<R(V),V> = lap f + |grad f|^2 for the unit normal V = e^{-f} d_z. The curved "
          "workhorse for lemma2, lemma3, stability, and the second variation.";
    s.chart = Chart({periodic("x", kTwoPi), periodic("y", kTwoPi), periodic("z", kTwoPi)},
                    diag_metric({"1", "1", "exp(2*" + f + ")"}));
    s.foliation = {{fields({"1", "0", "0"}), fields({"0", "1", "0"})}};
    s.fields.push_back({"V1", fields({"0", "0", "exp(-(" + f + "))"}), {}, {}});
    if (y_independent) {
        s.fields.push_back({"Ky", fields({"0", "1", "0"}),
                            {FieldTag::Killing, FieldTag::Preserving}, {}});
        s.fields.push_back({"Kz", fields({"0", "0", "1"}),
                            {FieldTag::Killing, FieldTag::Preserving}, {}});
    }
    s.leaves.push_back(torus_leaf_z0());
    return s;
}

Scenario make_s6() {
    Scenario s;
    s.name = "sphere_leaves";
    s.description =
        "Flat annulus 1 < r < 2 in spherical coordinates, foliated by the spheres "
        "r = const (mean curvature 2/r: the minimality negative control) with the "
        "radial lines as the orthogonal foliation. Exercises hypothesis gating and the "
        "divergence decomposition with a nonzero transverse mean-curvature correction.";
    s.chart = Chart({interval("r", 1.0, 2.0), interval("theta", 0.15, kPi - 0.15),
                     periodic("phi", kTwoPi)},
                    diag_metric({"1", "r^2", "r^2*sin(theta)^2"}));
    s.foliation = {{fields({"0", "1", "0"}), fields({"0", "0", "1"})}};
    s.foliation2 = FoliationSpec{{fields({"1", "0", "0"})}};
    s.expect_minimal = false;
    s.fields.push_back({"Vr", fields({"1", "0", "0"}), {}, {}});
    LeafPatch leaf;
    leaf.name = "sphere_r15";
    leaf.params = {{"u", false, 0.15, kPi - 0.15, 64}, {"v", true, 0, kTwoPi, 64}};
    leaf.embedding = {parse_expression("1.5"), parse_expression("u"), parse_expression("v")};
    s.leaves.push_back(std::move(leaf));
    return s;
}

} // namespace

const NamedField* Scenario::find_field(const std::string& field_name) const {
    for (const NamedField& f : fields)
        if (f.name == field_name) return &f;
    return nullptr;
}

const LeafPatch* Scenario::find_leaf(const std::string& leaf_name) const {
    for (const LeafPatch& l : leaves)
        if (l.name == leaf_name) return &l;
    return nullptr;
}

std::vector<std::string> builtin_scenario_names() {
    return {"S1", "S2", "S3", "S4", "S5", "S5b", "S6"};
}

Scenario builtin_scenario(const std::string& name) {
    if (name == "S1" || name == "flat_torus3") return make_s1();
    if (name == "S2" || name == "torus_pair") return make_s2();
    if (name == "S3" || name == "plane_stack") return make_s3();
    if (name == "S4" || name == "hopf") return make_s4();
    if (name == "S5" || name == "warped_transversal") return make_s5(false);
    if (name == "S5b" || name == "warped_transversal_y") return make_s5(true);
    if (name == "S6" || name == "sphere_leaves") return make_s6();
    throw ScenarioError("unknown scenario '" + name + "'");
}

std::vector<Point> sample_points(const Chart& chart, int count, std::uint64_t seed,
                                 const std::vector<std::pair<double, double>>& sub_box) {
    const int m = chart.dim();
    if (!sub_box.empty() && static_cast<int>(sub_box.size()) != m)
        throw MisuseError("sample sub-box must provide one (lo, hi) pair per coordinate");
    const auto unit = halton_points(m, count, seed);
    std::vector<Point> out;
    out.reserve(count);
    for (const auto& u : unit) {
        Point p;
        p.x.resize(m);
        for (int a = 0; a < m; ++a) {
            double lo, hi;
            if (!sub_box.empty()) {
                lo = sub_box[a].first;
                hi = sub_box[a].second;
            } else {
                const CoordSpec& c = chart.coords()[a];
                const double margin = c.periodic ? 0.0 : 0.02 * (c.hi - c.lo);
                lo = c.lo + margin;
                hi = c.hi - margin;
            }
            p.x[a] = lo + u[a] * (hi - lo);
        }
        out.push_back(std::move(p));
    }
    return out;
}

VectorFieldSpec seeded_trig_field(std::uint64_t seed, const std::vector<std::string>& coords) {
    using K = ExprNode::Kind;
    SplitMix64 rng(seed);
    VectorFieldSpec spec;
    for (std::size_t c = 0; c < coords.size(); ++c) {
        Expression comp = Expression::number(rng.symmetric());
        for (const std::string& u : coords) {
            for (int k = 1; k <= 2; ++k) {
                Expression arg = k == 1 ? Expression::symbol(u)
                                        : Expression::binary(K::Mul, Expression::number(2),
                                                             Expression::symbol(u));
                comp = Expression::binary(
                    K::Add, comp,
                    Expression::binary(K::Mul, Expression::number(rng.symmetric()),
                                       Expression::call(Fn::Sin, arg)));
                comp = Expression::binary(
                    K::Add, comp,
                    Expression::binary(K::Mul, Expression::number(rng.symmetric()),
                                       Expression::call(Fn::Cos, arg)));
            }
        }
        spec.components.push_back(std::move(comp));
    }
    return spec;
}

void validate_scenario(const Scenario& s, int samples, std::uint64_t seed) {
    const std::vector<Point> pts = sample_points(s.chart, samples, seed);
    for (const Point& p : pts) s.chart.metric_at(p);  // positive definiteness
    validate_foliation(s.chart, s.foliation, pts);
    if (s.foliation2) {
        validate_foliation(s.chart, *s.foliation2, pts);
        // the pair must be orthogonal and complementary
        const std::vector<VectorField> a = bind_spanning(s.chart, s.foliation);
        const std::vector<VectorField> b = bind_spanning(s.chart, *s.foliation2);
        if (s.foliation.leaf_dim() + s.foliation2->leaf_dim() != s.chart.dim())
            throw ScenarioError("foliation pair does not span the chart dimension");
        for (const Point& p : pts) {
            for (const VectorField& fa : a)
                for (const VectorField& fb : b)
                    if (std::abs(s.chart.inner(p, fa.values(p), fb.values(p))) > 1e-10)
                        throw ScenarioError(
                            "foliation pair is not orthogonal at a sampled point");
        }
    }
    for (const LeafPatch& leaf : s.leaves) validate_patch(s.chart, s.foliation, leaf);
    for (const NamedField& f : s.fields) f.bind(s.chart);  // binding errors surface here
    if (s.probe) {
        if (static_cast<int>(s.probe->start.x.size()) != s.chart.dim() ||
            static_cast<int>(s.probe->direction.size()) != s.chart.dim())
            throw ScenarioError("geodesic probe dimensions do not match the chart");
    }
}

// --- scenario file loader ---

namespace {

struct Line {
    std::string key, value;
    int number = 0;
};

struct Section {
    std::string header;
    std::vector<Line> lines;
    int number = 0;

    const Line* find(const std::string& key) const {
        for (const Line& l : lines)
            if (l.key == key) return &l;
        return nullptr;
    }
    std::vector<const Line*> all(const std::string& key) const {
        std::vector<const Line*> out;
        for (const Line& l : lines)
            if (l.key == key) out.push_back(&l);
        return out;
    }
};

[[noreturn]] void fail(const std::string& path, int line, const std::string& msg) {
    throw ScenarioError(path + ":" + std::to_string(line) + ": " + msg);
}

std::string trim(const std::string& s) {
    std::size_t b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    std::size_t e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

/// Split on top-level commas, respecting parentheses.
std::vector<std::string> split_list(const std::string& s) {
    std::vector<std::string> out;
    int depth = 0;
    std::string cur;
    for (char c : s) {
        if (c == '(') ++depth;
        if (c == ')') --depth;
        if (c == ',' && depth == 0) {
            out.push_back(trim(cur));
            cur.clear();
        } else {
            cur += c;
        }
    }
    const std::string last = trim(cur);
    if (!last.empty()) out.push_back(last);
    return out;
}

/// "(a, b, c)" -> {"a", "b", "c"}
std::vector<std::string> split_tuple(const std::string& path, int line, const std::string& s) {
    const std::string t = trim(s);
    if (t.size() < 2 || t.front() != '(' || t.back() != ')')
        fail(path, line, "expected a parenthesized tuple, found '" + s + "'");
    return split_list(t.substr(1, t.size() - 2));
}

double parse_number(const std::string& path, int line, const std::string& s) {
    try {
        return evaluate_constant(parse_expression(s));
    } catch (const Error& e) {
        fail(path, line, std::string("could not evaluate '" + s + "': ") + e.what());
    }
}

bool parse_bool(const std::string& path, int line, const std::string& s) {
    if (s == "true") return true;
    if (s == "false") return false;
    fail(path, line, "expected true or false, found '" + s + "'");
}

std::vector<Section> read_sections(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ScenarioError("cannot open scenario file '" + path + "'");
    std::vector<Section> sections;
    std::string raw;
    int number = 0;
    while (std::getline(in, raw)) {
        ++number;
        std::string line = trim(raw);
        const std::size_t hash = line.find('#');
        if (hash != std::string::npos) line = trim(line.substr(0, hash));
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']') fail(path, number, "unterminated section header");
            sections.push_back({trim(line.substr(1, line.size() - 2)), {}, number});
            continue;
        }
        const std::size_t eq = line.find('=');
        if (eq == std::string::npos) fail(path, number, "expected key = value");
        if (sections.empty()) fail(path, number, "key outside of any section");
        sections.back().lines.push_back(
            {trim(line.substr(0, eq)), trim(line.substr(eq + 1)), number});
    }
    return sections;
}

std::vector<CoordSpec> parse_axes(const std::string& path, const Section& sec,
                                  const std::vector<std::string>& names) {
    const int m = static_cast<int>(names.size());
    std::vector<CoordSpec> coords(m);
    for (int a = 0; a < m; ++a) coords[a].name = names[a];

    const Line* periodic_line = sec.find("periodic");
    if (!periodic_line) fail(path, sec.number, "missing 'periodic' entry");
    const std::vector<std::string> flags = split_list(periodic_line->value);
    if (static_cast<int>(flags.size()) != m)
        fail(path, periodic_line->number, "'periodic' must list one flag per coordinate");
    int n_periodic = 0, n_interval = 0;
    for (int a = 0; a < m; ++a) {
        coords[a].periodic = parse_bool(path, periodic_line->number, flags[a]);
        coords[a].periodic ? ++n_periodic : ++n_interval;
    }

    if (n_periodic > 0) {
        const Line* period_line = sec.find("period");
        if (!period_line) fail(path, sec.number, "periodic coordinates need a 'period' entry");
        const std::vector<std::string> periods = split_list(period_line->value);
        if (static_cast<int>(periods.size()) != n_periodic)
            fail(path, period_line->number,
                 "'period' must list one value per periodic coordinate");
        int k = 0;
        for (int a = 0; a < m; ++a) {
            if (!coords[a].periodic) continue;
            coords[a].lo = 0.0;
            coords[a].hi = parse_number(path, period_line->number, periods[k++]);
            if (!(coords[a].hi > 0)) fail(path, period_line->number, "period must be positive");
        }
    }
    if (n_interval > 0) {
        const Line* range_line = sec.find("range");
        if (!range_line)
            fail(path, sec.number, "non-periodic coordinates need a 'range' entry");
        const std::vector<std::string> ranges = split_list(range_line->value);
        if (static_cast<int>(ranges.size()) != n_interval)
            fail(path, range_line->number,
                 "'range' must list one (lo, hi) pair per non-periodic coordinate");
        int k = 0;
        for (int a = 0; a < m; ++a) {
            if (coords[a].periodic) continue;
            const std::vector<std::string> pair =
                split_tuple(path, range_line->number, ranges[k++]);
            if (pair.size() != 2) fail(path, range_line->number, "range pair needs two values");
            coords[a].lo = parse_number(path, range_line->number, pair[0]);
            coords[a].hi = parse_number(path, range_line->number, pair[1]);
        }
    }
    return coords;
}

Expression parse_expr_at(const std::string& path, int line, const std::string& src) {
    try {
        return parse_expression(src);
    } catch (const ParseError& e) {
        fail(path, line, std::string(e.what()));
    }
}

} // namespace

Scenario load_scenario(const std::string& path) {
    const std::vector<Section> sections = read_sections(path);

    const Section* manifold = nullptr;
    const Section* metric = nullptr;
    for (const Section& s : sections) {
        if (s.header == "manifold") manifold = &s;
        if (s.header == "metric") metric = &s;
    }
    if (!manifold) throw ScenarioError(path + ": missing [manifold] section");
    if (!metric) throw ScenarioError(path + ": missing [metric] section");

    const Line* dim_line = manifold->find("dim");
    if (!dim_line) fail(path, manifold->number, "missing 'dim'");
    const int m = static_cast<int>(parse_number(path, dim_line->number, dim_line->value));
    const Line* coords_line = manifold->find("coords");
    if (!coords_line) fail(path, manifold->number, "missing 'coords'");
    const std::vector<std::string> names = split_list(coords_line->value);
    if (static_cast<int>(names.size()) != m)
        fail(path, coords_line->number, "'coords' must list dim names");

    std::vector<CoordSpec> coords = parse_axes(path, *manifold, names);

    std::vector<MetricEntry> entries;
    for (const Line& l : metric->lines) {
        // keys of the form g_<i>_<j>, 1-based
        if (l.key.size() < 5 || l.key.rfind("g_", 0) != 0)
            fail(path, l.number, "metric keys look like g_1_2");
        const std::size_t underscore = l.key.find('_', 2);
        if (underscore == std::string::npos) fail(path, l.number, "metric keys look like g_1_2");
        int i = 0, j = 0;
        try {
            i = std::stoi(l.key.substr(2, underscore - 2));
            j = std::stoi(l.key.substr(underscore + 1));
        } catch (...) {
            fail(path, l.number, "metric keys look like g_1_2");
        }
        if (i < 1 || i > m || j < 1 || j > m)
            fail(path, l.number, "metric index out of range in '" + l.key + "'");
        entries.push_back({i - 1, j - 1, parse_expr_at(path, l.number, l.value)});
    }

    Scenario out{.name = "",
                 .description = "",
                 .chart = Chart(std::move(coords), std::move(entries)),
                 .foliation = {},
                 .foliation2 = std::nullopt,
                 .fields = {},
                 .leaves = {},
                 .probe = std::nullopt,
                 .leaves_compact = true,
                 .expect_minimal = true,
                 .expect_integrable_perp = true};

    for (const Section& sec : sections) {
        if (sec.header == "manifold" || sec.header == "metric") continue;
        if (sec.header == "scenario") {
            if (const Line* l = sec.find("name")) out.name = l->value;
            if (const Line* l = sec.find("description")) out.description = l->value;
            if (const Line* l = sec.find("leaves_compact"))
                out.leaves_compact = parse_bool(path, l->number, l->value);
            if (const Line* l = sec.find("expect_minimal"))
                out.expect_minimal = parse_bool(path, l->number, l->value);
            if (const Line* l = sec.find("expect_integrable_perp"))
                out.expect_integrable_perp = parse_bool(path, l->number, l->value);
            continue;
        }
        if (sec.header == "foliation" || sec.header == "foliation2") {
            FoliationSpec fol;
            for (const Line* l : sec.all("span")) {
                const std::vector<std::string> comps = split_tuple(path, l->number, l->value);
                if (static_cast<int>(comps.size()) != m)
                    fail(path, l->number, "spanning field needs one component per coordinate");
                VectorFieldSpec spec;
                for (const std::string& c : comps)
                    spec.components.push_back(parse_expr_at(path, l->number, c));
                fol.spanning.push_back(std::move(spec));
            }
            if (fol.spanning.empty()) fail(path, sec.number, "foliation without span lines");
            if (sec.header == "foliation")
                out.foliation = std::move(fol);
            else
                out.foliation2 = std::move(fol);
            continue;
        }
        if (sec.header.rfind("field ", 0) == 0) {
            NamedField f;
            f.name = trim(sec.header.substr(6));
            const Line* comp_line = sec.find("components");
            if (!comp_line) fail(path, sec.number, "field without 'components'");
            const std::vector<std::string> comps =
                split_tuple(path, comp_line->number, comp_line->value);
            if (static_cast<int>(comps.size()) != m)
                fail(path, comp_line->number, "field needs one component per coordinate");
            for (const std::string& c : comps)
                f.spec.components.push_back(parse_expr_at(path, comp_line->number, c));
            if (const Line* l = sec.find("tags")) {
                for (const std::string& t : split_list(l->value)) {
                    if (t == "killing")
                        f.tags.push_back(FieldTag::Killing);
                    else if (t == "preserving")
                        f.tags.push_back(FieldTag::Preserving);
                    else if (t == "counterexample")
                        f.tags.push_back(FieldTag::Counterexample);
                    else
                        fail(path, l->number, "unknown tag '" + t + "'");
                }
            }
            if (const Line* l = sec.find("bump")) {
                for (const std::string& w : split_list(l->value)) {
                    const std::size_t paren = w.find('(');
                    if (paren == std::string::npos || w.back() != ')')
                        fail(path, l->number, "bump windows look like x(-1, 1)");
                    const std::string cname = trim(w.substr(0, paren));
                    const std::vector<std::string> pair =
                        split_list(w.substr(paren + 1, w.size() - paren - 2));
                    if (pair.size() != 2) fail(path, l->number, "bump window needs (lo, hi)");
                    BumpWindow win;
                    win.coord = out.chart.coord_index(cname);
                    win.lo = parse_number(path, l->number, pair[0]);
                    win.hi = parse_number(path, l->number, pair[1]);
                    f.windows.push_back(win);
                }
            }
            out.fields.push_back(std::move(f));
            continue;
        }
        if (sec.header.rfind("leaf ", 0) == 0) {
            LeafPatch leaf;
            leaf.name = trim(sec.header.substr(5));
            const Line* params_line = sec.find("params");
            if (!params_line) fail(path, sec.number, "leaf without 'params'");
            const std::vector<std::string> pnames = split_list(params_line->value);
            std::vector<CoordSpec> axes = parse_axes(path, sec, pnames);
            std::vector<int> res(pnames.size(), 64);
            if (const Line* l = sec.find("resolution")) {
                const std::vector<std::string> rs = split_list(l->value);
                if (rs.size() != pnames.size())
                    fail(path, l->number, "'resolution' must list one value per parameter");
                for (std::size_t a = 0; a < rs.size(); ++a)
                    res[a] = static_cast<int>(parse_number(path, l->number, rs[a]));
            }
            for (std::size_t a = 0; a < axes.size(); ++a)
                leaf.params.push_back(
                    {axes[a].name, axes[a].periodic, axes[a].lo, axes[a].hi, res[a]});
            const Line* embed_line = sec.find("embed");
            if (!embed_line) fail(path, sec.number, "leaf without 'embed'");
            const std::vector<std::string> comps =
                split_tuple(path, embed_line->number, embed_line->value);
            if (static_cast<int>(comps.size()) != m)
                fail(path, embed_line->number, "embed needs one expression per coordinate");
            for (const std::string& c : comps)
                leaf.embedding.push_back(parse_expr_at(path, embed_line->number, c));
            out.leaves.push_back(std::move(leaf));
            continue;
        }
        if (sec.header == "probe") {
            GeodesicProbe probe;
            const Line* start_line = sec.find("start");
            const Line* dir_line = sec.find("direction");
            if (!start_line || !dir_line)
                fail(path, sec.number, "probe needs 'start' and 'direction'");
            for (const std::string& c : split_tuple(path, start_line->number, start_line->value))
                probe.start.x.push_back(parse_number(path, start_line->number, c));
            for (const std::string& c : split_tuple(path, dir_line->number, dir_line->value))
                probe.direction.push_back(parse_number(path, dir_line->number, c));
            if (const Line* l = sec.find("length"))
                probe.length = parse_number(path, l->number, l->value);
            if (const Line* l = sec.find("step"))
                probe.step = parse_number(path, l->number, l->value);
            out.probe = std::move(probe);
            continue;
        }
        fail(path, sec.number, "unknown section [" + sec.header + "]");
    }

    if (out.foliation.spanning.empty())
        throw ScenarioError(path + ": missing [foliation] section");
    if (out.name.empty()) out.name = path;

    validate_scenario(out);
    return out;
}

} // namespace folab
