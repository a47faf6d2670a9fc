#pragma once

#include <fstream>
#include <memory>
#include <sstream>
#include <variant>

#include "microlocal/cellsheaf.hpp"
#include "microlocal/scencli/json_io.hpp"
#include "microlocal/towers.hpp"

namespace microlocal::scencli {

using cellsheaf::CellSheaf;
using cellsheaf::SimplicialComplex;
using exactalg::ChainComplex;
using exactalg::ChainMap;
using exactalg::FgModule;
using exactalg::Matrix;
using exactalg::ModuleMap;
using exactalg::Ring;

inline constexpr const char* scenario_schema = "microlocal-scenario/1";

using VertexTuple = std::vector<std::size_t>;
using SetMapSpec = std::vector<std::size_t>;

struct ComplexSpec
{
    int lowest = 0;
    std::vector<std::size_t> dims;
    std::vector<Grid> differentials; // differentials[i] : degree lowest+i → lowest+i+1
    bool operator==(const ComplexSpec&) const = default;
};

/// Chain map components keyed by degree; absent degrees are zero.
struct MapSpec
{
    std::map<int, Grid> components;
    bool operator==(const MapSpec&) const = default;
};

/// Module with `generators` generators and relation columns.
struct ModuleSpec
{
    std::size_t generators = 0;
    Grid relations; // generators × r
    bool operator==(const ModuleSpec&) const = default;
};

struct SpaceSpec
{
    Grid coordinates;
    std::vector<VertexTuple> simplices;
    bool operator==(const SpaceSpec&) const = default;
};

struct StalkSpec
{
    VertexTuple cell;
    ComplexSpec complex;
    bool operator==(const StalkSpec&) const = default;
};

struct GenerizationSpec
{
    VertexTuple face;
    VertexTuple coface;
    MapSpec map;
    bool operator==(const GenerizationSpec&) const = default;
};

struct IndicatorSpec
{
    std::vector<VertexTuple> cells;
    ComplexSpec complex;
    bool operator==(const IndicatorSpec&) const = default;
};

/// Exactly one of the three forms is used: a constant sheaf, a direct sum of
/// indicator sheaves, or explicit stalks with generization maps.
struct SheafSpec
{
    enum class Form { constant, indicators, explicit_tables };
    Form form = Form::constant;
    ComplexSpec constant;
    std::vector<IndicatorSpec> indicators;
    std::vector<StalkSpec> stalks;
    std::vector<GenerizationSpec> generization;
    bool operator==(const SheafSpec&) const = default;
};

struct SetTowerSpec
{
    std::vector<Rational> critical_values;
    std::vector<std::vector<std::string>> pieces;
    std::vector<SetMapSpec> down;
    bool operator==(const SetTowerSpec&) const = default;
};

struct ComplexTowerSpec
{
    std::vector<Rational> critical_values;
    std::vector<ComplexSpec> pieces;
    std::vector<MapSpec> down;
    std::optional<std::pair<int, int>> degrees;
    std::vector<int> milnor_degrees;
    bool operator==(const ComplexTowerSpec&) const = default;
};

struct ModuleChainSpec
{
    std::vector<ModuleSpec> prefix;
    std::vector<Grid> maps;
    Grid tail;
    bool operator==(const ModuleChainSpec&) const = default;
};

struct ComplexChainSpec
{
    std::vector<ComplexSpec> prefix;
    std::vector<MapSpec> maps;
    MapSpec tail;
    std::vector<int> milnor_degrees;
    bool operator==(const ComplexChainSpec&) const = default;
};

/// An ℕ-indexed tower, of modules or of complexes.
struct MLSpec
{
    std::optional<ModuleChainSpec> modules;
    std::optional<ComplexChainSpec> complexes;
    bool operator==(const MLSpec&) const = default;
};

struct PointedSetSpec
{
    std::vector<std::string> labels;
    std::size_t base = 0;
    bool operator==(const PointedSetSpec&) const = default;
};

struct GroupSpec
{
    std::vector<std::string> labels;
    std::vector<std::vector<std::size_t>> table;
    bool operator==(const GroupSpec&) const = default;
};

template <class V, class M>
struct WitnessSpec
{
    V value;
    M from_point;
    M to_lim;
    bool operator==(const WitnessSpec&) const = default;
};

template <class V, class M>
struct LevelSpec
{
    std::vector<Rational> critical_values;
    std::vector<V> pieces;
    std::vector<M> down;
    std::vector<WitnessSpec<V, M>> witnesses;
    bool operator==(const LevelSpec&) const = default;
};

struct ShadowSpec
{
    int n_max = 0;
    std::optional<LevelSpec<PointedSetSpec, SetMapSpec>> degree0;
    std::optional<LevelSpec<GroupSpec, SetMapSpec>> degree1;
    std::map<int, LevelSpec<ModuleSpec, Grid>> higher;
    bool operator==(const ShadowSpec&) const = default;
};

/// Payload of the deformation, microsupport and crosscheck kinds.
struct GeometrySpec
{
    SpaceSpec space;
    SheafSpec sheaf;
    std::optional<std::vector<Rational>> phi;
    bool include_boundary = false;
    bool operator==(const GeometrySpec&) const = default;
};

using Payload = std::variant<SetTowerSpec, ComplexTowerSpec, MLSpec, ShadowSpec, GeometrySpec>;

/// A JSON pointer into the report and the value expected there.
struct Expectation
{
    std::string path;
    json equals;
    bool operator==(const Expectation&) const = default;
};

struct Scenario
{
    std::string schema = scenario_schema;
    std::string id;
    std::string kind;
    std::string ring = "q";
    std::optional<std::string> description;
    Payload payload;
    std::vector<Expectation> expect;
    bool operator==(const Scenario&) const = default;
};

inline const std::vector<std::string>& scenario_kinds()
{
    static const std::vector<std::string> kinds{"tower-sets",  "tower-complexes", "tower-ml",  "homotopy-shadow",
                                                "deformation", "microsupport",    "crosscheck"};
    return kinds;
}

// ---------------------------------------------------------------------------
// parsing

namespace detail {

inline std::vector<std::string> strings(const Node& n)
{
    std::vector<std::string> out;
    for (auto& x : n.array())
        out.push_back(x.string());
    return out;
}

inline int degree_key(const std::string& key, const Node& where)
{
    std::size_t used = 0;
    int k = 0;
    try {
        k = std::stoi(key, &used);
    } catch (const std::exception&) {
        used = 0;
    }
    if (used != key.size() || key.empty() || std::to_string(k) != key)
        throw where.error("key '" + key + "' is not a degree");
    return k;
}

inline int small_int(const Node& n)
{
    long long v = n.integer();
    if (v < -1000000 || v > 1000000)
        throw n.error("integer out of range");
    return int(v);
}

inline std::vector<int> small_ints(const Node& n)
{
    std::vector<int> out;
    for (auto& x : n.array())
        out.push_back(small_int(x));
    return out;
}

inline VertexTuple vertex_tuple(const Node& n)
{
    VertexTuple t = n.indices();
    if (t.empty())
        throw n.error("a cell needs at least one vertex");
    if (!std::is_sorted(t.begin(), t.end()) || std::adjacent_find(t.begin(), t.end()) != t.end())
        throw n.error("cells are written as strictly increasing vertex tuples");
    return t;
}

inline std::vector<Rational> critical_values(const Node& n)
{
    auto v = n.rationals();
    for (std::size_t i = 0; i + 1 < v.size(); ++i)
        if (!(v[i] < v[i + 1]))
            throw n.error("critical values must be strictly increasing");
    return v;
}

inline ComplexSpec parse_complex(const Node& n)
{
    n.object({"dims"}, {"lowest", "differentials"});
    ComplexSpec c;
    if (auto l = n.get("lowest"))
        c.lowest = small_int(*l);
    c.dims = n["dims"].indices();
    const std::size_t count = c.dims.empty() ? 0 : c.dims.size() - 1;
    if (auto d = n.get("differentials")) {
        auto ds = d->array();
        if (ds.size() != count)
            throw d->error("expected " + std::to_string(count) + " differentials, got " + std::to_string(ds.size()));
        for (std::size_t i = 0; i < count; ++i)
            c.differentials.push_back(ds[i].grid(c.dims[i + 1], c.dims[i]));
    } else {
        for (std::size_t i = 0; i < count; ++i)
            c.differentials.push_back(Grid(c.dims[i + 1], std::vector<Rational>(c.dims[i], Rational(0))));
    }
    return c;
}

inline MapSpec parse_components(const Node& c)
{
    MapSpec m;
    for (auto& [key, g] : c.entries())
        m.components.emplace(degree_key(key, c), g.grid());
    return m;
}

inline MapSpec parse_map(const Node& n)
{
    n.object({}, {"components"});
    auto c = n.get("components");
    return c ? parse_components(*c) : MapSpec{};
}

inline ModuleSpec parse_module(const Node& n)
{
    n.object({"generators"}, {"relations"});
    ModuleSpec m;
    m.generators = n["generators"].index();
    if (auto r = n.get("relations")) {
        auto rows = r->array();
        std::size_t cols = rows.empty() ? 0 : rows.front().array().size();
        m.relations = r->grid(m.generators, cols);
    } else {
        m.relations = Grid(m.generators);
    }
    return m;
}

inline SpaceSpec parse_space(const Node& n)
{
    n.object({"coordinates", "simplices"});
    SpaceSpec s;
    s.coordinates = n["coordinates"].grid();
    for (auto& t : n["simplices"].array())
        s.simplices.push_back(vertex_tuple(t));
    return s;
}

inline SheafSpec parse_sheaf(const Node& n)
{
    n.object({}, {"constant", "indicators", "stalks", "generization"});
    SheafSpec f;
    int forms = int(n.has("constant")) + int(n.has("indicators")) + int(n.has("stalks"));
    if (forms != 1)
        throw n.error("a sheaf is given by exactly one of 'constant', 'indicators' or 'stalks'");
    if (n.has("generization") && !n.has("stalks"))
        throw n.error("'generization' goes with 'stalks'");
    if (auto c = n.get("constant")) {
        f.form = SheafSpec::Form::constant;
        f.constant = parse_complex(*c);
    } else if (auto ind = n.get("indicators")) {
        f.form = SheafSpec::Form::indicators;
        for (auto& i : ind->array()) {
            i.object({"cells", "complex"});
            IndicatorSpec spec;
            for (auto& c : i["cells"].array())
                spec.cells.push_back(vertex_tuple(c));
            spec.complex = parse_complex(i["complex"]);
            f.indicators.push_back(std::move(spec));
        }
    } else {
        f.form = SheafSpec::Form::explicit_tables;
        for (auto& s : n["stalks"].array()) {
            s.object({"cell", "complex"});
            f.stalks.push_back({vertex_tuple(s["cell"]), parse_complex(s["complex"])});
        }
        if (auto g = n.get("generization"))
            for (auto& e : g->array()) {
                e.object({"face", "coface"}, {"components"});
                auto c = e.get("components");
                f.generization.push_back(
                    {vertex_tuple(e["face"]), vertex_tuple(e["coface"]), c ? parse_components(*c) : MapSpec{}});
            }
    }
    return f;
}

inline SetTowerSpec parse_set_tower(const Node& n)
{
    n.object({"critical_values", "pieces", "down"});
    SetTowerSpec t;
    t.critical_values = critical_values(n["critical_values"]);
    for (auto& p : n["pieces"].array())
        t.pieces.push_back(strings(p));
    for (auto& d : n["down"].array())
        t.down.push_back(d.indices());
    return t;
}

inline std::optional<std::pair<int, int>> degree_range(const Node& n)
{
    auto v = small_ints(n);
    if (v.size() != 2 || v[0] > v[1])
        throw n.error("degree range is [lowest, highest]");
    return std::pair{v[0], v[1]};
}

inline ComplexTowerSpec parse_complex_tower(const Node& n)
{
    n.object({"critical_values", "pieces", "down"}, {"degrees", "milnor_degrees"});
    ComplexTowerSpec t;
    t.critical_values = critical_values(n["critical_values"]);
    for (auto& p : n["pieces"].array())
        t.pieces.push_back(parse_complex(p));
    for (auto& d : n["down"].array())
        t.down.push_back(parse_map(d));
    if (auto d = n.get("degrees"))
        t.degrees = degree_range(*d);
    if (auto m = n.get("milnor_degrees"))
        t.milnor_degrees = small_ints(*m);
    return t;
}

inline MLSpec parse_ml(const Node& n)
{
    n.object({}, {"modules", "complexes"});
    if (n.has("modules") == n.has("complexes"))
        throw n.error("give exactly one of 'modules' or 'complexes'");
    MLSpec s;
    if (auto m = n.get("modules")) {
        m->object({"prefix", "maps", "tail"});
        ModuleChainSpec c;
        for (auto& p : (*m)["prefix"].array())
            c.prefix.push_back(parse_module(p));
        if (c.prefix.empty())
            throw (*m)["prefix"].error("tower needs at least one term");
        auto maps = (*m)["maps"].array();
        if (maps.size() + 1 != c.prefix.size())
            throw (*m)["maps"].error("expected one map between consecutive terms");
        for (std::size_t i = 0; i < maps.size(); ++i)
            c.maps.push_back(maps[i].grid(c.prefix[i].generators, c.prefix[i + 1].generators));
        std::size_t g = c.prefix.back().generators;
        c.tail = (*m)["tail"].grid(g, g);
        s.modules = std::move(c);
    } else {
        Node x = n["complexes"];
        x.object({"prefix", "maps", "tail"}, {"milnor_degrees"});
        ComplexChainSpec c;
        for (auto& p : x["prefix"].array())
            c.prefix.push_back(parse_complex(p));
        if (c.prefix.empty())
            throw x["prefix"].error("tower needs at least one term");
        for (auto& p : x["maps"].array())
            c.maps.push_back(parse_map(p));
        if (c.maps.size() + 1 != c.prefix.size())
            throw x["maps"].error("expected one map between consecutive terms");
        c.tail = parse_map(x["tail"]);
        if (auto d = x.get("milnor_degrees"))
            c.milnor_degrees = small_ints(*d);
        s.complexes = std::move(c);
    }
    return s;
}

inline PointedSetSpec parse_pointed(const Node& n)
{
    n.object({"labels", "base"});
    return {strings(n["labels"]), n["base"].index()};
}

inline GroupSpec parse_group(const Node& n)
{
    n.object({"labels", "table"});
    GroupSpec g{strings(n["labels"]), {}};
    for (auto& row : n["table"].array())
        g.table.push_back(row.indices());
    return g;
}

template <class V, class M, class PV, class PM>
LevelSpec<V, M> parse_level(const Node& n, PV value, PM map)
{
    n.object({"critical_values", "pieces", "down", "witnesses"});
    LevelSpec<V, M> l;
    l.critical_values = critical_values(n["critical_values"]);
    for (auto& p : n["pieces"].array())
        l.pieces.push_back(value(p));
    for (auto& d : n["down"].array())
        l.down.push_back(map(d));
    for (auto& w : n["witnesses"].array()) {
        w.object({"value", "from_point", "to_lim"});
        l.witnesses.push_back({value(w["value"]), map(w["from_point"]), map(w["to_lim"])});
    }
    return l;
}

inline ShadowSpec parse_shadow(const Node& n)
{
    n.object({"n_max", "degree0"}, {"degree1", "higher"});
    ShadowSpec s;
    s.n_max = small_int(n["n_max"]);
    if (s.n_max < 0)
        throw n["n_max"].error("n_max must be nonnegative");
    auto indices = [](const Node& x) { return x.indices(); };
    auto grid = [](const Node& x) { return x.grid(); };
    s.degree0 = parse_level<PointedSetSpec, SetMapSpec>(n["degree0"], parse_pointed, indices);
    if (auto d = n.get("degree1"))
        s.degree1 = parse_level<GroupSpec, SetMapSpec>(*d, parse_group, indices);
    if (auto h = n.get("higher"))
        for (auto& [key, lvl] : h->entries()) {
            int k = degree_key(key, *h);
            if (k < 2)
                throw h->error("higher degrees start at 2");
            s.higher.emplace(k, parse_level<ModuleSpec, Grid>(lvl, parse_module, grid));
        }
    return s;
}

inline GeometrySpec parse_geometry(const Node& n, const std::string& kind)
{
    if (kind == "microsupport")
        n.object({"space", "sheaf"}, {"include_boundary"});
    else if (kind == "crosscheck")
        n.object({"space", "sheaf", "phi"}, {"include_boundary"});
    else
        n.object({"space", "sheaf", "phi"});
    GeometrySpec g;
    g.space = parse_space(n["space"]);
    g.sheaf = parse_sheaf(n["sheaf"]);
    if (auto p = n.get("phi"))
        g.phi = p->rationals();
    if (auto b = n.get("include_boundary"))
        g.include_boundary = b->boolean();
    return g;
}

} // namespace detail

inline Scenario parse_scenario(const json& doc)
{
    Node n(doc);
    n.object({"schema", "id", "kind", "ring", "payload"}, {"description", "expect"});
    Scenario s;
    s.schema = n["schema"].string();
    if (s.schema != scenario_schema)
        throw n["schema"].error("unsupported schema version '" + s.schema + "', expected '" + scenario_schema + "'");
    s.id = n["id"].string();
    if (s.id.empty())
        throw n["id"].error("id must be nonempty");
    s.kind = n["kind"].string();
    auto& kinds = scenario_kinds();
    if (std::find(kinds.begin(), kinds.end(), s.kind) == kinds.end())
        throw n["kind"].error("unknown kind '" + s.kind + "'");
    s.ring = n["ring"].string();
    try {
        s.ring = Ring::parse(s.ring).name();
    } catch (const InvalidInput& e) {
        throw n["ring"].error(e.what());
    }
    if (auto d = n.get("description"))
        s.description = d->string();
    Node p = n["payload"];
    if (s.kind == "tower-sets")
        s.payload = detail::parse_set_tower(p);
    else if (s.kind == "tower-complexes")
        s.payload = detail::parse_complex_tower(p);
    else if (s.kind == "tower-ml")
        s.payload = detail::parse_ml(p);
    else if (s.kind == "homotopy-shadow")
        s.payload = detail::parse_shadow(p);
    else
        s.payload = detail::parse_geometry(p, s.kind);
    if (auto e = n.get("expect"))
        for (auto& x : e->array()) {
            x.object({"path", "equals"});
            std::string path = x["path"].string();
            try {
                (void)json::json_pointer(path);
            } catch (const json::exception&) {
                throw x["path"].error("not a JSON pointer: '" + path + "'");
            }
            s.expect.push_back({path, x["equals"].raw()});
        }
    return s;
}

inline Scenario parse_scenario_text(const std::string& text)
{
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        throw SchemaError("", std::string("not valid JSON: ") + e.what());
    }
    return parse_scenario(doc);
}

inline Scenario load_scenario(const std::string& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw InvalidInput("cannot read scenario file '" + path + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_scenario_text(ss.str());
}

// ---------------------------------------------------------------------------
// emission

namespace detail {

inline json emit(const ComplexSpec& c)
{
    json d = json::array();
    for (auto& g : c.differentials)
        d.push_back(to_json(g));
    return {{"lowest", c.lowest}, {"dims", c.dims}, {"differentials", d}};
}

inline json emit(const MapSpec& m)
{
    json c = json::object();
    for (auto& [k, g] : m.components)
        c[std::to_string(k)] = to_json(g);
    return {{"components", c}};
}

inline json emit(const ModuleSpec& m) { return {{"generators", m.generators}, {"relations", to_json(m.relations)}}; }

inline json emit(const PointedSetSpec& p) { return {{"labels", p.labels}, {"base", p.base}}; }

inline json emit(const GroupSpec& g) { return {{"labels", g.labels}, {"table", g.table}}; }

inline json emit(const SetMapSpec& m) { return to_json_indices(m); }

inline json emit(const Grid& g) { return to_json(g); }

inline json emit_tuples(const std::vector<VertexTuple>& ts)
{
    json a = json::array();
    for (auto& t : ts)
        a.push_back(t);
    return a;
}

inline json emit(const SheafSpec& f)
{
    switch (f.form) {
    case SheafSpec::Form::constant:
        return {{"constant", emit(f.constant)}};
    case SheafSpec::Form::indicators: {
        json a = json::array();
        for (auto& i : f.indicators)
            a.push_back({{"cells", emit_tuples(i.cells)}, {"complex", emit(i.complex)}});
        return {{"indicators", a}};
    }
    case SheafSpec::Form::explicit_tables: {
        json st = json::array(), gen = json::array();
        for (auto& s : f.stalks)
            st.push_back({{"cell", s.cell}, {"complex", emit(s.complex)}});
        for (auto& g : f.generization) {
            json e = emit(g.map);
            e["face"] = g.face;
            e["coface"] = g.coface;
            gen.push_back(e);
        }
        return {{"stalks", st}, {"generization", gen}};
    }
    }
    return json::object();
}

template <class T>
json emit_list(const std::vector<T>& v)
{
    json a = json::array();
    for (auto& x : v)
        a.push_back(emit(x));
    return a;
}

template <class V, class M>
json emit(const LevelSpec<V, M>& l)
{
    json w = json::array();
    for (auto& x : l.witnesses)
        w.push_back({{"value", emit(x.value)}, {"from_point", emit(x.from_point)}, {"to_lim", emit(x.to_lim)}});
    return {{"critical_values", to_json(l.critical_values)},
            {"pieces", emit_list(l.pieces)},
            {"down", emit_list(l.down)},
            {"witnesses", w}};
}

struct PayloadEmitter
{
    json operator()(const SetTowerSpec& t) const
    {
        return {{"critical_values", to_json(t.critical_values)}, {"pieces", t.pieces}, {"down", t.down}};
    }

    json operator()(const ComplexTowerSpec& t) const
    {
        json j{{"critical_values", to_json(t.critical_values)},
               {"pieces", emit_list(t.pieces)},
               {"down", emit_list(t.down)}};
        if (t.degrees)
            j["degrees"] = {t.degrees->first, t.degrees->second};
        if (!t.milnor_degrees.empty())
            j["milnor_degrees"] = t.milnor_degrees;
        return j;
    }

    json operator()(const MLSpec& s) const
    {
        if (s.modules)
            return {{"modules",
                     {{"prefix", emit_list(s.modules->prefix)},
                      {"maps", emit_list(s.modules->maps)},
                      {"tail", emit(s.modules->tail)}}}};
        json c{{"prefix", emit_list(s.complexes->prefix)},
               {"maps", emit_list(s.complexes->maps)},
               {"tail", emit(s.complexes->tail)}};
        if (!s.complexes->milnor_degrees.empty())
            c["milnor_degrees"] = s.complexes->milnor_degrees;
        return {{"complexes", c}};
    }

    json operator()(const ShadowSpec& s) const
    {
        json j{{"n_max", s.n_max}, {"degree0", emit(*s.degree0)}};
        if (s.degree1)
            j["degree1"] = emit(*s.degree1);
        if (!s.higher.empty()) {
            json h = json::object();
            for (auto& [k, l] : s.higher)
                h[std::to_string(k)] = emit(l);
            j["higher"] = h;
        }
        return j;
    }

    json operator()(const GeometrySpec& g) const
    {
        json j{{"space", {{"coordinates", to_json(g.space.coordinates)}, {"simplices", emit_tuples(g.space.simplices)}}},
               {"sheaf", emit(g.sheaf)}};
        if (g.phi)
            j["phi"] = to_json(*g.phi);
        if (g.include_boundary)
            j["include_boundary"] = true;
        return j;
    }
};

} // namespace detail

/// Canonical JSON form of a scenario; parse_scenario inverts it.
inline json emit_scenario(const Scenario& s)
{
    json j{{"schema", s.schema},
           {"id", s.id},
           {"kind", s.kind},
           {"ring", s.ring},
           {"payload", std::visit(detail::PayloadEmitter{}, s.payload)}};
    if (s.description)
        j["description"] = *s.description;
    if (!s.expect.empty()) {
        json e = json::array();
        for (auto& x : s.expect)
            e.push_back({{"path", x.path}, {"equals", x.equals}});
        j["expect"] = e;
    }
    return j;
}

// ---------------------------------------------------------------------------
// describing domain objects as specs

inline Grid grid_of(const Matrix& m)
{
    Grid g(m.rows(), std::vector<Rational>(m.cols()));
    for (std::size_t i = 0; i < m.rows(); ++i)
        for (std::size_t j = 0; j < m.cols(); ++j)
            g[i][j] = m(i, j);
    return g;
}

inline ComplexSpec describe_complex(const ChainComplex& c)
{
    ComplexSpec s;
    if (c.empty_range())
        return s;
    s.lowest = c.lowest();
    for (int k = c.lowest(); k <= c.highest(); ++k) {
        s.dims.push_back(c.dim(k));
        if (k < c.highest())
            s.differentials.push_back(grid_of(c.differential(k)));
    }
    return s;
}

/// Nonzero components only.
inline MapSpec describe_map(const ChainMap& f)
{
    MapSpec s;
    for (auto& [k, m] : f.components())
        if (!m.is_zero())
            s.components.emplace(k, grid_of(m));
    return s;
}

inline SpaceSpec describe_space(const SimplicialComplex& k)
{
    SpaceSpec s{k.all_coordinates(), {}};
    for (std::size_t i = 0; i < k.size(); ++i)
        if (k.cofacets(i).empty())
            s.simplices.push_back(k.cell(i));
    return s;
}

/// Explicit stalk and generization tables; zero stalks and maps are omitted.
inline SheafSpec describe_sheaf(const CellSheaf& f)
{
    const SimplicialComplex& k = f.space();
    SheafSpec s;
    s.form = SheafSpec::Form::explicit_tables;
    for (std::size_t i = 0; i < k.size(); ++i)
        if (f.stalk(i).total_rank() > 0)
            s.stalks.push_back({k.cell(i), describe_complex(f.stalk(i))});
    for (std::size_t t = 0; t < k.size(); ++t)
        for (auto [a, sign] : k.facets(t)) {
            MapSpec m = describe_map(f.map(a, t));
            if (!m.components.empty())
                s.generization.push_back({k.cell(a), k.cell(t), std::move(m)});
        }
    return s;
}

// ---------------------------------------------------------------------------
// building domain objects

/// Runs `f`, prefixing construction errors with the payload location.
template <class F>
auto at(const std::string& where, F&& f) -> decltype(f())
{
    try {
        return f();
    } catch (const SchemaError&) {
        throw;
    } catch (const InvalidInput& e) {
        throw SchemaError(where, e.what());
    }
}

inline ChainComplex build_complex(const ComplexSpec& c, const Ring& ring)
{
    std::vector<Matrix> ds;
    for (std::size_t i = 0; i < c.differentials.size(); ++i)
        ds.push_back(Matrix::from_rows(ring, c.differentials[i], c.dims[i]));
    return ChainComplex(ring, c.lowest, c.dims, std::move(ds));
}

inline ChainMap build_map(const MapSpec& m, const ChainComplex& source, const ChainComplex& target)
{
    std::map<int, Matrix> comps;
    for (auto& [k, g] : m.components) {
        if (g.size() != target.dim(k) || (!g.empty() && g.front().size() != source.dim(k)))
            throw InvalidInput("component in degree " + std::to_string(k) + " should be "
                               + std::to_string(target.dim(k)) + "x" + std::to_string(source.dim(k)));
        comps.emplace(k, Matrix::from_rows(source.ring(), g, source.dim(k)));
    }
    return ChainMap(source, target, comps);
}

inline FgModule build_module(const ModuleSpec& m, const Ring& ring)
{
    std::size_t cols = m.relations.empty() ? 0 : m.relations.front().size();
    return FgModule(Matrix::from_rows(ring, m.relations, cols));
}

inline ModuleMap build_module_map(const Grid& g, const FgModule& source, const FgModule& target)
{
    ModuleMap f{source, target, Matrix::from_rows(source.ring(), g, source.generators())};
    f.validate();
    return f;
}

inline std::shared_ptr<const SimplicialComplex> build_space(const SpaceSpec& s)
{
    return std::make_shared<const SimplicialComplex>(s.coordinates, s.simplices);
}

inline std::size_t resolve_cell(const SimplicialComplex& k, const VertexTuple& t)
{
    auto i = k.find(t);
    if (!i)
        throw InvalidInput("cell " + cellsheaf::cell_label(t) + " is not in the complex");
    return *i;
}

inline CellSheaf build_sheaf(const SheafSpec& f, std::shared_ptr<const SimplicialComplex> space, const Ring& ring,
                             const std::string& where)
{
    const SimplicialComplex& k = *space;
    switch (f.form) {
    case SheafSpec::Form::constant: {
        auto c = at(where + "/constant", [&] { return build_complex(f.constant, ring); });
        return CellSheaf::constant(space, c);
    }
    case SheafSpec::Form::indicators: {
        std::optional<CellSheaf> out;
        for (std::size_t i = 0; i < f.indicators.size(); ++i) {
            std::string w = where + "/indicators/" + std::to_string(i);
            auto sheaf = at(w, [&] {
                cellsheaf::CellSet cells;
                for (auto& t : f.indicators[i].cells)
                    cells.push_back(resolve_cell(k, t));
                return CellSheaf::indicator(space, cells, build_complex(f.indicators[i].complex, ring));
            });
            out = out ? direct_sum(*out, sheaf) : sheaf;
        }
        if (!out)
            return CellSheaf::indicator(space, {}, ChainComplex(ring));
        return *out;
    }
    case SheafSpec::Form::explicit_tables: {
        std::vector<ChainComplex> stalks(k.size(), ChainComplex(ring));
        std::vector<bool> seen(k.size(), false);
        for (std::size_t i = 0; i < f.stalks.size(); ++i)
            at(where + "/stalks/" + std::to_string(i), [&] {
                std::size_t c = resolve_cell(k, f.stalks[i].cell);
                if (seen[c])
                    throw InvalidInput("stalk at " + k.label(c) + " given twice");
                seen[c] = true;
                stalks[c] = build_complex(f.stalks[i].complex, ring);
            });
        std::map<CellSheaf::Key, ChainMap> gen;
        for (std::size_t i = 0; i < f.generization.size(); ++i)
            at(where + "/generization/" + std::to_string(i), [&] {
                const auto& g = f.generization[i];
                std::size_t a = resolve_cell(k, g.face), b = resolve_cell(k, g.coface);
                if (!k.is_face(a, b) || k.dim(b) != k.dim(a) + 1)
                    throw InvalidInput("generization " + k.label(a) + " < " + k.label(b)
                                       + " is not a codimension-one face pair");
                if (!gen.emplace(CellSheaf::Key{a, b}, build_map(g.map, stalks[a], stalks[b])).second)
                    throw InvalidInput("generization " + k.label(a) + " < " + k.label(b) + " given twice");
            });
        return at(where, [&] { return CellSheaf(space, ring, stalks, gen); });
    }
    }
    throw InvalidInput("unknown sheaf form");
}

inline cellsheaf::PLFunction build_phi(const std::vector<Rational>& values, const SimplicialComplex& k)
{
    cellsheaf::PLFunction phi{values};
    phi.check(k);
    return phi;
}

inline towers::TameTower<towers::SetTraits> build_set_tower(const SetTowerSpec& t)
{
    std::vector<towers::FiniteSet> pieces;
    for (auto& p : t.pieces)
        pieces.push_back({p});
    return towers::TameTower<towers::SetTraits>(t.critical_values, pieces, t.down);
}

inline towers::TameTower<towers::ComplexTraits> build_complex_tower(const ComplexTowerSpec& t, const Ring& ring,
                                                                   const std::string& where)
{
    std::vector<ChainComplex> pieces;
    for (std::size_t i = 0; i < t.pieces.size(); ++i)
        pieces.push_back(at(where + "/pieces/" + std::to_string(i), [&] { return build_complex(t.pieces[i], ring); }));
    if (t.down.size() + 1 != pieces.size())
        throw SchemaError(where + "/down", "expected one structure map between consecutive strata");
    std::vector<ChainMap> down;
    for (std::size_t i = 0; i < t.down.size(); ++i)
        down.push_back(at(where + "/down/" + std::to_string(i),
                          [&] { return build_map(t.down[i], pieces[i + 1], pieces[i]); }));
    return at(where, [&] { return towers::TameTower<towers::ComplexTraits>(t.critical_values, pieces, down); });
}

inline towers::NTower<towers::ModuleTraits> build_module_chain(const ModuleChainSpec& c, const Ring& ring,
                                                              const std::string& where)
{
    std::vector<FgModule> xs;
    for (std::size_t i = 0; i < c.prefix.size(); ++i)
        xs.push_back(at(where + "/prefix/" + std::to_string(i), [&] { return build_module(c.prefix[i], ring); }));
    std::vector<ModuleMap> maps;
    for (std::size_t i = 0; i < c.maps.size(); ++i)
        maps.push_back(at(where + "/maps/" + std::to_string(i),
                          [&] { return build_module_map(c.maps[i], xs[i + 1], xs[i]); }));
    ModuleMap tail = at(where + "/tail", [&] { return build_module_map(c.tail, xs.back(), xs.back()); });
    return at(where, [&] { return towers::NTower<towers::ModuleTraits>(xs, maps, tail); });
}

inline towers::NTower<towers::ComplexTraits> build_complex_chain(const ComplexChainSpec& c, const Ring& ring,
                                                                const std::string& where)
{
    std::vector<ChainComplex> xs;
    for (std::size_t i = 0; i < c.prefix.size(); ++i)
        xs.push_back(at(where + "/prefix/" + std::to_string(i), [&] { return build_complex(c.prefix[i], ring); }));
    std::vector<ChainMap> maps;
    for (std::size_t i = 0; i < c.maps.size(); ++i)
        maps.push_back(at(where + "/maps/" + std::to_string(i),
                          [&] { return build_map(c.maps[i], xs[i + 1], xs[i]); }));
    ChainMap tail = at(where + "/tail", [&] { return build_map(c.tail, xs.back(), xs.back()); });
    return at(where, [&] { return towers::NTower<towers::ComplexTraits>(xs, maps, tail); });
}

namespace detail {

inline towers::PointedSet build_value(const PointedSetSpec& p, const Ring&) { return {{p.labels}, p.base}; }
inline towers::FiniteGroup build_value(const GroupSpec& g, const Ring&) { return towers::FiniteGroup(g.labels, g.table); }
inline FgModule build_value(const ModuleSpec& m, const Ring& ring) { return build_module(m, ring); }

template <class V>
towers::SetMap build_arrow(const SetMapSpec& m, const V&, const V&)
{
    return m;
}

inline ModuleMap build_arrow(const Grid& g, const FgModule& s, const FgModule& t)
{
    return ModuleMap{s, t, Matrix::from_rows(s.ring(), g, s.generators())};
}

template <class Traits, class V, class M>
towers::ShadowDegree<Traits> build_level(const LevelSpec<V, M>& l, const Ring& ring, const std::string& where)
{
    std::vector<typename Traits::Value> pieces;
    for (std::size_t i = 0; i < l.pieces.size(); ++i)
        pieces.push_back(at(where + "/pieces/" + std::to_string(i), [&] { return build_value(l.pieces[i], ring); }));
    if (l.down.size() + 1 != pieces.size())
        throw SchemaError(where + "/down", "expected one structure map between consecutive strata");
    std::vector<typename Traits::Map> down;
    for (std::size_t i = 0; i < l.down.size(); ++i)
        down.push_back(at(where + "/down/" + std::to_string(i),
                          [&] { return build_arrow(l.down[i], pieces[i + 1], pieces[i]); }));
    auto tower = at(where, [&] { return towers::TameTower<Traits>(l.critical_values, pieces, down); });
    std::vector<towers::LimitWitness<Traits>> ws;
    for (std::size_t c = 0; c < l.witnesses.size() && c < l.critical_values.size(); ++c)
        ws.push_back(at(where + "/witnesses/" + std::to_string(c), [&] {
            auto value = build_value(l.witnesses[c].value, ring);
            auto from = build_arrow(l.witnesses[c].from_point, tower.piece(2 * c + 1), value);
            auto to = build_arrow(l.witnesses[c].to_lim, value, tower.piece(2 * c));
            return towers::LimitWitness<Traits>{value, from, to};
        }));
    if (l.witnesses.size() != l.critical_values.size())
        throw SchemaError(where + "/witnesses", "expected one limit witness per critical value");
    return {tower, ws};
}

} // namespace detail

inline towers::HomotopyShadow build_shadow(const ShadowSpec& s, const Ring& ring, const std::string& where)
{
    towers::HomotopyShadow h;
    h.n_max = s.n_max;
    h.degree0 = detail::build_level<towers::PointedSetTraits>(*s.degree0, ring, where + "/degree0");
    if (s.degree1)
        h.degree1 = detail::build_level<towers::GroupTraits>(*s.degree1, ring, where + "/degree1");
    for (auto& [k, l] : s.higher)
        h.higher.emplace(k, detail::build_level<towers::ModuleTraits>(l, ring, where + "/higher/" + std::to_string(k)));
    return h;
}

} // namespace microlocal::scencli
