#pragma once

#include "microlocal/microsupport.hpp"
#include "microlocal/scencli/scenario.hpp"

namespace microlocal::scencli {

inline constexpr const char* report_schema = "microlocal-report/1";

enum class Format { json, markdown };

inline Format parse_format(const std::string& s)
{
    if (s == "json")
        return Format::json;
    if (s == "markdown")
        return Format::markdown;
    throw InvalidInput("unknown format '" + s + "'");
}

/// Hypothesis/conclusion summary of one checker run.
struct Verdict
{
    bool hypotheses_hold = true;
    bool conclusion_holds = true;
    bool theorem_violation = false;
};

// ---------------------------------------------------------------------------
// checker reports as JSON

namespace to_report {

inline json cell(const SimplicialComplex& k, std::size_t i) { return k.cell(i); }

inline json cells(const SimplicialComplex& k, const cellsheaf::CellSet& s)
{
    std::vector<cellsheaf::Cell> v;
    for (auto i : s)
        v.push_back(k.cell(i));
    std::sort(v.begin(), v.end());
    json a = json::array();
    for (auto& c : v)
        a.push_back(c);
    return a;
}

inline json vectors(const std::vector<microsupport::Vector>& vs)
{
    json a = json::array();
    for (auto& v : vs)
        a.push_back(to_json(v));
    return a;
}

inline json optional_index(const std::optional<std::size_t>& v) { return v ? json(*v) : json(nullptr); }

inline json constancy(const towers::ConstancyReport& r)
{
    json crit = json::array();
    for (auto& c : r.critical)
        crit.push_back({{"value", to_json(c.value)},
                        {"lim_bijective", c.lim_bijective},
                        {"colim_bijective", c.colim_bijective}});
    json ff = nullptr;
    if (r.first_failure)
        ff = {{"value", to_json(r.first_failure->value)}, {"side", r.first_failure->side}};
    return {{"critical", crit},
            {"criterion_satisfied", r.criterion_satisfied},
            {"first_failure", ff},
            {"constant", r.constant},
            {"theorem_violation", r.theorem_violation}};
}

template <class Tower>
json pair_degrees(const Tower& t, const std::vector<towers::PairDegree>& ps)
{
    json a = json::array();
    for (auto& p : ps)
        a.push_back({{"lower", t.stratum_name(p.lower)}, {"upper", t.stratum_name(p.upper)}, {"degree", p.degree}});
    return a;
}

inline json ml(const towers::MLVerdict& v)
{
    return {{"holds", v.holds},
            {"stabilization_index", optional_index(v.stabilization_index)},
            {"counterexample", v.counterexample},
            {"lim1_vanishes", towers::to_string(v.lim1_vanishes)}};
}

inline json milnor(const towers::MilnorReport& r)
{
    json entries = json::array();
    for (auto& e : r.entries)
        entries.push_back({{"label", e.label},
                           {"rank_of_limit_cohomology", e.rank_of_limit_cohomology},
                           {"rank_of_cohomology_limit", e.rank_of_cohomology_limit},
                           {"equal", e.equal()}});
    return {{"n", r.n},
            {"status", towers::to_string(r.status)},
            {"next_degree_ml", r.next_degree_ml ? ml(*r.next_degree_ml) : json(nullptr)},
            {"entries", entries},
            {"detail", r.detail}};
}

inline json complex_constancy(const towers::TameTower<towers::ComplexTraits>& t,
                              const towers::ComplexConstancyReport& r)
{
    json maps = json::array();
    for (auto& s : r.structure_maps)
        maps.push_back({{"from", t.stratum_name(s.from)},
                        {"to", t.stratum_name(s.to)},
                        {"non_surjective_degrees", s.non_surjective_degrees}});
    json crit = json::array();
    for (auto& c : r.critical)
        crit.push_back({{"value", to_json(c.value)},
                        {"lim_failures", c.lim_failures},
                        {"colim_failures", c.colim_failures},
                        {"onto_lim_failures", c.onto_lim_failures},
                        {"bij_lim_failures", c.bij_lim_failures}});
    return {{"degrees", {r.lowest_degree, r.highest_degree}},
            {"structure_maps", maps},
            {"critical", crit},
            {"hypotheses",
             {{"degreewise-surjective", r.surjectivity_holds()},
              {"lim-isomorphism", r.lim_condition_holds()},
              {"cohomology-colim-isomorphism", r.colim_condition_holds()}}},
            {"assertions",
             {{"onto-lim-cohomology", r.onto_lim_holds()},
              {"rho-cohomology-surjective", r.rho_not_surjective.empty()},
              {"bijective-onto-lim-cohomology", r.bij_lim_holds()}}},
            {"rho_not_surjective", pair_degrees(t, r.rho_not_surjective)},
            {"rho_not_isomorphism", pair_degrees(t, r.rho_not_isomorphism)},
            {"failures", r.failures()},
            {"conclusion_holds", r.conclusion_holds()},
            {"theorem_violation", r.theorem_violation()}};
}

inline json shadow(const towers::ShadowReport& r)
{
    json degrees = json::array();
    for (auto& d : r.degrees) {
        json crit = json::array();
        for (auto& c : d.critical)
            crit.push_back({{"value", to_json(c.value)},
                            {"colim_bijective", c.colim_bijective},
                            {"onto_lim", c.onto_lim},
                            {"witness_onto_lim", c.witness_onto_lim},
                            {"witness_bijective", c.witness_bijective},
                            {"bijective_onto_lim", c.bijective_onto_lim}});
        json ns = json::array();
        for (auto [from, to] : d.non_surjective_maps)
            ns.push_back({from, to});
        degrees.push_back({{"n", d.n},
                           {"critical", crit},
                           {"non_surjective_maps", ns},
                           {"next_degree_ml", d.next_degree_ml ? json(*d.next_degree_ml) : json(nullptr)},
                           {"pipeline_constant", d.pipeline_constant},
                           {"constant", d.constant}});
    }
    return {{"degrees", degrees},
            {"all_constant", r.all_constant},
            {"pipeline_all_constant", r.pipeline_all_constant},
            {"theorem_violation", r.theorem_violation}};
}

inline json sample(const cellsheaf::SampleSections& s)
{
    json h = json::object(), b = json::object();
    for (auto& [j, m] : s.cohomology) {
        h[std::to_string(j)] = m.describe();
        b[std::to_string(j)] = m.free_rank();
    }
    return {{"s", to_json(s.s)}, {"cells", s.cells}, {"cohomology", h}, {"betti", b}};
}

inline json deformation(const SimplicialComplex& k, const cellsheaf::DeformationReport& r)
{
    json z = json::array();
    for (auto& [s, cs] : r.z_sets)
        z.push_back({{"s", to_json(s)}, {"cells", cells(k, cs)}});
    json fails = json::array();
    for (auto& c : r.failures())
        fails.push_back({{"s", to_json(c.s)}, {"t", to_json(c.t)}, {"cell", cell(k, c.cell)}});
    json res = json::array();
    for (auto& c : r.restrictions)
        res.push_back({{"whole", c.whole},
                       {"t", to_json(c.t)},
                       {"s", to_json(c.s)},
                       {"quasi_iso", c.quasi_iso},
                       {"failing_degree", c.failing_degree ? json(*c.failing_degree) : json(nullptr)}});
    json secs = json::array();
    for (auto& s : r.sections)
        secs.push_back(sample(s));
    return {{"critical_values", to_json(r.critical_values)},
            {"samples", to_json(r.samples)},
            {"hypotheses",
             {{"exhaustive", r.exhaustive},
              {"compact_closures", r.compact_closures},
              {"stalk_condition", r.condition_holds()}}},
            {"z_sets", z},
            {"stalk_conditions_checked", r.stalk_conditions.size()},
            {"condition_failures", fails},
            {"restrictions", res},
            {"sections", secs},
            {"whole", sample(r.whole)},
            {"conclusion_holds", r.conclusion_holds()},
            {"theorem_violation", r.theorem_violation()}};
}

inline std::string cone_verdict(const microsupport::ConeVerdict& v)
{
    if (!v.in_ss)
        return "outside";
    return v.morse_nonacyclic ? "in SS" : "in SS (closure)";
}

inline json micro_support(const SimplicialComplex& k, const CellSheaf& f, const microsupport::MicroSupportReport& r)
{
    std::vector<const microsupport::CellMicroSupport*> order;
    for (auto& c : r.cells)
        order.push_back(&c);
    std::sort(order.begin(), order.end(), [&](auto a, auto b) { return k.cell(a->cell) < k.cell(b->cell); });
    json cs = json::array();
    cellsheaf::CellSet covered;
    for (auto c : order) {
        covered.push_back(c->cell);
        json cones = json::array();
        for (std::size_t i = 0; i < c->fan.cones.size(); ++i) {
            const auto& cone = c->fan.cones[i];
            cones.push_back({{"dimension", cone.dimension},
                             {"generators", vectors(c->fan.generators(i))},
                             {"representative", to_json(cone.representative)},
                             {"morse_nonacyclic", c->verdicts[i].morse_nonacyclic},
                             {"in_ss", c->verdicts[i].in_ss},
                             {"verdict", cone_verdict(c->verdicts[i])}});
        }
        cs.push_back({{"cell", cell(k, c->cell)},
                      {"boundary", c->boundary},
                      {"zero_section", c->zero_section},
                      {"cones", cones}});
    }
    std::sort(covered.begin(), covered.end());
    cellsheaf::CellSet supp = cellsheaf::set_intersection(f.support(), covered);
    cellsheaf::CellSet zero = r.zero_section_cells();
    return {{"include_boundary", r.include_boundary},
            {"cells", cs},
            {"support", cells(k, supp)},
            {"zero_section_cells", cells(k, zero)},
            {"zero_section_is_support", zero == supp},
            {"closure_additions", r.closure_additions}};
}

inline json crosscheck(const SimplicialComplex& k, const microsupport::CrosscheckReport& r)
{
    json es = json::array();
    for (auto& e : r.entries)
        es.push_back({{"s", to_json(e.s)},
                      {"cell", cell(k, e.cell)},
                      {"covector", to_json(e.covector)},
                      {"morse_fails", e.morse_fails},
                      {"direct_fails", e.direct_fails},
                      {"in_ss", e.in_ss},
                      {"closure_only", e.closure_only()},
                      {"agree", e.agree()}});
    json sk = json::array();
    for (auto& s : r.skipped)
        sk.push_back({{"s", to_json(s.s)}, {"cell", cell(k, s.cell)}, {"reason", s.reason}});
    return {{"entries", es}, {"skipped", sk}, {"disagreements", r.disagreements()}};
}

} // namespace to_report

// ---------------------------------------------------------------------------
// emission

/// Canonical bytes: sorted keys, two-space indent, trailing newline.
inline std::string dump_canonical(const json& j) { return j.dump(2) + "\n"; }

namespace markdown {

inline std::string scalar(const json& v)
{
    if (v.is_string())
        return v.get<std::string>();
    if (v.is_null())
        return "-";
    if (v.is_array() && v.empty())
        return "-";
    return v.dump();
}

inline std::string escape(std::string s)
{
    std::string out;
    for (char c : s)
        out += c == '|' ? std::string("\\|") : std::string(1, c);
    return out;
}

inline bool is_table(const json& v)
{
    if (!v.is_array() || v.empty())
        return false;
    for (auto& x : v)
        if (!x.is_object())
            return false;
    return true;
}

inline void table(std::string& out, const json& rows)
{
    std::vector<std::string> cols;
    for (auto& r : rows)
        for (auto& [k, v] : r.items())
            if (std::find(cols.begin(), cols.end(), k) == cols.end())
                cols.push_back(k);
    std::sort(cols.begin(), cols.end());
    out += "|";
    for (auto& c : cols)
        out += " " + c + " |";
    out += "\n|";
    for (std::size_t i = 0; i < cols.size(); ++i)
        out += "---|";
    out += "\n";
    for (auto& r : rows) {
        out += "|";
        for (auto& c : cols)
            out += " " + escape(r.contains(c) ? scalar(r[c]) : std::string("-")) + " |";
        out += "\n";
    }
}

inline void section(std::string& out, const std::string& title, const json& obj, int level)
{
    std::string hashes(std::size_t(level), '#');
    out += hashes + " " + title + "\n\n";
    std::vector<std::pair<std::string, const json*>> nested;
    bool any = false;
    for (auto& [k, v] : obj.items()) {
        if (v.is_object() || is_table(v)) {
            nested.push_back({k, &v});
            continue;
        }
        out += "- " + k + ": " + escape(scalar(v)) + "\n";
        any = true;
    }
    if (any)
        out += "\n";
    for (auto& [k, v] : nested) {
        if (v->is_object()) {
            section(out, k, *v, std::min(level + 1, 6));
        } else {
            out += std::string(std::size_t(std::min(level + 1, 6)), '#') + " " + k + "\n\n";
            table(out, *v);
            out += "\n";
        }
    }
}

/// (cell, cone generators, verdict) rows for a micro-support result.
inline void cone_table(std::string& out, const json& result)
{
    out += "| cell | cone generators | verdict |\n|---|---|---|\n";
    for (auto& c : result["cells"]) {
        std::string cell = "(";
        for (std::size_t i = 0; i < c["cell"].size(); ++i)
            cell += (i ? "," : "") + c["cell"][i].dump();
        cell += ")";
        for (auto& cone : c["cones"]) {
            std::string gens;
            for (auto& g : cone["generators"]) {
                gens += gens.empty() ? "" : " ";
                gens += "(";
                for (std::size_t i = 0; i < g.size(); ++i) {
                    std::string x = g[i].get<std::string>();
                    if (x.size() > 2 && x.compare(x.size() - 2, 2, "/1") == 0)
                        x.resize(x.size() - 2);
                    gens += (i ? "," : "") + x;
                }
                gens += ")";
            }
            out += "| " + cell + " | " + (gens.empty() ? "0" : gens) + " | " + cone["verdict"].get<std::string>()
                   + " |\n";
        }
    }
    out += "\n";
}

} // namespace markdown

/// Human-readable tables derived from the report document.
inline std::string render_markdown(const json& report)
{
    std::string out = "# Scenario " + markdown::scalar(report.value("scenario", json(nullptr))) + "\n\n";
    if (report.contains("kind"))
        out += "- kind: " + markdown::scalar(report["kind"]) + "\n";
    if (report.contains("ring"))
        out += "- ring: " + markdown::scalar(report["ring"]) + "\n";
    out += "\n";
    if (report.contains("verdict"))
        markdown::section(out, "Verdict", report["verdict"], 2);
    if (report.contains("error"))
        markdown::section(out, "Error", report["error"], 2);
    if (report.contains("expectations") && !report["expectations"].empty()) {
        out += "## Expectations\n\n";
        markdown::table(out, report["expectations"]);
        out += "\n";
    }
    if (report.contains("result")) {
        const json& r = report["result"];
        if (report.value("kind", "") == "microsupport") {
            out += "## Micro-support\n\n";
            markdown::cone_table(out, r);
            json rest = r;
            rest.erase("cells");
            markdown::section(out, "Summary", rest, 2);
        } else {
            markdown::section(out, "Result", r, 2);
        }
    }
    return out;
}

inline std::string emit_report(const json& report, Format format)
{
    return format == Format::json ? dump_canonical(report) : render_markdown(report);
}

} // namespace microlocal::scencli
