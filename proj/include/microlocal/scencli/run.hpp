#pragma once

#include <filesystem>

#include "microlocal/scencli/report.hpp"

namespace microlocal::scencli {

namespace exit_code {
inline constexpr int consistent = 0;
inline constexpr int expectation_mismatch = 1;
inline constexpr int hypothesis_failed = 2;
inline constexpr int theorem_violation = 3;
inline constexpr int invalid = 4;
} // namespace exit_code

struct RunOptions
{
    bool strict_hypotheses = false;
    std::optional<std::string> ring; // overrides the scenario's ring
};

struct RunResult
{
    json report;
    int exit_code = exit_code::consistent;
};

namespace detail {

struct Outcome
{
    Verdict verdict;
    json result;
};

inline Outcome run_set_tower(const SetTowerSpec& spec)
{
    auto t = at("/payload", [&] { return build_set_tower(spec); });
    auto r = towers::check_constant_sets(t);
    return {{r.criterion_satisfied, r.constant, r.theorem_violation}, to_report::constancy(r)};
}

inline Outcome run_complex_tower(const ComplexTowerSpec& spec, const Ring& ring)
{
    auto t = build_complex_tower(spec, ring, "/payload");
    auto r = towers::check_constant_complexes(t, spec.degrees);
    json result = to_report::complex_constancy(t, r);
    Verdict v{r.hypotheses_hold(), r.conclusion_holds(), r.theorem_violation()};
    json m = json::array();
    for (int n : spec.milnor_degrees) {
        auto mr = towers::milnor_check(t, n);
        if (mr.status == towers::MilnorStatus::mismatch) {
            v.conclusion_holds = false;
            v.theorem_violation = true;
        }
        m.push_back(to_report::milnor(mr));
    }
    result["milnor"] = m;
    return {v, result};
}

inline Outcome run_ml(const MLSpec& spec, const Ring& ring)
{
    if (spec.modules) {
        auto t = build_module_chain(*spec.modules, ring, "/payload/modules");
        auto r = towers::is_mittag_leffler(t);
        bool lim1_zero = r.lim1_vanishes != towers::Lim1::no;
        return {{r.holds, lim1_zero, r.holds && !lim1_zero}, {{"ml", to_report::ml(r)}}};
    }
    auto t = build_complex_chain(*spec.complexes, ring, "/payload/complexes");
    Verdict v;
    json m = json::array();
    std::vector<int> degrees = spec.complexes->milnor_degrees;
    if (degrees.empty())
        degrees.push_back(0);
    for (int n : degrees) {
        auto r = towers::milnor_check(t, n);
        if (r.status == towers::MilnorStatus::lim1_obstruction
            || r.status == towers::MilnorStatus::precondition_violated)
            v.hypotheses_hold = false;
        if (r.status == towers::MilnorStatus::mismatch) {
            v.conclusion_holds = false;
            v.theorem_violation = true;
        }
        m.push_back(to_report::milnor(r));
    }
    return {v, {{"milnor", m}}};
}

inline Outcome run_shadow(const ShadowSpec& spec, const Ring& ring)
{
    auto h = build_shadow(spec, ring, "/payload");
    auto r = at("/payload", [&] { return towers::check_homotopy_shadow(h); });
    return {{r.pipeline_all_constant, r.all_constant, r.theorem_violation}, to_report::shadow(r)};
}

inline Outcome run_geometry(const GeometrySpec& spec, const std::string& kind, const Ring& ring)
{
    auto space = at("/payload/space", [&] { return build_space(spec.space); });
    CellSheaf f = build_sheaf(spec.sheaf, space, ring, "/payload/sheaf");
    std::optional<cellsheaf::PLFunction> phi;
    if (spec.phi)
        phi = at("/payload/phi", [&] { return build_phi(*spec.phi, *space); });
    const SimplicialComplex& k = *space;
    microsupport::MicroSupportOptions opt{spec.include_boundary};

    if (kind == "deformation") {
        auto r = cellsheaf::check_deformation(f, *phi);
        return {{r.hypotheses_hold(), r.conclusion_holds(), r.theorem_violation()}, to_report::deformation(k, r)};
    }
    if (kind == "microsupport") {
        auto r = microsupport::micro_support(f, opt);
        json result = to_report::micro_support(k, f, r);
        bool ok = result["zero_section_is_support"].get<bool>();
        return {{true, ok, !ok}, result};
    }
    auto r = microsupport::crosscheck_noncharacteristic(f, *phi, opt);
    bool noncharacteristic = true;
    for (auto& e : r.entries)
        noncharacteristic = noncharacteristic && !e.in_ss;
    bool agree = r.disagreements() == 0;
    return {{noncharacteristic, agree, !agree}, to_report::crosscheck(k, r)};
}

inline Outcome dispatch(const Scenario& s, const Ring& ring)
{
    if (s.kind == "tower-sets")
        return run_set_tower(std::get<SetTowerSpec>(s.payload));
    if (s.kind == "tower-complexes")
        return run_complex_tower(std::get<ComplexTowerSpec>(s.payload), ring);
    if (s.kind == "tower-ml")
        return run_ml(std::get<MLSpec>(s.payload), ring);
    if (s.kind == "homotopy-shadow")
        return run_shadow(std::get<ShadowSpec>(s.payload), ring);
    return run_geometry(std::get<GeometrySpec>(s.payload), s.kind, ring);
}

inline RunResult error_report(const std::string& name, const std::string& type, const std::string& where,
                              const std::string& message, const Scenario* s = nullptr)
{
    json doc{{"schema", report_schema},
             {"scenario", name},
             {"verdict", {{"exit_code", exit_code::invalid}}},
             {"error", {{"type", type}, {"where", where}, {"message", message}}}};
    if (s) {
        doc["kind"] = s->kind;
        doc["ring"] = s->ring;
    }
    return {doc, exit_code::invalid};
}

} // namespace detail

/// Checks one parsed scenario: builds every object (validation), runs the
/// checker for its kind, compares the expectation block and picks the exit code.
inline RunResult run_scenario(Scenario s, const RunOptions& opts = {})
{
    try {
        if (opts.ring)
            s.ring = at("--ring", [&] { return Ring::parse(*opts.ring).name(); });
        Ring ring = Ring::parse(s.ring);
        auto out = detail::dispatch(s, ring);

        json verdict{{"hypotheses_hold", out.verdict.hypotheses_hold},
                     {"conclusion_holds", out.verdict.conclusion_holds},
                     {"theorem_violation", out.verdict.theorem_violation}};
        json view{{"verdict", verdict}, {"result", out.result}};
        json checks = json::array();
        bool met = true;
        for (auto& e : s.expect) {
            json::json_pointer p(e.path);
            json actual = view.contains(p) ? view.at(p) : json(nullptr);
            bool ok = actual == e.equals;
            met = met && ok;
            checks.push_back({{"path", e.path}, {"equals", e.equals}, {"actual", actual}, {"met", ok}});
        }
        int code = exit_code::consistent;
        if (out.verdict.theorem_violation)
            code = exit_code::theorem_violation;
        else if (!met)
            code = exit_code::expectation_mismatch;
        else if (opts.strict_hypotheses && !out.verdict.hypotheses_hold)
            code = exit_code::hypothesis_failed;
        verdict["expectations_met"] = met;
        verdict["exit_code"] = code;
        json doc{{"schema", report_schema},
                 {"scenario", s.id},
                 {"kind", s.kind},
                 {"ring", s.ring},
                 {"verdict", verdict},
                 {"expectations", checks},
                 {"result", out.result}};
        return {doc, code};
    } catch (const SchemaError& e) {
        return detail::error_report(s.id, "schema", e.where(), e.what(), &s);
    } catch (const InvalidInput& e) {
        return detail::error_report(s.id, "invalid-input", "", e.what(), &s);
    } catch (const PreconditionError& e) {
        return detail::error_report(s.id, "precondition", "", e.what(), &s);
    }
}

/// Loads, validates and checks a scenario file. Failures to read or parse
/// are reported under the file name.
inline RunResult run_file(const std::string& path, const RunOptions& opts = {})
{
    std::string name = std::filesystem::path(path).filename().string();
    Scenario s;
    try {
        s = load_scenario(path);
    } catch (const SchemaError& e) {
        return detail::error_report(name, "schema", e.where(), e.what());
    } catch (const InvalidInput& e) {
        return detail::error_report(name, "unreadable", "", e.what());
    }
    return run_scenario(std::move(s), opts);
}

} // namespace microlocal::scencli
