#include "sepsys/bench/report.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>

#include <fmt/format.h>

namespace sepsys {

namespace {

auto names_of(VarSet const& s, std::vector<std::string> const& names) -> Json
{
    Json arr = Json::array();
    for (auto v : s) { arr.push_back(names.at(static_cast<std::size_t>(v))); }
    return arr;
}

auto groups_of(std::vector<VarSet> const& groups, std::vector<std::string> const& names) -> Json
{
    Json arr = Json::array();
    for (auto const& g : groups) { arr.push_back(names_of(g, names)); }
    return arr;
}

auto number(double v) -> Json
{
    if (std::isfinite(v)) { return v; }
    return nullptr;
}

auto from_number(Json const& v) -> double
{
    if (v.is_null()) { return INFINITY; }
    return v.get<double>();
}

auto library_names(std::vector<TemplateId> const& order) -> Json
{
    Json arr = Json::array();
    for (auto id : order) { arr.push_back(std::string(template_info(id).name)); }
    return arr;
}

template <typename T>
auto modal(std::vector<T> const& values) -> T
{
    std::map<T, std::size_t> counts;
    for (auto const& v : values) { ++counts[v]; }
    T best {};
    std::size_t best_count = 0;
    for (auto const& [v, c] : counts) {
        if (c > best_count) {
            best = v;
            best_count = c;
        }
    }
    return best;
}

} // namespace

auto repeated_label(VarSet const& repeated, std::vector<std::string> const& names) -> std::string
{
    if (repeated.empty()) { return "None"; }
    std::string out;
    for (auto v : repeated) {
        if (!out.empty()) { out += ";"; }
        out += names.at(static_cast<std::size_t>(v));
    }
    return out;
}

auto structure_to_json(GSStructure const& s, std::vector<std::string> const& names) -> Json
{
    Json j;
    j["repeated"] = names_of(s.repeated, names);
    j["n_blocks"] = s.m();
    j["n_factors"] = s.factor_count();
    Json blocks = Json::array();
    for (auto const& b : s.blocks) {
        Json jb;
        jb["nonrepeated"] = names_of(b.nonrepeated, names);
        jb["nonrepeated_factors"] = groups_of(b.nonrepeated_factors, names);
        jb["repeated_factors"] = groups_of(b.repeated_factors, names);
        jb["has_repeated"] = b.has_repeated;
        blocks.push_back(std::move(jb));
    }
    j["blocks"] = std::move(blocks);
    return j;
}

auto report_to_json(RunReport const& r, bool include_timings) -> Json
{
    Json j;
    j["case"] = r.case_id;
    j["seed"] = r.seed;
    j["var_names"] = r.var_names;
    j["success"] = r.success;
    if (r.error) {
        j["error"] = *r.error;
        j["stage"] = r.stage.value_or("");
    }
    j["structure"] = r.structure ? structure_to_json(*r.structure, r.var_names) : Json(nullptr);
    j["expected_match"] = r.expected_match ? Json(*r.expected_match) : Json(nullptr);
    if (r.model) {
        Json blocks = Json::array();
        for (auto const& b : r.model->blocks) {
            Json factors = Json::array();
            for (auto const& f : b) {
                Json jf;
                jf["template"] = std::string(template_info(f.id).name);
                Json vars = Json::array();
                for (auto v : f.vars) { vars.push_back(r.var_names.at(static_cast<std::size_t>(v))); }
                jf["vars"] = std::move(vars);
                Json params = Json::array();
                for (auto p : f.params) { params.push_back(number(p)); }
                jf["params"] = std::move(params);
                jf["scale"] = number(f.scale);
                jf["offset"] = number(f.offset);
                jf["fit_mse"] = number(f.fit_mse);
                factors.push_back(std::move(jf));
            }
            blocks.push_back(std::move(factors));
        }
        j["factors"] = std::move(blocks);
        Json c = Json::array();
        for (auto v : r.model->c) { c.push_back(number(v)); }
        j["coefficients"] = std::move(c);
    } else {
        j["factors"] = nullptr;
        j["coefficients"] = nullptr;
    }
    j["mse"] = number(r.mse);
    j["eps_target"] = r.eps_target;
    j["expression"] = r.expression;
    j["evaluations"] = Json { { "detection", r.metrics.evals_detect }, { "fitting", r.metrics.evals_fit },
        { "assembly", r.metrics.evals_assembly } };
    if (include_timings) {
        j["timings_ms"] = Json { { "t1", r.metrics.t1_ms }, { "t2", r.metrics.t2_ms }, { "t3", r.metrics.t3_ms } };
    }
    auto const& s = r.settings;
    j["settings"] = Json {
        { "eps_const", s.tol.eps_const },
        { "eps_dep", s.tol.eps_dep },
        { "trials", s.tol.trials },
        { "probe_rows", s.tol.probe_rows },
        { "polarity", std::string(polarity_name(s.polarity)) },
        { "samples_per_var", s.fit.samples_per_var },
        { "attempts", s.fit.attempts },
        { "library", library_names(s.fit.library_order) },
        { "param_bounds", Json::array({ s.opt.lower, s.opt.upper }) },
    };
    return j;
}

auto report_from_json(Json const& j) -> RunReport
{
    RunReport r;
    r.case_id = j.at("case").get<std::string>();
    r.seed = j.at("seed").get<std::uint64_t>();
    r.var_names = j.at("var_names").get<std::vector<std::string>>();
    r.success = j.at("success").get<bool>();
    if (j.contains("error")) {
        r.error = j.at("error").get<std::string>();
        r.stage = j.at("stage").get<std::string>();
    }
    auto const index = [&](Json const& name) {
        auto const it = std::find(r.var_names.begin(), r.var_names.end(), name.get<std::string>());
        if (it == r.var_names.end()) { throw std::invalid_argument("unknown variable in report: " + name.dump()); }
        return static_cast<int>(it - r.var_names.begin());
    };
    auto const set_of = [&](Json const& arr) {
        std::vector<int> v;
        for (auto const& e : arr) { v.push_back(index(e)); }
        return make_varset(std::move(v));
    };
    auto const groups = [&](Json const& arr) {
        std::vector<VarSet> g;
        for (auto const& e : arr) { g.push_back(set_of(e)); }
        return g;
    };
    if (auto const& js = j.at("structure"); !js.is_null()) {
        GSStructure st;
        st.n = r.var_names.size();
        st.repeated = set_of(js.at("repeated"));
        for (auto const& jb : js.at("blocks")) {
            BlockStructure b;
            b.nonrepeated = set_of(jb.at("nonrepeated"));
            b.nonrepeated_factors = groups(jb.at("nonrepeated_factors"));
            b.repeated_factors = groups(jb.at("repeated_factors"));
            b.has_repeated = jb.at("has_repeated").get<bool>();
            st.blocks.push_back(std::move(b));
        }
        r.structure = std::move(st);
    }
    if (auto const& jm = j.at("expected_match"); !jm.is_null()) { r.expected_match = jm.get<bool>(); }
    if (auto const& jf = j.at("factors"); !jf.is_null()) {
        GSModel model;
        model.n_vars = r.var_names.size();
        model.c.clear();
        for (auto const& c : j.at("coefficients")) { model.c.push_back(from_number(c)); }
        for (auto const& jb : jf) {
            std::vector<FittedFactor> block;
            for (auto const& jfac : jb) {
                FittedFactor f;
                auto const id = template_from_name(jfac.at("template").get<std::string>());
                if (!id) { throw std::invalid_argument("unknown template in report: " + jfac.at("template").dump()); }
                f.id = *id;
                for (auto const& v : jfac.at("vars")) { f.vars.push_back(index(v)); }
                for (auto const& p : jfac.at("params")) { f.params.push_back(from_number(p)); }
                f.scale = from_number(jfac.at("scale"));
                f.offset = from_number(jfac.at("offset"));
                f.fit_mse = from_number(jfac.at("fit_mse"));
                block.push_back(std::move(f));
            }
            model.blocks.push_back(std::move(block));
        }
        r.model = std::move(model);
    }
    r.mse = from_number(j.at("mse"));
    r.eps_target = j.at("eps_target").get<double>();
    r.expression = j.at("expression").get<std::string>();
    auto const& ev = j.at("evaluations");
    r.metrics.evals_detect = ev.at("detection").get<std::uint64_t>();
    r.metrics.evals_fit = ev.at("fitting").get<std::uint64_t>();
    r.metrics.evals_assembly = ev.at("assembly").get<std::uint64_t>();
    if (j.contains("timings_ms")) {
        auto const& t = j.at("timings_ms");
        r.metrics.t1_ms = t.at("t1").get<double>();
        r.metrics.t2_ms = t.at("t2").get<double>();
        r.metrics.t3_ms = t.at("t3").get<double>();
    }
    r.metrics.mse = r.mse;
    r.metrics.success = r.success;
    auto const& s = j.at("settings");
    r.settings.tol.eps_const = s.at("eps_const").get<double>();
    r.settings.tol.eps_dep = s.at("eps_dep").get<double>();
    r.settings.tol.trials = s.at("trials").get<int>();
    r.settings.tol.probe_rows = s.at("probe_rows").get<std::size_t>();
    r.settings.polarity = s.at("polarity").get<std::string>() == "dependent" ? Polarity::Dependent : Polarity::Independent;
    r.settings.fit.samples_per_var = s.at("samples_per_var").get<std::size_t>();
    r.settings.fit.attempts = s.at("attempts").get<int>();
    r.settings.fit.library_order.clear();
    for (auto const& name : s.at("library")) {
        auto const id = template_from_name(name.get<std::string>());
        if (!id) { throw std::invalid_argument("unknown template in report settings: " + name.dump()); }
        r.settings.fit.library_order.push_back(*id);
    }
    r.settings.fit.eps_target = r.eps_target;
    r.settings.opt.lower = s.at("param_bounds").at(0).get<double>();
    r.settings.opt.upper = s.at("param_bounds").at(1).get<double>();
    return r;
}

auto summarize(std::string const& case_id, std::vector<RunReport const*> const& runs) -> CaseSummary
{
    CaseSummary s;
    s.case_id = case_id;
    s.reps = runs.size();
    std::vector<std::size_t> blocks, factors;
    std::vector<std::string> repeated;
    double mse_sum = 0.0;
    for (auto const* r : runs) {
        if (r->success) { ++s.successes; }
        if (r->expected_match.value_or(false)) { ++s.structure_matches; }
        auto const mse = r->error ? INFINITY : r->mse;
        mse_sum += mse;
        s.max_mse = std::max(s.max_mse, mse);
        s.t1_ms += r->metrics.t1_ms;
        s.t2_ms += r->metrics.t2_ms;
        s.t3_ms += r->metrics.t3_ms;
        if (r->structure) {
            blocks.push_back(r->structure->m());
            factors.push_back(r->structure->factor_count());
            repeated.push_back(repeated_label(r->structure->repeated, r->var_names));
        }
    }
    if (!runs.empty()) {
        auto const n = static_cast<double>(runs.size());
        s.mean_mse = mse_sum / n;
        s.t1_ms /= n;
        s.t2_ms /= n;
        s.t3_ms /= n;
    }
    if (!blocks.empty()) {
        s.blocks = modal(blocks);
        s.factors = modal(factors);
        s.repeated_vars = modal(repeated);
    }
    return s;
}

auto summary_to_json(CaseSummary const& s, bool include_timings) -> Json
{
    Json j;
    j["case"] = s.case_id;
    j["reps"] = s.reps;
    j["successes"] = s.successes;
    j["structure_matches"] = s.structure_matches;
    j["mean_mse"] = number(s.mean_mse);
    j["max_mse"] = number(s.max_mse);
    j["blocks"] = s.blocks;
    j["factors"] = s.factors;
    j["repeated_vars"] = s.repeated_vars;
    if (include_timings) {
        j["t1_ms"] = s.t1_ms;
        j["t2_ms"] = s.t2_ms;
        j["t3_ms"] = s.t3_ms;
    }
    return j;
}

auto csv_header() -> std::string { return "case,reps,successes,mean_mse,max_mse,blocks,factors,repeated_vars,t1_ms,t2_ms,t3_ms"; }

auto csv_row(CaseSummary const& s) -> std::string
{
    return fmt::format("{},{},{},{:.6e},{:.6e},{},{},{},{:.1f},{:.1f},{:.1f}", s.case_id, s.reps, s.successes, s.mean_mse,
        s.max_mse, s.blocks, s.factors, s.repeated_vars, s.t1_ms, s.t2_ms, s.t3_ms);
}

} // namespace sepsys
