#include "sosltl/verifier.hpp"

namespace sosltl::verify {

namespace {

using nlohmann::json;

std::string state_name(int q) { return "q" + std::to_string(q); }

json region_json(const region::Region& r, const std::vector<std::string>& vars)
{
    json pieces = json::array();
    for (const auto& p : r.pieces) {
        json ineqs = json::array();
        for (const auto& g : p.g)
            ineqs.push_back(g.to_string(vars) + " >= 0");
        pieces.push_back(ineqs);
    }
    return pieces;
}

json validation_json(const sos::ValidationReport& rep)
{
    json checks = json::array();
    for (const auto& c : rep.checks) {
        json j{{"name", c.name}, {"passed", c.passed}, {"worst", c.worst}, {"count", c.count}};
        if (!c.detail.empty())
            j["detail"] = c.detail;
        checks.push_back(j);
    }
    return {{"passed", rep.passed}, {"checks", checks}};
}

json part_json(const PartEvidence& e, const std::vector<std::string>& vars, bool timings)
{
    json j{{"method", method_name(e.method)}};
    if (e.method == Method::ReusedFrom) {
        j["reused_from"] = e.reused_from;
        j["source_method"] = method_name(e.source);
    }
    if (timings)
        j["seconds"] = e.seconds;
    if (e.disjoint) {
        json pairs = json::array();
        for (const auto& p : e.disjoint->evidence) {
            json pj{{"pieces", {p.i, p.j}}, {"method", p.method}};
            if (p.method == "ball")
                pj["gap"] = p.ball_gap;
            if (p.psatz)
                pj["psatz_degree"] = p.psatz->degree;
            pairs.push_back(pj);
        }
        j["disjoint"] = pairs;
    }
    if (e.barrier) {
        const auto& c = *e.barrier;
        j["degree"] = c.degree;
        json mult = json::object();
        for (const auto& [label, s] : c.multipliers)
            mult[label] = s.to_string();
        j["certificate"] = {{"B", c.b.to_string(vars)},
                            {"epsilon", c.epsilon},
                            {"scaled_B", c.b_scaled.to_string()},
                            {"center", c.center},
                            {"scale", c.scale},
                            {"multipliers_scaled", mult},
                            {"identity_residual", c.identity_residual},
                            {"min_gram_eigenvalue", c.min_gram_eigenvalue}};
    }
    if (e.validation)
        j["validation"] = validation_json(*e.validation);
    return j;
}

json discharge_json(const Discharge& d, const std::vector<std::string>& vars, bool timings)
{
    json j{{"discharged", d.discharged}};
    if (d.a)
        j["a"] = part_json(*d.a, vars, timings);
    if (d.b)
        j["b"] = part_json(*d.b, vars, timings);
    json att = json::array();
    for (const auto& a : d.attempts) {
        json aj{{"what", a.what}, {"outcome", a.outcome}};
        if (a.degree > 0) {
            aj["degree"] = a.degree;
            aj["margin"] = a.margin;
        }
        if (timings)
            aj["seconds"] = a.seconds;
        att.push_back(aj);
    }
    j["attempts"] = att;
    if (d.best_margin)
        j["best_margin"] = *d.best_margin;
    return j;
}

json groups_json(const std::vector<PathGroup>& groups)
{
    json out = json::array();
    for (const auto& g : groups) {
        json ids = json::array();
        for (const auto& o : g.triples)
            ids.push_back(o.id);
        out.push_back({{"path", ltl::path_to_string(g.path)}, {"obligations", ids}});
    }
    return out;
}

} // namespace

nlohmann::json to_json(const Verdict& v, const System& sys, const Options& opts)
{
    const bool timings = !opts.normalize;
    const auto& a = v.obligations.automaton;
    json automaton{{"states", a.num_states},
                   {"transitions", a.transitions.size()},
                   {"edges", v.obligations.graph.num_edges()}};
    json init = json::array(), acc = json::array(), removed = json::array();
    for (int q : a.initial)
        init.push_back(state_name(q));
    for (int q : a.accepting_states())
        acc.push_back(state_name(q));
    for (auto l : v.obligations.removed_letters) {
        json names = json::array();
        for (int p = 0; p < sys.props.size(); ++p)
            if (l & (ltl::Letter{1} << p))
                names.push_back(sys.props.name(p));
        removed.push_back(names);
    }
    automaton["initial"] = init;
    automaton["accepting"] = acc;
    automaton["removed_letters"] = removed;
    json edges = json::array();
    for (const auto& t : a.transitions)
        edges.push_back({state_name(t.from), state_name(t.to), ltl::guard_to_string(t.display, a.props)});
    automaton["transitions_list"] = edges;
    json labels = json::array();
    for (const auto& l : a.labels)
        labels.push_back(l);
    automaton["labels"] = labels;

    json states = json::array();
    for (std::size_t k = 0; k < v.states.size(); ++k) {
        const auto& sv = v.states[k];
        const auto& so = v.obligations.states[k];
        json sj{{"state", state_name(sv.state)},
                {"condition", sv.condition.empty() ? json(nullptr) : json(sv.condition)},
                {"cycles", groups_json(so.cycles)},
                {"paths", groups_json(so.paths)},
                {"cycles_ok", sv.cycles_ok},
                {"paths_ok", sv.paths_ok},
                {"triples_examined", sv.triples_examined}};
        if (!sv.cycles_note.empty())
            sj["cycles_note"] = sv.cycles_note;
        json w = json::object();
        for (const auto& [p, id] : sv.witness)
            w[p] = id;
        sj["witness"] = w;
        if (sv.near_miss)
            sj["near_miss"] = {{"obligation", sv.near_miss->obligation},
                               {"best_margin", sv.near_miss->best_margin ? json(*sv.near_miss->best_margin)
                                                                         : json(nullptr)}};
        states.push_back(sj);
    }

    json obligations = json::array();
    for (const auto& s : v.obligations.states)
        for (const auto* fam : {&s.cycles, &s.paths})
            for (const auto& g : *fam)
                for (const auto& o : g.triples) {
                    json oj{{"id", o.id},
                            {"state", state_name(o.state)},
                            {"family", o.cycle ? "cycle" : "path"},
                            {"path", ltl::path_to_string(o.path)},
                            {"triple", ltl::path_to_string({o.triple[0], o.triple[1], o.triple[2]})},
                            {"Y0", region_json(o.sigma0, sys.vars)},
                            {"Y1", region_json(o.sigma1, sys.vars)},
                            {"loop", o.loop ? region_json(*o.loop, sys.vars) : json(nullptr)}};
                    auto it = v.discharges.find(o.id);
                    if (it != v.discharges.end())
                        oj["result"] = discharge_json(it->second, sys.vars, timings);
                    else
                        oj["result"] = nullptr;
                    obligations.push_back(oj);
                }

    json degrees = json::array();
    for (int d : opts.degrees)
        if (d <= opts.max_degree)
            degrees.push_back(d);
    json out{{"verdict", v.satisfied ? "Satisfied" : "Inconclusive"},
             {"formula", v.formula},
             {"options", {{"degrees", degrees}, {"epsilon", opts.epsilon}, {"time_budget", opts.time_budget}}},
             {"automaton", automaton},
             {"states", states},
             {"obligations", obligations}};
    if (timings)
        out["seconds"] = v.seconds;
    return out;
}

} // namespace sosltl::verify
