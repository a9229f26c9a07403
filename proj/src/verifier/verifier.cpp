#include "sosltl/verifier.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>

namespace sosltl::verify {

namespace {

using Clock = std::chrono::steady_clock;

double since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

region::Region guard_region_of(const ltl::Automaton& a, int q, int q2, const System& sys)
{
    const ltl::Transition* t = a.find(q, q2);
    if (t == nullptr)
        throw ltl::AutomatonError("no edge q" + std::to_string(q) + " -> q" + std::to_string(q2));
    return region::guard_region(t->display, sys.regions, sys.domain);
}

std::vector<PathGroup> groups_for(const std::vector<ltl::Path>& paths, bool cycle, int state,
                                  const ltl::Automaton& a, const System& sys, int& next_id)
{
    std::vector<PathGroup> out;
    for (const auto& p : paths) {
        PathGroup g{p, {}};
        for (const auto& t : ltl::pf3(p)) {
            Obligation o;
            o.id = next_id++;
            o.state = state;
            o.cycle = cycle;
            o.path = p;
            o.triple = t;
            o.sigma0 = guard_region_of(a, t[0], t[1], sys);
            o.sigma1 = guard_region_of(a, t[1], t[2], sys);
            if (a.find(t[1], t[1]) != nullptr)
                o.loop = guard_region_of(a, t[1], t[1], sys);
            g.triples.push_back(std::move(o));
        }
        out.push_back(std::move(g));
    }
    return out;
}

region::DisjointOptions disjoint_options(const System& sys, const Options& opts)
{
    region::DisjointOptions d = opts.disjoint;
    if (d.box.lo.size() != sys.domain.n)
        d.box = region::bounding_box(sys.domain, {});
    return d;
}

// Lower is easier: disjoint balls, then no loop, then the rest.
int ease(const Obligation& o)
{
    bool balls = !o.sigma0.empty() && !o.sigma1.empty();
    for (const auto& p : o.sigma0.pieces)
        for (const auto& q : o.sigma1.pieces) {
            const auto a = region::as_ball(p);
            const auto b = region::as_ball(q);
            if (!a || !b) {
                balls = false;
                continue;
            }
            double d = 0.0;
            for (std::size_t i = 0; i < a->center.size(); ++i)
                d += (a->center[i] - b->center[i]) * (a->center[i] - b->center[i]);
            if (std::sqrt(d) <= a->radius + b->radius)
                balls = false;
        }
    if (balls)
        return 0;
    return o.loop ? 2 : 1;
}

PartEvidence part(Method m)
{
    PartEvidence e;
    e.method = m;
    e.source = m;
    return e;
}

std::string sdpa_name(int id, const char* kind, int degree)
{
    return "obligation" + std::to_string(id) + "_" + kind + "_deg" + std::to_string(degree) + ".dat-s";
}

struct BarrierSearch {
    const System& sys;
    const Options& opts;
    EvidenceCache& cache;
    Clock::time_point start;

    bool out_of_time() const { return opts.time_budget > 0.0 && since(start) > opts.time_budget; }

    // Returns evidence or nothing; attempts and margins go into d.
    std::optional<PartEvidence> run(const Obligation& o, const region::Region& y0, const region::Region& y1,
                                    const region::Region& y, Method method, Discharge& d)
    {
        const std::string key = "barrier|" + y0.canonical() + "|" + y1.canonical() + "|" + y.canonical();
        if (const auto* hit = cache.find(key)) {
            if (hit->evidence) {
                PartEvidence e = *hit->evidence;
                if (hit->obligation != o.id) {
                    e.source = e.method == Method::ReusedFrom ? e.source : e.method;
                    e.method = Method::ReusedFrom;
                    e.reused_from = hit->obligation;
                    e.seconds = 0.0;
                }
                return e;
            }
            d.attempts.push_back({"barrier", 0, "failed earlier on obligation " + std::to_string(hit->obligation), 0, 0});
            if (hit->best_margin)
                d.best_margin = std::max(d.best_margin.value_or(-INFINITY), *hit->best_margin);
            return std::nullopt;
        }

        EvidenceCache::Entry entry;
        entry.obligation = o.id;
        const char* kind = method == Method::Barrier3 ? "b" : "a";
        const region::Box box = region::bounding_box(y, region::bounding_box(sys.domain, {}));
        sos::BarrierSpec spec;
        spec.y0 = sos::to_pieces(y0);
        spec.y1 = sos::to_pieces(y1);
        spec.y = sos::to_pieces(y);
        spec.f = sys.f;
        spec.center = box.center();
        spec.scale = std::max(box.radius(), 1e-6);
        spec.epsilon = opts.epsilon;

        bool timed_out = false;
        for (int degree : opts.degrees) {
            if (degree > opts.max_degree)
                continue;
            if (out_of_time()) {
                timed_out = true;
                entry.attempts.push_back({"barrier", degree, "time budget exhausted", 0, 0});
                break;
            }
            const auto t0 = Clock::now();
            Attempt at{method == Method::Barrier3 ? "barrier (loop)" : "barrier", degree, "", 0, 0};
            try {
                const sos::BarrierProgram bp = sos::build_barrier_program(spec, degree, opts.max_degree);
                const sdp::Problem prob = bp.program.compile();
                if (!opts.sdpa_dir.empty()) {
                    std::filesystem::create_directories(opts.sdpa_dir);
                    std::ofstream(std::filesystem::path(opts.sdpa_dir) / sdpa_name(o.id, kind, degree))
                        << sdp::export_sdpa(prob);
                }
                const sdp::Solution sol = sdp::solve(prob, opts.sdp);
                at.margin = sol.margin;
                if (sol.status != sdp::Status::Feasible) {
                    at.outcome = sdp::status_name(sol.status);
                    entry.best_margin = std::max(entry.best_margin.value_or(-INFINITY), sol.margin);
                } else {
                    sos::BarrierCertificate c = sos::extract_certificate(bp, sol);
                    std::optional<sos::ValidationReport> rep;
                    if (opts.validate)
                        rep = sos::validate_certificate(bp, c, opts.validation);
                    if (rep && !rep->passed) {
                        at.outcome = "certificate failed validation";
                        for (const auto& chk : rep->checks)
                            if (!chk.passed)
                                at.outcome += " (" + chk.name + ")";
                    } else {
                        at.outcome = "certificate";
                        at.seconds = since(t0);
                        entry.attempts.push_back(at);
                        PartEvidence e;
                        e.method = method;
                        e.source = method;
                        e.degree = degree;
                        e.seconds = at.seconds;
                        e.barrier = std::move(c);
                        e.validation = std::move(rep);
                        entry.evidence = e;
                        break;
                    }
                }
            } catch (const sos::SosError& err) {
                at.outcome = err.what();
            } catch (const sdp::SdpError& err) {
                at.outcome = err.what();
            }
            at.seconds = since(t0);
            entry.attempts.push_back(at);
        }
        d.attempts.insert(d.attempts.end(), entry.attempts.begin(), entry.attempts.end());
        if (entry.best_margin)
            d.best_margin = std::max(d.best_margin.value_or(-INFINITY), *entry.best_margin);
        auto result = entry.evidence;
        // A timeout is not a property of the sets, so it is not cached.
        if (!timed_out || entry.evidence)
            cache.store(key, std::move(entry));
        return result;
    }
};

} // namespace

const char* method_name(Method m)
{
    switch (m) {
    case Method::DisjointClosures:
        return "DisjointClosures";
    case Method::Barrier2:
        return "Barrier2";
    case Method::Barrier3:
        return "Barrier3";
    case Method::ReusedFrom:
        return "ReusedFrom";
    case Method::Vacuous:
        return "Vacuous";
    }
    return "?";
}

const EvidenceCache::Entry* EvidenceCache::find(const std::string& key) const
{
    auto it = entries_.find(key);
    return it == entries_.end() ? nullptr : &it->second;
}

void EvidenceCache::store(const std::string& key, Entry e) { entries_.emplace(key, std::move(e)); }

ObligationSet build_obligations(const ltl::Automaton& a, const System& sys, const Options& opts)
{
    ObligationSet out;
    const int np = a.props.size();
    if (np != static_cast<int>(sys.regions.size()))
        throw std::invalid_argument("every proposition needs a region");
    if (np > 16)
        throw std::invalid_argument("at most 16 propositions are supported");

    const region::DisjointOptions dopt = disjoint_options(sys, opts);
    std::vector<char> keep(std::size_t{1} << np, 1);
    for (ltl::Letter l = 0; l < (ltl::Letter{1} << np); ++l) {
        const auto r = region::region_emptiness(region::letter_region(l, sys.regions, sys.domain), dopt);
        if (r.status == region::Emptiness::Empty) {
            keep[l] = 0;
            out.removed_letters.push_back(l);
        }
    }
    out.automaton = ltl::restrict_letters(a, [&](ltl::Letter l) { return keep[l] != 0; });
    out.graph = ltl::graph_of(out.automaton);

    int next_id = 0;
    for (int q : out.automaton.accepting_states()) {
        StateObligations s;
        s.state = q;
        s.cycles = groups_for(ltl::cyc_paths(out.graph, out.automaton.initial, q), true, q, out.automaton, sys, next_id);
        s.paths = groups_for(ltl::path_paths(out.graph, out.automaton.initial, q), false, q, out.automaton, sys, next_id);
        out.states.push_back(std::move(s));
    }
    out.num_obligations = next_id;
    return out;
}

Discharge discharge(const Obligation& o, const System& sys, const Options& opts, EvidenceCache& cache)
{
    Discharge d;
    d.obligation = o.id;
    BarrierSearch search{sys, opts, cache, Clock::now()};
    const region::DisjointOptions dopt = disjoint_options(sys, opts);

    bool intersect = false;
    if (o.sigma0.empty() || o.sigma1.empty()) {
        d.a = part(Method::Vacuous);
    } else {
        const std::string key = "disjoint|" + o.sigma0.canonical() + "|" + o.sigma1.canonical();
        const auto t0 = Clock::now();
        const auto* hit = cache.find(key);
        std::optional<PartEvidence> found;
        int owner = o.id;
        if (hit != nullptr) {
            found = hit->evidence;
            owner = hit->obligation;
            intersect = !found && !hit->attempts.empty() && hit->attempts.front().outcome == "FoundIntersection";
        } else {
            const region::DisjointResult r = region::closures_disjoint(o.sigma0, o.sigma1, dopt);
            EvidenceCache::Entry e;
            e.obligation = o.id;
            e.attempts.push_back({"closures disjoint", 0, region::status_name(r.status), 0, since(t0)});
            if (r.status == region::Status::ProvedDisjoint) {
                PartEvidence pe = part(Method::DisjointClosures);
                pe.seconds = since(t0);
                pe.disjoint = r;
                e.evidence = pe;
                found = pe;
            }
            intersect = r.status == region::Status::FoundIntersection;
            d.attempts.push_back(e.attempts.front());
            cache.store(key, std::move(e));
        }
        if (found) {
            d.a = *found;
            if (owner != o.id) {
                d.a->method = Method::ReusedFrom;
                d.a->reused_from = owner;
                d.a->seconds = 0.0;
            }
        }
    }

    // Closures that meet admit no barrier: B <= 0 and B >= eps at the same point.
    if (intersect) {
        d.attempts.push_back({"barrier", 0, "skipped: closures of Y0 and Y1 intersect", 0, 0});
        return d;
    }

    if (o.loop && !(o.sigma0.empty() || o.sigma1.empty() || o.loop->empty())) {
        const region::Region y = region::unite(region::unite(o.sigma0, o.sigma1), *o.loop);
        d.b = search.run(o, o.sigma0, o.sigma1, y, Method::Barrier3, d);
    } else if (o.loop) {
        d.b = part(Method::Vacuous);
    }
    if (!d.a && (!o.loop || d.b))
        d.a = search.run(o, o.sigma0, o.sigma1, region::unite(o.sigma0, o.sigma1), Method::Barrier2, d);

    d.discharged = d.a.has_value() && (!o.loop || d.b.has_value());
    return d;
}

Verdict verify(const System& sys, const std::string& formula, const Options& opts)
{
    ltl::PropositionTable props = sys.props;
    const ltl::Formula f = ltl::parse(formula, props, false);
    return verify(sys, f, opts);
}

Verdict verify(const System& sys, const ltl::Formula& formula, const Options& opts)
{
    const auto t0 = Clock::now();
    Verdict v;
    v.formula = ltl::to_string(formula, sys.props);
    const ltl::Automaton a = ltl::translate(ltl::negate(formula), sys.props);
    v.obligations = build_obligations(a, sys, opts);
    EvidenceCache cache;

    auto get = [&](const Obligation& o) -> const Discharge& {
        auto it = v.discharges.find(o.id);
        if (it == v.discharges.end())
            it = v.discharges.emplace(o.id, discharge(o, sys, opts, cache)).first;
        return it->second;
    };

    // Every group needs one discharged triple; records witnesses and the best failure.
    auto family = [&](const std::vector<PathGroup>& groups, StateVerdict& sv, std::map<std::string, int>& witness,
                      std::optional<Discharge>& miss) {
        for (const auto& g : groups) {
            std::vector<const Obligation*> order;
            for (const auto& o : g.triples)
                order.push_back(&o);
            std::stable_sort(order.begin(), order.end(),
                             [](const Obligation* x, const Obligation* y) { return ease(*x) < ease(*y); });
            bool ok = false;
            for (const Obligation* o : order) {
                ++sv.triples_examined;
                const Discharge& d = get(*o);
                if (d.discharged) {
                    witness[ltl::path_to_string(g.path)] = o->id;
                    ok = true;
                    break;
                }
                if (!miss || d.best_margin.value_or(-INFINITY) > miss->best_margin.value_or(-INFINITY))
                    miss = d;
            }
            if (!ok)
                return false;
        }
        return true;
    };

    for (const auto& s : v.obligations.states) {
        StateVerdict sv;
        sv.state = s.state;
        std::optional<Discharge> miss;
        const bool no_triples = std::any_of(s.cycles.begin(), s.cycles.end(),
                                            [](const PathGroup& g) { return g.triples.empty(); });
        std::map<std::string, int> wc, wp;
        if (no_triples)
            sv.cycles_note = "a cycle has no length-3 subpath";
        else
            sv.cycles_ok = family(s.cycles, sv, wc, miss);
        if (sv.cycles_ok) {
            sv.condition = "cycles";
            sv.witness = std::move(wc);
        } else {
            sv.paths_ok = family(s.paths, sv, wp, miss);
            if (sv.paths_ok) {
                sv.condition = "paths";
                sv.witness = std::move(wp);
            } else {
                sv.near_miss = std::move(miss);
            }
        }
        v.states.push_back(std::move(sv));
    }
    v.satisfied = std::all_of(v.states.begin(), v.states.end(), [](const StateVerdict& s) { return !s.condition.empty(); });
    v.seconds = since(t0);
    return v;
}

} // namespace sosltl::verify
