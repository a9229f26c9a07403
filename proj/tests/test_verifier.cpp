#include "sosltl/verifier.hpp"
#include "support/example1.hpp"

#include <doctest.h>

#include <set>

using namespace sosltl;
using namespace sosltl::verify;

namespace {

System example_system()
{
    return System{example1::names(), example1::field(), example1::domain(),
                  ltl::PropositionTable({"p0", "p1", "p2", "p3"}), example1::props()};
}

std::vector<std::string> path_names(const std::vector<PathGroup>& groups)
{
    std::vector<std::string> out;
    for (const auto& g : groups)
        out.push_back(ltl::path_to_string(g.path));
    return out;
}

std::set<std::string> triple_names(const PathGroup& g)
{
    std::set<std::string> out;
    for (const auto& o : g.triples)
        out.insert(ltl::path_to_string({o.triple[0], o.triple[1], o.triple[2]}));
    return out;
}

const Obligation* find_obligation(const ObligationSet& s, int id)
{
    for (const auto& st : s.states)
        for (const auto* fam : {&st.cycles, &st.paths})
            for (const auto& g : *fam)
                for (const auto& o : g.triples)
                    if (o.id == id)
                        return &o;
    return nullptr;
}

const Obligation* find_triple(const ObligationSet& s, const std::string& path)
{
    for (const auto& st : s.states)
        for (const auto& g : st.paths)
            if (ltl::path_to_string(g.path) == path && !g.triples.empty())
                return &g.triples.back();
    return nullptr;
}

Options fast()
{
    Options o;
    o.validation.samples_per_piece = 2000;
    o.validation.trajectories = 20;
    o.normalize = true;
    return o;
}

} // namespace

TEST_CASE("example obligations: cycles, paths and triples")
{
    const System sys = example_system();
    ltl::PropositionTable props = sys.props;
    const auto a = ltl::translate(ltl::negate(ltl::parse(example1::formula(), props)), props);
    const ObligationSet obs = build_obligations(a, sys, fast());
    CHECK(obs.automaton.num_states == 5);
    CHECK(obs.removed_letters.size() == 10);
    REQUIRE(obs.states.size() == 1);
    const auto& s = obs.states.front();
    CHECK(s.state == 4);
    CHECK(path_names(s.cycles) == std::vector<std::string>{"q4"});
    CHECK(s.cycles.front().triples.empty());
    CHECK(path_names(s.paths) == std::vector<std::string>{"q0q1q4", "q0q2q3q4", "q0q3q4"});
    CHECK(s.paths[0].triples.size() == 1);
    CHECK(s.paths[1].triples.size() == 2);
    CHECK(s.paths[2].triples.size() == 1);
    CHECK(triple_names(s.paths[1]) == std::set<std::string>{"q0q2q3", "q2q3q4"});
    for (const auto& g : s.paths)
        for (const auto& o : g.triples)
            CHECK(o.loop.has_value());

    // q0 -p0-> q1 -p2-> q4 with loop !p1 on q1.
    const Obligation& pi1 = s.paths[0].triples.front();
    CHECK(pi1.sigma0.pieces.size() == 1);
    CHECK(pi1.sigma1.pieces.size() == 1);
    REQUIRE(pi1.loop->pieces.size() == 1);
    CHECK(pi1.loop->pieces.front().g.size() == 2);
    CHECK(pi1.loop->contains(std::vector<double>{-5.0, 0.0}));
    CHECK_FALSE(pi1.loop->contains(std::vector<double>{1.7, 0.0}));
}

TEST_CASE("example verifies end to end")
{
    const System sys = example_system();
    const Verdict v = verify::verify(sys, example1::formula(), fast());
    REQUIRE(v.satisfied);
    REQUIRE(v.states.size() == 1);
    const auto& sv = v.states.front();
    CHECK_FALSE(sv.cycles_ok);
    CHECK(sv.condition == "paths");
    CHECK(sv.witness.size() == 3);

    const auto& obs = v.obligations;
    const Obligation* pi1 = find_triple(obs, "q0q1q4");
    const Obligation* pi3 = find_triple(obs, "q0q3q4");
    REQUIRE(pi1);
    REQUIRE(pi3);
    const Discharge& d1 = v.discharges.at(pi1->id);
    CHECK(d1.discharged);
    CHECK(d1.a->method == Method::DisjointClosures);
    REQUIRE(d1.b->method == Method::Barrier3);
    CHECK(d1.b->degree <= 12);
    CHECK(d1.b->validation->passed);
    CHECK(d1.b->barrier->b.evaluate(std::vector<double>{-2.0, 4.5}) <= 0.0);
    CHECK(d1.b->barrier->b.evaluate(std::vector<double>{4.0, 4.0}) > 0.0);

    const int pi2 = sv.witness.at("q0q2q3q4");
    const Obligation* o2 = find_obligation(obs, pi2);
    CHECK(ltl::path_to_string({o2->triple[0], o2->triple[1], o2->triple[2]}) == "q2q3q4");
    const Discharge& d2 = v.discharges.at(pi2);
    REQUIRE(d2.b->method == Method::Barrier3);
    CHECK(d2.b->degree <= 10);
    CHECK(d2.b->validation->passed);

    const Discharge& d3 = v.discharges.at(pi3->id);
    CHECK(d3.discharged);
    CHECK(d3.b->method == Method::ReusedFrom);
    CHECK(d3.b->reused_from == pi2);
    CHECK(d3.a->method == Method::ReusedFrom);

    // Reuse only across identical sets.
    for (const auto& [id, d] : v.discharges)
        for (const auto* part : {&d.a, &d.b})
            if (*part && (*part)->method == Method::ReusedFrom) {
                const Obligation* o = find_obligation(obs, id);
                const Obligation* src = find_obligation(obs, (*part)->reused_from);
                CHECK(o->sigma0.canonical() == src->sigma0.canonical());
                CHECK(o->sigma1.canonical() == src->sigma1.canonical());
                CHECK(o->loop->canonical() == src->loop->canonical());
            }

    const auto j1 = to_json(v, sys, fast()).dump();
    const auto j2 = to_json(verify::verify(sys, example1::formula(), fast()), sys, fast()).dump();
    CHECK(j1 == j2);
    CHECK(to_json(v, sys, fast())["verdict"] == "Satisfied");
}

TEST_CASE("trivial specifications")
{
    const System sys = example_system();
    const Verdict t = verify::verify(sys, "true", fast());
    CHECK(t.satisfied);
    CHECK(t.obligations.states.empty());
    CHECK(t.obligations.num_obligations == 0);

    ltl::PropositionTable props = sys.props;
    const auto none = ltl::import_text("props p0 p1 p2 p3\nstates 2\ninitial 0\ntrans 0 1 p0\ntrans 1 1 true\n");
    CHECK(build_obligations(none, sys, fast()).states.empty());
}

TEST_CASE("self-loop-free middle state has no loop part")
{
    const System sys = example_system();
    const auto a = ltl::import_text("props p0 p1 p2 p3\nstates 3\ninitial 0\naccepting 2\n"
                                    "trans 0 1 p0\ntrans 1 2 p2\ntrans 2 2 true\n");
    const ObligationSet obs = build_obligations(a, sys, fast());
    REQUIRE(obs.states.size() == 1);
    REQUIRE(obs.states[0].paths.size() == 1);
    REQUIRE(obs.states[0].paths[0].triples.size() == 1);
    const Obligation& o = obs.states[0].paths[0].triples[0];
    CHECK_FALSE(o.loop.has_value());
    EvidenceCache cache;
    const Discharge d = discharge(o, sys, fast(), cache);
    CHECK(d.discharged);
    CHECK(d.a->method == Method::DisjointClosures);
    CHECK_FALSE(d.b.has_value());
}

TEST_CASE("overlapping sets fail without barrier attempts")
{
    const System sys = example_system();
    const auto a = ltl::import_text("props p0 p1 p2 p3\nstates 3\ninitial 0\naccepting 2\n"
                                    "trans 0 1 true\ntrans 1 1 true\ntrans 1 2 p2\ntrans 2 2 true\n");
    const ObligationSet obs = build_obligations(a, sys, fast());
    const Obligation& o = obs.states.at(0).paths.at(0).triples.at(0);
    EvidenceCache cache;
    const Discharge d = discharge(o, sys, fast(), cache);
    CHECK_FALSE(d.discharged);
    CHECK_FALSE(d.a.has_value());
    CHECK(d.attempts.front().outcome == "FoundIntersection");
}

TEST_CASE("unknown disjointness falls back to a two-letter barrier")
{
    const auto P = example1::poly;
    const region::Region disk(2, {region::BasicRegion{{P("9 - x1^2 - x2^2")}}});
    System sys{example1::names(), VectorField({P("1"), P("0")}), disk, ltl::PropositionTable({"r", "l"}),
               {region::Region(2, {region::BasicRegion{{P("x1 - 2"), P("9 - x1^2 - x2^2")}}}),
                region::Region(2, {region::BasicRegion{{P("-x1 - 2"), P("9 - x1^2 - x2^2")}}})}};
    Obligation o;
    o.triple = {0, 1, 2};
    o.sigma0 = sys.regions[0];
    o.sigma1 = sys.regions[1];
    Options opts = fast();
    opts.disjoint.use_psatz = false;
    opts.disjoint.use_search = false;
    EvidenceCache cache;
    const Discharge d = discharge(o, sys, opts, cache);
    REQUIRE(d.discharged);
    CHECK(d.a->method == Method::Barrier2);
    CHECK(d.a->validation->passed);

    // With the whole disk as loop region the flow carries Y0 into Y1.
    sys.f = VectorField({P("-1"), P("0")});
    o.loop = disk;
    EvidenceCache fresh;
    opts.degrees = {2, 4};
    const Discharge bad = discharge(o, sys, opts, fresh);
    CHECK_FALSE(bad.discharged);
    CHECK_FALSE(bad.a.has_value());
    REQUIRE(bad.best_margin.has_value());
    CHECK(*bad.best_margin < 0.0);
}

TEST_CASE("degree cap 2 is inconclusive on the example")
{
    Options o = fast();
    o.max_degree = 2;
    const Verdict v = verify::verify(example_system(), example1::formula(), o);
    CHECK_FALSE(v.satisfied);
    REQUIRE(v.states.size() == 1);
    CHECK(v.states[0].condition.empty());
    CHECK(v.states[0].near_miss.has_value());
    CHECK(to_json(v, example_system(), o)["verdict"] == "Inconclusive");
}

TEST_CASE("unsafe set grown into the target makes the example inconclusive")
{
    System sys = example_system();
    sys.regions[3] = region::Region(2, {region::BasicRegion{{example1::poly("56.25 - x1^2 - (x2 + 3)^2")}}});
    const Verdict v = verify::verify(sys, example1::formula(), fast());
    CHECK_FALSE(v.satisfied);
}
