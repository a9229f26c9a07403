#include "sosltl/automaton.hpp"
#include "support/random_ltl.hpp"

#include <doctest.h>

#include <bit>
#include <cmath>
#include <deque>
#include <set>

using namespace sosltl::ltl;

namespace {

const char* const kExample = "G(p2 -> G !p3) & (p0 -> (F p2 -> (!p2 U p1)))";

// Letters whose regions are nonempty in the first example: singletons, the
// empty letter, and {p1, p3}.
bool example_letter(Letter x) { return std::popcount(x) <= 1 || x == 0b1010; }

Automaton example_automaton()
{
    PropositionTable props({"p0", "p1", "p2", "p3"});
    const Formula f = parse(kExample, props);
    return restrict_letters(translate(negate(f), props), example_letter);
}

std::string guard_text(const Automaton& a, int q, int q2, bool display)
{
    const Transition* t = a.find(q, q2);
    REQUIRE(t != nullptr);
    return guard_to_string(display ? t->display : t->guard, a.props);
}

// All edge-simple, non-stuttering vertex sequences from q ending at the first visit of q2.
std::set<Path> brute_paths(const Graph& g, int q, int q2)
{
    std::set<Path> out;
    if (q == q2 && g.has_edge(q, q))
        out.insert({q});
    std::deque<Path> work{{q}};
    while (!work.empty()) {
        Path p = work.front();
        work.pop_front();
        if (p.size() > 1 && p.back() == q2) {
            out.insert(p);
            continue;
        }
        for (int v = 0; v < g.n; ++v) {
            if (v == p.back() || !g.has_edge(p.back(), v))
                continue;
            bool repeated = false;
            for (std::size_t i = 0; i + 1 < p.size(); ++i)
                repeated = repeated || (p[i] == p.back() && p[i + 1] == v);
            if (repeated)
                continue;
            Path next = p;
            next.push_back(v);
            work.push_back(std::move(next));
        }
    }
    return out;
}

void check_paths(const Graph& g)
{
    for (int q = 0; q < g.n; ++q)
        for (int q2 = 0; q2 < g.n; ++q2) {
            const auto got = dfs_paths(g, q, q2);
            const auto want = brute_paths(g, q, q2);
            CHECK(std::set<Path>(got.begin(), got.end()) == want);
            CHECK(std::is_sorted(got.begin(), got.end()));
            for (const auto& p : got) {
                CHECK(p.front() == q);
                CHECK(p.back() == q2);
                std::set<std::pair<int, int>> edges;
                for (std::size_t i = 0; i + 1 < p.size(); ++i) {
                    CHECK(p[i] != p[i + 1]);
                    CHECK(g.has_edge(p[i], p[i + 1]));
                    CHECK(edges.insert({p[i], p[i + 1]}).second);
                }
            }
        }
}

} // namespace

TEST_CASE("translation agrees with lasso semantics")
{
    std::mt19937 rng(42);
    PropositionTable props({"a", "b", "c"});
    int accepted = 0, total = 0;
    for (int k = 0; k < 200; ++k) {
        const Formula f = random_ltl::formula(rng, 3, 4);
        const Automaton a = translate(f, props);
        for (int j = 0; j < 500; ++j) {
            const LassoWord w = random_ltl::word(rng, 3);
            const bool want = eval_lasso(f, w);
            if (accepts(a, w) != want) {
                FAIL_CHECK(to_string(f, props));
                break;
            }
            accepted += want;
            ++total;
        }
    }
    // Both outcomes must be well represented for the comparison to mean anything.
    CHECK(accepted > total / 10);
    CHECK(accepted < total - total / 10);
}

TEST_CASE("translation of simple formulas")
{
    PropositionTable props({"p"});
    const Automaton ev = translate(parse("F p", props), props);
    CHECK(accepts(ev, LassoWord({}, {1})));
    CHECK_FALSE(accepts(ev, LassoWord({}, {0})));

    const Automaton no = translate(make_false(), props);
    CHECK(no.accepting_states().empty());
    CHECK_FALSE(accepts(no, LassoWord({}, {1})));

    const Automaton yes = translate(make_true(), props);
    CHECK(accepts(yes, LassoWord({}, {0})));
    CHECK(yes.num_states == 2);
}

TEST_CASE("negated example formula: language matches the expected words")
{
    PropositionTable props({"p0", "p1", "p2", "p3"});
    const Formula f = parse(kExample, props);
    const Automaton a = translate(negate(f), props);
    std::mt19937 rng(8);
    for (int k = 0; k < 2000; ++k) {
        const LassoWord w = random_ltl::word(rng, 4, 5, 3);
        CHECK(accepts(a, w) == !eval_lasso(f, w));
    }
}

TEST_CASE("restricted example automaton has the five-state shape")
{
    const Automaton a = example_automaton();
    REQUIRE(a.num_states == 5);
    CHECK(a.initial == std::vector<int>{0});
    CHECK(a.accepting_states() == std::vector<int>{4});
    CHECK(a.labels[1].rfind("{F p2, p2 R !p1}", 0) == 0);
    CHECK(a.labels[2].rfind("{F (p2 & (F p3))}", 0) == 0);
    CHECK(a.labels[3].rfind("{F p3}", 0) == 0);
    CHECK(a.labels[4].rfind("{}", 0) == 0);

    const std::vector<std::tuple<int, int, std::string>> expected{
        {0, 1, "p0"}, {0, 2, "true"}, {0, 3, "p2"}, {1, 1, "!p1"}, {1, 4, "p2"},
        {2, 2, "true"}, {2, 3, "p2"}, {3, 3, "true"}, {3, 4, "p3"}, {4, 4, "true"},
    };
    REQUIRE(a.transitions.size() == expected.size());
    for (const auto& [q, q2, g] : expected)
        CHECK(guard_text(a, q, q2, true) == g);

    CHECK(guard_text(a, 0, 1, false) == "p0 & !p1 & !p2 & !p3");
    CHECK(guard_letters(a, 0, 1) == Guard{Cube{0b0001, 0b1110}});
    CHECK(guard_text(a, 2, 2, true) == "true");
    CHECK_THROWS_AS(guard_letters(a, 4, 0), AutomatonError);
}

TEST_CASE("acceptance on the restricted example automaton")
{
    const Automaton a = example_automaton();
    CHECK(accepts(a, LassoWord({0b0100, 0b1000}, {0})));
    CHECK_FALSE(accepts(a, LassoWord({}, {0})));
    CHECK(accepts(a, LassoWord({0b0001, 0, 0b0100}, {0})));
    CHECK_FALSE(accepts(a, LassoWord({0b0001, 0b0010, 0b0100}, {0})));
}

TEST_CASE("paths in the example graph")
{
    const Automaton a = example_automaton();
    const Graph g = graph_of(a);
    CHECK(g.num_edges() == 10);

    const auto to4 = dfs_paths(g, 0, 4);
    CHECK(to4 == std::vector<Path>{{0, 1, 4}, {0, 2, 3, 4}, {0, 3, 4}});
    CHECK(dfs_paths(g, 4, 4) == std::vector<Path>{{4}});
    CHECK(path_paths(g, a.initial, 4) == to4);
    CHECK(cyc_paths(g, a.initial, 4) == std::vector<Path>{{4}});

    CHECK(pf3({0, 2, 3, 4}) == std::vector<Triple>{{0, 2, 3}, {2, 3, 4}});
    CHECK(pf3({4}).empty());
    CHECK(path_to_string({0, 2, 3, 4}) == "q0q2q3q4");

    // Number of triples examined per accepting state stays within the bound.
    const int e = g.num_edges(), n = g.n, n0 = static_cast<int>(a.initial.size());
    const double bound = (e - 1) * std::pow(n - 1, e - 1) * (1 + n0);
    std::size_t triples = 0;
    for (const auto& p : path_paths(g, a.initial, 4))
        triples += pf3(p).size();
    for (const auto& p : cyc_paths(g, a.initial, 4))
        triples += pf3(p).size();
    CHECK(static_cast<double>(triples) <= bound);
}

TEST_CASE("unreachable accepting state has no cycles")
{
    Graph g(3);
    g.add_edge(0, 1);
    g.add_edge(2, 2);
    CHECK(dfs_paths(g, 2, 2) == std::vector<Path>{{2}});
    CHECK(path_paths(g, {0}, 2).empty());
    CHECK(cyc_paths(g, {0}, 2).empty());
}

TEST_CASE("two initial states contribute the union of their paths")
{
    Graph g(4);
    g.add_edge(0, 2);
    g.add_edge(1, 3);
    g.add_edge(3, 2);
    g.add_edge(0, 3);
    const auto p = path_paths(g, {0, 1}, 2);
    std::set<Path> want = brute_paths(g, 0, 2);
    const auto from1 = brute_paths(g, 1, 2);
    want.insert(from1.begin(), from1.end());
    CHECK(std::set<Path>(p.begin(), p.end()) == want);
    CHECK(p.size() == 3);
}

TEST_CASE("path enumeration matches brute force on every three-vertex digraph")
{
    for (unsigned mask = 0; mask < (1u << 9); ++mask) {
        Graph g(3);
        for (int u = 0; u < 3; ++u)
            for (int v = 0; v < 3; ++v)
                if (mask & (1u << (3 * u + v)))
                    g.add_edge(u, v);
        check_paths(g);
    }
}

TEST_CASE("path enumeration matches brute force on random digraphs")
{
    std::mt19937 rng(17);
    for (int k = 0; k < 150; ++k) {
        const int n = 4 + static_cast<int>(rng() % 3);
        Graph g(n);
        const int edges = 4 + static_cast<int>(rng() % 7);
        for (int e = 0; e < edges; ++e)
            g.add_edge(static_cast<int>(rng() % n), static_cast<int>(rng() % n));
        check_paths(g);
    }
}

TEST_CASE("text format round-trips")
{
    const Automaton a = example_automaton();
    const std::string text = export_text(a);
    const Automaton b = import_text(text);
    CHECK(export_text(b) == text);
    CHECK(b.num_states == a.num_states);
    std::mt19937 rng(1);
    for (int k = 0; k < 300; ++k) {
        const LassoWord w = random_ltl::word(rng, 4);
        CHECK(accepts(a, w) == accepts(b, w));
    }

    CHECK_THROWS_AS(import_text("states 2\ntrans 0 5 true\n"), AutomatonError);
    CHECK_THROWS_AS(import_text("props a\nstates 1\ntrans 0 0 b\n"), AutomatonError);
    CHECK_THROWS_AS(import_text("props a\n"), AutomatonError);
    CHECK_THROWS_AS(import_text("states 1\nbogus\n"), AutomatonError);

    const Automaton c = import_text("props a\nstates 2\ninitial 0\naccepting 1\n"
                                    "trans 0 1 a\ntrans 0 1 !a # comment\ntrans 1 1 true\n");
    CHECK(c.transitions.size() == 2);
    CHECK(accepts(c, LassoWord({}, {0})));
}

TEST_CASE("guard minimization")
{
    const Letter support = 0b111;
    // a&b | a&!b | !a&b&c  ->  a | b&c
    const Guard g{{0b011, 0}, {0b001, 0b010}, {0b110, 0b001}};
    const Guard m = minimize_guard(g, support);
    CHECK(m == Guard{{0b001, 0}, {0b110, 0}});
    for (Letter x = 0; x < 8; ++x)
        CHECK(guard_matches(g, x) == guard_matches(m, x));

    CHECK(minimize_guard({}, support).empty());
    CHECK(minimize_guard({Cube{}}, support) == Guard{Cube{}});
    // With don't-cares the cover may grow.
    const Guard d = minimize_guard({{0b001, 0b110}}, support, [](Letter x) { return x != 0; });
    CHECK(d == Guard{{0b001, 0}});
}
