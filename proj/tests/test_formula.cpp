#include "sosltl/formula.hpp"
#include "support/random_ltl.hpp"

#include <doctest.h>

#include <functional>

using namespace sosltl::ltl;

namespace {

const char* const kExample = "G(p2 -> G !p3) & (p0 -> (F p2 -> (!p2 U p1)))";

PropositionTable four() { return PropositionTable({"p0", "p1", "p2", "p3"}); }

} // namespace

TEST_CASE("parse builds the expected tree")
{
    auto props = four();
    const Formula f = parse(kExample, props);
    const Formula expected = make_and(
        make_always(make_implies(make_atom(2), make_always(make_not(make_atom(3))))),
        make_implies(make_atom(0),
                     make_implies(make_eventually(make_atom(2)), make_until(make_not(make_atom(2)), make_atom(1)))));
    CHECK(structurally_equal(f, expected));
    CHECK(props.size() == 4);

    CHECK(parse("true", props)->op == Op::True);
    CHECK(parse("false", props)->op == Op::False);
}

TEST_CASE("parse precedence and associativity")
{
    PropositionTable props;
    const Formula f = parse("a | b & c -> d U e U f", props);
    REQUIRE(f->op == Op::Implies);
    CHECK(f->lhs->op == Op::Or);
    CHECK(f->lhs->rhs->op == Op::And);
    CHECK(f->rhs->op == Op::Until);
    CHECK(f->rhs->rhs->op == Op::Until);

    const Formula g = parse("a -> b -> c", props);
    CHECK(g->rhs->op == Op::Implies);
    CHECK(parse("!a & b", props)->op == Op::And);
    CHECK(parse("a && b || c", props)->op == Op::Or);
}

TEST_CASE("parse errors")
{
    PropositionTable props;
    CHECK_THROWS_AS(parse("p0 U", props), FormulaParseError);
    CHECK_THROWS_AS(parse("(p0", props), FormulaParseError);
    CHECK_THROWS_AS(parse("p0 p1", props), FormulaParseError);
    CHECK_THROWS_AS(parse("", props), FormulaParseError);
    CHECK_THROWS_AS(parse("p0 $ p1", props), FormulaParseError);
    try {
        parse("G X p0", props);
        FAIL("expected an error");
    } catch (const FormulaParseError& e) {
        CHECK(std::string(e.what()).find("next operator not permitted") != std::string::npos);
        CHECK(e.position == 2);
    }
    auto fixed = four();
    CHECK_THROWS_AS(parse("p0 & q", fixed, false), FormulaParseError);
    CHECK(fixed.size() == 4);
}

TEST_CASE("printing round-trips")
{
    std::mt19937 rng(7);
    PropositionTable props({"a", "b", "c"});
    for (int k = 0; k < 300; ++k) {
        const Formula f = random_ltl::formula(rng, 3, 4);
        const std::string s = to_string(f, props);
        PropositionTable again = props;
        const Formula g = parse(s, again, false);
        INFO(s);
        CHECK(structurally_equal(f, g));
        CHECK(to_string(g, again) == s);
    }
}

TEST_CASE("negation normal form")
{
    PropositionTable props({"p"});
    const Formula n = negate(parse("G p", props));
    REQUIRE(n->op == Op::Eventually);
    CHECK(n->lhs->op == Op::Not);
    CHECK(n->lhs->lhs->op == Op::Atom);
    CHECK(negate(make_true())->op == Op::False);

    std::mt19937 rng(11);
    for (int k = 0; k < 200; ++k) {
        const Formula f = random_ltl::formula(rng, 3, 4);
        std::function<bool(const Formula&)> ok = [&](const Formula& g) {
            if (g->op == Op::Implies)
                return false;
            if (g->op == Op::Not)
                return g->lhs->op == Op::Atom;
            return (!g->lhs || ok(g->lhs)) && (!g->rhs || ok(g->rhs));
        };
        CHECK(ok(nnf(f)));
        CHECK(ok(negate(f)));
    }
}

TEST_CASE("negation complements the example formula")
{
    auto props = four();
    const Formula f = parse(kExample, props);
    const Formula nf = negate(f);
    std::mt19937 rng(3);
    for (int k = 0; k < 500; ++k) {
        const LassoWord w = random_ltl::word(rng, 4);
        CHECK(eval_lasso(nf, w) == !eval_lasso(f, w));
    }
}

TEST_CASE("evaluation examples")
{
    auto props = four();
    const Formula f = parse(kExample, props);
    CHECK(eval_lasso(f, LassoWord({}, {0})));
    // p2 then p3 violates the first conjunct.
    CHECK_FALSE(eval_lasso(f, LassoWord({0b0100, 0b1000}, {0})));
    // p0 first, p2 before any p1.
    CHECK_FALSE(eval_lasso(f, LassoWord({0b0001, 0b0100}, {0})));
    CHECK(eval_lasso(f, LassoWord({0b0001, 0b0010, 0b0100}, {0})));

    PropositionTable one({"p"});
    CHECK(eval_lasso(parse("G p", one), LassoWord({}, {1})));
    CHECK_FALSE(eval_lasso(parse("F p", one), LassoWord({}, {0})));
    CHECK(eval_lasso(parse("F p", one), LassoWord({0, 0}, {0, 1})));
    CHECK_FALSE(eval_lasso(parse("G F p", one), LassoWord({1, 1}, {0})));
    CHECK(eval_lasso(parse("F G p", one), LassoWord({0, 0}, {1})));
}

TEST_CASE("lasso words reject an empty cycle")
{
    CHECK_THROWS_AS(LassoWord({1, 2}, {}), std::invalid_argument);
    const LassoWord w({5}, {6, 7});
    CHECK(w.successor(0) == 1);
    CHECK(w.successor(2) == 1);
    CHECK(w.at(2) == 7);
}

TEST_CASE("random formulas: fixpoint evaluation agrees with unrolling and identities")
{
    std::mt19937 rng(2024);
    for (int k = 0; k < 400; ++k) {
        const Formula f = random_ltl::formula(rng, 3, 4);
        const Formula core = to_core(f);
        for (int j = 0; j < 10; ++j) {
            const LassoWord w = random_ltl::word(rng, 3);
            const bool v = eval_lasso(f, w);
            CHECK(v == eval_unrolled(f, w));
            CHECK(v == eval_lasso(core, w));
            CHECK(v == eval_lasso(negate(negate(f)), w));
            CHECK(v == eval_lasso(nnf(f), w));
            CHECK(v != eval_lasso(negate(f), w));
        }
    }
}

TEST_CASE("derived operators")
{
    std::mt19937 rng(99);
    for (int k = 0; k < 200; ++k) {
        const Formula a = random_ltl::formula(rng, 2, 3);
        const LassoWord w = random_ltl::word(rng, 2);
        CHECK(eval_lasso(make_eventually(a), w) == eval_lasso(make_until(make_true(), a), w));
        CHECK(eval_lasso(make_always(a), w) ==
              eval_lasso(make_not(make_eventually(make_not(a))), w));
    }
}

TEST_CASE("core rewriting only uses core operators")
{
    std::mt19937 rng(5);
    std::function<bool(const Formula&)> core = [&](const Formula& g) {
        switch (g->op) {
        case Op::True:
        case Op::Atom:
            return true;
        case Op::Not:
            return core(g->lhs);
        case Op::Or:
        case Op::Until:
            return core(g->lhs) && core(g->rhs);
        default:
            return false;
        }
    };
    for (int k = 0; k < 100; ++k)
        CHECK(core(to_core(random_ltl::formula(rng, 3, 4))));
}

TEST_CASE("atoms and operator counts")
{
    auto props = four();
    const Formula f = parse(kExample, props);
    CHECK(atoms_of(f) == 0b1111u);
    CHECK(operator_count(f) == 10);
}
