#include "sosltl/sim.hpp"
#include "support/example1.hpp"

#include <doctest.h>

#include <bit>
#include <cmath>
#include <numbers>
#include <sstream>

using namespace sosltl;
using namespace sosltl::sim;

namespace {

Polynomial p(const std::string& s) { return example1::poly(s); }

region::Region disk(double cx, double cy, double r)
{
    std::ostringstream os;
    os.precision(17);
    os << r * r << " - (x1 - " << cx << ")^2 - (x2 - " << cy << ")^2";
    return region::Region(2, {region::BasicRegion{{p(os.str())}}});
}

ltl::Automaton example_automaton(const std::string& formula)
{
    ltl::PropositionTable props({"p0", "p1", "p2", "p3"});
    const auto f = ltl::parse(formula, props, false);
    return ltl::restrict_letters(ltl::translate(ltl::negate(f), props),
                                 [](ltl::Letter x) { return std::popcount(x) <= 1 || x == 0b1010; });
}

double dist(const std::vector<double>& a, const std::vector<double>& b)
{
    return std::hypot(a[0] - b[0], a[1] - b[1]);
}

} // namespace

TEST_CASE("harmonic oscillator returns after one period")
{
    const VectorField f({p("x2"), p("-x1")});
    const auto tr = integrate(f, {1.0, 0.0}, 2 * std::numbers::pi, 1e-3);
    CHECK(tr.t.back() == doctest::Approx(2 * std::numbers::pi));
    CHECK(dist(tr.x.back(), {1.0, 0.0}) < 1e-6);
    CHECK_FALSE(tr.exited);
    for (std::size_t k = 1; k < tr.t.size(); ++k)
        CHECK(tr.t[k] > tr.t[k - 1]);
}

TEST_CASE("equilibrium stays put")
{
    const auto tr = integrate(example1::field(), {0.0, 0.0}, 10.0, 0.01);
    CHECK(tr.x.back()[0] == 0.0);
    CHECK(tr.x.back()[1] == 0.0);
}

TEST_CASE("bad steps are rejected")
{
    const VectorField f({p("x2"), p("-x1")});
    CHECK_THROWS_AS(integrate(f, {1.0, 0.0}, 1.0, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(integrate(f, {1.0, 0.0}, 1.0, -0.1), std::invalid_argument);
    CHECK_THROWS_AS(integrate(f, {1.0, 0.0}, 0.01, 0.1), std::invalid_argument);
    CHECK_THROWS_AS(integrate(f, {1.0}, 1.0, 0.1), std::invalid_argument);
}

TEST_CASE("fourth-order convergence on the example field")
{
    const auto f = example1::field();
    std::vector<std::vector<double>> ends;
    for (double h : {0.1, 0.05, 0.025})
        ends.push_back(integrate(f, {1.0, 1.0}, 4.0, h).x.back());
    const double order = std::log2(dist(ends[0], ends[1]) / dist(ends[1], ends[2]));
    CHECK(order >= 3.5);
}

TEST_CASE("domain exit is located by bisection")
{
    const VectorField f({p("1"), p("0")});
    const auto dom = disk(0, 0, 1);
    const auto tr = integrate(f, {0.0, 0.0}, 5.0, 0.1, &dom);
    REQUIRE(tr.exited);
    CHECK(std::abs(tr.t.back() - 1.0) < 1e-8);
    CHECK(dom.contains(tr.x.back(), 0.0));
    for (const auto& x : tr.x)
        CHECK(dom.contains(x, 0.0));

    const auto outside = integrate(f, {3.0, 0.0}, 1.0, 0.1, &dom);
    CHECK(outside.exited);
    CHECK(outside.x.size() == 1);
}

TEST_CASE("blow-up truncates the trajectory")
{
    const VectorField f({p("x1^2"), p("0")});
    const auto tr = integrate(f, {1.0, 0.0}, 2.0, 0.01);
    CHECK(tr.blew_up);
    CHECK_FALSE(tr.diagnostic.empty());
    CHECK(tr.t.back() < 1.1);
    for (const auto& x : tr.x)
        CHECK(std::isfinite(x[0]));
}

TEST_CASE("traces along a straight flow")
{
    const VectorField f({p("1"), p("0")});
    const std::vector<region::Region> props{disk(2, 0, 0.5), disk(5, 0, 0.5), disk(8, 0, 0.5)};
    const auto tr = trace_of(integrate(f, {0.0, 0.0}, 9.0, 0.01), props);
    CHECK(tr.letters == std::vector<ltl::Letter>{0, 1, 0, 2, 0, 4, 0});
    CHECK(tr.start.front() == 0);
    CHECK(tr.start[1] == 150);
    CHECK_FALSE(tr.truncated);

    const auto away = trace_of(integrate(f, {0.0, 3.0}, 9.0, 0.01), props);
    CHECK(away.letters == std::vector<ltl::Letter>{0});

    const VectorField still({p("0"), p("0")});
    const auto rest = trace_of(integrate(still, {1.7, 0.0}, 1.0, 0.1), example1::props());
    CHECK(rest.letters == std::vector<ltl::Letter>{0b0010});
}

TEST_CASE("finite-trace monitor")
{
    const auto a = example_automaton(example1::formula());
    const auto run = monitor(a, {0b0100, 0b1000, 0});
    REQUIRE(run);
    CHECK(ltl::accepts(a, run->lasso));
    CHECK(run->states.front() == 0);
    CHECK(run->states.back() == 4);

    CHECK_FALSE(monitor(a, {0}));
    CHECK_FALSE(monitor(a, {}));
    CHECK_FALSE(monitor(a, {0b0001, 0b0010, 0b0100, 0}));
    const auto r2 = monitor(a, {0b0001, 0, 0b0100});
    REQUIRE(r2);
    CHECK(ltl::accepts(a, r2->lasso));

    // Liveness: G F p is violated only by infinite behavior.
    ltl::PropositionTable one({"p"});
    const auto live = ltl::translate(ltl::negate(ltl::parse("G F p", one)), one);
    CHECK_FALSE(monitor(live, {1, 0}));
}

TEST_CASE("falsification on the example")
{
    const auto f = example1::field();
    const auto X = example1::domain();
    const auto props = example1::props();
    FalsifyOptions o;
    o.samples = 0;
    CHECK_FALSE(falsify(f, X, props, example_automaton(example1::formula()), o).counterexample);

    o.samples = 60;
    o.horizon = 20;
    o.step = 0.02;
    const auto ok = falsify(f, X, props, example_automaton(example1::formula()), o);
    CHECK(ok.simulated == 60);
    CHECK_FALSE(ok.counterexample);

    const auto bad = falsify(f, X, props, example_automaton("G !p1"), o);
    REQUIRE(bad.counterexample);
    const auto& cx = *bad.counterexample;
    CHECK(ltl::accepts(example_automaton("G !p1"), cx.run.lasso));
    bool visits = false;
    for (auto l : cx.trace.letters)
        visits = visits || (l & 0b0010);
    CHECK(visits);
}

TEST_CASE("csv output")
{
    const VectorField f({p("1"), p("0")});
    const std::vector<region::Region> props{disk(0.05, 0, 0.02)};
    std::ostringstream os;
    write_csv(os, integrate(f, {0.0, 0.0}, 0.1, 0.05), props, ltl::PropositionTable({"a"}), {"x1", "x2"});
    CHECK(os.str() == "t,x1,x2,letter\n0,0,0,\"{}\"\n0.05,0.05,0,\"{a}\"\n0.1,0.1,0,\"{}\"\n");
}
