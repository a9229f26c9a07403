#include "sosltl/region.hpp"
#include "support/example1.hpp"

#include <doctest.h>

#include <cmath>

using namespace sosltl;
using namespace sosltl::region;

namespace {

Region single(const Polynomial& g) { return Region(g.nvars(), {BasicRegion{{g}}}); }

Region pieces(std::vector<std::vector<Polynomial>> ps)
{
    std::vector<BasicRegion> out;
    for (auto& p : ps)
        out.push_back(BasicRegion{std::move(p)});
    const std::size_t n = out.front().g.front().nvars();
    return Region(n, std::move(out));
}

DisjointOptions opts()
{
    DisjointOptions o;
    o.box = Box{{-7, -7}, {7, 7}};
    return o;
}

// Letter of x under the exact (half-open) semantics.
ltl::Letter exact_letter(const std::vector<double>& x)
{
    ltl::Letter a = 0;
    const auto g = example1::g_props();
    for (std::size_t p = 0; p < g.size(); ++p)
        if (g[p].evaluate(x) >= 0.0)
            a |= ltl::Letter{1} << p;
    return a;
}

} // namespace

TEST_CASE("ball recognition")
{
    const auto g = example1::g_props();
    const auto b0 = as_ball(g[0]);
    REQUIRE(b0);
    CHECK(b0->center[0] == doctest::Approx(-2.0));
    CHECK(b0->center[1] == doctest::Approx(4.5));
    CHECK(b0->radius == doctest::Approx(0.25));
    const auto b1 = as_ball(g[1]);
    REQUIRE(b1);
    CHECK(b1->radius == doctest::Approx(std::sqrt(3.0)));
    CHECK(as_ball(3.0 * g[2])->radius == doctest::Approx(1.0));

    CHECK_FALSE(as_ball(-g[0]));
    CHECK_FALSE(as_ball(example1::poly("1 - x1^2 - 2*x2^2")));
    CHECK_FALSE(as_ball(example1::poly("1 - x1^2 - x2^2 + x1*x2")));
    CHECK_FALSE(as_ball(example1::poly("x1 - 1")));
    CHECK_FALSE(as_ball(example1::poly("-1 - x1^2 - x2^2")));
}

TEST_CASE("letter regions of the first example")
{
    const auto props = example1::props();
    const auto X = example1::domain();
    const auto g = example1::g_props();

    const Region r0 = letter_region(0b0001, props, X);
    REQUIRE(r0.pieces.size() == 1);
    CHECK(r0.pieces[0].g.size() == 1);
    CHECK(approx_equal(r0.pieces[0].g[0], g[0]));

    CHECK(letter_region(0b0101, props, X).empty());
    CHECK(letter_region(0b1100, props, X).empty());
    CHECK_FALSE(letter_region(0b1010, props, X).empty());

    const Region none = letter_region(0, props, X);
    REQUIRE(none.pieces.size() == 1);
    CHECK(none.pieces[0].g.size() == 5);

    CHECK_THROWS_AS(letter_region(0b10000, props, X), std::invalid_argument);
}

TEST_CASE("letter regions partition and cover the domain")
{
    const auto props = example1::props();
    const auto X = example1::domain();
    std::vector<Region> letters;
    for (ltl::Letter a = 0; a < 16; ++a)
        letters.push_back(letter_region(a, props, X));

    std::mt19937_64 rng(5);
    const auto xs = sample(X, 20000, {}, rng);
    REQUIRE(xs.size() == 20000);
    for (const auto& x : xs) {
        const ltl::Letter a = exact_letter(x);
        CHECK(letters[a].contains(x));
    }
    // Targeted samples near each disk.
    for (std::size_t p = 0; p < props.size(); ++p) {
        const auto ball = *as_ball(props[p].pieces[0].g[0]);
        const Box box{{ball.center[0] - 2 * ball.radius, ball.center[1] - 2 * ball.radius},
                      {ball.center[0] + 2 * ball.radius, ball.center[1] + 2 * ball.radius}};
        const auto near = sample(Region(2, {BasicRegion{{example1::poly("1")}}}), 2000, box, rng);
        for (const auto& x : near)
            if (X.contains(x))
                CHECK(letters[exact_letter(x)].contains(x));
    }
}

TEST_CASE("guard regions")
{
    const auto props = example1::props();
    const auto X = example1::domain();
    const auto g = example1::g_props();

    const Region not1 = guard_region({ltl::Cube{0, 0b0010}}, props, X);
    REQUIRE(not1.pieces.size() == 1);
    CHECK(not1.pieces[0].g.size() == 2);
    CHECK(not1.contains(std::vector<double>{5.0, 0.0}));
    CHECK_FALSE(not1.contains(std::vector<double>{1.7, 0.0}));

    const Region all = guard_region({ltl::Cube{}}, props, X);
    CHECK(all.canonical() == X.canonical());
    CHECK(guard_region({}, props, X).empty());

    const Region p2 = guard_region({ltl::Cube{0b0100, 0}}, props, X);
    REQUIRE(p2.pieces.size() == 1);
    CHECK(approx_equal(p2.pieces[0].g[0], g[2]));

    CHECK(unite(p2, Region(2)).canonical() == p2.canonical());
    CHECK(unite(Region(2), p2).canonical() == p2.canonical());
}

TEST_CASE("subtraction and intersection")
{
    const Region a = single(example1::poly("1 - x1^2 - x2^2"));
    const Region inner = single(example1::poly("0.25 - x1^2 - x2^2"));
    CHECK(subtract(inner, a).empty());
    const Region ring = subtract(a, inner);
    CHECK(ring.contains(std::vector<double>{0.75, 0.0}));
    CHECK_FALSE(ring.contains(std::vector<double>{0.1, 0.0}));
    CHECK(ring.contains(std::vector<double>{0.5, 0.0})); // closure keeps the boundary

    const Region i = intersect(a, inner);
    REQUIRE(i.pieces.size() == 1);
    CHECK(i.pieces[0].g.size() == 1);

    const Region two = pieces({{example1::poly("x1")}, {example1::poly("x2")}});
    const Region d = subtract(a, two);
    CHECK(d.contains(std::vector<double>{-0.5, -0.5}));
    CHECK_FALSE(d.contains(std::vector<double>{0.5, -0.5}));
    CHECK_FALSE(d.contains(std::vector<double>{-0.5, 0.5}));
}

TEST_CASE("disjointness of the example disks")
{
    const auto props = example1::props();
    const auto o = opts();

    const auto r02 = closures_disjoint(props[0], props[2], o);
    CHECK(r02.status == Status::ProvedDisjoint);
    REQUIRE(r02.evidence.size() == 1);
    CHECK(r02.evidence[0].method == "ball");
    CHECK(r02.evidence[0].ball_gap == doctest::Approx(std::sqrt(36.25) - 1.25));

    const auto r23 = closures_disjoint(props[2], props[3], o);
    CHECK(r23.status == Status::ProvedDisjoint);
    CHECK(r23.evidence[0].ball_gap == doctest::Approx(std::sqrt(65.0) - 3.0));

    const auto r13 = closures_disjoint(props[1], props[3], o);
    CHECK(r13.status == Status::FoundIntersection);
    REQUIRE(r13.witness.size() == 2);
    CHECK(props[1].pieces[0].violation(r13.witness) <= 1e-9);
    CHECK(props[3].pieces[0].violation(r13.witness) <= 1e-9);
}

TEST_CASE("disjointness beyond balls")
{
    auto o = opts();
    // Half-planes: refuted by a Positivstellensatz certificate.
    const Region right = single(example1::poly("x1 - 1"));
    const Region left = single(example1::poly("-x1"));
    const auto r = closures_disjoint(right, left, o);
    REQUIRE(r.status == Status::ProvedDisjoint);
    REQUIRE(r.evidence[0].psatz);
    CHECK(r.evidence[0].psatz->identity_residual <= 1e-6);
    CHECK(sos::psatz_residual(*r.evidence[0].psatz, r.evidence[0].scaled_g) <= 1e-6);

    // Ellipses that overlap.
    const Region e1 = single(example1::poly("1 - x1^2/4 - x2^2"));
    const Region e2 = single(example1::poly("1 - (x1 - 2.5)^2 - x2^2/4"));
    const auto r2 = closures_disjoint(e1, e2, o);
    REQUIRE(r2.status == Status::FoundIntersection);
    CHECK(r2.witness_violation <= 1e-9);

    // Separated ellipses.
    const Region e3 = single(example1::poly("1 - (x1 - 4)^2 - x2^2/4"));
    CHECK(closures_disjoint(e1, e3, o).status == Status::ProvedDisjoint);

    // Closures touching along a line: only the descent stage finds a common point.
    const Region a = single(example1::poly("x1 - 0.3"));
    const Region b = single(example1::poly("0.3 - x1"));
    const auto r3 = closures_disjoint(a, b, o);
    REQUIRE(r3.status == Status::FoundIntersection);
    CHECK(std::abs(r3.witness[0] - 0.3) < 1e-6);

    // Without any method the answer stays open.
    o.use_psatz = false;
    o.use_search = false;
    CHECK(closures_disjoint(right, left, o).status == Status::Unknown);
}

TEST_CASE("proved disjointness agrees with grid sampling")
{
    const Region e1 = single(example1::poly("1 - x1^2/4 - x2^2"));
    const Region e3 = single(example1::poly("1 - (x1 - 4.2)^2 - x2^2/4 + x1*x2/10"));
    const auto r = closures_disjoint(e1, e3, opts());
    REQUIRE(r.status == Status::ProvedDisjoint);
    for (int i = 0; i <= 400; ++i)
        for (int j = 0; j <= 400; ++j) {
            const std::vector<double> x{-7 + 14.0 * i / 400, -7 + 14.0 * j / 400};
            CHECK_FALSE((e1.contains(x, 0.0) && e3.contains(x, 0.0)));
        }
}

TEST_CASE("emptiness")
{
    const auto o = opts();
    const BasicRegion empty{{example1::poly("1 - x1^2 - x2^2"), example1::poly("x1^2 + x2^2 - 4")}};
    CHECK(piece_emptiness(empty, o).status == Emptiness::Empty);
    const BasicRegion full{{example1::poly("1 - x1^2 - x2^2")}};
    const auto e = piece_emptiness(full, o);
    CHECK(e.status == Emptiness::Nonempty);
    CHECK(full.contains(e.witness));
    CHECK(region_emptiness(Region(2), o).status == Emptiness::Empty);
}

TEST_CASE("rejection sampling stays inside")
{
    const auto props = example1::props();
    std::mt19937_64 rng(3);
    const auto xs = sample(props[0], 10000, {}, rng);
    CHECK(xs.size() == 10000);
    for (const auto& x : xs)
        CHECK(props[0].contains(x, 0.0));
    const auto ring = letter_region(0, props, example1::domain());
    const auto ys = sample(ring, 1000, {}, rng);
    CHECK(ys.size() == 1000);
    for (const auto& y : ys)
        CHECK(exact_letter(y) == 0);
}

TEST_CASE("canonical form ignores order")
{
    const auto g = example1::g_props();
    const Region a = pieces({{g[0], g[1]}, {g[2]}});
    const Region b = pieces({{g[2]}, {g[1], g[0]}});
    CHECK(a.canonical() == b.canonical());
    CHECK(a.canonical() != pieces({{g[2]}}).canonical());
}
