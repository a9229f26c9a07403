#include "sosltl/problem.hpp"

#include <doctest.h>

#include <sstream>

using namespace sosltl;
using namespace sosltl::cli;

namespace {

const char* kSmall = R"P(# comment line
[system]
variables = ["x", "y"]   # trailing comment
dynamics = [
  "y",
  "-x",
]
domain = ["16 - x^2 - y^2"]

[propositions]
a = ["1 - x^2 - y^2"]
b = [["x - 2", "9 - x^2 - y^2"], ["-x - 2", "9 - x^2 - y^2"]]

[specification]
formula = "G (a -> G !b)"

[options]
max_degree = 6
degrees = [2, 4]
epsilon = 0.01
seed = 3
samples = 20
grid = 10
)P";

int error_line(const std::string& text)
{
    try {
        parse_problem(text);
    } catch (const ProblemError& e) {
        return e.line;
    }
    return -1;
}

int error_column(const std::string& text)
{
    try {
        parse_problem(text);
    } catch (const ProblemError& e) {
        return e.column;
    }
    return -1;
}

} // namespace

TEST_CASE("problem file fields")
{
    const Problem p = parse_problem(kSmall);
    CHECK(p.system.vars == std::vector<std::string>{"x", "y"});
    CHECK(p.system.f.nvars() == 2);
    CHECK(p.system.props.names() == std::vector<std::string>{"a", "b"});
    REQUIRE(p.system.regions.size() == 2);
    CHECK(p.system.regions[1].pieces.size() == 2);
    CHECK(p.system.regions[1].contains(std::vector<double>{-2.5, 0.0}));
    CHECK_FALSE(p.system.regions[1].contains(std::vector<double>{0.0, 0.0}));
    CHECK(p.formula == "G (a -> G !b)");
    CHECK(p.formula_line == 15);
    CHECK(p.options.max_degree == 6);
    CHECK(p.options.degrees == std::vector<int>{2, 4});
    CHECK(p.options.epsilon == 0.01);
    CHECK(p.falsify.seed == 3);
    CHECK(p.falsify.samples == 20);
    CHECK(p.grid == 10);
    CHECK(p.options.disjoint.box.hi[0] == doctest::Approx(4.0));
}

TEST_CASE("toml subset values")
{
    const auto doc = parse_toml("k = \"a\\\"b\"\n[s]\nn = -1.5e2\nm = 7\nt = true\nl = [[1, 2], []]\n");
    REQUIRE(doc.size() == 2);
    CHECK(doc[0].find("k")->str == "a\"b");
    const Section& s = doc[1];
    CHECK(s.find("n")->num == -150.0);
    CHECK_FALSE(s.find("n")->integer);
    CHECK(s.find("m")->integer);
    CHECK(s.find("t")->boolean);
    CHECK(s.find("l")->items.size() == 2);
    CHECK(s.find("l")->items[1].items.empty());
    CHECK(s.find("missing") == nullptr);
}

TEST_CASE("problem file errors carry positions")
{
    CHECK(error_line("[system]\nvariables = [\"x\"\n") == 3);
    CHECK(error_line("[system]\nname = \"open\n") == 2);
    CHECK(error_line("[system]\nvariables = [\"x\"]\nvariables = [\"y\"]\n") == 3);
    CHECK(error_line("[bogus]\n") == 1);
    CHECK(error_line("[system]\nvariables = [\"x\"]\ndynamics = [\"x\"]\n") == 1);

    std::string s = kSmall;
    CHECK(error_line(std::string(s).replace(s.find("\"-x\""), 4, "\"-z\"")) == 6);
    // Column points into the polynomial text.
    CHECK(error_column(std::string(s).replace(s.find("\"-x\""), 4, "\"-z\"")) == 5);
    CHECK(error_line(std::string(s).replace(s.find("G !b"), 4, "G !c")) == 15);
    CHECK(error_line(std::string(s).replace(s.find("max_degree"), 10, "max_degrees")) == 18);
    CHECK(error_line(std::string(s).replace(s.find("epsilon = 0.01"), 14, "epsilon = -1")) == 20);
    CHECK(error_line(std::string(s).replace(s.find("seed = 3"), 8, "seed = \"3\"")) == 21);
    const auto two = std::string(s).replace(s.find("  \"-x\",\n"), 8, "");
    CHECK(error_line(two) == 4);
    CHECK_THROWS_AS(load_problem("/nonexistent/file.problem"), ProblemError);
}

TEST_CASE("grid output")
{
    const Problem p = parse_problem(kSmall);
    std::ostringstream os;
    write_grid(os, p.system, parse_polynomial("x", p.system.vars), 3);
    const std::string out = os.str();
    CHECK(out.rfind("x,y,B,lie,domain,a,b\n", 0) == 0);
    CHECK(out.find("-4,-4,-4,-4,0,0,0\n") != std::string::npos);
    CHECK(out.find("0,0,0,0,1,1,0\n") != std::string::npos);
    CHECK(std::count(out.begin(), out.end(), '\n') == 10);
    CHECK_THROWS_AS(write_grid(os, p.system, parse_polynomial("x", p.system.vars), 0), std::invalid_argument);
}
