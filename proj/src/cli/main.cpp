#include "sosltl/problem.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

using namespace sosltl;
namespace fs = std::filesystem;

namespace {

// Flags shared by the subcommands that run the pipeline.
struct Flags {
    std::string problem;
    std::optional<int> max_degree;
    std::optional<double> epsilon;
    std::optional<double> time_budget;
    std::optional<unsigned> seed;
    std::string sdpa_dir;
    std::string report;
    std::string formula;
    bool normalize = false;
    std::optional<int> grid;
    std::string out = ".";
    std::optional<std::size_t> samples;
    std::optional<double> horizon;
    std::optional<double> step;
};

cli::Problem load(const Flags& f)
{
    cli::Problem p = cli::load_problem(f.problem);
    if (!f.formula.empty()) {
        ltl::PropositionTable t = p.system.props;
        ltl::parse(f.formula, t, false);
        p.formula = f.formula;
    }
    if (f.max_degree)
        p.options.max_degree = *f.max_degree;
    if (f.epsilon)
        p.options.epsilon = *f.epsilon;
    if (f.time_budget)
        p.options.time_budget = *f.time_budget;
    if (f.seed) {
        p.options.validation.seed = *f.seed;
        p.options.disjoint.seed = *f.seed;
        p.falsify.seed = *f.seed;
    }
    if (f.grid)
        p.grid = *f.grid;
    if (f.samples)
        p.falsify.samples = *f.samples;
    if (f.horizon)
        p.falsify.horizon = *f.horizon;
    if (f.step)
        p.falsify.step = *f.step;
    p.options.sdpa_dir = f.sdpa_dir;
    p.options.normalize = f.normalize;
    return p;
}

std::string part_text(const verify::PartEvidence& e)
{
    std::string s = verify::method_name(e.method);
    if (e.method == verify::Method::ReusedFrom)
        s += " " + std::to_string(e.reused_from) + " (" + verify::method_name(e.source) + ")";
    if (e.barrier)
        s += " degree " + std::to_string(e.degree);
    return s;
}

void print_summary(std::ostream& os, const verify::Verdict& v)
{
    const auto& a = v.obligations.automaton;
    os << "formula: " << v.formula << '\n';
    os << "automaton: " << a.num_states << " states, " << a.transitions.size() << " transitions, "
       << v.obligations.removed_letters.size() << " empty letters removed\n";
    for (const auto& s : v.states) {
        os << "q" << s.state << ": ";
        if (s.condition == "cycles")
            os << "condition (1) over accepting cycles\n";
        else if (s.condition == "paths")
            os << "condition (2) over initial paths\n";
        else
            os << "no condition holds\n";
        for (const auto& [path, id] : s.witness) {
            const auto& d = v.discharges.at(id);
            os << "  " << path << ": obligation " << id;
            if (d.a)
                os << "; a: " << part_text(*d.a);
            if (d.b)
                os << "; b: " << part_text(*d.b);
            os << '\n';
        }
        if (s.near_miss) {
            os << "  closest failure: obligation " << s.near_miss->obligation;
            if (s.near_miss->best_margin)
                os << ", best margin " << *s.near_miss->best_margin;
            os << '\n';
        }
    }
    os << "verdict: " << (v.satisfied ? "Satisfied" : "Inconclusive") << '\n';
}

int run_verify(const Flags& f)
{
    const cli::Problem p = load(f);
    const verify::Verdict v = verify::verify(p.system, p.formula, p.options);
    print_summary(std::cout, v);
    if (!f.report.empty()) {
        std::ofstream out(f.report);
        if (!out)
            throw cli::ProblemError(0, 0, "cannot write " + f.report);
        out << verify::to_json(v, p.system, p.options).dump(2) << '\n';
    }
    return v.satisfied ? 0 : 1;
}

int run_plotdata(const Flags& f)
{
    const cli::Problem p = load(f);
    if (p.grid < 1)
        throw std::invalid_argument("grid size must be positive");
    if (p.system.vars.size() != 2)
        throw std::invalid_argument("grids need exactly two variables");
    const verify::Verdict v = verify::verify(p.system, p.formula, p.options);
    fs::create_directories(f.out);
    int written = 0;
    for (const auto& [id, d] : v.discharges)
        for (const auto& [part, kind] : {std::pair{&d.a, "a"}, std::pair{&d.b, "b"}}) {
            if (!*part || !(*part)->barrier || (*part)->method == verify::Method::ReusedFrom)
                continue;
            const fs::path file = fs::path(f.out) / ("obligation" + std::to_string(id) + "_" + kind + "_grid.csv");
            std::ofstream out(file);
            cli::write_grid(out, p.system, (*part)->barrier->b, p.grid);
            std::cout << "wrote " << file.string() << '\n';
            ++written;
        }
    if (written == 0) {
        std::cerr << "error: no barrier certificate was produced\n";
        return 1;
    }
    return 0;
}

int run_simulate(const Flags& f)
{
    const cli::Problem p = load(f);
    ltl::PropositionTable props = p.system.props;
    const auto a = ltl::translate(ltl::negate(ltl::parse(p.formula, props, false)), props);
    const auto rep = sim::falsify(p.system.f, p.system.domain, p.system.regions, a, p.falsify);
    std::cout << "simulated " << rep.simulated << " trajectories (" << rep.truncated << " left the domain)\n";
    if (!rep.counterexample) {
        std::cout << "no counterexample found\n";
        return 0;
    }
    const auto& cx = *rep.counterexample;
    std::cout << "counterexample from sample " << cx.sample_index << " at (";
    for (std::size_t i = 0; i < cx.x0.size(); ++i)
        std::cout << (i ? ", " : "") << cx.x0[i];
    std::cout << ")\ntrace:";
    for (auto l : cx.trace.letters)
        std::cout << ' ' << sim::letter_to_string(l, p.system.props);
    std::cout << '\n';
    fs::create_directories(f.out);
    const fs::path file = fs::path(f.out) / "counterexample.csv";
    std::ofstream out(file);
    sim::write_csv(out, cx.trajectory, p.system.regions, p.system.props, p.system.vars);
    std::cout << "wrote " << file.string() << '\n';
    return 1;
}

std::vector<std::string> split_names(const std::string& s)
{
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ','))
        if (!item.empty())
            out.push_back(item);
    return out;
}

int run_translate(const std::string& formula, const std::string& props, bool negate)
{
    ltl::PropositionTable table(split_names(props));
    ltl::Formula f = ltl::parse(formula, table, true);
    if (negate)
        f = ltl::negate(f);
    std::cout << ltl::export_text(ltl::translate(f, table));
    return 0;
}

int run_automaton(const std::string& path)
{
    std::ifstream in(path);
    if (!in)
        throw cli::ProblemError(0, 0, "cannot read " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    const ltl::Automaton a = ltl::import_text(ss.str());
    const ltl::Graph g = ltl::graph_of(a);
    std::cout << "states " << a.num_states << ", edges " << g.num_edges() << '\n';
    for (int q : a.accepting_states()) {
        std::cout << "q" << q << '\n';
        for (const auto& [name, paths] : {std::pair{"cycles", ltl::cyc_paths(g, a.initial, q)},
                                          std::pair{"paths", ltl::path_paths(g, a.initial, q)}}) {
            std::cout << "  " << name << ":\n";
            for (const auto& p : paths) {
                std::cout << "    " << ltl::path_to_string(p) << " |";
                for (const auto& t : ltl::pf3(p))
                    std::cout << ' ' << ltl::path_to_string({t[0], t[1], t[2]});
                std::cout << '\n';
            }
        }
    }
    return 0;
}

void pipeline_flags(CLI::App* app, Flags& f)
{
    app->add_option("problem", f.problem, "problem file")->required()->check(CLI::ExistingFile);
    app->add_option("--max-degree", f.max_degree, "highest barrier degree tried");
    app->add_option("--epsilon", f.epsilon, "barrier margin on the target set")->check(CLI::PositiveNumber);
    app->add_option("--time-budget", f.time_budget, "seconds per obligation (0: none)");
    app->add_option("--seed", f.seed, "random seed");
    app->add_option("--formula", f.formula, "replace the specification");
    app->add_flag("--normalize", f.normalize, "omit timings from the report");
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Verify polynomial dynamics against LTL specifications with barrier certificates"};
    app.require_subcommand(1);
    Flags f;

    auto* verify_cmd = app.add_subcommand("verify", "run the verification pipeline");
    pipeline_flags(verify_cmd, f);
    verify_cmd->add_option("--report", f.report, "write the verdict as JSON");
    verify_cmd->add_option("--emit-sdpa", f.sdpa_dir, "directory for SDPA exports of every barrier program");

    auto* plot_cmd = app.add_subcommand("plotdata", "write barrier grids for contour plots");
    pipeline_flags(plot_cmd, f);
    plot_cmd->add_option("--grid", f.grid, "points per axis (default 400)");
    plot_cmd->add_option("--out", f.out, "output directory");

    auto* sim_cmd = app.add_subcommand("simulate", "search for counterexamples by simulation");
    sim_cmd->add_option("problem", f.problem, "problem file")->required()->check(CLI::ExistingFile);
    sim_cmd->add_option("--seed", f.seed, "random seed");
    sim_cmd->add_option("--samples", f.samples, "initial states");
    sim_cmd->add_option("--horizon", f.horizon, "simulated time")->check(CLI::PositiveNumber);
    sim_cmd->add_option("--step", f.step, "integration step")->check(CLI::PositiveNumber);
    sim_cmd->add_option("--formula", f.formula, "replace the specification");
    sim_cmd->add_option("--out", f.out, "output directory");

    std::string formula, props;
    bool negate = false;
    auto* tr_cmd = app.add_subcommand("translate", "print the Buchi automaton of a formula");
    tr_cmd->add_option("formula", formula, "LTL formula")->required();
    tr_cmd->add_option("--props", props, "comma-separated proposition order");
    tr_cmd->add_flag("--negate", negate, "translate the negation");

    std::string aut_file;
    auto* aut_cmd = app.add_subcommand("automaton", "list accepting cycles, initial paths and their triples");
    aut_cmd->add_option("file", aut_file, "automaton text file")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        if (*verify_cmd)
            return run_verify(f);
        if (*plot_cmd)
            return run_plotdata(f);
        if (*sim_cmd)
            return run_simulate(f);
        if (*tr_cmd)
            return run_translate(formula, props, negate);
        return run_automaton(aut_file);
    } catch (const cli::ProblemError& e) {
        std::cerr << f.problem << ": " << e.what() << '\n';
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
    }
    return 2;
}
