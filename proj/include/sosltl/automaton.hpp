#pragma once

#include "sosltl/formula.hpp"

#include <array>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

namespace sosltl::ltl {

/// Conjunction of literals: atoms in `pos` hold, atoms in `neg` do not.
struct Cube {
    Letter pos = 0;
    Letter neg = 0;

    [[nodiscard]] bool satisfiable() const { return (pos & neg) == 0; }
    [[nodiscard]] bool matches(Letter a) const { return (a & pos) == pos && (a & neg) == 0; }
    /// Every letter matching *this also matches `weaker`.
    [[nodiscard]] bool implies(const Cube& weaker) const
    {
        return (weaker.pos & ~pos) == 0 && (weaker.neg & ~neg) == 0;
    }

    friend bool operator==(const Cube&, const Cube&) = default;
    friend auto operator<=>(const Cube&, const Cube&) = default;
};

/// Disjunction of cubes; empty means false.
using Guard = std::vector<Cube>;

bool guard_matches(const Guard& g, Letter a);
Letter guard_support(const Guard& g);
std::string guard_to_string(const Guard& g, const PropositionTable& props);
/// Propositional formula (no temporal operators) to DNF. Throws std::invalid_argument otherwise.
Guard guard_from_formula(const Formula& f);

/// Letters over the atoms in `support` (all other atoms absent) that satisfy g.
std::vector<Letter> satisfying_letters(const Guard& g, Letter support);

/// Quine-McCluskey over the atoms in `support`. Letters for which `dont_care`
/// returns true may be covered or not.
Guard minimize_guard(const Guard& g, Letter support, const std::function<bool(Letter)>& dont_care = {});

struct Transition {
    int from = 0;
    int to = 0;
    /// Exactly the enabling letters.
    Guard guard;
    /// Simplified guard for display and region building; may also cover letters
    /// that were removed as empty.
    Guard display;
};

class AutomatonError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct Automaton {
    PropositionTable props;
    int num_states = 0;
    std::vector<std::string> labels;
    std::vector<int> initial;
    std::vector<bool> accepting;
    /// At most one transition per ordered state pair, sorted by (from, to).
    std::vector<Transition> transitions;

    [[nodiscard]] const Transition* find(int q, int q2) const;
    [[nodiscard]] std::vector<int> accepting_states() const;
};

/// Tableau construction to a generalized Buchi automaton, counter degeneralization,
/// then pruning of states without an accepting future and bisimulation merging.
Automaton translate(const Formula& f, const PropositionTable& props);

bool accepts(const Automaton& a, const LassoWord& w);

/// Keeps only letters over `props` satisfying `keep` (at most 16 propositions),
/// prunes and renumbers. Removed letters are don't-cares for display guards.
Automaton restrict_letters(const Automaton& a, const std::function<bool(Letter)>& keep);

/// Disjunction of the guards on edge (q, q2). Throws AutomatonError when absent.
Guard guard_letters(const Automaton& a, int q, int q2);

std::string export_text(const Automaton& a);
Automaton import_text(const std::string& text);

/// Underlying directed graph; successor lists sorted.
struct Graph {
    int n = 0;
    std::vector<std::vector<int>> succ;

    explicit Graph(int vertices = 0) : n(vertices), succ(vertices) {}
    void add_edge(int u, int v);
    [[nodiscard]] bool has_edge(int u, int v) const;
    [[nodiscard]] int num_edges() const;
};

Graph graph_of(const Automaton& a);

using Path = std::vector<int>;
using Triple = std::array<int, 3>;

/// Paths from q to q2 without repeated edges or consecutive repeated states,
/// ending at their first arrival at q2. When q == q2 the single-state path [q]
/// is included iff (q, q) is an edge. Sorted.
std::vector<Path> dfs_paths(const Graph& g, int q, int q2);

std::vector<Path> path_paths(const Graph& g, const std::vector<int>& initial, int q);
/// Empty when q is unreachable from the initial states.
std::vector<Path> cyc_paths(const Graph& g, const std::vector<int>& initial, int q);

std::vector<Triple> pf3(const Path& p);

std::string path_to_string(const Path& p);

} // namespace sosltl::ltl
