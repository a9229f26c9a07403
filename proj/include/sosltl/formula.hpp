#pragma once

#include <cstdint>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

namespace sosltl::ltl {

/// Set of atomic propositions holding at one instant; bit i is proposition i.
using Letter = std::uint32_t;
constexpr int kMaxProps = 32;

class PropositionTable {
public:
    PropositionTable() = default;
    explicit PropositionTable(std::vector<std::string> names);

    [[nodiscard]] int size() const { return static_cast<int>(names_.size()); }
    [[nodiscard]] const std::vector<std::string>& names() const { return names_; }
    [[nodiscard]] const std::string& name(int i) const { return names_.at(i); }
    /// Index of `name`, or -1.
    [[nodiscard]] int find(const std::string& name) const;
    int add(const std::string& name);

    friend bool operator==(const PropositionTable&, const PropositionTable&) = default;

private:
    std::vector<std::string> names_;
};

enum class Op { True, False, Atom, Not, And, Or, Implies, Until, Release, Eventually, Always };

struct Node;
using Formula = std::shared_ptr<const Node>;

struct Node {
    Op op;
    int atom = -1;
    Formula lhs;
    Formula rhs;
};

Formula make_true();
Formula make_false();
Formula make_atom(int index);
Formula make_not(Formula a);
Formula make_and(Formula a, Formula b);
Formula make_or(Formula a, Formula b);
Formula make_implies(Formula a, Formula b);
Formula make_until(Formula a, Formula b);
Formula make_release(Formula a, Formula b);
Formula make_eventually(Formula a);
Formula make_always(Formula a);

class FormulaParseError : public std::runtime_error {
public:
    FormulaParseError(const std::string& msg, std::size_t pos)
        : std::runtime_error(msg + " at offset " + std::to_string(pos)), position(pos) {}
    std::size_t position;
};

/// Grammar in docs/formula.md. Unknown atoms are added to `props` unless
/// `allow_new_atoms` is false, in which case they are an error.
Formula parse(const std::string& text, PropositionTable& props, bool allow_new_atoms = true);

std::string to_string(const Formula& f, const PropositionTable& props);

/// Negation normal form of !f: negations only on atoms, no implications.
Formula negate(const Formula& f);
Formula nnf(const Formula& f);

/// Rewrites into the core {true, atom, !, |, U}.
Formula to_core(const Formula& f);

/// Bitmask of atoms occurring in f.
Letter atoms_of(const Formula& f);
/// Number of operator nodes (everything except true/false/atoms).
int operator_count(const Formula& f);
bool structurally_equal(const Formula& a, const Formula& b);

/// The infinite word prefix . cycle^omega.
struct LassoWord {
    std::vector<Letter> prefix;
    std::vector<Letter> cycle;

    LassoWord() = default;
    /// Throws std::invalid_argument when the cycle is empty.
    LassoWord(std::vector<Letter> prefix, std::vector<Letter> cycle);

    [[nodiscard]] std::size_t positions() const { return prefix.size() + cycle.size(); }
    [[nodiscard]] std::size_t successor(std::size_t i) const;
    [[nodiscard]] Letter at(std::size_t i) const;
};

bool eval_lasso(const Formula& f, const LassoWord& w);

/// Reference semantics by explicit unrolling over |prefix| + 2|cycle| positions.
bool eval_unrolled(const Formula& f, const LassoWord& w);

} // namespace sosltl::ltl
