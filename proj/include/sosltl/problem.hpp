#pragma once

#include "sosltl/sim.hpp"
#include "sosltl/verifier.hpp"

#include <map>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

namespace sosltl::cli {

class ProblemError : public std::runtime_error {
public:
    ProblemError(int line, int column, const std::string& msg)
        : std::runtime_error("line " + std::to_string(line) + ", column " + std::to_string(column) + ": " + msg),
          line(line), column(column)
    {
    }
    int line;
    int column;
};

/// Values of the TOML subset: strings, numbers, booleans and (nested) arrays.
struct Value {
    enum class Kind { String, Number, Bool, Array };
    Kind kind = Kind::String;
    std::string str;
    double num = 0.0;
    bool integer = false;
    bool boolean = false;
    std::vector<Value> items;
    int line = 0;
    int column = 0;
};

struct Section {
    std::string name;
    int line = 0;
    /// Keys in file order.
    std::vector<std::pair<std::string, Value>> entries;

    [[nodiscard]] const Value* find(const std::string& key) const;
};

/// Sections in file order; keys before the first header land in a section named "".
std::vector<Section> parse_toml(const std::string& text);

struct Problem {
    verify::System system;
    std::string formula;
    int formula_line = 0;
    verify::Options options;
    sim::FalsifyOptions falsify;
    int grid = 400;
};

Problem parse_problem(const std::string& text);
/// Throws ProblemError (line 0) when the file cannot be read.
Problem load_problem(const std::string& path);

/// Uniform n x n grid over the domain's bounding box: columns for each variable,
/// B, its Lie derivative, then 0/1 membership of the domain and each proposition.
/// Two variables only; throws std::invalid_argument otherwise or when n < 1.
void write_grid(std::ostream& os, const verify::System& sys, const Polynomial& b, int n);

} // namespace sosltl::cli
