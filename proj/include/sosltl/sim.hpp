#pragma once

#include "sosltl/automaton.hpp"
#include "sosltl/poly.hpp"
#include "sosltl/region.hpp"

#include <optional>
#include <ostream>
#include <string>
#include <vector>

namespace sosltl::sim {

struct Trajectory {
    std::vector<double> t;
    std::vector<std::vector<double>> x;
    /// Left the domain; the last sample is the exit point.
    bool exited = false;
    /// Stopped on a non-finite state.
    bool blew_up = false;
    std::string diagnostic;
};

/// Classical RK4 with fixed step h up to time T. With a domain, the trajectory
/// stops at the first exit, located by bisection to 1e-9 in time.
Trajectory integrate(const VectorField& f, const std::vector<double>& x0, double T, double h,
                     const region::Region* domain = nullptr);

struct Trace {
    std::vector<ltl::Letter> letters;
    /// Sample index at which each letter starts.
    std::vector<std::size_t> start;
    /// The trajectory ended before its horizon (exit or blow-up).
    bool truncated = false;
};

/// Letter at a point: propositions whose region contains x with tolerance 1e-9.
ltl::Letter letter_at(std::span<const double> x, const std::vector<region::Region>& props);

/// Stutter-compressed sequence of letters along the samples.
Trace trace_of(const Trajectory& traj, const std::vector<region::Region>& props);

/// A finite run of the monitor: the stuttered word it read and the states visited.
struct MonitorRun {
    std::vector<ltl::Letter> word;
    std::vector<int> states;
    /// Lasso that the automaton accepts: word minus its last letter, then the last letter forever.
    ltl::LassoWord lasso;
};

/// Looks for a run over the trace (each letter read one or more times) that
/// reaches an accepting state with a True self-loop (display guard) that also
/// accepts every remaining letter. Liveness violations are never flagged.
std::optional<MonitorRun> monitor(const ltl::Automaton& a, const std::vector<ltl::Letter>& trace);

struct FalsifyOptions {
    std::size_t samples = 500;
    double horizon = 30.0;
    double step = 0.01;
    unsigned seed = 7;
    /// Fraction of samples drawn uniformly from the domain; the rest cycle over letter regions.
    double uniform_fraction = 0.5;
};

struct Counterexample {
    std::size_t sample_index = 0;
    std::vector<double> x0;
    Trajectory trajectory;
    Trace trace;
    MonitorRun run;
};

struct FalsifyReport {
    std::size_t simulated = 0;
    std::size_t truncated = 0;
    std::optional<Counterexample> counterexample;
};

FalsifyReport falsify(const VectorField& f, const region::Region& domain, const std::vector<region::Region>& props,
                      const ltl::Automaton& a, const FalsifyOptions& opts);

std::string letter_to_string(ltl::Letter a, const ltl::PropositionTable& props);

/// Columns t, x1..xn, letter.
void write_csv(std::ostream& os, const Trajectory& traj, const std::vector<region::Region>& props,
               const ltl::PropositionTable& names, const std::vector<std::string>& vars);

} // namespace sosltl::sim
