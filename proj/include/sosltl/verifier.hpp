#pragma once

#include "sosltl/automaton.hpp"
#include "sosltl/barrier.hpp"
#include "sosltl/region.hpp"
#include "sosltl/validate.hpp"

#include <json.hpp>

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace sosltl::verify {

struct System {
    std::vector<std::string> vars;
    VectorField f;
    region::Region domain;
    ltl::PropositionTable props;
    /// Region of each proposition, indexed like `props`.
    std::vector<region::Region> regions;
};

struct Options {
    /// Barrier degrees tried in order; entries above max_degree are skipped.
    std::vector<int> degrees{2, 4, 6, 8, 10, 12, 14, 16, 18, 20};
    int max_degree = 10;
    double epsilon = 1e-3;
    /// Seconds per obligation before giving up; <= 0 disables the budget.
    double time_budget = 120.0;
    bool validate = true;
    sos::ValidationOptions validation;
    region::DisjointOptions disjoint;
    sdp::Options sdp;
    /// Directory for SDPA exports of every barrier program solved; empty disables.
    std::string sdpa_dir;
    /// Omit wall-clock times from the JSON report.
    bool normalize = false;
};

/// One length-3 subpath of a representative path, with its string families.
struct Obligation {
    int id = 0;
    int state = 0;
    bool cycle = false;
    ltl::Path path;
    ltl::Triple triple{};
    region::Region sigma0;
    region::Region sigma1;
    /// Set iff (q1, q1) is an edge.
    std::optional<region::Region> loop;
};

struct PathGroup {
    ltl::Path path;
    std::vector<Obligation> triples;
};

struct StateObligations {
    int state = 0;
    std::vector<PathGroup> cycles;
    std::vector<PathGroup> paths;
};

struct ObligationSet {
    /// Automaton after removing letters whose regions are provably empty.
    ltl::Automaton automaton;
    ltl::Graph graph;
    std::vector<ltl::Letter> removed_letters;
    std::vector<StateObligations> states;
    int num_obligations = 0;
};

/// Prunes letters with empty regions, then enumerates P^cyc / P^path and their triples per accepting state.
ObligationSet build_obligations(const ltl::Automaton& a, const System& sys, const Options& opts);

enum class Method { DisjointClosures, Barrier2, Barrier3, ReusedFrom, Vacuous };
const char* method_name(Method m);

/// Proof of one part (kind a: a0 a1; kind b: a0 a~* a1) of an obligation.
struct PartEvidence {
    Method method = Method::DisjointClosures;
    /// For ReusedFrom: the obligation whose evidence is shared.
    int reused_from = -1;
    /// Method of the original evidence when reused.
    Method source = Method::DisjointClosures;
    int degree = 0;
    double seconds = 0.0;
    std::optional<region::DisjointResult> disjoint;
    std::optional<sos::BarrierCertificate> barrier;
    std::optional<sos::ValidationReport> validation;
};

struct Attempt {
    std::string what;
    int degree = 0;
    std::string outcome;
    double margin = 0.0;
    double seconds = 0.0;
};

struct Discharge {
    int obligation = 0;
    bool discharged = false;
    std::optional<PartEvidence> a;
    std::optional<PartEvidence> b;
    std::vector<Attempt> attempts;
    /// Largest SDP margin among failed barrier attempts (closest to feasible).
    std::optional<double> best_margin;
};

/// Caches evidence by canonical (Y0, Y1, Y) so identical problems are solved once.
class EvidenceCache {
public:
    struct Entry {
        int obligation = 0;
        std::optional<PartEvidence> evidence;
        std::vector<Attempt> attempts;
        std::optional<double> best_margin;
    };
    [[nodiscard]] const Entry* find(const std::string& key) const;
    void store(const std::string& key, Entry e);
    [[nodiscard]] std::size_t size() const { return entries_.size(); }

private:
    std::map<std::string, Entry> entries_;
};

Discharge discharge(const Obligation& o, const System& sys, const Options& opts, EvidenceCache& cache);

struct StateVerdict {
    int state = 0;
    /// "cycles", "paths" or "" when neither condition holds.
    std::string condition;
    bool cycles_ok = false;
    bool paths_ok = false;
    std::string cycles_note;
    /// Path (as text) -> discharged obligation id, for the chosen condition.
    std::map<std::string, int> witness;
    int triples_examined = 0;
    /// Best near miss when the state fails.
    std::optional<Discharge> near_miss;
};

struct Verdict {
    bool satisfied = false;
    std::string formula;
    ObligationSet obligations;
    std::vector<StateVerdict> states;
    std::map<int, Discharge> discharges;
    double seconds = 0.0;
};

Verdict verify(const System& sys, const ltl::Formula& formula, const Options& opts);
Verdict verify(const System& sys, const std::string& formula, const Options& opts);

nlohmann::json to_json(const Verdict& v, const System& sys, const Options& opts);

} // namespace sosltl::verify
