#pragma once

#include "sosltl/automaton.hpp"
#include "sosltl/poly.hpp"
#include "sosltl/sos.hpp"

#include <optional>
#include <random>
#include <string>
#include <vector>

namespace sosltl::region {

/// {x : g_i(x) >= 0 for all i}.
struct BasicRegion {
    std::vector<Polynomial> g;

    [[nodiscard]] std::size_t nvars() const { return g.empty() ? 0 : g.front().nvars(); }
    /// max_i -g_i(x); <= 0 inside.
    [[nodiscard]] double violation(std::span<const double> x) const;
    [[nodiscard]] bool contains(std::span<const double> x, double tol = 1e-9) const { return violation(x) <= tol; }

    friend bool operator==(const BasicRegion&, const BasicRegion&) = default;
};

/// Finite union of basic regions; no pieces means the empty set.
struct Region {
    std::size_t n = 0;
    std::vector<BasicRegion> pieces;

    Region() = default;
    explicit Region(std::size_t nvars, std::vector<BasicRegion> p = {});

    [[nodiscard]] bool empty() const { return pieces.empty(); }
    [[nodiscard]] bool contains(std::span<const double> x, double tol = 1e-9) const;
    /// Sorted, duplicate-free copy usable as a cache key.
    [[nodiscard]] std::string canonical() const;
};

Region unite(const Region& a, const Region& b);
Region intersect(const Region& a, const Region& b);
/// Closure of a \ b: each piece of b is removed by adding one negated inequality at a time.
Region subtract(const Region& a, const Region& b);

struct Ball {
    std::vector<double> center;
    double radius = 0.0;
};

/// Recognizes c (r^2 - |x - center|^2) with c > 0.
std::optional<Ball> as_ball(const Polynomial& g, double tol = 1e-10);
/// A piece that is a single ball inequality.
std::optional<Ball> as_ball(const BasicRegion& r);

/// Axis-aligned box.
struct Box {
    std::vector<double> lo;
    std::vector<double> hi;

    [[nodiscard]] std::vector<double> center() const;
    /// Half of the longest side.
    [[nodiscard]] double radius() const;
};

/// Box implied by ball constraints of the piece, clipped to `fallback`.
Box bounding_box(const BasicRegion& r, const Box& fallback);
Box bounding_box(const Region& r, const Box& fallback);

enum class Status { ProvedDisjoint, FoundIntersection, Unknown };
const char* status_name(Status s);

struct DisjointOptions {
    /// Search box for pieces without ball constraints.
    Box box;
    std::vector<int> psatz_degrees{4, 6};
    bool use_psatz = true;
    bool use_search = true;
    int grid_per_axis = 200;
    std::size_t grid_cap = 1'000'000;
    int descents = 50;
    unsigned seed = 1;
    sdp::Options sdp;
};

/// Evidence for one pair of pieces.
struct PairEvidence {
    std::size_t i = 0;
    std::size_t j = 0;
    std::string method; // "ball", "psatz", "empty-piece"
    double ball_gap = 0.0;
    /// Psatz data in scaled coordinates x = center + scale * z.
    std::vector<Polynomial> scaled_g;
    std::vector<double> center;
    double scale = 1.0;
    std::optional<sos::PsatzCertificate> psatz;
};

struct DisjointResult {
    Status status = Status::Unknown;
    std::vector<PairEvidence> evidence;
    std::vector<double> witness;
    double witness_violation = 0.0;
    std::string note;
};

DisjointResult closures_disjoint(const Region& a, const Region& b, const DisjointOptions& opts);

enum class Emptiness { Empty, Nonempty, Unknown };

struct EmptinessResult {
    Emptiness status = Emptiness::Unknown;
    std::vector<double> witness;
    std::optional<PairEvidence> proof;
};

EmptinessResult piece_emptiness(const BasicRegion& r, const DisjointOptions& opts);
/// Empty iff every piece is; Nonempty iff some piece has a witness.
EmptinessResult region_emptiness(const Region& r, const DisjointOptions& opts);

/// Point of r minimizing the violation, found by grid search then local descent.
std::optional<std::vector<double>> find_point(const BasicRegion& r, const DisjointOptions& opts);

/// Closure over-approximation of the set of points satisfying exactly the
/// propositions in `a`. `props[i]` is the region of proposition i.
Region letter_region(ltl::Letter a, const std::vector<Region>& props, const Region& domain);

/// Union over cubes of the closure of {x in domain : positive props hold, negative props fail}.
Region cube_region(const ltl::Cube& c, const std::vector<Region>& props, const Region& domain);
Region guard_region(const ltl::Guard& g, const std::vector<Region>& props, const Region& domain);

/// Drops pieces with two provably disjoint balls and pieces contained in a ball that
/// another inequality of the same piece excludes.
Region simplify(const Region& r);

/// Uniform samples from r by rejection in its bounding box. Returns fewer than
/// `count` points when the acceptance rate is too low.
std::vector<std::vector<double>> sample(const Region& r, std::size_t count, const Box& fallback,
                                        std::mt19937_64& rng, std::size_t max_tries = 0);

} // namespace sosltl::region
