#include "sosltl/kernels.hpp"
#include "sosltl/region.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace sosltl::region {

const char* status_name(Status s)
{
    switch (s) {
    case Status::ProvedDisjoint:
        return "ProvedDisjoint";
    case Status::FoundIntersection:
        return "FoundIntersection";
    case Status::Unknown:
        break;
    }
    return "Unknown";
}

namespace {

constexpr double kMemberTol = 1e-9;

double distance(const std::vector<double>& a, const std::vector<double>& b)
{
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i)
        s += (a[i] - b[i]) * (a[i] - b[i]);
    return std::sqrt(s);
}

// Smooth penalty sum_i max(0, delta - g_i)^2 and its gradient.
double penalty(const BasicRegion& r, const std::vector<std::vector<Polynomial>>& grads, const std::vector<double>& x,
               double delta, std::vector<double>* grad)
{
    double f = 0.0;
    if (grad)
        std::fill(grad->begin(), grad->end(), 0.0);
    for (std::size_t i = 0; i < r.g.size(); ++i) {
        const double v = delta - r.g[i].evaluate(x);
        if (v <= 0.0)
            continue;
        f += v * v;
        if (grad)
            for (std::size_t k = 0; k < x.size(); ++k)
                (*grad)[k] -= 2.0 * v * grads[i][k].evaluate(x);
    }
    return f;
}

std::vector<double> descend(const BasicRegion& r, const std::vector<std::vector<Polynomial>>& grads,
                            std::vector<double> x, double delta)
{
    const std::size_t n = x.size();
    std::vector<double> g(n), y(n);
    double f = penalty(r, grads, x, delta, &g);
    double step = 1.0;
    for (int it = 0; it < 500 && f > 0.0; ++it) {
        double gn = 0.0;
        for (double v : g)
            gn += v * v;
        if (gn == 0.0)
            break;
        bool moved = false;
        for (int ls = 0; ls < 60; ++ls) {
            for (std::size_t k = 0; k < n; ++k)
                y[k] = x[k] - step * g[k];
            const double fy = penalty(r, grads, y, delta, nullptr);
            if (fy <= f - 1e-4 * step * gn) {
                x = y;
                f = penalty(r, grads, x, delta, &g);
                step *= 2.0;
                moved = true;
                break;
            }
            step *= 0.5;
        }
        if (!moved)
            break;
    }
    return x;
}

PairEvidence psatz_attempt(const BasicRegion& r, const DisjointOptions& opts, int degree, bool* ok)
{
    *ok = false;
    PairEvidence ev;
    ev.method = "psatz";
    const Box box = bounding_box(r, opts.box);
    ev.center = box.center();
    ev.scale = std::max(box.radius(), 1e-6);
    for (const auto& g : r.g) {
        Polynomial s = g.affine_pullback(ev.center, ev.scale);
        const double m = s.max_abs_coefficient();
        if (m > 0.0)
            s *= 1.0 / m;
        ev.scaled_g.push_back(std::move(s));
    }
    auto cert = sos::psatz_refute(ev.scaled_g, degree, opts.sdp);
    if (cert && cert->identity_residual <= 1e-6) {
        ev.psatz = std::move(cert);
        *ok = true;
    }
    return ev;
}

bool ball_disjoint_constraints(const BasicRegion& r, PairEvidence* ev)
{
    std::vector<Ball> balls;
    for (const auto& g : r.g)
        if (auto b = as_ball(g))
            balls.push_back(*b);
    for (std::size_t i = 0; i < balls.size(); ++i)
        for (std::size_t j = i + 1; j < balls.size(); ++j) {
            const double gap = distance(balls[i].center, balls[j].center) - balls[i].radius - balls[j].radius;
            if (gap > 0.0) {
                ev->method = "ball";
                ev->ball_gap = gap;
                return true;
            }
        }
    return false;
}

} // namespace

std::optional<std::vector<double>> find_point(const BasicRegion& r, const DisjointOptions& opts)
{
    const std::size_t n = r.nvars();
    if (n == 0)
        return std::nullopt;
    const Box box = bounding_box(r, opts.box);

    // Grid stage.
    int per_axis = std::max(2, opts.grid_per_axis);
    while (per_axis > 2 && std::pow(static_cast<double>(per_axis), static_cast<double>(n)) > static_cast<double>(opts.grid_cap))
        --per_axis;
    std::size_t total = 1;
    for (std::size_t i = 0; i < n; ++i)
        total *= static_cast<std::size_t>(per_axis);

    std::vector<kernels::CompiledPoly> cps;
    for (const auto& g : r.g)
        cps.push_back(kernels::compile(g));

    std::vector<double> best_x;
    double best_v = std::numeric_limits<double>::infinity();
    std::vector<std::pair<double, std::size_t>> ranked;
    const std::size_t chunk = 1 << 15;
    for (std::size_t start = 0; start < total; start += chunk) {
        const std::size_t m = std::min(chunk, total - start);
        kernels::PointSet pts(n);
        for (auto& c : pts.coords)
            c.resize(m);
        for (std::size_t k = 0; k < m; ++k) {
            std::size_t idx = start + k;
            for (std::size_t i = 0; i < n; ++i) {
                const std::size_t t = idx % per_axis;
                idx /= per_axis;
                pts.coords[i][k] = box.lo[i] + (box.hi[i] - box.lo[i]) * static_cast<double>(t) / (per_axis - 1);
            }
        }
        std::vector<double> viol(m, -std::numeric_limits<double>::infinity()), val(m);
        const auto cols = pts.columns();
        for (const auto& cp : cps) {
            kernels::eval_batch(cp, cols.data(), m, val.data());
            for (std::size_t k = 0; k < m; ++k)
                viol[k] = std::max(viol[k], -val[k]);
        }
        for (std::size_t k = 0; k < m; ++k) {
            if (viol[k] < best_v) {
                best_v = viol[k];
                best_x = pts.point(k);
            }
            ranked.emplace_back(viol[k], start + k);
        }
        if (best_v <= 0.0)
            break;
    }
    if (best_v <= 0.0)
        return best_x;
    if (opts.descents <= 0)
        return std::nullopt;

    // Local descent from the best grid points and random starts.
    std::vector<std::vector<Polynomial>> grads(r.g.size());
    for (std::size_t i = 0; i < r.g.size(); ++i)
        for (std::size_t k = 0; k < n; ++k)
            grads[i].push_back(r.g[i].derivative(k));
    std::partial_sort(ranked.begin(), ranked.begin() + std::min<std::size_t>(ranked.size(), opts.descents / 2),
                      ranked.end());
    std::mt19937_64 rng(opts.seed);
    const double delta = 1e-10 * (1.0 + box.radius());
    for (int d = 0; d < opts.descents; ++d) {
        std::vector<double> x(n);
        if (d < opts.descents / 2 && static_cast<std::size_t>(d) < ranked.size()) {
            std::size_t idx = ranked[d].second;
            for (std::size_t i = 0; i < n; ++i) {
                const std::size_t t = idx % per_axis;
                idx /= per_axis;
                x[i] = box.lo[i] + (box.hi[i] - box.lo[i]) * static_cast<double>(t) / (per_axis - 1);
            }
        } else {
            for (std::size_t i = 0; i < n; ++i)
                x[i] = std::uniform_real_distribution<double>(box.lo[i], box.hi[i])(rng);
        }
        x = descend(r, grads, x, delta);
        if (r.violation(x) <= kMemberTol)
            return x;
    }
    return std::nullopt;
}

EmptinessResult piece_emptiness(const BasicRegion& r, const DisjointOptions& opts)
{
    EmptinessResult res;
    PairEvidence ev;
    if (ball_disjoint_constraints(r, &ev)) {
        res.status = Emptiness::Empty;
        res.proof = ev;
        return res;
    }
    // Grid first: it is cheap and settles the overlapping cases.
    DisjointOptions grid_only = opts;
    grid_only.descents = 0;
    if (opts.use_search)
        if (auto x = find_point(r, grid_only)) {
            res.status = Emptiness::Nonempty;
            res.witness = *x;
            return res;
        }
    if (opts.use_psatz)
        for (int d : opts.psatz_degrees) {
            bool ok = false;
            PairEvidence p = psatz_attempt(r, opts, d, &ok);
            if (ok) {
                res.status = Emptiness::Empty;
                res.proof = std::move(p);
                return res;
            }
        }
    if (opts.use_search)
        if (auto x = find_point(r, opts)) {
            res.status = Emptiness::Nonempty;
            res.witness = *x;
            return res;
        }
    return res;
}

EmptinessResult region_emptiness(const Region& r, const DisjointOptions& opts)
{
    EmptinessResult res;
    res.status = Emptiness::Empty;
    for (const auto& p : r.pieces) {
        EmptinessResult e = piece_emptiness(p, opts);
        if (e.status == Emptiness::Nonempty)
            return e;
        if (e.status == Emptiness::Unknown)
            res.status = Emptiness::Unknown;
    }
    return res;
}

DisjointResult closures_disjoint(const Region& a, const Region& b, const DisjointOptions& opts)
{
    DisjointResult res;
    res.status = Status::ProvedDisjoint;
    for (std::size_t i = 0; i < a.pieces.size(); ++i)
        for (std::size_t j = 0; j < b.pieces.size(); ++j) {
            PairEvidence ev;
            ev.i = i;
            ev.j = j;
            const auto ba = as_ball(a.pieces[i]);
            const auto bb = as_ball(b.pieces[j]);
            if (ba && bb) {
                const double d = distance(ba->center, bb->center);
                ev.method = "ball";
                ev.ball_gap = d - ba->radius - bb->radius;
                if (ev.ball_gap > 0.0) {
                    res.evidence.push_back(std::move(ev));
                    continue;
                }
                // Point on the segment between the centers inside both balls.
                std::vector<double> x = ba->center;
                if (d > 0.0) {
                    const double lo = std::max(0.0, d - bb->radius);
                    const double t = std::min(ba->radius, lo + 0.5 * (std::min(ba->radius, d + bb->radius) - lo));
                    for (std::size_t k = 0; k < x.size(); ++k)
                        x[k] += (bb->center[k] - ba->center[k]) * t / d;
                }
                const double v = std::max(a.pieces[i].violation(x), b.pieces[j].violation(x));
                if (v <= kMemberTol) {
                    res.status = Status::FoundIntersection;
                    res.witness = x;
                    res.witness_violation = v;
                    res.evidence.clear();
                    return res;
                }
            }
            BasicRegion both = a.pieces[i];
            both.g.insert(both.g.end(), b.pieces[j].g.begin(), b.pieces[j].g.end());
            EmptinessResult e = piece_emptiness(both, opts);
            if (e.status == Emptiness::Nonempty) {
                res.status = Status::FoundIntersection;
                res.witness = e.witness;
                res.witness_violation = std::max(a.pieces[i].violation(e.witness), b.pieces[j].violation(e.witness));
                res.evidence.clear();
                return res;
            }
            if (e.status == Emptiness::Empty) {
                PairEvidence p = *e.proof;
                p.i = i;
                p.j = j;
                res.evidence.push_back(std::move(p));
            } else {
                res.status = Status::Unknown;
                res.note = "pieces " + std::to_string(i) + " and " + std::to_string(j) + " undecided";
            }
        }
    return res;
}

} // namespace sosltl::region
