#include "sosltl/region.hpp"
#include "sosltl/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>

namespace sosltl::region {

double BasicRegion::violation(std::span<const double> x) const
{
    double v = -std::numeric_limits<double>::infinity();
    for (const auto& p : g)
        v = std::max(v, -p.evaluate(x));
    return v;
}

Region::Region(std::size_t nvars, std::vector<BasicRegion> p) : n(nvars), pieces(std::move(p))
{
    for (const auto& b : pieces) {
        if (b.g.empty())
            throw std::invalid_argument("basic region without inequalities");
        for (const auto& q : b.g)
            if (q.nvars() != n)
                throw std::invalid_argument("region inequality has the wrong number of variables");
    }
}

bool Region::contains(std::span<const double> x, double tol) const
{
    return std::any_of(pieces.begin(), pieces.end(), [&](const BasicRegion& b) { return b.contains(x, tol); });
}

namespace {

std::string piece_key(const BasicRegion& b)
{
    std::vector<std::string> parts;
    for (const auto& p : b.g)
        parts.push_back(p.to_string());
    std::sort(parts.begin(), parts.end());
    parts.erase(std::unique(parts.begin(), parts.end()), parts.end());
    std::string s;
    for (const auto& p : parts)
        s += p + " >= 0; ";
    return s;
}

double distance(const std::vector<double>& a, const std::vector<double>& b)
{
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i)
        s += (a[i] - b[i]) * (a[i] - b[i]);
    return std::sqrt(s);
}

} // namespace

std::string Region::canonical() const
{
    std::set<std::string> keys;
    for (const auto& b : pieces)
        keys.insert(piece_key(b));
    std::string s = "n=" + std::to_string(n) + ":";
    for (const auto& k : keys)
        s += " [" + k + "]";
    return s;
}

Region unite(const Region& a, const Region& b)
{
    if (a.empty())
        return b;
    if (b.empty())
        return a;
    if (a.n != b.n)
        throw std::invalid_argument("region dimension mismatch");
    Region r = a;
    r.pieces.insert(r.pieces.end(), b.pieces.begin(), b.pieces.end());
    return simplify(r);
}

Region intersect(const Region& a, const Region& b)
{
    Region r;
    r.n = std::max(a.n, b.n);
    for (const auto& p : a.pieces)
        for (const auto& q : b.pieces) {
            BasicRegion c = p;
            c.g.insert(c.g.end(), q.g.begin(), q.g.end());
            r.pieces.push_back(std::move(c));
        }
    return simplify(r);
}

Region subtract(const Region& a, const Region& b)
{
    Region r = a;
    for (const auto& q : b.pieces) {
        Region next;
        next.n = r.n;
        for (const auto& p : r.pieces)
            for (const auto& g : q.g) {
                BasicRegion c = p;
                c.g.push_back(-g);
                next.pieces.push_back(std::move(c));
            }
        r = simplify(next);
    }
    return r;
}

std::optional<Ball> as_ball(const Polynomial& g, double tol)
{
    const std::size_t n = g.nvars();
    if (n == 0 || g.degree() != 2)
        return std::nullopt;
    double c = 0.0;
    std::vector<double> lin(n, 0.0);
    double cst = 0.0;
    for (const auto& [m, v] : g.terms()) {
        const int d = m.degree();
        if (d == 0) {
            cst = v;
        } else if (d == 1) {
            for (std::size_t i = 0; i < n; ++i)
                if (m.exps[i] == 1)
                    lin[i] = v;
        } else {
            const auto it = std::find(m.exps.begin(), m.exps.end(), 2);
            if (it == m.exps.end())
                return std::nullopt; // cross term
            if (c == 0.0)
                c = -v;
            else if (std::abs(-v - c) > tol * std::abs(c))
                return std::nullopt;
        }
    }
    // Every square must appear with the same coefficient.
    int squares = 0;
    for (const auto& [m, v] : g.terms())
        squares += m.degree() == 2;
    if (c <= 0.0 || squares != static_cast<int>(n))
        return std::nullopt;
    Ball b;
    b.center.resize(n);
    double r2 = cst / c;
    for (std::size_t i = 0; i < n; ++i) {
        b.center[i] = lin[i] / (2.0 * c);
        r2 += b.center[i] * b.center[i];
    }
    if (r2 < 0.0)
        return std::nullopt;
    b.radius = std::sqrt(r2);
    return b;
}

std::optional<Ball> as_ball(const BasicRegion& r)
{
    if (r.g.size() != 1)
        return std::nullopt;
    return as_ball(r.g.front());
}

std::vector<double> Box::center() const
{
    std::vector<double> c(lo.size());
    for (std::size_t i = 0; i < lo.size(); ++i)
        c[i] = 0.5 * (lo[i] + hi[i]);
    return c;
}

double Box::radius() const
{
    double r = 0.0;
    for (std::size_t i = 0; i < lo.size(); ++i)
        r = std::max(r, 0.5 * (hi[i] - lo[i]));
    return r;
}

namespace {

Box default_box(std::size_t n, const Box& fallback)
{
    if (fallback.lo.size() == n && fallback.hi.size() == n)
        return fallback;
    return Box{std::vector<double>(n, -10.0), std::vector<double>(n, 10.0)};
}

} // namespace

Box bounding_box(const BasicRegion& r, const Box& fallback)
{
    const std::size_t n = r.nvars();
    Box box = default_box(n, fallback);
    bool bounded = false;
    Box tight{std::vector<double>(n, -std::numeric_limits<double>::infinity()),
              std::vector<double>(n, std::numeric_limits<double>::infinity())};
    for (const auto& g : r.g)
        if (auto b = as_ball(g)) {
            bounded = true;
            for (std::size_t i = 0; i < n; ++i) {
                tight.lo[i] = std::max(tight.lo[i], b->center[i] - b->radius);
                tight.hi[i] = std::min(tight.hi[i], b->center[i] + b->radius);
            }
        }
    if (!bounded)
        return box;
    for (std::size_t i = 0; i < n; ++i)
        if (tight.lo[i] > tight.hi[i])
            tight.hi[i] = tight.lo[i];
    return tight;
}

Box bounding_box(const Region& r, const Box& fallback)
{
    if (r.empty())
        return default_box(r.n, fallback);
    Box out = bounding_box(r.pieces.front(), fallback);
    for (std::size_t k = 1; k < r.pieces.size(); ++k) {
        const Box b = bounding_box(r.pieces[k], fallback);
        for (std::size_t i = 0; i < r.n; ++i) {
            out.lo[i] = std::min(out.lo[i], b.lo[i]);
            out.hi[i] = std::max(out.hi[i], b.hi[i]);
        }
    }
    return out;
}

namespace {

// Returns false when the piece is provably empty.
bool simplify_piece(BasicRegion& p)
{
    std::vector<Polynomial> uniq;
    std::set<std::string> seen;
    for (auto& g : p.g)
        if (seen.insert(g.to_string()).second)
            uniq.push_back(std::move(g));
    p.g = std::move(uniq);

    // Constant inequalities.
    std::vector<Polynomial> kept;
    for (auto& g : p.g) {
        if (g.degree() <= 0) {
            const double c = g.is_zero() ? 0.0 : g.terms().begin()->second;
            if (c < 0.0)
                return false;
            continue;
        }
        kept.push_back(std::move(g));
    }
    p.g = std::move(kept);

    std::vector<std::optional<Ball>> in(p.g.size()), out(p.g.size());
    for (std::size_t i = 0; i < p.g.size(); ++i) {
        in[i] = as_ball(p.g[i]);
        if (!in[i])
            out[i] = as_ball(-p.g[i]);
    }
    std::vector<char> drop(p.g.size(), 0);
    for (std::size_t i = 0; i < p.g.size(); ++i) {
        if (!in[i])
            continue;
        for (std::size_t j = 0; j < p.g.size(); ++j) {
            if (i == j || drop[i])
                continue;
            if (in[j]) {
                const double d = distance(in[i]->center, in[j]->center);
                if (d > in[i]->radius + in[j]->radius)
                    return false;
                // Ball j contains ball i, so constraint j is redundant.
                const bool same = d == 0.0 && in[i]->radius == in[j]->radius;
                if (d + in[i]->radius <= in[j]->radius && (!same || i < j))
                    drop[j] = 1;
            } else if (out[j]) {
                const double d = distance(in[i]->center, out[j]->center);
                // Inside ball i but outside the open ball j.
                if (d + in[i]->radius < out[j]->radius)
                    return false;
                if (d > in[i]->radius + out[j]->radius)
                    drop[j] = 1;
            }
        }
    }
    std::vector<Polynomial> g2;
    for (std::size_t i = 0; i < p.g.size(); ++i)
        if (!drop[i])
            g2.push_back(std::move(p.g[i]));
    p.g = std::move(g2);
    return true;
}

// Sufficient test for a within b: adding b's inequalities to a changes nothing.
bool covered(const BasicRegion& a, const BasicRegion& b)
{
    BasicRegion both = a;
    both.g.insert(both.g.end(), b.g.begin(), b.g.end());
    if (!simplify_piece(both))
        return false;
    BasicRegion alone = a;
    if (!simplify_piece(alone))
        return false;
    return piece_key(both) == piece_key(alone);
}

} // namespace

Region simplify(const Region& r)
{
    Region out;
    out.n = r.n;
    std::set<std::string> seen;
    for (BasicRegion p : r.pieces) {
        if (!simplify_piece(p))
            continue;
        if (p.g.empty())
            p.g.push_back(Polynomial::constant(r.n, 1.0));
        if (seen.insert(piece_key(p)).second)
            out.pieces.push_back(std::move(p));
    }
    // Drop pieces contained in another piece.
    const std::size_t k = out.pieces.size();
    std::vector<char> drop(k, 0);
    for (std::size_t i = 0; i < k; ++i)
        for (std::size_t j = 0; j < k && !drop[i]; ++j)
            if (i != j && !drop[j] && covered(out.pieces[i], out.pieces[j]) &&
                (j < i || !covered(out.pieces[j], out.pieces[i])))
                drop[i] = 1;
    std::vector<BasicRegion> kept;
    for (std::size_t i = 0; i < k; ++i)
        if (!drop[i])
            kept.push_back(std::move(out.pieces[i]));
    out.pieces = std::move(kept);
    return out;
}

Region letter_region(ltl::Letter a, const std::vector<Region>& props, const Region& domain)
{
    const int np = static_cast<int>(props.size());
    if (np < ltl::kMaxProps && (a >> np) != 0)
        throw std::invalid_argument("letter refers to an unknown proposition");
    Region r;
    r = simplify(domain);
    for (int p = 0; p < np; ++p)
        if (a & (ltl::Letter{1} << p))
            r = intersect(r, props[p]);
    for (int p = 0; p < np; ++p)
        if (!(a & (ltl::Letter{1} << p)))
            r = subtract(r, props[p]);
    return r;
}

Region cube_region(const ltl::Cube& c, const std::vector<Region>& props, const Region& domain)
{
    const int np = static_cast<int>(props.size());
    if (np < ltl::kMaxProps && ((c.pos | c.neg) >> np) != 0)
        throw std::invalid_argument("guard refers to an unknown proposition");
    Region r = simplify(domain);
    for (int p = 0; p < np; ++p)
        if (c.pos & (ltl::Letter{1} << p))
            r = intersect(r, props[p]);
    for (int p = 0; p < np; ++p)
        if (c.neg & (ltl::Letter{1} << p))
            r = subtract(r, props[p]);
    return r;
}

Region guard_region(const ltl::Guard& g, const std::vector<Region>& props, const Region& domain)
{
    Region r;
    r.n = domain.n;
    for (const auto& c : g)
        r = unite(r, cube_region(c, props, domain));
    return r;
}

std::vector<std::vector<double>> sample(const Region& r, std::size_t count, const Box& fallback,
                                        std::mt19937_64& rng, std::size_t max_tries)
{
    std::vector<std::vector<double>> out;
    if (r.empty() || count == 0)
        return out;
    if (max_tries == 0)
        max_tries = 2000 * count;
    const Box box = bounding_box(r, fallback);
    const std::size_t n = r.n;
    std::vector<std::uniform_real_distribution<double>> axis;
    for (std::size_t i = 0; i < n; ++i)
        axis.emplace_back(box.lo[i], box.hi[i]);

    std::vector<std::vector<kernels::CompiledPoly>> compiled;
    for (const auto& p : r.pieces) {
        compiled.emplace_back();
        for (const auto& g : p.g)
            compiled.back().push_back(kernels::compile(g));
    }
    const std::size_t batch = 4096;
    std::size_t tries = 0;
    std::vector<double> val(batch);
    while (out.size() < count && tries < max_tries) {
        kernels::PointSet pts(n);
        for (auto& c : pts.coords)
            c.resize(batch);
        for (std::size_t k = 0; k < batch; ++k)
            for (std::size_t i = 0; i < n; ++i)
                pts.coords[i][k] = axis[i](rng);
        tries += batch;
        std::vector<char> hit(batch, 0);
        const auto cols = pts.columns();
        for (const auto& piece : compiled) {
            std::vector<char> ok(batch, 1);
            for (const auto& cp : piece) {
                kernels::eval_batch(cp, cols.data(), batch, val.data());
                for (std::size_t k = 0; k < batch; ++k)
                    ok[k] &= val[k] >= 0.0;
            }
            for (std::size_t k = 0; k < batch; ++k)
                hit[k] |= ok[k];
        }
        for (std::size_t k = 0; k < batch && out.size() < count; ++k)
            if (hit[k])
                out.push_back(pts.point(k));
    }
    return out;
}

} // namespace sosltl::region
