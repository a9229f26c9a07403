#include "sosltl/sim.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <stdexcept>

namespace sosltl::sim {

namespace {

using Vec = std::vector<double>;

Vec rk4(const VectorField& f, const Vec& x, double h)
{
    const std::size_t n = x.size();
    Vec k1(n), k2(n), k3(n), k4(n), y(n);
    f.evaluate(x, k1);
    for (std::size_t i = 0; i < n; ++i)
        y[i] = x[i] + 0.5 * h * k1[i];
    f.evaluate(y, k2);
    for (std::size_t i = 0; i < n; ++i)
        y[i] = x[i] + 0.5 * h * k2[i];
    f.evaluate(y, k3);
    for (std::size_t i = 0; i < n; ++i)
        y[i] = x[i] + h * k3[i];
    f.evaluate(y, k4);
    for (std::size_t i = 0; i < n; ++i)
        y[i] = x[i] + h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    return y;
}

bool finite(const Vec& x)
{
    for (double v : x)
        if (!std::isfinite(v) || std::abs(v) > 1e150)
            return false;
    return true;
}

} // namespace

Trajectory integrate(const VectorField& f, const std::vector<double>& x0, double T, double h,
                     const region::Region* domain)
{
    if (!(h > 0.0))
        throw std::invalid_argument("integration step must be positive");
    if (!(T >= h))
        throw std::invalid_argument("horizon must be at least one step");
    if (f.nvars() != x0.size())
        throw std::invalid_argument("initial state has the wrong dimension");

    Trajectory tr;
    auto inside = [&](const Vec& x) { return domain == nullptr || domain->contains(x, 0.0); };
    tr.t.push_back(0.0);
    tr.x.push_back(x0);
    if (!inside(x0)) {
        tr.exited = true;
        tr.diagnostic = "initial state outside the domain";
        return tr;
    }
    const auto steps = static_cast<std::size_t>(std::ceil(T / h - 1e-9));
    Vec x = x0;
    double t = 0.0;
    for (std::size_t k = 0; k < steps; ++k) {
        const double dt = std::min(h, T - t);
        Vec y = rk4(f, x, dt);
        if (!finite(y)) {
            tr.blew_up = true;
            tr.diagnostic = "non-finite state after t = " + std::to_string(t);
            return tr;
        }
        if (!inside(y)) {
            double lo = 0.0, hi = dt;
            while (hi - lo > 1e-9) {
                const double mid = 0.5 * (lo + hi);
                (inside(rk4(f, x, mid)) ? lo : hi) = mid;
            }
            tr.t.push_back(t + lo);
            tr.x.push_back(rk4(f, x, lo));
            tr.exited = true;
            tr.diagnostic = "left the domain at t = " + std::to_string(t + lo);
            return tr;
        }
        x = std::move(y);
        t = k + 1 == steps ? T : t + dt;
        tr.t.push_back(t);
        tr.x.push_back(x);
    }
    return tr;
}

ltl::Letter letter_at(std::span<const double> x, const std::vector<region::Region>& props)
{
    ltl::Letter a = 0;
    for (std::size_t p = 0; p < props.size(); ++p)
        if (props[p].contains(x, 1e-9))
            a |= ltl::Letter{1} << p;
    return a;
}

Trace trace_of(const Trajectory& traj, const std::vector<region::Region>& props)
{
    Trace tr;
    tr.truncated = traj.exited || traj.blew_up;
    for (std::size_t k = 0; k < traj.x.size(); ++k) {
        const ltl::Letter a = letter_at(traj.x[k], props);
        if (tr.letters.empty() || tr.letters.back() != a) {
            tr.letters.push_back(a);
            tr.start.push_back(k);
        }
    }
    return tr;
}

std::optional<MonitorRun> monitor(const ltl::Automaton& a, const std::vector<ltl::Letter>& trace)
{
    if (trace.empty())
        return std::nullopt;
    const int m = static_cast<int>(trace.size());
    const int n = a.num_states;
    // Node (i, q): letters 0..i read, in state q; i = -1 before reading.
    auto id = [&](int i, int q) { return (i + 1) * n + q; };
    std::vector<int> parent((m + 1) * n, -2);
    std::deque<std::pair<int, int>> work;
    for (int q : a.initial) {
        parent[id(-1, q)] = -1;
        work.emplace_back(-1, q);
    }
    auto tail_ok = [&](int i, int q) {
        if (!a.accepting[q])
            return false;
        const ltl::Transition* loop = a.find(q, q);
        if (loop == nullptr || loop->display != ltl::Guard{ltl::Cube{}})
            return false;
        for (int j = i + 1; j < m; ++j)
            if (!ltl::guard_matches(loop->guard, trace[j]))
                return false;
        return ltl::guard_matches(loop->guard, trace[m - 1]);
    };
    while (!work.empty()) {
        const auto [i, q] = work.front();
        work.pop_front();
        if (i >= 0 && tail_ok(i, q)) {
            MonitorRun run;
            std::vector<std::pair<int, int>> nodes;
            for (int v = id(i, q); v >= 0; v = parent[v])
                nodes.emplace_back(v / n - 1, v % n);
            std::reverse(nodes.begin(), nodes.end());
            run.states.push_back(nodes.front().second);
            for (std::size_t k = 1; k < nodes.size(); ++k) {
                run.word.push_back(trace[nodes[k].first]);
                run.states.push_back(nodes[k].second);
            }
            for (int j = i + 1; j < m; ++j) {
                run.word.push_back(trace[j]);
                run.states.push_back(q);
            }
            std::vector<ltl::Letter> prefix(run.word.begin(), run.word.end() - 1);
            run.lasso = ltl::LassoWord(prefix, {run.word.back()});
            return run;
        }
        for (const auto& t : a.transitions) {
            if (t.from != q)
                continue;
            // Read the next letter, or the current one again.
            for (int j : {i + 1, i}) {
                if (j < 0 || j >= m || !ltl::guard_matches(t.guard, trace[j]))
                    continue;
                const int v = id(j, t.to);
                if (parent[v] == -2) {
                    parent[v] = id(i, q);
                    work.emplace_back(j, t.to);
                }
            }
        }
    }
    return std::nullopt;
}

FalsifyReport falsify(const VectorField& f, const region::Region& domain, const std::vector<region::Region>& props,
                      const ltl::Automaton& a, const FalsifyOptions& opts)
{
    FalsifyReport rep;
    if (opts.samples == 0)
        return rep;
    std::mt19937_64 rng(opts.seed);
    const region::Box box = region::bounding_box(domain, {});

    std::vector<region::Region> letters;
    if (props.size() <= 16)
        for (ltl::Letter l = 0; l < (ltl::Letter{1} << props.size()); ++l) {
            region::Region r = region::letter_region(l, props, domain);
            if (!r.empty())
                letters.push_back(std::move(r));
        }

    const auto n_uniform = static_cast<std::size_t>(std::llround(opts.uniform_fraction * opts.samples));
    std::vector<std::vector<double>> starts = region::sample(domain, n_uniform, box, rng);
    if (!letters.empty()) {
        const std::size_t rest = opts.samples - std::min(opts.samples, starts.size());
        std::vector<std::vector<std::vector<double>>> per(letters.size());
        for (std::size_t k = 0; k < letters.size(); ++k)
            per[k] = region::sample(letters[k], (rest + letters.size() - 1) / letters.size(), box, rng, 200000);
        std::vector<std::size_t> next(letters.size(), 0);
        for (std::size_t k = 0; starts.size() < opts.samples && k < rest * letters.size(); ++k) {
            const std::size_t l = k % letters.size();
            if (next[l] < per[l].size())
                starts.push_back(per[l][next[l]++]);
        }
    }
    if (starts.size() < opts.samples) {
        auto more = region::sample(domain, opts.samples - starts.size(), box, rng);
        starts.insert(starts.end(), more.begin(), more.end());
    }

    for (std::size_t k = 0; k < starts.size(); ++k) {
        const Trajectory traj = integrate(f, starts[k], opts.horizon, opts.step, &domain);
        ++rep.simulated;
        rep.truncated += traj.exited || traj.blew_up;
        Trace tr = trace_of(traj, props);
        auto run = monitor(a, tr.letters);
        if (!run || !ltl::accepts(a, run->lasso))
            continue;
        rep.counterexample = Counterexample{k, starts[k], traj, std::move(tr), std::move(*run)};
        return rep;
    }
    return rep;
}

std::string letter_to_string(ltl::Letter a, const ltl::PropositionTable& props)
{
    std::string s = "{";
    bool first = true;
    for (int p = 0; p < ltl::kMaxProps; ++p)
        if (a & (ltl::Letter{1} << p)) {
            s += first ? "" : ",";
            s += p < props.size() ? props.name(p) : "p" + std::to_string(p);
            first = false;
        }
    return s + "}";
}

void write_csv(std::ostream& os, const Trajectory& traj, const std::vector<region::Region>& props,
               const ltl::PropositionTable& names, const std::vector<std::string>& vars)
{
    os << "t";
    for (const auto& v : vars)
        os << ',' << v;
    os << ",letter\n";
    os.precision(10);
    for (std::size_t k = 0; k < traj.x.size(); ++k) {
        os << traj.t[k];
        for (double v : traj.x[k])
            os << ',' << v;
        os << ",\"" << letter_to_string(letter_at(traj.x[k], props), names) << "\"\n";
    }
}

} // namespace sosltl::sim
