#include "internal.hpp"

#include <algorithm>
#include <bit>
#include <functional>
#include <map>
#include <sstream>

namespace sosltl::ltl {

bool accepts(const Automaton& a, const LassoWord& w)
{
    const int n = a.num_states;
    const int len = static_cast<int>(w.positions());
    const int total = n * len;
    auto node = [&](int q, int i) { return q * len + i; };

    std::vector<std::vector<int>> succ(total);
    for (const auto& t : a.transitions)
        for (int i = 0; i < len; ++i)
            if (guard_matches(t.guard, w.at(i)))
                succ[node(t.from, i)].push_back(node(t.to, static_cast<int>(w.successor(i))));

    std::vector<char> reach(total, 0);
    std::vector<int> stack;
    for (int q : a.initial) {
        reach[node(q, 0)] = 1;
        stack.push_back(node(q, 0));
    }
    while (!stack.empty()) {
        const int v = stack.back();
        stack.pop_back();
        for (int u : succ[v])
            if (!reach[u]) {
                reach[u] = 1;
                stack.push_back(u);
            }
    }

    // An accepting node lies on a cycle iff it can reach itself.
    const int cycle_start = static_cast<int>(w.prefix.size());
    for (int q = 0; q < n; ++q) {
        if (!a.accepting[q])
            continue;
        for (int i = cycle_start; i < len; ++i) {
            const int start = node(q, i);
            if (!reach[start])
                continue;
            std::vector<char> seen(total, 0);
            std::vector<int> work(succ[start].begin(), succ[start].end());
            for (int u : work)
                seen[u] = 1;
            while (!work.empty()) {
                const int v = work.back();
                work.pop_back();
                if (v == start)
                    return true;
                for (int u : succ[v])
                    if (!seen[u]) {
                        seen[u] = 1;
                        work.push_back(u);
                    }
            }
        }
    }
    return false;
}

Automaton restrict_letters(const Automaton& a, const std::function<bool(Letter)>& keep)
{
    if (a.props.size() > 16)
        throw AutomatonError("letter restriction supports at most 16 propositions");
    const Letter all = a.props.size() == 0 ? 0 : ((Letter{1} << a.props.size()) - 1);
    auto removed = [&](Letter x) { return !keep(x); };

    Automaton out = a;
    out.transitions.clear();
    for (const auto& t : a.transitions) {
        Guard minterms;
        for (Letter x : satisfying_letters(t.guard, all))
            if (keep(x))
                minterms.push_back(Cube{x, ~x & all});
        if (minterms.empty())
            continue;
        out.transitions.push_back({t.from, t.to, minimize_guard(minterms, all), {}});
    }
    detail::prune(out);
    detail::merge_bisimilar(out);
    detail::prune(out);
    detail::canonicalize(out);
    for (auto& t : out.transitions) {
        Guard minterms;
        for (Letter x : satisfying_letters(t.guard, all))
            minterms.push_back(Cube{x, ~x & all});
        t.display = minimize_guard(minterms, all, removed);
    }
    return out;
}

Guard guard_letters(const Automaton& a, int q, int q2)
{
    const Transition* t = a.find(q, q2);
    if (t == nullptr)
        throw AutomatonError("no edge q" + std::to_string(q) + " -> q" + std::to_string(q2));
    return t->guard;
}

std::string export_text(const Automaton& a)
{
    std::ostringstream os;
    os << "props";
    for (const auto& p : a.props.names())
        os << ' ' << p;
    os << "\nstates " << a.num_states << "\ninitial";
    for (int q : a.initial)
        os << ' ' << q;
    os << "\naccepting";
    for (int q : a.accepting_states())
        os << ' ' << q;
    os << '\n';
    for (int q = 0; q < a.num_states && q < static_cast<int>(a.labels.size()); ++q)
        if (!a.labels[q].empty())
            os << "label " << q << ' ' << a.labels[q] << '\n';
    for (const auto& t : a.transitions)
        os << "trans " << t.from << ' ' << t.to << ' ' << guard_to_string(t.guard, a.props) << '\n';
    return os.str();
}

Automaton import_text(const std::string& text)
{
    Automaton a;
    std::map<std::pair<int, int>, Guard> edges;
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    bool have_states = false;
    auto fail = [&](const std::string& msg) {
        throw AutomatonError("line " + std::to_string(lineno) + ": " + msg);
    };
    auto state = [&](std::istream& is) {
        int q;
        if (!(is >> q))
            fail("expected state index");
        if (!have_states || q < 0 || q >= a.num_states)
            fail("state " + std::to_string(q) + " out of range");
        return q;
    };
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos && line.rfind("label", 0) != 0)
            line.erase(hash);
        std::istringstream ls(line);
        std::string kw;
        if (!(ls >> kw))
            continue;
        if (kw == "props") {
            std::string p;
            while (ls >> p)
                a.props.add(p);
            if (a.props.size() > kMaxProps)
                fail("too many propositions");
        } else if (kw == "states") {
            if (!(ls >> a.num_states) || a.num_states < 0)
                fail("bad state count");
            have_states = true;
            a.accepting.assign(a.num_states, false);
            a.labels.assign(a.num_states, "");
        } else if (kw == "initial") {
            while (ls >> std::ws, !ls.eof())
                a.initial.push_back(state(ls));
        } else if (kw == "accepting") {
            while (ls >> std::ws, !ls.eof())
                a.accepting[state(ls)] = true;
        } else if (kw == "label") {
            const int q = state(ls);
            std::string rest;
            std::getline(ls >> std::ws, rest);
            a.labels[q] = rest;
        } else if (kw == "trans") {
            const int q = state(ls);
            const int q2 = state(ls);
            std::string rest;
            std::getline(ls >> std::ws, rest);
            Guard g;
            try {
                g = guard_from_formula(parse(rest, a.props, false));
            } catch (const std::exception& e) {
                fail(e.what());
            }
            Guard& acc = edges[{q, q2}];
            acc.insert(acc.end(), g.begin(), g.end());
        } else {
            fail("unknown keyword '" + kw + "'");
        }
    }
    if (!have_states)
        throw AutomatonError("missing 'states' line");
    std::sort(a.initial.begin(), a.initial.end());
    a.initial.erase(std::unique(a.initial.begin(), a.initial.end()), a.initial.end());
    for (auto& [k, g] : edges) {
        std::sort(g.begin(), g.end());
        g.erase(std::unique(g.begin(), g.end()), g.end());
        if (g.empty())
            continue;
        a.transitions.push_back({k.first, k.second, g, g});
    }
    return a;
}

} // namespace sosltl::ltl
