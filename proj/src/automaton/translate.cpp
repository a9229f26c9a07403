#include "internal.hpp"

#include <algorithm>
#include <bit>
#include <deque>
#include <functional>
#include <map>
#include <set>
#include <tuple>

namespace sosltl::ltl {

namespace {

struct FNode {
    Op op;
    int atom;
    int l;
    int r;
};

struct Move {
    Cube cube;
    std::vector<int> next; // sorted formula ids

    friend bool operator==(const Move&, const Move&) = default;
    friend auto operator<=>(const Move&, const Move&) = default;
};

std::vector<int> set_union(const std::vector<int>& a, const std::vector<int>& b)
{
    std::vector<int> out;
    std::set_union(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
    return out;
}

bool subset(const std::vector<int>& a, const std::vector<int>& b)
{
    return std::includes(b.begin(), b.end(), a.begin(), a.end());
}

// Drops duplicates and moves that another move makes redundant (weaker guard, fewer obligations).
std::vector<Move> simplify(std::vector<Move> ms)
{
    std::sort(ms.begin(), ms.end());
    ms.erase(std::unique(ms.begin(), ms.end()), ms.end());
    std::vector<Move> out;
    for (std::size_t i = 0; i < ms.size(); ++i) {
        bool dominated = false;
        for (std::size_t j = 0; j < ms.size() && !dominated; ++j) {
            if (i == j)
                continue;
            const bool weaker = ms[i].cube.implies(ms[j].cube) && subset(ms[j].next, ms[i].next);
            const bool equal = ms[i].cube == ms[j].cube && ms[i].next == ms[j].next;
            dominated = weaker && !equal;
        }
        if (!dominated)
            out.push_back(ms[i]);
    }
    return out;
}

std::vector<Move> product(const std::vector<Move>& a, const std::vector<Move>& b)
{
    std::vector<Move> out;
    for (const auto& x : a)
        for (const auto& y : b) {
            Cube c{x.cube.pos | y.cube.pos, x.cube.neg | y.cube.neg};
            if (c.satisfiable())
                out.push_back({c, set_union(x.next, y.next)});
        }
    return simplify(std::move(out));
}

class Tableau {
public:
    explicit Tableau(const PropositionTable& props) : props_(props) {}

    int build(const Formula& f)
    {
        switch (f->op) {
        case Op::True:
            return intern(Op::True, -1, -1, -1);
        case Op::False:
            return intern(Op::False, -1, -1, -1);
        case Op::Atom:
            return intern(Op::Atom, f->atom, -1, -1);
        case Op::Not:
            return intern(Op::Not, f->lhs->atom, -1, -1);
        case Op::And:
        case Op::Or:
        case Op::Until:
        case Op::Release:
            return intern(f->op, -1, build(f->lhs), build(f->rhs));
        case Op::Eventually:
            return intern(Op::Until, -1, intern(Op::True, -1, -1, -1), build(f->lhs));
        case Op::Always:
            return intern(Op::Release, -1, intern(Op::False, -1, -1, -1), build(f->lhs));
        case Op::Implies:
            break;
        }
        throw std::logic_error("formula not in negation normal form");
    }

    const std::vector<Move>& delta(int id)
    {
        if (auto it = cache_.find(id); it != cache_.end())
            return it->second;
        const FNode n = nodes_[id];
        std::vector<Move> out;
        switch (n.op) {
        case Op::True:
            out = {Move{Cube{}, {}}};
            break;
        case Op::False:
            break;
        case Op::Atom:
            out = {Move{Cube{Letter{1} << n.atom, 0}, {}}};
            break;
        case Op::Not:
            out = {Move{Cube{0, Letter{1} << n.atom}, {}}};
            break;
        case Op::And:
            out = product(delta(n.l), delta(n.r));
            break;
        case Op::Or: {
            out = delta(n.l);
            const auto& b = delta(n.r);
            out.insert(out.end(), b.begin(), b.end());
            out = simplify(std::move(out));
            break;
        }
        case Op::Until: {
            out = delta(n.r);
            const auto keep = product(delta(n.l), {Move{Cube{}, {id}}});
            out.insert(out.end(), keep.begin(), keep.end());
            out = simplify(std::move(out));
            break;
        }
        case Op::Release: {
            out = product(delta(n.l), delta(n.r));
            const auto keep = product(delta(n.r), {Move{Cube{}, {id}}});
            out.insert(out.end(), keep.begin(), keep.end());
            out = simplify(std::move(out));
            break;
        }
        default:
            break;
        }
        return cache_[id] = out;
    }

    std::vector<Move> delta_set(const std::vector<int>& s)
    {
        std::vector<Move> acc{Move{Cube{}, {}}};
        for (int id : s)
            acc = product(acc, delta(id));
        return acc;
    }

    [[nodiscard]] bool is_until(int id) const { return nodes_[id].op == Op::Until; }

    std::string str(int id) const
    {
        const FNode& n = nodes_[id];
        auto wrap = [&](int c) {
            const Op o = nodes_[c].op;
            const bool bin = o == Op::And || o == Op::Or || o == Op::Until || o == Op::Release;
            return bin ? "(" + str(c) + ")" : str(c);
        };
        switch (n.op) {
        case Op::True:
            return "true";
        case Op::False:
            return "false";
        case Op::Atom:
            return props_.name(n.atom);
        case Op::Not:
            return "!" + props_.name(n.atom);
        case Op::And:
            return wrap(n.l) + " & " + wrap(n.r);
        case Op::Or:
            return wrap(n.l) + " | " + wrap(n.r);
        case Op::Until:
            if (nodes_[n.l].op == Op::True)
                return "F " + wrap(n.r);
            return wrap(n.l) + " U " + wrap(n.r);
        case Op::Release:
            if (nodes_[n.l].op == Op::False)
                return "G " + wrap(n.r);
            return wrap(n.l) + " R " + wrap(n.r);
        default:
            return "?";
        }
    }

    std::string label(const std::vector<int>& s) const
    {
        std::vector<std::string> parts;
        for (int id : s)
            parts.push_back(str(id));
        std::sort(parts.begin(), parts.end());
        std::string out = "{";
        for (std::size_t i = 0; i < parts.size(); ++i)
            out += (i ? ", " : "") + parts[i];
        return out + "}";
    }

private:
    int intern(Op op, int atom, int l, int r)
    {
        const auto key = std::make_tuple(static_cast<int>(op), atom, l, r);
        if (auto it = ids_.find(key); it != ids_.end())
            return it->second;
        nodes_.push_back({op, atom, l, r});
        const int id = static_cast<int>(nodes_.size()) - 1;
        ids_[key] = id;
        return id;
    }

    const PropositionTable& props_;
    std::vector<FNode> nodes_;
    std::map<std::tuple<int, int, int, int>, int> ids_;
    std::map<int, std::vector<Move>> cache_;
};

// Number of top-level entries in a state label such as "{F p2, p2 R !p1}#1".
int label_arity(const std::string& label)
{
    if (label.rfind("{}", 0) == 0 || label.empty() || label[0] != '{')
        return 0;
    int depth = 0, count = 1;
    for (std::size_t i = 1; i < label.size(); ++i) {
        const char c = label[i];
        if (c == '(')
            ++depth;
        else if (c == ')')
            --depth;
        else if (c == '}' && depth == 0)
            break;
        else if (c == ',' && depth == 0)
            ++count;
    }
    return count;
}

Guard merge_cubes(Guard g)
{
    std::sort(g.begin(), g.end());
    g.erase(std::unique(g.begin(), g.end()), g.end());
    return minimize_guard(g, guard_support(g));
}

// Truth table of g over the atoms in `support`, used as a canonical key.
std::vector<bool> truth_table(const Guard& g, Letter support)
{
    const int m = std::popcount(support);
    std::vector<bool> t(std::size_t{1} << m);
    int idx = 0;
    for (Letter a : satisfying_letters(Guard{Cube{}}, support)) {
        t[idx++] = guard_matches(g, a);
    }
    return t;
}

} // namespace

const Transition* Automaton::find(int q, int q2) const
{
    auto it = std::lower_bound(transitions.begin(), transitions.end(), std::make_pair(q, q2),
                               [](const Transition& t, const std::pair<int, int>& k) {
                                   return std::make_pair(t.from, t.to) < k;
                               });
    if (it != transitions.end() && it->from == q && it->to == q2)
        return &*it;
    return nullptr;
}

std::vector<int> Automaton::accepting_states() const
{
    std::vector<int> out;
    for (int q = 0; q < num_states; ++q)
        if (accepting[q])
            out.push_back(q);
    return out;
}

namespace detail {

// Removes states that are unreachable or cannot reach an accepting cycle, and
// clears acceptance on states that lie on no cycle.
void prune(Automaton& a)
{
    const int n = a.num_states;
    std::vector<std::vector<int>> succ(n), pred(n);
    for (const auto& t : a.transitions) {
        succ[t.from].push_back(t.to);
        pred[t.to].push_back(t.from);
    }
    std::vector<char> reach(n, 0);
    std::deque<int> work(a.initial.begin(), a.initial.end());
    for (int q : a.initial)
        reach[q] = 1;
    while (!work.empty()) {
        const int q = work.front();
        work.pop_front();
        for (int r : succ[q])
            if (!reach[r]) {
                reach[r] = 1;
                work.push_back(r);
            }
    }
    // Tarjan SCC.
    std::vector<int> index(n, -1), low(n, 0), comp(n, -1), stack;
    std::vector<char> on(n, 0);
    int counter = 0, ncomp = 0;
    std::function<void(int)> visit = [&](int v) {
        index[v] = low[v] = counter++;
        stack.push_back(v);
        on[v] = 1;
        for (int w : succ[v]) {
            if (index[w] < 0) {
                visit(w);
                low[v] = std::min(low[v], low[w]);
            } else if (on[w]) {
                low[v] = std::min(low[v], index[w]);
            }
        }
        if (low[v] == index[v]) {
            int w;
            do {
                w = stack.back();
                stack.pop_back();
                on[w] = 0;
                comp[w] = ncomp;
            } while (w != v);
            ++ncomp;
        }
    };
    for (int v = 0; v < n; ++v)
        if (index[v] < 0)
            visit(v);
    std::vector<int> comp_size(ncomp, 0);
    for (int v = 0; v < n; ++v)
        ++comp_size[comp[v]];
    std::vector<char> good(n, 0);
    for (int v = 0; v < n; ++v) {
        if (!a.accepting[v])
            continue;
        const bool self = std::find(succ[v].begin(), succ[v].end(), v) != succ[v].end();
        if (comp_size[comp[v]] > 1 || self)
            good[v] = 1;
    }
    std::vector<char> live(n, 0);
    for (int v = 0; v < n; ++v)
        if (good[v]) {
            live[v] = 1;
            work.push_back(v);
        }
    while (!work.empty()) {
        const int q = work.front();
        work.pop_front();
        for (int r : pred[q])
            if (!live[r]) {
                live[r] = 1;
                work.push_back(r);
            }
    }
    std::vector<int> keep;
    for (int v = 0; v < n; ++v)
        if (reach[v] && live[v])
            keep.push_back(v);
    std::vector<int> remap(n, -1);
    for (std::size_t i = 0; i < keep.size(); ++i)
        remap[keep[i]] = static_cast<int>(i);

    Automaton out;
    out.props = a.props;
    out.num_states = static_cast<int>(keep.size());
    for (int v : keep) {
        out.labels.push_back(v < static_cast<int>(a.labels.size()) ? a.labels[v] : std::string{});
        out.accepting.push_back(good[v] != 0);
    }
    for (int q : a.initial)
        if (remap[q] >= 0)
            out.initial.push_back(remap[q]);
    for (const auto& t : a.transitions)
        if (remap[t.from] >= 0 && remap[t.to] >= 0)
            out.transitions.push_back({remap[t.from], remap[t.to], t.guard, t.display});
    std::sort(out.transitions.begin(), out.transitions.end(),
              [](const Transition& x, const Transition& y) { return std::tie(x.from, x.to) < std::tie(y.from, y.to); });
    a = std::move(out);
}

// Breadth-first renumbering from the initial states; successors are visited in
// order of decreasing label arity, then label text.
void canonicalize(Automaton& a)
{
    const int n = a.num_states;
    std::vector<std::vector<int>> succ(n);
    for (const auto& t : a.transitions)
        succ[t.from].push_back(t.to);
    auto before = [&](int x, int y) {
        const int ax = label_arity(a.labels[x]), ay = label_arity(a.labels[y]);
        if (ax != ay)
            return ax > ay;
        if (a.labels[x] != a.labels[y])
            return a.labels[x] < a.labels[y];
        return x < y;
    };
    std::vector<int> order, rank(n, -1);
    std::vector<int> init = a.initial;
    std::sort(init.begin(), init.end(), before);
    std::deque<int> work;
    for (int q : init)
        if (rank[q] < 0) {
            rank[q] = static_cast<int>(order.size());
            order.push_back(q);
            work.push_back(q);
        }
    while (!work.empty()) {
        const int q = work.front();
        work.pop_front();
        std::vector<int> s = succ[q];
        std::sort(s.begin(), s.end(), before);
        for (int r : s)
            if (rank[r] < 0) {
                rank[r] = static_cast<int>(order.size());
                order.push_back(r);
                work.push_back(r);
            }
    }
    for (int v = 0; v < n; ++v)
        if (rank[v] < 0) {
            rank[v] = static_cast<int>(order.size());
            order.push_back(v);
        }
    Automaton out;
    out.props = a.props;
    out.num_states = n;
    for (int v : order) {
        out.labels.push_back(a.labels[v]);
        out.accepting.push_back(a.accepting[v]);
    }
    for (int q : a.initial)
        out.initial.push_back(rank[q]);
    std::sort(out.initial.begin(), out.initial.end());
    for (const auto& t : a.transitions)
        out.transitions.push_back({rank[t.from], rank[t.to], t.guard, t.display});
    std::sort(out.transitions.begin(), out.transitions.end(),
              [](const Transition& x, const Transition& y) { return std::tie(x.from, x.to) < std::tie(y.from, y.to); });
    a = std::move(out);
}

// Merges bisimilar states (same acceptance, same guarded successor classes).
void merge_bisimilar(Automaton& a)
{
    const int n = a.num_states;
    Letter support = 0;
    for (const auto& t : a.transitions)
        support |= guard_support(t.guard);
    const bool tables = std::popcount(support) <= 12;

    std::vector<int> cls(n);
    for (int v = 0; v < n; ++v)
        cls[v] = a.accepting[v] ? 1 : 0;
    while (true) {
        using Sig = std::pair<int, std::vector<std::pair<int, std::vector<bool>>>>;
        std::map<Sig, int> ids;
        std::vector<int> next(n);
        for (int v = 0; v < n; ++v) {
            std::map<int, Guard> by_class;
            for (const auto& t : a.transitions)
                if (t.from == v) {
                    Guard& g = by_class[cls[t.to]];
                    g.insert(g.end(), t.guard.begin(), t.guard.end());
                }
            Sig sig{cls[v], {}};
            for (auto& [c, g] : by_class) {
                std::vector<bool> key;
                if (tables) {
                    key = truth_table(g, support);
                } else {
                    std::sort(g.begin(), g.end());
                    for (const auto& cube : g)
                        for (int b = 0; b < 32; ++b) {
                            key.push_back((cube.pos >> b) & 1u);
                            key.push_back((cube.neg >> b) & 1u);
                        }
                }
                sig.second.emplace_back(c, std::move(key));
            }
            auto [it, inserted] = ids.emplace(std::move(sig), static_cast<int>(ids.size()));
            next[v] = it->second;
        }
        const int before = static_cast<int>(std::set<int>(cls.begin(), cls.end()).size());
        const int after = static_cast<int>(ids.size());
        cls = next;
        if (after == before)
            break;
    }
    const int m = static_cast<int>(std::set<int>(cls.begin(), cls.end()).size());
    if (m == n)
        return;
    // Representative: the lowest-numbered member.
    std::vector<int> rep(m, -1);
    for (int v = 0; v < n; ++v)
        if (rep[cls[v]] < 0)
            rep[cls[v]] = v;
    Automaton out;
    out.props = a.props;
    out.num_states = m;
    for (int c = 0; c < m; ++c) {
        out.labels.push_back(a.labels[rep[c]]);
        out.accepting.push_back(a.accepting[rep[c]]);
    }
    std::set<int> init;
    for (int q : a.initial)
        init.insert(cls[q]);
    out.initial.assign(init.begin(), init.end());
    std::map<std::pair<int, int>, Guard> edges;
    for (const auto& t : a.transitions) {
        if (t.from != rep[cls[t.from]])
            continue;
        Guard& g = edges[{cls[t.from], cls[t.to]}];
        g.insert(g.end(), t.guard.begin(), t.guard.end());
    }
    for (auto& [k, g] : edges) {
        Guard m2 = merge_cubes(g);
        out.transitions.push_back({k.first, k.second, m2, m2});
    }
    a = std::move(out);
}

} // namespace detail

Automaton translate(const Formula& f, const PropositionTable& props)
{
    Tableau tab(props);
    const int root = tab.build(nnf(f));

    // Generalized automaton over obligation sets; state 0 is the initial state.
    std::vector<std::vector<int>> states{{}};
    std::map<std::vector<int>, int> index;
    std::vector<std::vector<Move>> moves;
    std::deque<int> work{0};
    moves.resize(1);
    while (!work.empty()) {
        const int s = work.front();
        work.pop_front();
        std::vector<Move> ms = s == 0 ? tab.delta(root) : tab.delta_set(states[s]);
        for (const auto& mv : ms)
            if (!index.count(mv.next)) {
                index[mv.next] = static_cast<int>(states.size());
                states.push_back(mv.next);
                moves.emplace_back();
                work.push_back(index[mv.next]);
            }
        moves[s] = std::move(ms);
    }

    std::vector<int> untils;
    {
        std::set<int> seen;
        for (std::size_t s = 1; s < states.size(); ++s)
            for (int id : states[s])
                if (tab.is_until(id))
                    seen.insert(id);
        untils.assign(seen.begin(), seen.end());
    }
    const int k = static_cast<int>(untils.size());
    auto in_set = [&](int s, int j) {
        return !std::binary_search(states[s].begin(), states[s].end(), untils[j]);
    };
    auto advance = [&](int j, int s2) {
        int b = j == k ? 0 : j;
        while (b < k && in_set(s2, b))
            ++b;
        return b;
    };

    // Counter degeneralization: (state, counter), accepting when the counter is full.
    std::map<std::pair<int, int>, int> dindex;
    std::vector<std::pair<int, int>> dstates{{0, 0}};
    dindex[{0, 0}] = 0;
    std::map<std::pair<int, int>, Guard> edges;
    for (std::size_t i = 0; i < dstates.size(); ++i) {
        const auto [s, j] = dstates[i];
        for (const auto& mv : moves[s]) {
            const int s2 = index.at(mv.next);
            const std::pair<int, int> key{s2, advance(j, s2)};
            if (!dindex.count(key)) {
                dindex[key] = static_cast<int>(dstates.size());
                dstates.push_back(key);
            }
            edges[{static_cast<int>(i), dindex[key]}].push_back(mv.cube);
        }
    }

    Automaton a;
    a.props = props;
    a.num_states = static_cast<int>(dstates.size());
    a.initial = {0};
    for (std::size_t i = 0; i < dstates.size(); ++i) {
        const auto [s, j] = dstates[i];
        a.accepting.push_back(i != 0 && j == k);
        std::string lbl = s == 0 ? "init" : tab.label(states[s]);
        if (k > 0 && i != 0)
            lbl += "#" + std::to_string(j);
        a.labels.push_back(std::move(lbl));
    }
    for (auto& [key, g] : edges) {
        Guard m = merge_cubes(g);
        a.transitions.push_back({key.first, key.second, m, m});
    }
    detail::prune(a);
    detail::merge_bisimilar(a);
    detail::prune(a);
    detail::canonicalize(a);
    return a;
}

} // namespace sosltl::ltl
