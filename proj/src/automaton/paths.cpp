#include "sosltl/automaton.hpp"

#include <algorithm>
#include <set>

namespace sosltl::ltl {

void Graph::add_edge(int u, int v)
{
    auto& s = succ.at(u);
    if (v < 0 || v >= n)
        throw std::out_of_range("graph vertex out of range");
    auto it = std::lower_bound(s.begin(), s.end(), v);
    if (it == s.end() || *it != v)
        s.insert(it, v);
}

bool Graph::has_edge(int u, int v) const
{
    const auto& s = succ.at(u);
    return std::binary_search(s.begin(), s.end(), v);
}

int Graph::num_edges() const
{
    int e = 0;
    for (const auto& s : succ)
        e += static_cast<int>(s.size());
    return e;
}

Graph graph_of(const Automaton& a)
{
    Graph g(a.num_states);
    for (const auto& t : a.transitions)
        g.add_edge(t.from, t.to);
    return g;
}

namespace {

struct Search {
    const Graph& g;
    int target;
    std::set<std::pair<int, int>> used;
    Path path;
    std::vector<Path> out;

    void step(int v)
    {
        for (int w : g.succ[v]) {
            if (w == v || used.count({v, w}))
                continue;
            used.insert({v, w});
            path.push_back(w);
            if (w == target)
                out.push_back(path);
            else
                step(w);
            path.pop_back();
            used.erase({v, w});
        }
    }
};

} // namespace

std::vector<Path> dfs_paths(const Graph& g, int q, int q2)
{
    if (q < 0 || q >= g.n || q2 < 0 || q2 >= g.n)
        throw std::out_of_range("graph vertex out of range");
    Search s{g, q2, {}, {q}, {}};
    if (q == q2 && g.has_edge(q, q))
        s.out.push_back({q});
    s.step(q);
    std::sort(s.out.begin(), s.out.end());
    s.out.erase(std::unique(s.out.begin(), s.out.end()), s.out.end());
    return s.out;
}

std::vector<Path> path_paths(const Graph& g, const std::vector<int>& initial, int q)
{
    std::set<Path> all;
    for (int q0 : initial)
        for (auto& p : dfs_paths(g, q0, q))
            all.insert(std::move(p));
    return {all.begin(), all.end()};
}

std::vector<Path> cyc_paths(const Graph& g, const std::vector<int>& initial, int q)
{
    if (path_paths(g, initial, q).empty())
        return {};
    return dfs_paths(g, q, q);
}

std::vector<Triple> pf3(const Path& p)
{
    std::vector<Triple> out;
    for (std::size_t i = 0; i + 2 < p.size(); ++i)
        out.push_back({p[i], p[i + 1], p[i + 2]});
    return out;
}

std::string path_to_string(const Path& p)
{
    std::string s;
    for (int q : p)
        s += "q" + std::to_string(q);
    return s;
}

} // namespace sosltl::ltl
