#include "sosltl/automaton.hpp"

#include <algorithm>
#include <bit>
#include <map>
#include <set>

namespace sosltl::ltl {

bool guard_matches(const Guard& g, Letter a)
{
    return std::any_of(g.begin(), g.end(), [a](const Cube& c) { return c.matches(a); });
}

Letter guard_support(const Guard& g)
{
    Letter s = 0;
    for (const auto& c : g)
        s |= c.pos | c.neg;
    return s;
}

std::string guard_to_string(const Guard& g, const PropositionTable& props)
{
    if (g.empty())
        return "false";
    std::string out;
    for (std::size_t k = 0; k < g.size(); ++k) {
        if (k > 0)
            out += " | ";
        const Cube& c = g[k];
        if (c.pos == 0 && c.neg == 0) {
            out += "true";
            continue;
        }
        bool first = true;
        for (int i = 0; i < kMaxProps; ++i) {
            const Letter bit = Letter{1} << i;
            if (!((c.pos | c.neg) & bit))
                continue;
            if (!first)
                out += " & ";
            first = false;
            if (c.neg & bit)
                out += "!";
            out += i < props.size() ? props.name(i) : "p" + std::to_string(i);
        }
    }
    return out;
}

namespace {

Guard conjoin(const Guard& a, const Guard& b)
{
    Guard out;
    for (const auto& x : a)
        for (const auto& y : b) {
            Cube c{x.pos | y.pos, x.neg | y.neg};
            if (c.satisfiable())
                out.push_back(c);
        }
    return out;
}

Guard dnf(const Formula& f)
{
    switch (f->op) {
    case Op::True:
        return {Cube{}};
    case Op::False:
        return {};
    case Op::Atom:
        return {Cube{Letter{1} << f->atom, 0}};
    case Op::Not:
        if (f->lhs->op == Op::Atom)
            return {Cube{0, Letter{1} << f->lhs->atom}};
        break;
    case Op::And:
        return conjoin(dnf(f->lhs), dnf(f->rhs));
    case Op::Or: {
        Guard g = dnf(f->lhs);
        Guard h = dnf(f->rhs);
        g.insert(g.end(), h.begin(), h.end());
        return g;
    }
    default:
        break;
    }
    throw std::invalid_argument("guard must be propositional");
}

// Letter with the bits of `index` scattered onto the positions of `support`.
Letter scatter(std::uint32_t index, Letter support)
{
    Letter out = 0;
    int k = 0;
    for (int i = 0; i < kMaxProps; ++i) {
        const Letter bit = Letter{1} << i;
        if (support & bit) {
            if ((index >> k) & 1u)
                out |= bit;
            ++k;
        }
    }
    return out;
}

} // namespace

Guard guard_from_formula(const Formula& f)
{
    Guard g = dnf(nnf(f));
    std::sort(g.begin(), g.end());
    g.erase(std::unique(g.begin(), g.end()), g.end());
    return g;
}

std::vector<Letter> satisfying_letters(const Guard& g, Letter support)
{
    const int m = std::popcount(support);
    if (m > 24)
        throw std::length_error("too many propositions to enumerate letters");
    std::vector<Letter> out;
    for (std::uint32_t i = 0; i < (std::uint32_t{1} << m); ++i) {
        const Letter a = scatter(i, support);
        if (guard_matches(g, a))
            out.push_back(a);
    }
    return out;
}

Guard minimize_guard(const Guard& g, Letter support, const std::function<bool(Letter)>& dont_care)
{
    const int m = std::popcount(support);
    if (m > 20)
        throw std::length_error("too many propositions to minimize a guard");
    const std::uint32_t full = (std::uint32_t{1} << m) - 1;

    std::vector<std::uint32_t> on;
    std::set<std::pair<std::uint32_t, std::uint32_t>> level; // (value, dash mask)
    for (std::uint32_t i = 0; i <= full; ++i) {
        const Letter a = scatter(i, support);
        if (guard_matches(g, a)) {
            on.push_back(i);
            level.insert({i, 0});
        } else if (dont_care && dont_care(a)) {
            level.insert({i, 0});
        }
    }
    if (on.empty())
        return {};

    // Prime implicants.
    std::vector<std::pair<std::uint32_t, std::uint32_t>> primes;
    while (!level.empty()) {
        std::set<std::pair<std::uint32_t, std::uint32_t>> next;
        std::set<std::pair<std::uint32_t, std::uint32_t>> used;
        std::map<std::uint32_t, std::vector<std::uint32_t>> by_mask;
        for (const auto& [v, mk] : level)
            by_mask[mk].push_back(v);
        for (const auto& [mk, vals] : by_mask) {
            std::set<std::uint32_t> present(vals.begin(), vals.end());
            for (std::uint32_t v : vals)
                for (int b = 0; b < m; ++b) {
                    const std::uint32_t bit = std::uint32_t{1} << b;
                    if ((mk & bit) || (v & bit))
                        continue;
                    if (present.count(v | bit)) {
                        next.insert({v, mk | bit});
                        used.insert({v, mk});
                        used.insert({v | bit, mk});
                    }
                }
        }
        for (const auto& t : level)
            if (!used.count(t))
                primes.push_back(t);
        level = std::move(next);
    }
    std::sort(primes.begin(), primes.end(), [](const auto& a, const auto& b) {
        const int da = std::popcount(a.second), db = std::popcount(b.second);
        return da != db ? da > db : a < b;
    });

    auto covers = [](const std::pair<std::uint32_t, std::uint32_t>& p, std::uint32_t v) {
        return (v & ~p.second) == p.first;
    };

    // Essential primes, then greedy.
    std::vector<char> chosen(primes.size(), 0);
    std::set<std::uint32_t> uncovered(on.begin(), on.end());
    for (std::uint32_t v : on) {
        int only = -1, count = 0;
        for (std::size_t k = 0; k < primes.size(); ++k)
            if (covers(primes[k], v)) {
                only = static_cast<int>(k);
                ++count;
            }
        if (count == 1)
            chosen[only] = 1;
    }
    for (std::size_t k = 0; k < primes.size(); ++k)
        if (chosen[k])
            for (auto it = uncovered.begin(); it != uncovered.end();)
                it = covers(primes[k], *it) ? uncovered.erase(it) : std::next(it);
    while (!uncovered.empty()) {
        std::size_t best = 0;
        int best_count = -1;
        for (std::size_t k = 0; k < primes.size(); ++k) {
            if (chosen[k])
                continue;
            int c = 0;
            for (std::uint32_t v : uncovered)
                c += covers(primes[k], v);
            if (c > best_count) {
                best_count = c;
                best = k;
            }
        }
        chosen[best] = 1;
        for (auto it = uncovered.begin(); it != uncovered.end();)
            it = covers(primes[best], *it) ? uncovered.erase(it) : std::next(it);
    }

    Guard out;
    for (std::size_t k = 0; k < primes.size(); ++k) {
        if (!chosen[k])
            continue;
        const auto [v, mk] = primes[k];
        const Letter care = scatter(~mk & full, support);
        const Letter val = scatter(v, support);
        out.push_back(Cube{val & care, ~val & care});
    }
    std::sort(out.begin(), out.end());
    return out;
}

} // namespace sosltl::ltl
