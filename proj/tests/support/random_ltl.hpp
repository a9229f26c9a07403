#pragma once

#include "sosltl/formula.hpp"

#include <random>

namespace random_ltl {

using namespace sosltl::ltl;

inline Formula formula(std::mt19937& rng, int atoms, int depth)
{
    auto pick = [&](int n) { return static_cast<int>(rng() % static_cast<unsigned>(n)); };
    if (depth <= 0 || pick(5) == 0) {
        const int r = pick(atoms + 2);
        if (r == atoms)
            return make_true();
        if (r == atoms + 1)
            return make_false();
        return make_atom(r);
    }
    auto sub = [&] { return formula(rng, atoms, depth - 1); };
    switch (pick(9)) {
    case 0:
        return make_not(sub());
    case 1:
        return make_and(sub(), sub());
    case 2:
        return make_or(sub(), sub());
    case 3:
        return make_implies(sub(), sub());
    case 4:
        return make_until(sub(), sub());
    case 5:
        return make_release(sub(), sub());
    case 6:
        return make_eventually(sub());
    case 7:
        return make_always(sub());
    default:
        return make_atom(pick(atoms));
    }
}

inline LassoWord word(std::mt19937& rng, int atoms, int max_prefix = 4, int max_cycle = 4)
{
    auto letter = [&] { return static_cast<Letter>(rng() & ((1u << atoms) - 1)); };
    std::vector<Letter> p(rng() % static_cast<unsigned>(max_prefix + 1));
    std::vector<Letter> c(1 + rng() % static_cast<unsigned>(max_cycle));
    for (auto& x : p)
        x = letter();
    for (auto& x : c)
        x = letter();
    return {p, c};
}

} // namespace random_ltl
