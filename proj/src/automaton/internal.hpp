#pragma once

#include "sosltl/automaton.hpp"

namespace sosltl::ltl::detail {

void prune(Automaton& a);
void merge_bisimilar(Automaton& a);
void canonicalize(Automaton& a);

} // namespace sosltl::ltl::detail
