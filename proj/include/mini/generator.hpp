#pragma once

#include "mini/ast.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace mini {

// A random terminating program with an entry coroutine and its arguments.
// Coroutine i only calls coroutines j > i, so the static call graph is
// acyclic and the call depth is below the coroutine count (at most 4).
// Loops are bounded by counters the body never assigns, or walk a list whose
// head and tail are only taken under a non-nil guard.
struct GeneratedMini {
  Program program;
  std::string entry;
  std::vector<Value> args;
};

GeneratedMini gen_mini(uint64_t seed);

} // namespace mini
