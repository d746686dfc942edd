#pragma once

#include "lsq/ast.hpp"
#include "lsq/typecheck.hpp"

#include <cstdint>
#include <random>

namespace lsq {

// Closed, well-typed user program with an Int or Unit result and yield ⊥.
// Deterministic per (seed, size, mode). Subtyping mode also mixes in ⊤
// annotations that only type through subsumption.
TermP gen_well_typed(uint64_t seed, int size, Mode mode);

// A random type of bounded depth. `with_extremes` allows ⊥ and ⊤ anywhere.
TypeP gen_type(std::mt19937_64 &rng, int depth, bool with_extremes);

// A coroutine body that yields only Int values, together with its return
// type. Used for the yield covariance witness.
struct GeneratedBody {
  std::string param;
  TypeP param_type;
  TermP body;
};
GeneratedBody gen_int_yielding_body(uint64_t seed, int size);

} // namespace lsq
