#pragma once

#include "mini/ast.hpp"

namespace mini {

// Rewrites every coroutine into the restricted form: operands of operators,
// selections and calls are constants or identifiers, assignment right-hand
// sides are atomic, declaration right-hand sides are a single operation over
// atoms, and loop and branch conditions are atoms. Short-circuit operators
// become branches. Fresh temporaries are named x_<n>, numbered per coroutine
// in pre-order and skipping names the coroutine already uses.
Program normalize(const Program &p);
Coroutine normalize(const Coroutine &c);

// The restricted-form predicate established by normalize.
bool is_normalized(const Coroutine &c);
bool is_normalized(const Program &p);

} // namespace mini
