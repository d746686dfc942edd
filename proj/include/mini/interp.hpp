#pragma once

#include "mini/ast.hpp"

#include <optional>
#include <string>
#include <vector>

namespace mini {

struct OutOfFuel : std::runtime_error {
  OutOfFuel() : std::runtime_error("out of fuel") {}
};

// Observable behaviour of running a coroutine to completion: the values it
// yielded in order, then either a result or an uncaught exception payload.
struct RunOutcome {
  std::vector<Value> yields;
  std::optional<Value> result;
  std::optional<Value> exception;

  bool operator==(const RunOutcome &o) const {
    return yields == o.yields && result == o.result && exception == o.exception;
  }
  bool operator!=(const RunOutcome &o) const { return !(*this == o); }
  std::string str() const;
};

// Tree-walking reference interpreter. Nested coroutine calls append to the
// same yield list, and a throw unwinds to the nearest enclosing try across
// call frames. Throws OutOfFuel when `fuel` evaluation steps are exhausted,
// DynamicError on ill-shaped operations, and std::invalid_argument on an
// unknown entry or an arity mismatch.
RunOutcome direct_run(const Program &p, const std::string &entry, const std::vector<Value> &args,
                      long fuel = 1000000);

} // namespace mini
