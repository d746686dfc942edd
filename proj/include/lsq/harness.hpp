#pragma once

#include "lsq/ast.hpp"
#include "lsq/eval.hpp"
#include "lsq/typecheck.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace lsq {

// Runs a closed program step by step and checks, after every step, that the
// store is well typed under the rebuilt Σ, that Σ only grows, and that the
// term keeps its type (equal in base mode, a subtype otherwise) and a yield
// that fits the original one.
struct MetaOutcome {
  bool ok = true;
  std::string violation;
  EvalStatus status = EvalStatus::Finished;
  long steps = 0;
};
MetaOutcome check_metatheory(const TermP &program, Mode mode, long fuel);

struct DiffFailure {
  std::string program;
  std::string source;
  std::string target;
  std::string divergence;
};

struct DiffReport {
  uint64_t seed = 0;
  int count = 0;
  int compared = 0;
  int discarded = 0; // source ran out of fuel
  std::vector<DiffFailure> failures;
};

std::string to_json(const DiffReport &r);

// Compares source evaluation with target evaluation of the translation.
// Returns nullopt when the results agree or the source exceeds its fuel
// (`discarded` is then set).
std::optional<DiffFailure> compare_backends(const TermP &program, long fuel, bool *discarded = nullptr);

DiffReport difftest_calculus(uint64_t seed, int count, long fuel);

// Human-readable rendering of an evaluation result.
std::string describe_source(const EvalResult &r);

} // namespace lsq
