#pragma once

#include "lsq/ast.hpp"
#include "lsq/typecheck.hpp"

#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace lsq {

// μ plus the bookkeeping needed to rebuild Σ: the coroutine each label was
// started from (snapshots inherit it).
struct InstanceStore {
  InstanceMap mu;
  std::map<Label, TermP> origin;
  Label next = 0;
};

struct Configuration {
  TermP term;
  InstanceStore store;
};

enum class StepKind { Stepped, Finished, SuspendedAtTop, Stuck };

struct StepOutcome {
  StepKind kind;
  Configuration next;  // Stepped
  std::string rule;    // Stepped
  TermP value;         // Finished: the value; SuspendedAtTop: the pending yield
  TermP rest;          // SuspendedAtTop: the suspended body
  std::string reason;  // Stuck
};

StepOutcome step(const Configuration &c);

enum class EvalStatus { Finished, SuspendedAtTop, Stuck, OutOfFuel };

struct EvalResult {
  EvalStatus status;
  TermP term; // final term (the value when Finished)
  InstanceStore store;
  long steps = 0;
  std::string reason;
};

using StepObserver = std::function<void(const Configuration &after, const std::string &rule)>;

EvalResult eval(Configuration c, long fuel, const StepObserver &observe = {});

const char *status_name(EvalStatus s);

// Σ for the labels of a store, recomputed from each label's origin coroutine.
InstanceTyping instance_typing(const InstanceStore &s, Mode mode);

enum class DriveOutcome { Result, StillLive, Dead, Stuck, OutOfFuel };

struct DriveResult {
  std::vector<TermP> yields;
  DriveOutcome outcome;
  TermP value; // Result only
  std::string reason;
  long steps = 0;
};

// Starts `coroutine` on `arg` and resumes the instance until it terminates or
// `max_resumes` resumes were issued. Yielded values are observed at capture
// time; termination is read off the store.
DriveResult drive(const TermP &coroutine, const TermP &arg, int max_resumes, long fuel = 100000);

} // namespace lsq
