#pragma once

#include "lsq/ast.hpp"

#include <map>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace lsq {

enum class Mode { Base, Subtyping };

enum class TypeErrorKind {
  UnboundVariable,
  UnboundLabel,
  YieldInFunction,
  YieldMismatch,
  ArgumentMismatch,
  HandlerMismatch,
  NotApplicable,
  NotACoroutine,
  NotAnInstance,
  FixMismatch,
  AddOperand,
  TopInBaseMode,
  NonBottomYield,
  RuntimeForm,
};

struct TypeError : std::runtime_error {
  TypeErrorKind kind;
  TypeError(TypeErrorKind k, const std::string &msg) : std::runtime_error(msg), kind(k) {}
};

// Γ. Lookup scans from the back, so later bindings shadow earlier ones.
using TypingContext = std::vector<std::pair<std::string, TypeP>>;
// Σ.
using InstanceTyping = std::map<Label, TypeP>;
// μ, as seen by the typechecker.
using InstanceMap = std::map<Label, TermP>;

struct Judgment {
  TypeP type;
  TypeP yield; // Bot when the term does not yield
};

Judgment infer(const InstanceTyping &sigma, const TypingContext &gamma, const TermP &t, Mode mode);

// Type of a closed user program; it must not yield.
TypeP check_user_program(const TermP &t, Mode mode);

bool subtype(const TypeP &s, const TypeP &t);
TypeP join(const TypeP &s, const TypeP &t);
TypeP meet(const TypeP &s, const TypeP &t);

// `s` may stand where `t` is expected: equality in base mode, subtyping otherwise.
bool conforms(const TypeP &s, const TypeP &t, Mode mode);

// A yield type `y` fits within the expected yield `ty`. Bot always fits.
bool yield_fits(const TypeP &y, const TypeP &ty, Mode mode);

// μ(i) has the type recorded in Σ(i).
bool instance_well_typed(const InstanceTyping &sigma, Label i, const TermP &term, Mode mode);

bool store_well_typed(const InstanceTyping &sigma, const InstanceMap &mu, Mode mode);

} // namespace lsq
