#pragma once

#include "lsq/ast.hpp"
#include "lsq/target.hpp"
#include "lsq/typecheck.hpp"

#include <stdexcept>
#include <string>

namespace lsq::cps {

namespace tg = lsq::target;

enum class CpsErrorKind {
  UnsupportedAtBottom, // transform called with a ⊥ yield type
  FreeYield,           // transform_free called on a yielding term
  Unsupported,         // Top, fix outside arrow/coroutine types, ill-typed input
};

struct CpsError : std::runtime_error {
  CpsErrorKind kind;
  CpsError(CpsErrorKind k, const std::string &msg) : std::runtime_error(msg), kind(k) {}
};

// Source types to target types. Bot becomes Never; Top is rejected.
tg::TypeP translate_type(const TypeP &t);

// Type abbreviations over target types.
tg::TypeP kappa(tg::TypeP t, tg::TypeP ty, tg::TypeP tr);   // T => Out[Ty,Tr]
tg::TypeP rho(tg::TypeP ty, tg::TypeP tr);                   // Ref[kappa(Unit,Ty,Tr)]
tg::TypeP sigmaT(tg::TypeP ty, tg::TypeP tr);                // kappa(Unit,Ty,Tr) => Unit
tg::TypeP gammaT(tg::TypeP t1, tg::TypeP ty, tg::TypeP tr);  // sigmaT(Ty,Tr) => T1 => Out[Ty,Tr]
tg::TypeP phiT(tg::TypeP ty, tg::TypeP tr, tg::TypeP tq);    // Out[Ty,Tr] => Out[Ty,Tq]

// Fresh binder names for generated code. They start with '%', which the
// source alphabet excludes.
class Fresh {
public:
  std::string operator()(const std::string &base) { return "%" + base + std::to_string(n_++); }

private:
  int n_ = 0;
};

// Maps Out[Ty,Tr] to Out[Ty,Tq]: Ret(x) goes to k(x), the other tags are
// re-tagged. `k` must have type kappa(τTr,τTy,τTq).
tg::TermP build_output_transformer(const TypeP &ty, const TypeP &tr, const TypeP &tq,
                                   const tg::TermP &k, Fresh &fresh);

// (x: rho(Ty,Tr)) => (k: kappa(Unit,Ty,Tr)) => x := k
tg::TermP build_store_constructor(const TypeP &ty, const TypeP &tr, Fresh &fresh);

struct TransformEnv {
  TypingContext gamma;
  TypeP yield;
  TypeP ret;
  Fresh fresh;
};

// Translation of a term inside a coroutine body with yield env.yield and
// coroutine return type env.ret. The result has the form
// (s: sigmaT) => (k: kappa(τT,Ty,Tr)) => body.
tg::TermP transform(TransformEnv &env, const TermP &t);

// Translation of a non-yielding term.
tg::TermP transform_free(const TypingContext &gamma, const TermP &t);

} // namespace lsq::cps
