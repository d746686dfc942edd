#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

namespace lsq::target {

struct Type;
using TypeP = std::shared_ptr<const Type>;

enum class TypeKind { Unit, Int, Never, Fun, Ref, Out };

// Fun: {param, ret}; Ref: {content}; Out: {yield, ret}.
struct Type {
  TypeKind kind;
  std::vector<TypeP> args;
};

TypeP unit_t();
TypeP int_t();
TypeP never_t();
TypeP fun_t(TypeP a, TypeP b);
TypeP ref_t(TypeP a);
TypeP out_t(TypeP y, TypeP r);
bool type_eq(const TypeP &a, const TypeP &b);

enum class Kind {
  Abs,
  App,
  Var,
  Unit,
  Int,
  Add,
  Ref,
  Deref,
  Assign,
  RetTag,
  YieldTag,
  TermTag,
  Match,
  Abort,
  Cell, // runtime only
};

struct Term;
using TermP = std::shared_ptr<const Term>;

// Children by kind:
//   Abs {body} name, annot       App {fn, arg}      Add {lhs, rhs}
//   Ref/Deref {arg}              Assign {cell, value}
//   RetTag/YieldTag {payload} annot = Out type       TermTag {} annot = Out type
//   Match {scrutinee, ret arm, yield arm, term arm}  name = ret binder, name2 = yield binder
//   Abort {} annot = result type                     Cell value = label
struct Term {
  Kind kind;
  std::string name, name2;
  TypeP annot;
  int64_t value = 0;
  std::vector<TermP> kids;
};

TermP abs(std::string x, TypeP t, TermP body);
TermP app(TermP f, TermP a);
TermP app(TermP f, TermP a, TermP b);
TermP var(std::string x);
TermP unit();
TermP int_lit(int64_t v);
TermP add(TermP l, TermP r);
TermP ref(TermP t);
TermP deref(TermP t);
TermP assign(TermP l, TermP r);
TermP ret_tag(TypeP y, TypeP r, TermP t);
TermP yield_tag(TypeP y, TypeP r, TermP t);
TermP term_tag(TypeP y, TypeP r);
TermP match(TermP scrutinee, std::string xr, TermP on_ret, std::string xy, TermP on_yield,
            TermP on_term);
TermP abort_t(TypeP t);
TermP cell(int64_t label);

// Sugar from the target language definition.
TermP seq(TermP t1, TermP t2);                              // ((u:Unit)=>t2)(t1)
TermP let(std::string x, TypeP t, TermP t1, TermP t2);     // ((x:T)=>t2)(t1)
TermP thunk(TermP t);                                       // (u:Unit)=>t

bool is_value(const TermP &t);
std::set<std::string> free_vars(const TermP &t);
TermP substitute(const TermP &t, const std::string &x, const TermP &v);
bool alpha_equal(const TermP &a, const TermP &b);
size_t term_size(const TermP &t);

std::string print_type(const TypeP &t);
std::string print_term(const TermP &t);
TermP parse_term(const std::string &src);
TypeP parse_type(const std::string &src);

struct TypeError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

using Heap = std::map<int64_t, TermP>;

// Closed terms without cells.
TypeP typecheck(const TermP &t);

enum class Status { Value, Stuck, OutOfFuel };

struct Result {
  Status status;
  TermP value;
  Heap heap;
  long steps = 0;
  std::string reason;
};

// Left-to-right call-by-value. `fuel` bounds the number of reductions.
Result eval(const TermP &t, long fuel);

} // namespace lsq::target
