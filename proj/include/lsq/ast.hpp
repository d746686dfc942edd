#pragma once

#include <cstdint>
#include <memory>
#include <set>
#include <string>
#include <vector>

namespace lsq {

struct Type;
using TypeP = std::shared_ptr<const Type>;

enum class TypeKind { Unit, Int, Fun, Cor, Inst, Bot, Top };

// Fun: {param, ret}; Cor: {param, yield, ret}; Inst: {yield, ret}.
struct Type {
  TypeKind kind;
  std::vector<TypeP> args;
};

TypeP unit_t();
TypeP int_t();
TypeP bot_t();
TypeP top_t();
TypeP fun_t(TypeP param, TypeP ret);
TypeP cor_t(TypeP param, TypeP yield, TypeP ret);
TypeP inst_t(TypeP yield, TypeP ret);

bool type_eq(const TypeP &a, const TypeP &b);
bool contains_top(const TypeP &t);

using Label = int64_t;

enum class TermKind {
  Abs,
  App,
  Var,
  Unit,
  Int,
  Add,
  Cor,
  Yield,
  Start,
  Resume,
  Snapshot,
  Fix,
  // runtime forms
  Inst,
  Resumption,
  Suspension,
  Empty,
};

struct Term;
using TermP = std::shared_ptr<const Term>;

// Children layout by kind:
//   Abs {body}               name, annot
//   Cor {body}               name, annot, yield_annot
//   App {fn, arg}   Add {lhs, rhs}   Start {cor, arg}
//   Resume {target, ret, yld, dead}
//   Resumption {body, ret, yld, dead}   label
//   Suspension {body, pending}          pending is a value or Empty
//   Yield/Snapshot/Fix {arg}
struct Term {
  TermKind kind;
  std::string name;
  TypeP annot;
  TypeP yield_annot;
  int64_t value = 0;
  Label label = 0;
  std::vector<TermP> kids;
};

TermP mk_abs(std::string x, TypeP t, TermP body);
TermP mk_cor(std::string x, TypeP t, TypeP ty, TermP body);
TermP mk_app(TermP f, TermP a);
TermP mk_var(std::string x);
TermP mk_unit();
TermP mk_int(int64_t v);
TermP mk_add(TermP l, TermP r);
TermP mk_yield(TermP t);
TermP mk_start(TermP c, TermP a);
TermP mk_resume(TermP t, TermP h_ret, TermP h_yield, TermP h_dead);
TermP mk_snapshot(TermP t);
TermP mk_fix(TermP t);
TermP mk_inst(Label i);
TermP mk_resumption(TermP t, TermP h_ret, TermP h_yield, TermP h_dead, Label i);
TermP mk_suspension(TermP t, TermP pending);
TermP mk_empty();

// Copy of t with its children replaced.
TermP with_kids(const TermP &t, std::vector<TermP> kids);

bool is_value(const TermP &t);
bool is_runtime_form(TermKind k);
bool contains_runtime_form(const TermP &t);

std::set<std::string> free_vars(const TermP &t);
TermP substitute(const TermP &t, const std::string &x, const TermP &v);
void collect_labels(const TermP &t, std::set<Label> &out);

bool alpha_equal(const TermP &a, const TermP &b);

// Wrapping 64-bit addition shared by every back end.
inline int64_t wrap_add(int64_t a, int64_t b) {
  return static_cast<int64_t>(static_cast<uint64_t>(a) + static_cast<uint64_t>(b));
}

} // namespace lsq
