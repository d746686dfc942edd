#include "lsq/ast.hpp"

#include <map>

namespace lsq {

namespace {
TypeP leaf(TypeKind k) { return std::make_shared<const Type>(Type{k, {}}); }
} // namespace

TypeP unit_t() { static TypeP t = leaf(TypeKind::Unit); return t; }
TypeP int_t() { static TypeP t = leaf(TypeKind::Int); return t; }
TypeP bot_t() { static TypeP t = leaf(TypeKind::Bot); return t; }
TypeP top_t() { static TypeP t = leaf(TypeKind::Top); return t; }

TypeP fun_t(TypeP p, TypeP r) {
  return std::make_shared<const Type>(Type{TypeKind::Fun, {std::move(p), std::move(r)}});
}
TypeP cor_t(TypeP p, TypeP y, TypeP r) {
  return std::make_shared<const Type>(
      Type{TypeKind::Cor, {std::move(p), std::move(y), std::move(r)}});
}
TypeP inst_t(TypeP y, TypeP r) {
  return std::make_shared<const Type>(Type{TypeKind::Inst, {std::move(y), std::move(r)}});
}

bool type_eq(const TypeP &a, const TypeP &b) {
  if (a == b)
    return true;
  if (!a || !b || a->kind != b->kind || a->args.size() != b->args.size())
    return false;
  for (size_t i = 0; i < a->args.size(); ++i)
    if (!type_eq(a->args[i], b->args[i]))
      return false;
  return true;
}

bool contains_top(const TypeP &t) {
  if (!t)
    return false;
  if (t->kind == TypeKind::Top)
    return true;
  for (auto &a : t->args)
    if (contains_top(a))
      return true;
  return false;
}

namespace {
TermP node(TermKind k, std::vector<TermP> kids = {}) {
  auto t = std::make_shared<Term>();
  t->kind = k;
  t->kids = std::move(kids);
  return t;
}
} // namespace

TermP mk_abs(std::string x, TypeP t, TermP body) {
  auto n = std::make_shared<Term>();
  n->kind = TermKind::Abs;
  n->name = std::move(x);
  n->annot = std::move(t);
  n->kids = {std::move(body)};
  return n;
}

TermP mk_cor(std::string x, TypeP t, TypeP ty, TermP body) {
  auto n = std::make_shared<Term>();
  n->kind = TermKind::Cor;
  n->name = std::move(x);
  n->annot = std::move(t);
  n->yield_annot = std::move(ty);
  n->kids = {std::move(body)};
  return n;
}

TermP mk_app(TermP f, TermP a) { return node(TermKind::App, {std::move(f), std::move(a)}); }

TermP mk_var(std::string x) {
  auto n = std::make_shared<Term>();
  n->kind = TermKind::Var;
  n->name = std::move(x);
  return n;
}

TermP mk_unit() {
  static TermP u = node(TermKind::Unit);
  return u;
}

TermP mk_int(int64_t v) {
  auto n = std::make_shared<Term>();
  n->kind = TermKind::Int;
  n->value = v;
  return n;
}

TermP mk_add(TermP l, TermP r) { return node(TermKind::Add, {std::move(l), std::move(r)}); }
TermP mk_yield(TermP t) { return node(TermKind::Yield, {std::move(t)}); }
TermP mk_start(TermP c, TermP a) { return node(TermKind::Start, {std::move(c), std::move(a)}); }
TermP mk_resume(TermP t, TermP h2, TermP h3, TermP h4) {
  return node(TermKind::Resume, {std::move(t), std::move(h2), std::move(h3), std::move(h4)});
}
TermP mk_snapshot(TermP t) { return node(TermKind::Snapshot, {std::move(t)}); }
TermP mk_fix(TermP t) { return node(TermKind::Fix, {std::move(t)}); }

TermP mk_inst(Label i) {
  auto n = std::make_shared<Term>();
  n->kind = TermKind::Inst;
  n->label = i;
  return n;
}

TermP mk_resumption(TermP t, TermP h2, TermP h3, TermP h4, Label i) {
  auto n = std::make_shared<Term>();
  n->kind = TermKind::Resumption;
  n->label = i;
  n->kids = {std::move(t), std::move(h2), std::move(h3), std::move(h4)};
  return n;
}

TermP mk_suspension(TermP t, TermP pending) {
  return node(TermKind::Suspension, {std::move(t), std::move(pending)});
}

TermP mk_empty() {
  static TermP e = node(TermKind::Empty);
  return e;
}

TermP with_kids(const TermP &t, std::vector<TermP> kids) {
  auto n = std::make_shared<Term>(*t);
  n->kids = std::move(kids);
  return n;
}

bool is_value(const TermP &t) {
  switch (t->kind) {
  case TermKind::Abs:
  case TermKind::Unit:
  case TermKind::Int:
  case TermKind::Cor:
  case TermKind::Inst:
  case TermKind::Empty:
    return true;
  default:
    return false;
  }
}

bool is_runtime_form(TermKind k) {
  return k == TermKind::Inst || k == TermKind::Resumption || k == TermKind::Suspension ||
         k == TermKind::Empty;
}

bool contains_runtime_form(const TermP &t) {
  if (is_runtime_form(t->kind))
    return true;
  for (auto &k : t->kids)
    if (contains_runtime_form(k))
      return true;
  return false;
}

namespace {
bool binds(const TermP &t) { return t->kind == TermKind::Abs || t->kind == TermKind::Cor; }

void fv(const TermP &t, std::multiset<std::string> &bound, std::set<std::string> &out) {
  if (t->kind == TermKind::Var) {
    if (!bound.count(t->name))
      out.insert(t->name);
    return;
  }
  if (binds(t)) {
    auto it = bound.insert(t->name);
    fv(t->kids[0], bound, out);
    bound.erase(it);
    return;
  }
  for (auto &k : t->kids)
    fv(k, bound, out);
}
} // namespace

std::set<std::string> free_vars(const TermP &t) {
  std::multiset<std::string> bound;
  std::set<std::string> out;
  fv(t, bound, out);
  return out;
}

// v is closed, so nothing can be captured and shadowing is the only case to respect.
TermP substitute(const TermP &t, const std::string &x, const TermP &v) {
  switch (t->kind) {
  case TermKind::Var:
    return t->name == x ? v : t;
  case TermKind::Unit:
  case TermKind::Int:
  case TermKind::Inst:
  case TermKind::Empty:
    return t;
  case TermKind::Abs:
  case TermKind::Cor:
    if (t->name == x)
      return t;
    break;
  default:
    break;
  }
  std::vector<TermP> kids;
  kids.reserve(t->kids.size());
  bool changed = false;
  for (auto &k : t->kids) {
    kids.push_back(substitute(k, x, v));
    changed |= kids.back() != k;
  }
  return changed ? with_kids(t, std::move(kids)) : t;
}

void collect_labels(const TermP &t, std::set<Label> &out) {
  if (t->kind == TermKind::Inst || t->kind == TermKind::Resumption)
    out.insert(t->label);
  for (auto &k : t->kids)
    collect_labels(k, out);
}

namespace {
using Env = std::vector<std::pair<std::string, std::string>>;

int lookup(const Env &env, const std::string &x) {
  for (size_t i = env.size(); i-- > 0;)
    if (env[i].first == x)
      return static_cast<int>(i);
  return -1;
}

bool aeq(const TermP &a, const TermP &b, Env &ea, Env &eb) {
  if (a->kind != b->kind || a->kids.size() != b->kids.size())
    return false;
  switch (a->kind) {
  case TermKind::Var: {
    int ia = lookup(ea, a->name), ib = lookup(eb, b->name);
    if (ia < 0 && ib < 0)
      return a->name == b->name;
    return ia == ib;
  }
  case TermKind::Int:
    return a->value == b->value;
  case TermKind::Inst:
    return a->label == b->label;
  case TermKind::Resumption:
    if (a->label != b->label)
      return false;
    break;
  case TermKind::Abs:
  case TermKind::Cor: {
    if (!type_eq(a->annot, b->annot) || !type_eq(a->yield_annot, b->yield_annot))
      return false;
    ea.emplace_back(a->name, "");
    eb.emplace_back(b->name, "");
    bool r = aeq(a->kids[0], b->kids[0], ea, eb);
    ea.pop_back();
    eb.pop_back();
    return r;
  }
  default:
    break;
  }
  for (size_t i = 0; i < a->kids.size(); ++i)
    if (!aeq(a->kids[i], b->kids[i], ea, eb))
      return false;
  return true;
}
} // namespace

bool alpha_equal(const TermP &a, const TermP &b) {
  Env ea, eb;
  return aeq(a, b, ea, eb);
}

} // namespace lsq
