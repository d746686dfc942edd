#include "lsq/target.hpp"

#include "lsq/ast.hpp"
#include "lsq/lexer.hpp"

#include <algorithm>
#include <sstream>

namespace lsq::target {

namespace {
TypeP leaf(TypeKind k) { return std::make_shared<const Type>(Type{k, {}}); }
} // namespace

TypeP unit_t() { static TypeP t = leaf(TypeKind::Unit); return t; }
TypeP int_t() { static TypeP t = leaf(TypeKind::Int); return t; }
TypeP never_t() { static TypeP t = leaf(TypeKind::Never); return t; }
TypeP fun_t(TypeP a, TypeP b) {
  return std::make_shared<const Type>(Type{TypeKind::Fun, {std::move(a), std::move(b)}});
}
TypeP ref_t(TypeP a) { return std::make_shared<const Type>(Type{TypeKind::Ref, {std::move(a)}}); }
TypeP out_t(TypeP y, TypeP r) {
  return std::make_shared<const Type>(Type{TypeKind::Out, {std::move(y), std::move(r)}});
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

namespace {
std::shared_ptr<Term> node(Kind k, std::vector<TermP> kids = {}) {
  auto t = std::make_shared<Term>();
  t->kind = k;
  t->kids = std::move(kids);
  return t;
}
} // namespace

TermP abs(std::string x, TypeP t, TermP body) {
  auto n = node(Kind::Abs, {std::move(body)});
  n->name = std::move(x);
  n->annot = std::move(t);
  return n;
}
TermP app(TermP f, TermP a) { return node(Kind::App, {std::move(f), std::move(a)}); }
TermP app(TermP f, TermP a, TermP b) { return app(app(std::move(f), std::move(a)), std::move(b)); }
TermP var(std::string x) {
  auto n = node(Kind::Var);
  n->name = std::move(x);
  return n;
}
TermP unit() {
  static TermP u = node(Kind::Unit);
  return u;
}
TermP int_lit(int64_t v) {
  auto n = node(Kind::Int);
  n->value = v;
  return n;
}
TermP add(TermP l, TermP r) { return node(Kind::Add, {std::move(l), std::move(r)}); }
TermP ref(TermP t) { return node(Kind::Ref, {std::move(t)}); }
TermP deref(TermP t) { return node(Kind::Deref, {std::move(t)}); }
TermP assign(TermP l, TermP r) { return node(Kind::Assign, {std::move(l), std::move(r)}); }
TermP ret_tag(TypeP y, TypeP r, TermP t) {
  auto n = node(Kind::RetTag, {std::move(t)});
  n->annot = out_t(std::move(y), std::move(r));
  return n;
}
TermP yield_tag(TypeP y, TypeP r, TermP t) {
  auto n = node(Kind::YieldTag, {std::move(t)});
  n->annot = out_t(std::move(y), std::move(r));
  return n;
}
TermP term_tag(TypeP y, TypeP r) {
  auto n = node(Kind::TermTag);
  n->annot = out_t(std::move(y), std::move(r));
  return n;
}
TermP match(TermP s, std::string xr, TermP on_ret, std::string xy, TermP on_yield, TermP on_term) {
  auto n = node(Kind::Match, {std::move(s), std::move(on_ret), std::move(on_yield), std::move(on_term)});
  n->name = std::move(xr);
  n->name2 = std::move(xy);
  return n;
}
TermP abort_t(TypeP t) {
  auto n = node(Kind::Abort);
  n->annot = std::move(t);
  return n;
}
TermP cell(int64_t label) {
  auto n = node(Kind::Cell);
  n->value = label;
  return n;
}

namespace {
std::string unused_name(const TermP &body, const std::string &base) {
  auto fv = free_vars(body);
  std::string x = base;
  for (int n = 1; fv.count(x); ++n)
    x = base + std::to_string(n);
  return x;
}
} // namespace

TermP seq(TermP t1, TermP t2) {
  std::string u = unused_name(t2, "u");
  return app(abs(u, unit_t(), std::move(t2)), std::move(t1));
}
TermP let(std::string x, TypeP t, TermP t1, TermP t2) {
  return app(abs(std::move(x), std::move(t), std::move(t2)), std::move(t1));
}
TermP thunk(TermP t) {
  std::string u = unused_name(t, "u");
  return abs(u, unit_t(), std::move(t));
}

bool is_value(const TermP &t) {
  switch (t->kind) {
  case Kind::Abs:
  case Kind::Unit:
  case Kind::Int:
  case Kind::Cell:
  case Kind::TermTag:
    return true;
  case Kind::RetTag:
  case Kind::YieldTag:
    return is_value(t->kids[0]);
  default:
    return false;
  }
}

namespace {
// The binder introduced for child `i` of `t`, if any.
const std::string *binder(const TermP &t, size_t i) {
  if (t->kind == Kind::Abs)
    return &t->name;
  if (t->kind == Kind::Match && i == 1)
    return &t->name;
  if (t->kind == Kind::Match && i == 2)
    return &t->name2;
  return nullptr;
}

void fv(const TermP &t, std::multiset<std::string> &bound, std::set<std::string> &out) {
  if (t->kind == Kind::Var) {
    if (!bound.count(t->name))
      out.insert(t->name);
    return;
  }
  for (size_t i = 0; i < t->kids.size(); ++i) {
    const std::string *b = binder(t, i);
    if (b) {
      auto it = bound.insert(*b);
      fv(t->kids[i], bound, out);
      bound.erase(it);
    } else {
      fv(t->kids[i], bound, out);
    }
  }
}
} // namespace

std::set<std::string> free_vars(const TermP &t) {
  std::multiset<std::string> bound;
  std::set<std::string> out;
  fv(t, bound, out);
  return out;
}

TermP substitute(const TermP &t, const std::string &x, const TermP &v) {
  if (t->kind == Kind::Var)
    return t->name == x ? v : t;
  if (t->kids.empty())
    return t;
  std::vector<TermP> kids;
  kids.reserve(t->kids.size());
  bool changed = false;
  for (size_t i = 0; i < t->kids.size(); ++i) {
    const std::string *b = binder(t, i);
    if (b && *b == x)
      kids.push_back(t->kids[i]);
    else
      kids.push_back(substitute(t->kids[i], x, v));
    changed |= kids.back() != t->kids[i];
  }
  if (!changed)
    return t;
  auto n = std::make_shared<Term>(*t);
  n->kids = std::move(kids);
  return n;
}

namespace {
using Env = std::vector<std::string>;

int lookup(const Env &env, const std::string &x) {
  for (size_t i = env.size(); i-- > 0;)
    if (env[i] == x)
      return static_cast<int>(i);
  return -1;
}

bool aeq(const TermP &a, const TermP &b, Env &ea, Env &eb) {
  if (a->kind != b->kind || a->kids.size() != b->kids.size())
    return false;
  if (a->kind == Kind::Var) {
    int ia = lookup(ea, a->name), ib = lookup(eb, b->name);
    if (ia < 0 && ib < 0)
      return a->name == b->name;
    return ia == ib;
  }
  if ((a->kind == Kind::Int || a->kind == Kind::Cell) && a->value != b->value)
    return false;
  if (a->annot && !type_eq(a->annot, b->annot))
    return false;
  for (size_t i = 0; i < a->kids.size(); ++i) {
    const std::string *ba = binder(a, i), *bb = binder(b, i);
    if (ba) {
      ea.push_back(*ba);
      eb.push_back(*bb);
    }
    bool ok = aeq(a->kids[i], b->kids[i], ea, eb);
    if (ba) {
      ea.pop_back();
      eb.pop_back();
    }
    if (!ok)
      return false;
  }
  return true;
}
} // namespace

bool alpha_equal(const TermP &a, const TermP &b) {
  Env ea, eb;
  return aeq(a, b, ea, eb);
}

size_t term_size(const TermP &t) {
  size_t n = 1;
  for (auto &k : t->kids)
    n += term_size(k);
  return n;
}

// ---------------------------------------------------------------------------
// Printing

namespace {

void pt(std::ostream &os, const TypeP &t, bool atomic) {
  switch (t->kind) {
  case TypeKind::Unit: os << "Unit"; return;
  case TypeKind::Int: os << "Int"; return;
  case TypeKind::Never: os << "Never"; return;
  case TypeKind::Ref:
    os << "Ref[";
    pt(os, t->args[0], false);
    os << "]";
    return;
  case TypeKind::Out:
    os << "Out[";
    pt(os, t->args[0], false);
    os << ", ";
    pt(os, t->args[1], false);
    os << "]";
    return;
  case TypeKind::Fun:
    if (atomic)
      os << "(";
    pt(os, t->args[0], true);
    os << " => ";
    pt(os, t->args[1], false);
    if (atomic)
      os << ")";
    return;
  }
}

enum Prec { kSeq = 0, kMatch = 1, kAssign = 2, kAdd = 3, kApp = 4, kAtom = 5 };

bool is_unit_sugar(const TermP &abs_node) {
  return abs_node->kind == Kind::Abs && abs_node->annot->kind == TypeKind::Unit &&
         !free_vars(abs_node->kids[0]).count(abs_node->name);
}

void pr(std::ostream &os, const TermP &t, int prec);

void tags(std::ostream &os, const TypeP &out) {
  os << "[";
  pt(os, out->args[0], false);
  os << ", ";
  pt(os, out->args[1], false);
  os << "]";
}

void pr(std::ostream &os, const TermP &t, int prec) {
  auto open = [&](int need) {
    if (prec > need)
      os << "(";
  };
  auto shut = [&](int need) {
    if (prec > need)
      os << ")";
  };
  switch (t->kind) {
  case Kind::Var: os << t->name; return;
  case Kind::Unit: os << "()"; return;
  case Kind::Int: os << t->value; return;
  case Kind::Cell: os << "#cell<" << t->value << ">"; return;
  case Kind::Abs:
    open(kSeq);
    if (is_unit_sugar(t)) {
      os << "() => ";
    } else {
      os << "(" << t->name << ": ";
      pt(os, t->annot, false);
      os << ") => ";
    }
    pr(os, t->kids[0], kSeq);
    shut(kSeq);
    return;
  case Kind::App: {
    const TermP &f = t->kids[0];
    if (f->kind == Kind::Abs) {
      // val / sequencing sugar
      open(kSeq);
      if (is_unit_sugar(f)) {
        pr(os, t->kids[1], kMatch);
        os << "; ";
      } else {
        os << "val " << f->name << ": ";
        pt(os, f->annot, false);
        os << " = ";
        pr(os, t->kids[1], kMatch);
        os << "; ";
      }
      pr(os, f->kids[0], kSeq);
      shut(kSeq);
      return;
    }
    open(kApp);
    pr(os, f, kApp);
    os << "(";
    pr(os, t->kids[1], kSeq);
    os << ")";
    shut(kApp);
    return;
  }
  case Kind::Add:
    open(kAdd);
    pr(os, t->kids[0], kAdd);
    os << " + ";
    pr(os, t->kids[1], kApp);
    shut(kAdd);
    return;
  case Kind::Ref:
    os << "ref(";
    pr(os, t->kids[0], kSeq);
    os << ")";
    return;
  case Kind::Deref:
    os << "!";
    pr(os, t->kids[0], kAtom);
    return;
  case Kind::Assign:
    open(kAssign);
    pr(os, t->kids[0], kAdd);
    os << " := ";
    pr(os, t->kids[1], kAdd);
    shut(kAssign);
    return;
  case Kind::RetTag:
  case Kind::YieldTag:
    os << (t->kind == Kind::RetTag ? "Ret" : "Yield");
    tags(os, t->annot);
    os << "(";
    pr(os, t->kids[0], kSeq);
    os << ")";
    return;
  case Kind::TermTag:
    os << "Term";
    tags(os, t->annot);
    return;
  case Kind::Abort:
    os << "abort[";
    pt(os, t->annot, false);
    os << "]";
    return;
  case Kind::Match:
    open(kMatch);
    pr(os, t->kids[0], kAssign);
    os << " match { case Ret(" << t->name << ") => ";
    pr(os, t->kids[1], kSeq);
    os << "; case Yield(" << t->name2 << ") => ";
    pr(os, t->kids[2], kSeq);
    os << "; case Term => ";
    pr(os, t->kids[3], kSeq);
    os << " }";
    shut(kMatch);
    return;
  }
}

// ---------------------------------------------------------------------------
// Parsing

const std::vector<std::string> kPuncts = {"(", ")", ":", "=>", ":=", "!", "+", ",", "[",
                                          "]", "{", "}", ";", "=",  "#",  "<", ">"};

class Parser {
public:
  explicit Parser(const std::string &src) : ts_(tokenize(src, kPuncts, "--", true, "%")) {}

  TermP program() {
    TermP t = seq();
    if (!ts_.at_end())
      ts_.fail("unexpected trailing input");
    return t;
  }
  TypeP type_only() {
    TypeP t = type();
    if (!ts_.at_end())
      ts_.fail("unexpected trailing input");
    return t;
  }

private:
  TokenStream ts_;

  TypeP type() {
    TypeP a = type_atom();
    if (ts_.accept("=>"))
      return fun_t(a, type());
    return a;
  }

  TypeP type_atom() {
    if (ts_.accept("Unit"))
      return unit_t();
    if (ts_.accept("Int"))
      return int_t();
    if (ts_.accept("Never"))
      return never_t();
    if (ts_.accept("Ref")) {
      ts_.expect("[");
      TypeP a = type();
      ts_.expect("]");
      return ref_t(a);
    }
    if (ts_.accept("Out")) {
      auto [y, r] = type_pair();
      return out_t(y, r);
    }
    if (ts_.accept("(")) {
      TypeP t = type();
      ts_.expect(")");
      return t;
    }
    ts_.fail("expected a type");
  }

  std::pair<TypeP, TypeP> type_pair() {
    ts_.expect("[");
    TypeP y = type();
    ts_.expect(",");
    TypeP r = type();
    ts_.expect("]");
    return {y, r};
  }

  bool arm_ahead() const { return ts_.is(";") && (ts_.is("case", 1) || ts_.is("}", 1)); }

  TermP seq() {
    TermP t = expr();
    if (ts_.is(";") && !arm_ahead()) {
      ts_.next();
      return target::seq(t, seq());
    }
    return t;
  }

  TermP expr() {
    if (ts_.accept("val")) {
      std::string x = ts_.ident();
      ts_.expect(":");
      TypeP ty = type();
      ts_.expect("=");
      TermP rhs = expr();
      ts_.expect(";");
      return let(x, ty, rhs, seq());
    }
    TermP t = assignment();
    while (ts_.accept("match")) {
      ts_.expect("{");
      ts_.expect("case");
      ts_.expect("Ret");
      ts_.expect("(");
      std::string xr = ts_.ident();
      ts_.expect(")");
      ts_.expect("=>");
      TermP r = seq();
      ts_.expect(";");
      ts_.expect("case");
      ts_.expect("Yield");
      ts_.expect("(");
      std::string xy = ts_.ident();
      ts_.expect(")");
      ts_.expect("=>");
      TermP y = seq();
      ts_.expect(";");
      ts_.expect("case");
      ts_.expect("Term");
      ts_.expect("=>");
      TermP e = seq();
      ts_.accept(";");
      ts_.expect("}");
      t = target::match(t, xr, r, xy, y, e);
    }
    return t;
  }

  TermP assignment() {
    TermP l = sum();
    if (ts_.accept(":="))
      return assign(l, sum());
    return l;
  }

  TermP sum() {
    TermP l = postfix();
    while (ts_.accept("+"))
      l = add(l, postfix());
    return l;
  }

  TermP postfix() {
    TermP f = atom();
    while (ts_.is("(")) {
      ts_.next();
      TermP a = ts_.accept(")") ? unit() : close(seq());
      f = app(f, a);
    }
    return f;
  }

  TermP close(TermP t) {
    ts_.expect(")");
    return t;
  }

  TermP atom() {
    const Token &tk = ts_.peek();
    if (tk.kind == Tok::Int)
      return int_lit(ts_.next().value);
    if (ts_.is("(")) {
      // (x: T) => t   |   () => t   |   ()   |   ( t )
      if (ts_.peek(1).kind == Tok::Ident && ts_.is(":", 2)) {
        ts_.next();
        std::string x = ts_.ident();
        ts_.expect(":");
        TypeP ty = type();
        ts_.expect(")");
        ts_.expect("=>");
        return abs(x, ty, seq());
      }
      ts_.next();
      if (ts_.accept(")")) {
        if (ts_.accept("=>"))
          return thunk(seq());
        return unit();
      }
      return close(seq());
    }
    if (ts_.accept("!"))
      return deref(atom());
    if (ts_.accept("ref")) {
      ts_.expect("(");
      return ref(close(seq()));
    }
    if (ts_.is("Ret") || ts_.is("Yield")) {
      bool ret = ts_.next().text == "Ret";
      auto [y, r] = type_pair();
      ts_.expect("(");
      TermP p = close(seq());
      return ret ? ret_tag(y, r, p) : yield_tag(y, r, p);
    }
    if (ts_.accept("Term")) {
      auto [y, r] = type_pair();
      return term_tag(y, r);
    }
    if (ts_.accept("abort")) {
      ts_.expect("[");
      TypeP ty = type();
      ts_.expect("]");
      return abort_t(ty);
    }
    if (ts_.is("#"))
      ts_.fail("runtime-only form is not allowed in a program");
    if (tk.kind == Tok::Ident) {
      static const std::set<std::string> kw = {"val", "match", "case", "Unit", "Int",
                                               "Never", "Ref", "Out"};
      if (kw.count(tk.text))
        ts_.fail("unexpected keyword");
      return var(ts_.next().text);
    }
    ts_.fail("expected a term");
  }
};

} // namespace

std::string print_type(const TypeP &t) {
  std::ostringstream os;
  pt(os, t, false);
  return os.str();
}

std::string print_term(const TermP &t) {
  std::ostringstream os;
  pr(os, t, kSeq);
  return os.str();
}

TermP parse_term(const std::string &src) { return Parser(src).program(); }
TypeP parse_type(const std::string &src) { return Parser(src).type_only(); }

// ---------------------------------------------------------------------------
// Typing

namespace {

class Checker {
public:
  TypeP run(const TermP &t) {
    switch (t->kind) {
    case Kind::Var:
      for (size_t i = env_.size(); i-- > 0;)
        if (env_[i].first == t->name)
          return env_[i].second;
      throw TypeError("unbound variable " + t->name);
    case Kind::Unit:
      return unit_t();
    case Kind::Int:
      return int_t();
    case Kind::Abs: {
      TypeP b = bind(t->name, t->annot, t->kids[0]);
      return fun_t(t->annot, b);
    }
    case Kind::App: {
      TypeP f = run(t->kids[0]);
      TypeP a = run(t->kids[1]);
      if (f->kind != TypeKind::Fun)
        throw TypeError("applying a non-function of type " + print_type(f));
      if (!type_eq(f->args[0], a))
        throw TypeError("argument of type " + print_type(a) + " where " + print_type(f->args[0]) +
                        " is expected in " + print_term(t));
      return f->args[1];
    }
    case Kind::Add:
      if (run(t->kids[0])->kind != TypeKind::Int || run(t->kids[1])->kind != TypeKind::Int)
        throw TypeError("operands of + must be Int");
      return int_t();
    case Kind::Ref:
      return ref_t(run(t->kids[0]));
    case Kind::Deref: {
      TypeP r = run(t->kids[0]);
      if (r->kind != TypeKind::Ref)
        throw TypeError("dereferencing a non-reference of type " + print_type(r));
      return r->args[0];
    }
    case Kind::Assign: {
      TypeP r = run(t->kids[0]);
      TypeP v = run(t->kids[1]);
      if (r->kind != TypeKind::Ref)
        throw TypeError("assigning to a non-reference of type " + print_type(r));
      if (!type_eq(r->args[0], v))
        throw TypeError("assigning " + print_type(v) + " to " + print_type(r));
      return unit_t();
    }
    case Kind::RetTag:
    case Kind::YieldTag: {
      TypeP p = run(t->kids[0]);
      const TypeP &want = t->annot->args[t->kind == Kind::RetTag ? 1 : 0];
      if (!type_eq(p, want))
        throw TypeError("tag payload of type " + print_type(p) + " where " + print_type(want) +
                        " is expected");
      return t->annot;
    }
    case Kind::TermTag:
      return t->annot;
    case Kind::Abort:
      return t->annot;
    case Kind::Match: {
      TypeP s = run(t->kids[0]);
      if (s->kind != TypeKind::Out)
        throw TypeError("matching on a non-Out value of type " + print_type(s));
      TypeP r = bind(t->name, s->args[1], t->kids[1]);
      TypeP y = bind(t->name2, s->args[0], t->kids[2]);
      TypeP e = run(t->kids[3]);
      if (!type_eq(r, y) || !type_eq(r, e))
        throw TypeError("match arms disagree: " + print_type(r) + ", " + print_type(y) + ", " +
                        print_type(e));
      return r;
    }
    case Kind::Cell:
      throw TypeError("cells are runtime-only");
    }
    throw TypeError("unknown term");
  }

private:
  std::vector<std::pair<std::string, TypeP>> env_;

  TypeP bind(const std::string &x, const TypeP &t, const TermP &body) {
    env_.emplace_back(x, t);
    TypeP r = run(body);
    env_.pop_back();
    return r;
  }
};

// ---------------------------------------------------------------------------
// Evaluation

struct Halt {
  Status status;
  std::string reason;
};

class Machine {
public:
  Machine(long fuel) : fuel_(fuel) {}
  Heap heap;
  long steps = 0;

  // Tail positions (function bodies and match arms) loop instead of
  // recursing, so CPS code runs in constant host stack.
  TermP run(TermP t) {
    if (++depth_ > kMaxDepth)
      throw Halt{Status::Stuck, "host recursion limit"};
    struct Guard {
      int &d;
      ~Guard() { --d; }
    } g{depth_};
    for (;;) {
      switch (t->kind) {
      case Kind::Abs:
      case Kind::Unit:
      case Kind::Int:
      case Kind::Cell:
      case Kind::TermTag:
        return t;
      case Kind::Var:
        throw Halt{Status::Stuck, "free variable " + t->name};
      case Kind::Abort:
        throw Halt{Status::Stuck, "abort"};
      case Kind::App: {
        TermP f = run(t->kids[0]);
        TermP a = run(t->kids[1]);
        tick();
        if (f->kind != Kind::Abs)
          throw Halt{Status::Stuck, "application of a non-function"};
        t = substitute(f->kids[0], f->name, a);
        continue;
      }
      case Kind::Add: {
        TermP l = run(t->kids[0]);
        TermP r = run(t->kids[1]);
        tick();
        if (l->kind != Kind::Int || r->kind != Kind::Int)
          throw Halt{Status::Stuck, "addition of non-integers"};
        return int_lit(wrap_add(l->value, r->value));
      }
      case Kind::Ref: {
        TermP v = run(t->kids[0]);
        tick();
        int64_t c = next_++;
        heap[c] = v;
        return cell(c);
      }
      case Kind::Deref: {
        TermP c = run(t->kids[0]);
        tick();
        if (c->kind != Kind::Cell || !heap.count(c->value))
          throw Halt{Status::Stuck, "dereferencing a non-cell"};
        return heap[c->value];
      }
      case Kind::Assign: {
        TermP c = run(t->kids[0]);
        TermP v = run(t->kids[1]);
        tick();
        if (c->kind != Kind::Cell || !heap.count(c->value))
          throw Halt{Status::Stuck, "assigning to a non-cell"};
        heap[c->value] = v;
        return unit();
      }
      case Kind::RetTag:
      case Kind::YieldTag: {
        TermP p = run(t->kids[0]);
        if (p == t->kids[0])
          return t;
        auto n = std::make_shared<Term>(*t);
        n->kids = {p};
        return n;
      }
      case Kind::Match: {
        TermP s = run(t->kids[0]);
        tick();
        if (s->kind == Kind::RetTag)
          t = substitute(t->kids[1], t->name, s->kids[0]);
        else if (s->kind == Kind::YieldTag)
          t = substitute(t->kids[2], t->name2, s->kids[0]);
        else if (s->kind == Kind::TermTag)
          t = t->kids[3];
        else
          throw Halt{Status::Stuck, "match on a non-Out value"};
        continue;
      }
      }
    }
  }

private:
  static constexpr int kMaxDepth = 20000;
  long fuel_;
  int depth_ = 0;
  int64_t next_ = 0;

  void tick() {
    if (++steps > fuel_)
      throw Halt{Status::OutOfFuel, "out of fuel"};
  }
};

} // namespace

TypeP typecheck(const TermP &t) { return Checker().run(t); }

Result eval(const TermP &t, long fuel) {
  Machine m(fuel);
  Result r;
  try {
    r.value = m.run(t);
    r.status = Status::Value;
  } catch (const Halt &h) {
    r.status = h.status;
    r.reason = h.reason;
  }
  r.heap = std::move(m.heap);
  r.steps = m.steps;
  return r;
}

} // namespace lsq::target
