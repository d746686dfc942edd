#include "lsq/syntax.hpp"

#include <algorithm>
#include <sstream>

namespace lsq {

namespace {

const std::vector<std::string> kPuncts = {"(", ")", ":", "=>", "->", "~>", "<~>", "~",  ";",  "+",
                                          ",", "=", "#", "<|", "|>", "[[", "]]", "^", "%", "<"};

const std::vector<std::string> kKeywords = {"fun",      "cor",  "yields", "yield", "start",
                                            "resume",   "snapshot", "fix", "let", "in",
                                            "Unit",     "Int",  "Bot",    "Top"};

bool is_keyword(const std::string &s) {
  return std::find(kKeywords.begin(), kKeywords.end(), s) != kKeywords.end();
}

std::string fresh_unit_name(const TermP &body) {
  auto fv = free_vars(body);
  std::string x = "u";
  for (int n = 1; fv.count(x); ++n)
    x = "u" + std::to_string(n);
  return x;
}

class Parser {
public:
  explicit Parser(const std::string &src) : ts_(tokenize(src, kPuncts, "--")) {}

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
  std::vector<std::string> scope_;
  // Innermost enclosing abstraction: null for `fun`, the yield type for `cor`.
  std::vector<TypeP> frames_;

  TypeP type() {
    TypeP a = type_atom();
    if (ts_.accept("->"))
      return fun_t(a, type());
    if (ts_.accept("~")) {
      TypeP y = type();
      ts_.expect("~>");
      return cor_t(a, y, type());
    }
    if (ts_.accept("<~>"))
      return inst_t(a, type());
    return a;
  }

  TypeP type_atom() {
    if (ts_.accept("Unit"))
      return unit_t();
    if (ts_.accept("Int"))
      return int_t();
    if (ts_.accept("Bot"))
      return bot_t();
    if (ts_.accept("Top"))
      return top_t();
    if (ts_.accept("(")) {
      TypeP t = type();
      ts_.expect(")");
      return t;
    }
    ts_.fail("expected a type");
  }

  // Wraps `body` (already parsed with `x` in scope) into an immediately
  // applied binder over `arg`.
  TermP sequence(const std::string &x, const TypeP &t, const TermP &arg, const TermP &body) {
    TypeP y = frames_.empty() ? nullptr : frames_.back();
    if (y && y->kind != TypeKind::Bot)
      return mk_app(mk_cor(x, t, y, body), arg);
    return mk_app(mk_abs(x, t, body), arg);
  }

  TermP seq() {
    TermP t = add();
    if (ts_.accept(";")) {
      TermP rest = seq();
      return sequence(fresh_unit_name(rest), unit_t(), t, rest);
    }
    return t;
  }

  TermP add() {
    TermP l = app();
    while (ts_.accept("+"))
      l = mk_add(l, app());
    return l;
  }

  TermP app() {
    TermP f = atom();
    while (ts_.is("(")) {
      ts_.next();
      TermP a = ts_.accept(")") ? mk_unit() : close(seq());
      f = mk_app(f, a);
    }
    return f;
  }

  TermP close(TermP t) {
    ts_.expect(")");
    return t;
  }

  std::string binder() {
    std::string x = ts_.ident();
    if (is_keyword(x))
      ts_.fail("keyword used as a variable name");
    return x;
  }

  TermP abstraction(bool coroutine) {
    ts_.expect("(");
    std::string x = binder();
    ts_.expect(":");
    TypeP t = type();
    ts_.expect(")");
    TypeP y;
    if (coroutine) {
      ts_.expect("yields");
      y = type();
    }
    ts_.expect("=>");
    scope_.push_back(x);
    frames_.push_back(y);
    TermP body = seq();
    frames_.pop_back();
    scope_.pop_back();
    return coroutine ? mk_cor(x, t, y, body) : mk_abs(x, t, body);
  }

  TermP atom() {
    const Token &tk = ts_.peek();
    if (tk.kind == Tok::Int)
      return mk_int(ts_.next().value);
    if (tk.kind == Tok::Punct) {
      if (ts_.accept("(")) {
        if (ts_.accept(")"))
          return mk_unit();
        return close(seq());
      }
      if (tk.text == "#" || tk.text == "<|" || tk.text == "[[" || tk.text == "%")
        ts_.fail("runtime-only form is not allowed in a program");
      ts_.fail("expected a term");
    }
    if (tk.kind != Tok::Ident)
      ts_.fail("expected a term");
    const std::string kw = tk.text;
    if (kw == "fun" || kw == "cor") {
      ts_.next();
      return abstraction(kw == "cor");
    }
    if (kw == "let") {
      ts_.next();
      std::string x = binder();
      ts_.expect(":");
      TypeP t = type();
      ts_.expect("=");
      TermP rhs = seq();
      ts_.expect("in");
      scope_.push_back(x);
      TermP body = seq();
      scope_.pop_back();
      return sequence(x, t, rhs, body);
    }
    if (kw == "yield" || kw == "snapshot" || kw == "fix") {
      ts_.next();
      ts_.expect("(");
      TermP a = close(seq());
      if (kw == "yield")
        return mk_yield(a);
      if (kw == "snapshot")
        return mk_snapshot(a);
      return mk_fix(a);
    }
    if (kw == "start") {
      ts_.next();
      ts_.expect("(");
      TermP c = seq();
      ts_.expect(",");
      TermP a = close(seq());
      return mk_start(c, a);
    }
    if (kw == "resume") {
      ts_.next();
      ts_.expect("(");
      TermP t = seq();
      ts_.expect(",");
      TermP h2 = seq();
      ts_.expect(",");
      TermP h3 = seq();
      ts_.expect(",");
      TermP h4 = close(seq());
      return mk_resume(t, h2, h3, h4);
    }
    if (is_keyword(kw))
      ts_.fail("unexpected keyword");
    if (std::find(scope_.rbegin(), scope_.rend(), kw) == scope_.rend())
      ts_.fail("unbound variable " + kw);
    ts_.next();
    return mk_var(kw);
  }
};

enum Prec { kSeq = 0, kAdd = 1, kApp = 2, kAtom = 3 };

void pt(std::ostream &os, const TypeP &t, bool atomic) {
  switch (t->kind) {
  case TypeKind::Unit: os << "Unit"; return;
  case TypeKind::Int: os << "Int"; return;
  case TypeKind::Bot: os << "Bot"; return;
  case TypeKind::Top: os << "Top"; return;
  default: break;
  }
  if (atomic)
    os << "(";
  switch (t->kind) {
  case TypeKind::Fun:
    pt(os, t->args[0], true);
    os << " -> ";
    pt(os, t->args[1], false);
    break;
  case TypeKind::Cor:
    pt(os, t->args[0], true);
    os << " ~";
    pt(os, t->args[1], true);
    os << "~> ";
    pt(os, t->args[2], false);
    break;
  case TypeKind::Inst:
    pt(os, t->args[0], true);
    os << " <~> ";
    pt(os, t->args[1], false);
    break;
  default:
    break;
  }
  if (atomic)
    os << ")";
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
  case TermKind::Var: os << t->name; return;
  case TermKind::Unit: os << "()"; return;
  case TermKind::Int: os << t->value; return;
  case TermKind::Inst: os << "#inst<" << t->label << ">"; return;
  case TermKind::Empty: os << "%empty"; return;
  case TermKind::Abs:
  case TermKind::Cor:
    open(kSeq);
    os << (t->kind == TermKind::Abs ? "fun (" : "cor (") << t->name << ": ";
    pt(os, t->annot, false);
    os << ")";
    if (t->kind == TermKind::Cor) {
      os << " yields ";
      pt(os, t->yield_annot, false);
    }
    os << " => ";
    pr(os, t->kids[0], kSeq);
    shut(kSeq);
    return;
  case TermKind::App:
    open(kApp);
    pr(os, t->kids[0], kApp);
    os << "(";
    pr(os, t->kids[1], kSeq);
    os << ")";
    shut(kApp);
    return;
  case TermKind::Add:
    open(kAdd);
    pr(os, t->kids[0], kAdd);
    os << " + ";
    pr(os, t->kids[1], kApp);
    shut(kAdd);
    return;
  case TermKind::Yield:
  case TermKind::Snapshot:
  case TermKind::Fix:
    os << (t->kind == TermKind::Yield ? "yield(" : t->kind == TermKind::Snapshot ? "snapshot(" : "fix(");
    pr(os, t->kids[0], kSeq);
    os << ")";
    return;
  case TermKind::Start:
  case TermKind::Resume:
    os << (t->kind == TermKind::Start ? "start(" : "resume(");
    for (size_t i = 0; i < t->kids.size(); ++i) {
      if (i)
        os << ", ";
      pr(os, t->kids[i], kSeq);
    }
    os << ")";
    return;
  case TermKind::Resumption:
    os << "<| ";
    for (size_t i = 0; i < 4; ++i) {
      if (i)
        os << " , ";
      pr(os, t->kids[i], kSeq);
    }
    os << " |>#" << t->label;
    return;
  case TermKind::Suspension:
    os << "[[ ";
    pr(os, t->kids[0], kSeq);
    os << " ]]^";
    pr(os, t->kids[1], kAtom);
    return;
  }
}

} // namespace

TermP parse_term(const std::string &src) { return Parser(src).program(); }

TypeP parse_type(const std::string &src) { return Parser(src).type_only(); }

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

} // namespace lsq
