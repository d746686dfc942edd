#include "mini/normalize.hpp"

#include <set>

namespace mini {

namespace {

void collect_names(const Block &b, std::set<std::string> &out);

void collect_names(const ExprP &e, std::set<std::string> &out) {
  if (!e)
    return;
  if (e->kind == ExprKind::Var)
    out.insert(e->name);
  for (auto &a : e->args)
    collect_names(a, out);
}

void collect_names(const Block &b, std::set<std::string> &out) {
  for (auto &s : b) {
    if (!s->name.empty())
      out.insert(s->name);
    collect_names(s->expr, out);
    collect_names(s->body, out);
    collect_names(s->alt, out);
  }
}

std::set<std::string> reads(const Block &cw, const ExprP &xw) {
  std::set<std::string> r;
  collect_names(cw, r);
  collect_names(xw, r);
  return r;
}

bool declares_any(const Block &b, const std::set<std::string> &names) {
  for (auto &s : b)
    if ((s->kind == StmtKind::Decl || s->kind == StmtKind::Try) && names.count(s->name))
      return true;
  return false;
}

class Normalizer {
public:
  explicit Normalizer(const Coroutine &c) {
    for (auto &p : c.params)
      used_.insert(p.name);
    collect_names(c.body, used_);
    collect_names(c.result, used_);
  }

  Block block(const Block &b) {
    Block out;
    for (auto &s : b)
      stmt(s, out);
    return out;
  }

  // Emits the statements computing `e` and returns an atom holding its value.
  ExprP operand(const ExprP &e, Block &out) {
    if (e->atomic())
      return e;
    ExprP r = simple(e, out);
    if (r->atomic())
      return r;
    std::string x = fresh();
    out.push_back(s_decl(x, r));
    return e_var(x);
  }

private:
  std::set<std::string> used_;
  int counter_ = 0;

  std::string fresh() {
    std::string x;
    do
      x = "x_" + std::to_string(counter_++);
    while (used_.count(x));
    used_.insert(x);
    return x;
  }

  std::vector<ExprP> operands(const std::vector<ExprP> &es, Block &out) {
    std::vector<ExprP> r;
    for (auto &e : es)
      r.push_back(operand(e, out));
    return r;
  }

  // Emits the statements computing the operands of `e` and returns a single
  // operation over atoms.
  ExprP simple(const ExprP &e, Block &out) {
    switch (e->kind) {
    case ExprKind::Int:
    case ExprKind::Bool:
    case ExprKind::Unit:
    case ExprKind::Nil:
    case ExprKind::Var: return e;
    case ExprKind::List: return e_list(operands(e->args, out));
    case ExprKind::Select: return e_sel(e->field, operand(e->args[0], out));
    case ExprKind::Call: return e_call(e->name, operands(e->args, out));
    case ExprKind::Yield: return e_yield(operand(e->args[0], out));
    case ExprKind::Binary:
      if (e->op == BinOp::And || e->op == BinOp::Or) {
        ExprP l = operand(e->args[0], out);
        std::string x = fresh();
        out.push_back(s_decl(x, nullptr));
        Block rhs;
        ExprP r = operand(e->args[1], rhs);
        rhs.push_back(s_assign(x, r));
        Block shortcut = {s_assign(x, e_bool(e->op == BinOp::Or))};
        if (e->op == BinOp::Or)
          out.push_back(s_if(l, shortcut, rhs));
        else
          out.push_back(s_if(l, rhs, shortcut));
        return e_var(x);
      } else {
        ExprP l = operand(e->args[0], out);
        ExprP r = operand(e->args[1], out);
        return e_bin(e->op, l, r);
      }
    }
    return e;
  }

  void stmt(const StmtP &s, Block &out) {
    switch (s->kind) {
    case StmtKind::Decl:
      out.push_back(s_decl(s->name, s->expr ? simple(s->expr, out) : nullptr));
      return;
    case StmtKind::Assign: {
      ExprP a = operand(s->expr, out);
      out.push_back(s_assign(s->name, a));
      return;
    }
    case StmtKind::Expr: {
      if (s->expr->atomic())
        return;
      ExprP r = simple(s->expr, out);
      if (!r->atomic())
        out.push_back(s_decl(fresh(), r));
      return;
    }
    case StmtKind::Throw: {
      ExprP a = operand(s->expr, out);
      out.push_back(s_throw(a));
      return;
    }
    case StmtKind::If: {
      ExprP c = operand(s->expr, out);
      Block t = block(s->body);
      Block f = block(s->alt);
      out.push_back(s_if(c, t, f));
      return;
    }
    case StmtKind::Try: {
      Block b = block(s->body);
      Block h = block(s->alt);
      out.push_back(s_try(b, s->name, h));
      return;
    }
    case StmtKind::While: {
      if (s->expr->atomic()) {
        out.push_back(s_while(s->expr, block(s->body)));
        return;
      }
      // The condition code runs once before the loop and again, under the
      // same names, at the end of every iteration.
      Block cw;
      ExprP xw = operand(s->expr, cw);
      std::string x = fresh();
      for (auto &c : cw)
        out.push_back(c);
      out.push_back(s_decl(x, xw));
      Block body = block(s->body);
      if (declares_any(body, reads(cw, xw)))
        // A body declaration would capture a name the condition reads.
        body = {s_if(e_bool(true), body, {})};
      for (auto &c : cw)
        body.push_back(c);
      body.push_back(s_assign(x, xw));
      out.push_back(s_while(e_var(x), body));
      return;
    }
    }
  }
};

bool atoms(const std::vector<ExprP> &es) {
  for (auto &e : es)
    if (!e->atomic())
      return false;
  return true;
}

bool simple_rhs(const ExprP &e) {
  switch (e->kind) {
  case ExprKind::Binary:
    return e->op != BinOp::And && e->op != BinOp::Or && atoms(e->args);
  case ExprKind::List:
  case ExprKind::Select:
  case ExprKind::Call:
  case ExprKind::Yield: return atoms(e->args);
  default: return e->atomic();
  }
}

bool normalized_block(const Block &b) {
  for (auto &s : b) {
    switch (s->kind) {
    case StmtKind::Decl:
      if (s->expr && !simple_rhs(s->expr))
        return false;
      break;
    case StmtKind::Assign:
    case StmtKind::Throw:
      if (!s->expr->atomic())
        return false;
      break;
    case StmtKind::Expr: return false;
    case StmtKind::While:
    case StmtKind::If:
      if (!s->expr->atomic() || !normalized_block(s->body) || !normalized_block(s->alt))
        return false;
      break;
    case StmtKind::Try:
      if (!normalized_block(s->body) || !normalized_block(s->alt))
        return false;
      break;
    }
  }
  return true;
}

} // namespace

Coroutine normalize(const Coroutine &c) {
  Normalizer n(c);
  Coroutine out = c;
  out.body = n.block(c.body);
  out.result = n.operand(c.result ? c.result : e_unit(), out.body);
  return out;
}

Program normalize(const Program &p) {
  Program out;
  for (auto &c : p.coroutines)
    out.coroutines.push_back(normalize(c));
  return out;
}

bool is_normalized(const Coroutine &c) {
  return normalized_block(c.body) && (!c.result || c.result->atomic());
}

bool is_normalized(const Program &p) {
  for (auto &c : p.coroutines)
    if (!is_normalized(c))
      return false;
  return true;
}

} // namespace mini
