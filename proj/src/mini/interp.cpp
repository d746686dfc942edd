#include "mini/interp.hpp"

#include <stdexcept>
#include <utility>

namespace mini {

std::string RunOutcome::str() const {
  std::string s = "yields [";
  for (size_t i = 0; i < yields.size(); ++i)
    s += (i ? "," : "") + yields[i].str();
  s += "]";
  if (result)
    s += " result " + result->str();
  if (exception)
    s += " exception " + exception->str();
  return s;
}

namespace {

struct Thrown {
  Value payload;
};

Value apply_binop(BinOp op, const Value &l, const Value &r) {
  switch (op) {
  case BinOp::Add: return Value::integer(l.as_int() + r.as_int());
  case BinOp::Sub: return Value::integer(l.as_int() - r.as_int());
  case BinOp::Lt: return Value::boolean(l.as_int() < r.as_int());
  case BinOp::Eq: return Value::boolean(l == r);
  case BinOp::Ne: return Value::boolean(l != r);
  case BinOp::And: return Value::boolean(l.as_bool() && r.as_bool());
  case BinOp::Or: return Value::boolean(l.as_bool() || r.as_bool());
  }
  return Value();
}

Value select(Field f, const Value &v) {
  switch (f) {
  case Field::Head: return v.head();
  case Field::Tail: return v.tail();
  case Field::IsNil: return Value::boolean(v.is_nil());
  }
  return Value();
}

class Interp {
public:
  Interp(const Program &p, long fuel) : prog_(p), fuel_(fuel) {}

  std::vector<Value> yields;

  Value call(int k, const std::vector<Value> &args) {
    const Coroutine &c = prog_.coroutines[k];
    if (args.size() != c.params.size())
      throw std::invalid_argument("wrong number of arguments for " + c.name);
    std::vector<std::pair<std::string, Value>> env;
    for (size_t i = 0; i < args.size(); ++i)
      env.emplace_back(c.params[i].name, args[i]);
    // The caller's bindings come back even when the callee throws.
    struct Swap {
      std::vector<std::pair<std::string, Value>> &a, &b;
      Swap(std::vector<std::pair<std::string, Value>> &a, std::vector<std::pair<std::string, Value>> &b)
          : a(a), b(b) {
        std::swap(a, b);
      }
      ~Swap() { std::swap(a, b); }
    } guard(env, env_);
    // The trailing result sees the body's top-level bindings.
    for (auto &s : c.body)
      exec(*s);
    return c.result ? eval(c.result) : Value::unit();
  }

private:
  const Program &prog_;
  long fuel_;
  // Innermost binding last; blocks truncate back to their entry size.
  std::vector<std::pair<std::string, Value>> env_;

  void tick() {
    if (--fuel_ < 0)
      throw OutOfFuel();
  }

  Value &lookup(const std::string &x) {
    for (size_t i = env_.size(); i-- > 0;)
      if (env_[i].first == x)
        return env_[i].second;
    throw DynamicError("unbound variable " + x);
  }

  Value eval(const ExprP &e) {
    tick();
    switch (e->kind) {
    case ExprKind::Int: return Value::integer(e->value);
    case ExprKind::Bool: return Value::boolean(e->value != 0);
    case ExprKind::Unit: return Value::unit();
    case ExprKind::Nil: return Value::nil();
    case ExprKind::Var: return lookup(e->name);
    case ExprKind::List: {
      std::vector<Value> items;
      for (auto &a : e->args)
        items.push_back(eval(a));
      return Value::list(std::move(items));
    }
    case ExprKind::Binary: {
      Value l = eval(e->args[0]);
      if (e->op == BinOp::And && !l.as_bool())
        return Value::boolean(false);
      if (e->op == BinOp::Or && l.as_bool())
        return Value::boolean(true);
      return apply_binop(e->op, l, eval(e->args[1]));
    }
    case ExprKind::Select: return select(e->field, eval(e->args[0]));
    case ExprKind::Call: {
      std::vector<Value> args;
      for (auto &a : e->args)
        args.push_back(eval(a));
      int k = prog_.find(e->name);
      if (k < 0)
        throw DynamicError("call to undefined coroutine " + e->name);
      return call(k, args);
    }
    case ExprKind::Yield: yields.push_back(eval(e->args[0])); return Value::unit();
    }
    return Value();
  }

  void run(const Block &b) {
    size_t mark = env_.size();
    for (auto &s : b)
      exec(*s);
    env_.resize(mark);
  }

  void exec(const Stmt &s) {
    tick();
    switch (s.kind) {
    case StmtKind::Decl: {
      Value v = s.expr ? eval(s.expr) : Value::unit();
      env_.emplace_back(s.name, std::move(v));
      return;
    }
    case StmtKind::Assign: {
      Value v = eval(s.expr);
      lookup(s.name) = std::move(v);
      return;
    }
    case StmtKind::Expr: eval(s.expr); return;
    case StmtKind::While:
      while (eval(s.expr).as_bool()) {
        run(s.body);
        tick();
      }
      return;
    case StmtKind::If:
      if (eval(s.expr).as_bool())
        run(s.body);
      else
        run(s.alt);
      return;
    case StmtKind::Throw: throw Thrown{eval(s.expr)};
    case StmtKind::Try: {
      size_t mark = env_.size();
      try {
        run(s.body);
      } catch (Thrown &t) {
        env_.resize(mark);
        env_.emplace_back(s.name, t.payload);
        run(s.alt);
        env_.resize(mark);
      }
      return;
    }
    }
  }
};

} // namespace

RunOutcome direct_run(const Program &p, const std::string &entry, const std::vector<Value> &args, long fuel) {
  int k = p.find(entry);
  if (k < 0)
    throw std::invalid_argument("unknown coroutine " + entry);
  Interp in(p, fuel);
  RunOutcome out;
  try {
    out.result = in.call(k, args);
  } catch (Thrown &t) {
    out.exception = t.payload;
  }
  out.yields = std::move(in.yields);
  return out;
}

} // namespace mini
