#include "mini/runtime.hpp"

#include <algorithm>

namespace mini {

namespace {

enum class Flow { Normal, Exit, Throw };

Value apply(BinOp op, const Value &l, const Value &r) {
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

void push_frame(Instance &in, int k, const std::vector<Value> &args) {
  const CompiledCoroutine &c = in.program->coroutines[k];
  size_t base = in.vstack.size();
  in.vstack.resize(base + c.slot_count);
  for (size_t i = 0; i < args.size(); ++i)
    in.vstack[base + i] = args[i];
  in.cstack.push(k);
  in.pstack.push(0);
  in.bstack.push(base);
  in.max_frames = std::max(in.max_frames, in.cstack.size());
}

// Removes the top frame and hands control back to the caller, if any.
void pop_frame(Instance &in) {
  in.vstack.resize(in.bstack.top());
  in.cstack.pop();
  in.pstack.pop();
  in.bstack.pop();
  if (in.cstack.empty())
    in.live = false;
  else
    in.call = true;
}

class EntryRun {
public:
  EntryRun(Instance &in) : in_(in), c_(in.program->coroutines[in.cstack.top()]), base_(in.bstack.top()) {
    locals_.resize(c_.slot_count);
  }

  void run(const EntryPoint &ep) {
    for (int v : ep.loads)
      locals_[v] = in_.vstack[base_ + v];
    if (block(ep.code, 1) == Flow::Throw) {
      // Only reachable when no Unwind wraps the code; the frame dies.
      in_.exception = pending_;
      pop_frame(in_);
    }
  }

private:
  Instance &in_;
  const CompiledCoroutine &c_;
  size_t base_;
  std::vector<Value> locals_;
  Value pending_;

  Value atom(const Atom &a) const { return a.is_var() ? locals_[a.var] : a.constant; }

  Value eval(const Rhs &r) const {
    switch (r.kind) {
    case RhsKind::Atom: return atom(r.args[0]);
    case RhsKind::Binary: return apply(r.op, atom(r.args[0]), atom(r.args[1]));
    case RhsKind::Select: {
      Value v = atom(r.args[0]);
      switch (r.field) {
      case Field::Head: return v.head();
      case Field::Tail: return v.tail();
      case Field::IsNil: return Value::boolean(v.is_nil());
      }
      return Value();
    }
    case RhsKind::List: {
      std::vector<Value> items;
      for (auto &a : r.args)
        items.push_back(atom(a));
      return Value::list(std::move(items));
    }
    case RhsKind::Default: return Value::unit();
    case RhsKind::Call:
    case RhsKind::Yield: break;
    }
    throw DynamicError("suspending operation outside an exit");
  }

  void tick() {
    ++in_.steps;
    if (in_.fuel >= 0 && --in_.fuel < 0)
      throw OutOfFuel();
  }

  void store(const std::vector<int> &vars) {
    for (int v : vars)
      in_.vstack[base_ + v] = locals_[v];
  }

  Flow block(const std::vector<Op> &ops, size_t depth) {
    in_.max_host_depth = std::max(in_.max_host_depth, depth);
    for (auto &op : ops) {
      Flow f = exec(op, depth);
      if (f != Flow::Normal)
        return f;
    }
    return Flow::Normal;
  }

  Flow exec(const Op &op, size_t depth) {
    tick();
    switch (op.kind) {
    case OpKind::Exec:
      if (op.var >= 0)
        locals_[op.var] = eval(op.rhs);
      else
        eval(op.rhs);
      return Flow::Normal;
    case OpKind::Load: locals_[op.var] = in_.vstack[base_ + op.var]; return Flow::Normal;
    case OpKind::Landing: locals_[op.var] = Value::unit(); return Flow::Normal;
    case OpKind::TakeResult:
      if (in_.exception) {
        pending_ = *in_.exception;
        in_.exception.reset();
        return Flow::Throw;
      }
      locals_[op.var] = in_.result.value_or(Value::unit());
      in_.result.reset();
      return Flow::Normal;
    case OpKind::While:
      while (atom(op.a).as_bool()) {
        Flow f = block(op.body, depth + 1);
        if (f != Flow::Normal)
          return f;
        tick();
      }
      return Flow::Normal;
    case OpKind::If: return block(atom(op.a).as_bool() ? op.body : op.alt, depth + 1);
    case OpKind::Block: return block(op.body, depth + 1);
    case OpKind::Try: {
      Flow f = block(op.body, depth + 1);
      if (f != Flow::Throw)
        return f;
      locals_[op.var] = pending_;
      return block(op.alt, depth + 1);
    }
    case OpKind::Unwind: {
      Flow f = block(op.body, depth + 1);
      if (f != Flow::Throw)
        return f;
      in_.exception = pending_;
      pop_frame(in_);
      return Flow::Exit;
    }
    case OpKind::Throw: pending_ = atom(op.a); return Flow::Throw;
    case OpKind::YieldExit:
      store(op.stores);
      in_.value = atom(op.a);
      in_.pstack.top() = op.pc;
      return Flow::Exit;
    case OpKind::CallExit: {
      store(op.stores);
      std::vector<Value> args;
      for (auto &a : op.rhs.args)
        args.push_back(atom(a));
      in_.pstack.top() = op.pc;
      push_frame(in_, op.rhs.callee, args);
      in_.call = true;
      return Flow::Exit;
    }
    case OpKind::ThrowExit:
      in_.exception = atom(op.a);
      pop_frame(in_);
      return Flow::Exit;
    case OpKind::ReturnExit:
      in_.result = atom(op.a);
      pop_frame(in_);
      return Flow::Exit;
    }
    return Flow::Normal;
  }
};

} // namespace

Instance start_instance(const CompiledProgram &p, const std::string &coroutine, const std::vector<Value> &args) {
  int k = p.find(coroutine);
  if (k < 0)
    throw RuntimeFault(RuntimeFault::Kind::UnknownCoroutine, "unknown coroutine " + coroutine);
  if (static_cast<int>(args.size()) != p.coroutines[k].arity)
    throw RuntimeFault(RuntimeFault::Kind::Arity, "coroutine " + coroutine + " expects " +
                                                      std::to_string(p.coroutines[k].arity) + " arguments");
  Instance in;
  in.program = &p;
  push_frame(in, k, args);
  return in;
}

bool resume_instance(Instance &in) {
  if (!in.live)
    throw RuntimeFault(RuntimeFault::Kind::ResumeOnDead, "resume on a finished instance");
  in.value.reset();
  do {
    in.call = false;
    const CompiledCoroutine &c = in.program->coroutines[in.cstack.top()];
    EntryRun(in).run(c.dispatcher.at(in.pstack.top()));
  } while (in.call);
  return in.live;
}

Instance snapshot_instance(const Instance &in) { return in; }

namespace {
Value field(const std::optional<Value> &v, const char *name) {
  if (!v)
    throw RuntimeFault(RuntimeFault::Kind::FieldUnset, std::string(name) + " is not set");
  return *v;
}
} // namespace

Value read_value(const Instance &in) { return field(in.value, "value"); }
Value read_result(const Instance &in) { return field(in.result, "result"); }
Value read_exception(const Instance &in) { return field(in.exception, "exception"); }

RunOutcome run_compiled(const CompiledProgram &p, const std::string &coroutine, const std::vector<Value> &args,
                        long fuel) {
  Instance in = start_instance(p, coroutine, args);
  in.fuel = fuel;
  RunOutcome out;
  while (resume_instance(in))
    out.yields.push_back(read_value(in));
  out.result = in.result;
  out.exception = in.exception;
  return out;
}

} // namespace mini
