#include "lsq/typecheck.hpp"

#include "lsq/syntax.hpp"

namespace lsq {

bool subtype(const TypeP &s, const TypeP &t) {
  if (s->kind == TypeKind::Bot || t->kind == TypeKind::Top)
    return true;
  if (s->kind != t->kind)
    return false;
  const auto &a = s->args;
  const auto &b = t->args;
  switch (s->kind) {
  case TypeKind::Fun:
    return subtype(b[0], a[0]) && subtype(a[1], b[1]);
  case TypeKind::Cor:
    return subtype(b[0], a[0]) && subtype(a[1], b[1]) && subtype(a[2], b[2]);
  case TypeKind::Inst:
    return subtype(a[0], b[0]) && subtype(a[1], b[1]);
  default:
    return true; // Unit, Int, Top, Bot against themselves
  }
}

namespace {
TypeP lattice(const TypeP &s, const TypeP &t, bool up) {
  TypeKind least = up ? TypeKind::Bot : TypeKind::Top;
  TypeKind most = up ? TypeKind::Top : TypeKind::Bot;
  if (s->kind == least)
    return t;
  if (t->kind == least)
    return s;
  if (s->kind == most || t->kind == most)
    return up ? top_t() : bot_t();
  if (s->kind != t->kind)
    return up ? top_t() : bot_t();
  const auto &a = s->args;
  const auto &b = t->args;
  switch (s->kind) {
  case TypeKind::Fun:
    return fun_t(lattice(a[0], b[0], !up), lattice(a[1], b[1], up));
  case TypeKind::Cor:
    return cor_t(lattice(a[0], b[0], !up), lattice(a[1], b[1], up), lattice(a[2], b[2], up));
  case TypeKind::Inst:
    return inst_t(lattice(a[0], b[0], up), lattice(a[1], b[1], up));
  default:
    return s;
  }
}
} // namespace

TypeP join(const TypeP &s, const TypeP &t) { return lattice(s, t, true); }
TypeP meet(const TypeP &s, const TypeP &t) { return lattice(s, t, false); }

bool conforms(const TypeP &s, const TypeP &t, Mode mode) {
  if (mode == Mode::Subtyping)
    return subtype(s, t);
  return type_eq(s, t);
}

bool yield_fits(const TypeP &y, const TypeP &ty, Mode mode) {
  if (y->kind == TypeKind::Bot)
    return true;
  return mode == Mode::Subtyping ? subtype(y, ty) : type_eq(y, ty);
}

namespace {

std::string show(const TypeP &t) { return print_type(t); }

class Checker {
public:
  Checker(const InstanceTyping &sigma, TypingContext gamma, Mode mode)
      : sigma_(sigma), gamma_(std::move(gamma)), mode_(mode) {}

  Judgment run(const TermP &t) {
    switch (t->kind) {
    case TermKind::Var:
      return {lookup(t->name), bot_t()};
    case TermKind::Unit:
      return {unit_t(), bot_t()};
    case TermKind::Int:
      return {int_t(), bot_t()};
    case TermKind::Add: {
      Judgment l = run(t->kids[0]), r = run(t->kids[1]);
      if (!conforms(l.type, int_t(), mode_) || !conforms(r.type, int_t(), mode_))
        throw TypeError(TypeErrorKind::AddOperand,
                        "operands of + must be Int, got " + show(l.type) + " and " + show(r.type));
      return {int_t(), combine({l.yield, r.yield})};
    }
    case TermKind::Abs: {
      annotation(t->annot);
      Judgment b = bind(t->name, t->annot, t->kids[0]);
      if (b.yield->kind != TypeKind::Bot)
        throw TypeError(TypeErrorKind::YieldInFunction,
                        "function body yields " + show(b.yield) + "; only coroutines may yield");
      return {fun_t(t->annot, b.type), bot_t()};
    }
    case TermKind::Cor: {
      annotation(t->annot);
      annotation(t->yield_annot);
      Judgment b = bind(t->name, t->annot, t->kids[0]);
      if (!yield_fits(b.yield, t->yield_annot, mode_))
        throw TypeError(TypeErrorKind::YieldMismatch, "coroutine body yields " + show(b.yield) +
                                                          " but declares " + show(t->yield_annot));
      return {cor_t(t->annot, t->yield_annot, b.type), bot_t()};
    }
    case TermKind::App:
      return app(t);
    case TermKind::Yield: {
      Judgment a = run(t->kids[0]);
      if (mode_ == Mode::Subtyping)
        return {unit_t(), join(a.type, a.yield)};
      if (a.yield->kind != TypeKind::Bot && !type_eq(a.yield, a.type))
        throw TypeError(TypeErrorKind::YieldMismatch,
                        "yielded " + show(a.type) + " where " + show(a.yield) + " is yielded");
      return {unit_t(), a.type};
    }
    case TermKind::Start: {
      Judgment c = run(t->kids[0]), a = run(t->kids[1]);
      TypeP ct = coroutine_type(c.type, "start");
      if (!conforms(a.type, ct->args[0], mode_))
        throw TypeError(TypeErrorKind::ArgumentMismatch, "start argument has type " +
                                                             show(a.type) + ", expected " +
                                                             show(ct->args[0]));
      return {inst_t(ct->args[1], ct->args[2]), combine({c.yield, a.yield})};
    }
    case TermKind::Snapshot: {
      Judgment a = run(t->kids[0]);
      return {instance_type(a.type), a.yield};
    }
    case TermKind::Resume: {
      Judgment i = run(t->kids[0]);
      TypeP it = instance_type(i.type);
      std::vector<TypeP> ys{i.yield};
      TypeP r = handlers(it, t, ys);
      return {r, combine(ys)};
    }
    case TermKind::Fix: {
      Judgment f = run(t->kids[0]);
      if (mode_ == Mode::Subtyping && f.type->kind == TypeKind::Bot)
        return {bot_t(), f.yield};
      if (f.type->kind != TypeKind::Fun)
        throw TypeError(TypeErrorKind::FixMismatch, "fix expects T -> T, got " + show(f.type));
      const TypeP &p = f.type->args[0], &r = f.type->args[1];
      if (!(mode_ == Mode::Subtyping ? subtype(r, p) : type_eq(r, p)))
        throw TypeError(TypeErrorKind::FixMismatch, "fix expects T -> T, got " + show(f.type));
      return {r, f.yield};
    }
    case TermKind::Inst:
      return {label_type(t->label), bot_t()};
    case TermKind::Empty:
      return {bot_t(), bot_t()};
    case TermKind::Suspension: {
      Judgment b = run(t->kids[0]);
      if (t->kids[1]->kind == TermKind::Empty)
        return b;
      Judgment v = run(t->kids[1]);
      return {b.type, combine({b.yield, v.type})};
    }
    case TermKind::Resumption: {
      TypeP it = label_type(t->label);
      Judgment b = run(t->kids[0]);
      if (!conforms(b.type, it->args[1], mode_))
        throw TypeError(TypeErrorKind::ArgumentMismatch,
                        "resumption body has type " + show(b.type) + ", instance returns " +
                            show(it->args[1]));
      if (!yield_fits(b.yield, it->args[0], mode_))
        throw TypeError(TypeErrorKind::YieldMismatch,
                        "resumption body yields " + show(b.yield) + ", instance yields " +
                            show(it->args[0]));
      std::vector<TypeP> ys;
      TypeP r = handlers(it, t, ys);
      return {r, combine(ys)};
    }
    }
    throw TypeError(TypeErrorKind::RuntimeForm, "unknown term");
  }

private:
  const InstanceTyping &sigma_;
  TypingContext gamma_;
  Mode mode_;

  TypeP lookup(const std::string &x) const {
    for (size_t i = gamma_.size(); i-- > 0;)
      if (gamma_[i].first == x)
        return gamma_[i].second;
    throw TypeError(TypeErrorKind::UnboundVariable, "unbound variable " + x);
  }

  TypeP label_type(Label i) const {
    auto it = sigma_.find(i);
    if (it == sigma_.end())
      throw TypeError(TypeErrorKind::UnboundLabel, "unknown instance #" + std::to_string(i));
    return it->second;
  }

  void annotation(const TypeP &t) const {
    if (mode_ == Mode::Base && contains_top(t))
      throw TypeError(TypeErrorKind::TopInBaseMode, "Top is only available with subtyping");
  }

  Judgment bind(const std::string &x, const TypeP &t, const TermP &body) {
    gamma_.emplace_back(x, t);
    Judgment j = run(body);
    gamma_.pop_back();
    return j;
  }

  // Bot is the unit; base mode demands agreement, subtyping joins.
  TypeP combine(const std::vector<TypeP> &ys) const {
    TypeP acc = bot_t();
    for (auto &y : ys) {
      if (y->kind == TypeKind::Bot)
        continue;
      if (acc->kind == TypeKind::Bot) {
        acc = y;
      } else if (mode_ == Mode::Subtyping) {
        acc = join(acc, y);
      } else if (!type_eq(acc, y)) {
        throw TypeError(TypeErrorKind::YieldMismatch,
                        "conflicting yield types " + show(acc) + " and " + show(y));
      }
    }
    return acc;
  }

  // Under subtyping, Bot is a subtype of every coroutine type and is read as Bot ~Bot~> Bot
  // with the parameter position widened to Top.
  TypeP coroutine_type(const TypeP &t, const char *what) const {
    if (t->kind == TypeKind::Cor)
      return t;
    if (mode_ == Mode::Subtyping && t->kind == TypeKind::Bot)
      return cor_t(top_t(), bot_t(), bot_t());
    throw TypeError(TypeErrorKind::NotACoroutine,
                    std::string(what) + " expects a coroutine, got " + show(t));
  }

  TypeP instance_type(const TypeP &t) const {
    if (t->kind == TypeKind::Inst)
      return t;
    if (mode_ == Mode::Subtyping && t->kind == TypeKind::Bot)
      return inst_t(bot_t(), bot_t());
    throw TypeError(TypeErrorKind::NotAnInstance, "expected a coroutine instance, got " + show(t));
  }

  Judgment app(const TermP &t) {
    Judgment f = run(t->kids[0]), a = run(t->kids[1]);
    const TypeP &ft = f.type;
    if (mode_ == Mode::Subtyping && ft->kind == TypeKind::Bot)
      return {bot_t(), combine({f.yield, a.yield})};
    if (ft->kind == TypeKind::Fun) {
      if (!conforms(a.type, ft->args[0], mode_))
        throw TypeError(TypeErrorKind::ArgumentMismatch, "argument has type " + show(a.type) +
                                                             ", expected " + show(ft->args[0]));
      return {ft->args[1], combine({f.yield, a.yield})};
    }
    if (ft->kind == TypeKind::Cor) {
      if (!conforms(a.type, ft->args[0], mode_))
        throw TypeError(TypeErrorKind::ArgumentMismatch, "argument has type " + show(a.type) +
                                                             ", expected " + show(ft->args[0]));
      return {ft->args[2], combine({f.yield, a.yield, ft->args[1]})};
    }
    throw TypeError(TypeErrorKind::NotApplicable, "cannot apply a value of type " + show(ft));
  }

  // Types the three handler positions of a resume or resumption against the
  // instance type `it`; appends their yields to `ys` and returns T_R.
  TypeP handlers(const TypeP &it, const TermP &t, std::vector<TypeP> &ys) {
    const TypeP expect[3] = {it->args[1], it->args[0], unit_t()};
    const char *names[3] = {"return", "yield", "dead"};
    TypeP result;
    for (int k = 0; k < 3; ++k) {
      Judgment h = run(t->kids[k + 1]);
      ys.push_back(h.yield);
      TypeP ht = coroutine_type(h.type, "resume handler");
      if (!conforms(expect[k], ht->args[0], mode_))
        throw TypeError(TypeErrorKind::HandlerMismatch,
                        std::string(names[k]) + " handler takes " + show(ht->args[0]) +
                            ", expected " + show(expect[k]));
      ys.push_back(ht->args[1]);
      const TypeP &r = ht->args[2];
      if (!result) {
        result = r;
      } else if (mode_ == Mode::Subtyping) {
        result = join(result, r);
      } else if (!type_eq(result, r)) {
        throw TypeError(TypeErrorKind::HandlerMismatch,
                        "resume handlers return " + show(result) + " and " + show(r));
      }
    }
    return result;
  }
};

} // namespace

Judgment infer(const InstanceTyping &sigma, const TypingContext &gamma, const TermP &t, Mode mode) {
  return Checker(sigma, gamma, mode).run(t);
}

TypeP check_user_program(const TermP &t, Mode mode) {
  if (contains_runtime_form(t))
    throw TypeError(TypeErrorKind::RuntimeForm, "user programs may not contain runtime forms");
  Judgment j = infer({}, {}, t, mode);
  if (j.yield->kind != TypeKind::Bot)
    throw TypeError(TypeErrorKind::NonBottomYield,
                    "program yields " + print_type(j.yield) + " at top level");
  return j.type;
}

bool instance_well_typed(const InstanceTyping &sigma, Label i, const TermP &term, Mode mode) {
  auto s = sigma.find(i);
  if (s == sigma.end() || s->second->kind != TypeKind::Inst)
    return false;
  try {
    Judgment j = infer(sigma, {}, term, mode);
    return conforms(j.type, s->second->args[1], mode) && yield_fits(j.yield, s->second->args[0], mode);
  } catch (const TypeError &) {
    return false;
  }
}

bool store_well_typed(const InstanceTyping &sigma, const InstanceMap &mu, Mode mode) {
  if (sigma.size() != mu.size())
    return false;
  for (auto &[i, term] : mu)
    if (!instance_well_typed(sigma, i, term, mode))
      return false;
  return true;
}

} // namespace lsq
