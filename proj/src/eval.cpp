#include "lsq/eval.hpp"

#include "lsq/syntax.hpp"

namespace lsq {

namespace {

enum class RKind { Stepped, Value, Suspended, Stuck };

struct Red {
  RKind kind;
  TermP term;
  std::string rule;

  static Red stepped(TermP t, std::string rule) { return {RKind::Stepped, std::move(t), std::move(rule)}; }
  static Red stuck(std::string why) { return {RKind::Stuck, nullptr, std::move(why)}; }
};

bool is_suspended_empty(const TermP &t) {
  return t->kind == TermKind::Suspension && t->kids[1]->kind == TermKind::Empty;
}

// Evaluation positions of each form, left to right.
size_t positions(const TermP &t) {
  switch (t->kind) {
  case TermKind::App:
  case TermKind::Add:
  case TermKind::Start:
    return 2;
  case TermKind::Resume:
    return 4;
  case TermKind::Yield:
  case TermKind::Snapshot:
  case TermKind::Fix:
  case TermKind::Resumption:
    return 1;
  default:
    return 0;
  }
}

class Machine {
public:
  explicit Machine(InstanceStore &s) : s_(s) {}

  Red reduce(const TermP &t) {
    if (is_value(t))
      return {RKind::Value, t, ""};
    if (t->kind == TermKind::Suspension)
      return {RKind::Suspended, t, ""};
    if (t->kind == TermKind::Var)
      return Red::stuck("free variable " + t->name);
    size_t n = positions(t);
    for (size_t k = 0; k < n; ++k) {
      const TermP &kid = t->kids[k];
      if (is_value(kid))
        continue;
      Red r = reduce(kid);
      switch (r.kind) {
      case RKind::Stepped: {
        auto kids = t->kids;
        kids[k] = r.term;
        return Red::stepped(with_kids(t, std::move(kids)), std::move(r.rule));
      }
      case RKind::Suspended:
        if (t->kind == TermKind::Resumption)
          return capture(t, r.term);
        return pause(t, k, r.term);
      case RKind::Stuck:
        return r;
      case RKind::Value:
        break;
      }
    }
    return contract(t);
  }

private:
  InstanceStore &s_;

  // P[[[t]]^v] -> [[P[t]]]^v for a single non-resumption frame.
  static Red pause(const TermP &frame, size_t k, const TermP &susp) {
    auto kids = frame->kids;
    kids[k] = susp->kids[0];
    return Red::stepped(mk_suspension(with_kids(frame, std::move(kids)), susp->kids[1]), "E-Pause");
  }

  Red capture(const TermP &res, const TermP &susp) {
    auto it = s_.mu.find(res->label);
    if (it == s_.mu.end())
      return Red::stuck("unbound instance #" + std::to_string(res->label));
    if (it->second->kind != TermKind::Suspension)
      return Red::stuck("capture into a non-executing instance");
    const TermP &v = susp->kids[1];
    if (v->kind == TermKind::Empty)
      return Red::stuck("suspension without a pending value");
    it->second = susp->kids[0];
    return Red::stepped(mk_app(res->kids[2], v), "E-Capture");
  }

  Red contract(const TermP &t) {
    const auto &k = t->kids;
    switch (t->kind) {
    case TermKind::App:
      if (k[0]->kind == TermKind::Abs)
        return Red::stepped(substitute(k[0]->kids[0], k[0]->name, k[1]), "E-AppAbs");
      if (k[0]->kind == TermKind::Cor)
        return Red::stepped(substitute(k[0]->kids[0], k[0]->name, k[1]), "E-AppCor");
      return Red::stuck("application of a non-function");
    case TermKind::Add:
      if (k[0]->kind != TermKind::Int || k[1]->kind != TermKind::Int)
        return Red::stuck("addition of non-integers");
      return Red::stepped(mk_int(wrap_add(k[0]->value, k[1]->value)), "E-Add");
    case TermKind::Yield:
      return Red::stepped(mk_suspension(mk_unit(), k[0]), "E-Yield");
    case TermKind::Fix:
      if (k[0]->kind != TermKind::Abs)
        return Red::stuck("fix of a non-abstraction");
      return Red::stepped(substitute(k[0]->kids[0], k[0]->name, t), "E-Fix");
    case TermKind::Start: {
      if (k[0]->kind != TermKind::Cor)
        return Red::stuck("start of a non-coroutine");
      Label i = s_.next++;
      s_.mu[i] = substitute(k[0]->kids[0], k[0]->name, k[1]);
      s_.origin[i] = k[0];
      return Red::stepped(mk_inst(i), "E-Start");
    }
    case TermKind::Snapshot: {
      if (k[0]->kind != TermKind::Inst)
        return Red::stuck("snapshot of a non-instance");
      auto it = s_.mu.find(k[0]->label);
      if (it == s_.mu.end())
        return Red::stuck("unbound instance #" + std::to_string(k[0]->label));
      Label i2 = s_.next++;
      TermP body = it->second;
      s_.mu[i2] = body;
      s_.origin[i2] = s_.origin[k[0]->label];
      return Red::stepped(mk_inst(i2), "E-Snapshot");
    }
    case TermKind::Resume: {
      if (k[0]->kind != TermKind::Inst)
        return Red::stuck("resume of a non-instance");
      Label i = k[0]->label;
      auto it = s_.mu.find(i);
      if (it == s_.mu.end())
        return Red::stuck("unbound instance #" + std::to_string(i));
      if (is_suspended_empty(it->second))
        return Red::stepped(mk_app(k[3], mk_unit()), "E-Resume2");
      TermP body = it->second;
      it->second = mk_suspension(body, mk_empty());
      return Red::stepped(mk_resumption(body, k[1], k[2], k[3], i), "E-Resume1");
    }
    case TermKind::Resumption: {
      auto it = s_.mu.find(t->label);
      if (it == s_.mu.end())
        return Red::stuck("unbound instance #" + std::to_string(t->label));
      if (it->second->kind != TermKind::Suspension)
        return Red::stuck("termination of a non-executing instance");
      it->second = mk_suspension(k[0], mk_empty());
      return Red::stepped(mk_app(k[1], k[0]), "E-Terminate");
    }
    default:
      return Red::stuck("no rule applies");
    }
  }
};

} // namespace

StepOutcome step(const Configuration &c) {
  StepOutcome out;
  out.next.store = c.store;
  Machine m(out.next.store);
  Red r = m.reduce(c.term);
  switch (r.kind) {
  case RKind::Value:
    out.kind = StepKind::Finished;
    out.value = c.term;
    out.next.term = c.term;
    break;
  case RKind::Suspended:
    out.kind = StepKind::SuspendedAtTop;
    out.value = c.term->kids[1];
    out.rest = c.term->kids[0];
    out.next.term = c.term;
    break;
  case RKind::Stuck:
    out.kind = StepKind::Stuck;
    out.reason = r.rule;
    out.next.term = c.term;
    break;
  case RKind::Stepped:
    out.kind = StepKind::Stepped;
    out.next.term = r.term;
    out.rule = r.rule;
    break;
  }
  return out;
}

EvalResult eval(Configuration c, long fuel, const StepObserver &observe) {
  EvalResult res;
  res.steps = 0;
  for (;;) {
    // Step in place to avoid copying the store on every transition.
    Machine m(c.store);
    Red r = m.reduce(c.term);
    if (r.kind == RKind::Value) {
      res.status = EvalStatus::Finished;
      break;
    }
    if (r.kind == RKind::Suspended) {
      res.status = EvalStatus::SuspendedAtTop;
      break;
    }
    if (r.kind == RKind::Stuck) {
      res.status = EvalStatus::Stuck;
      res.reason = r.rule;
      break;
    }
    c.term = r.term;
    ++res.steps;
    if (observe)
      observe(c, r.rule);
    if (res.steps >= fuel) {
      if (is_value(c.term)) {
        res.status = EvalStatus::Finished;
        break;
      }
      res.status = EvalStatus::OutOfFuel;
      break;
    }
  }
  res.term = c.term;
  res.store = std::move(c.store);
  return res;
}

const char *status_name(EvalStatus s) {
  switch (s) {
  case EvalStatus::Finished: return "Finished";
  case EvalStatus::SuspendedAtTop: return "SuspendedAtTop";
  case EvalStatus::Stuck: return "Stuck";
  case EvalStatus::OutOfFuel: return "OutOfFuel";
  }
  return "?";
}

InstanceTyping instance_typing(const InstanceStore &s, Mode mode) {
  InstanceTyping sigma;
  // Labels are allocated in increasing order and an origin only mentions
  // labels older than the instance itself.
  for (auto &[i, c] : s.origin) {
    Judgment j = infer(sigma, {}, c, mode);
    if (j.type->kind == TypeKind::Cor)
      sigma[i] = inst_t(j.type->args[1], j.type->args[2]);
  }
  return sigma;
}

namespace {

TermP handler(const TypeP &param, TermP body) {
  return mk_cor("h", param, bot_t(), std::move(body));
}

} // namespace

DriveResult drive(const TermP &coroutine, const TermP &arg, int max_resumes, long fuel) {
  DriveResult out;
  Mode mode = Mode::Base;
  Judgment j = infer({}, {}, coroutine, mode);
  if (j.type->kind != TypeKind::Cor)
    throw TypeError(TypeErrorKind::NotACoroutine, "drive expects a coroutine");
  const TypeP &y = j.type->args[1];
  const TypeP &r = j.type->args[2];

  // Every handler returns Int so the resume typechecks in base mode.
  TermP h_ret = handler(r, r->kind == TypeKind::Int ? mk_var("h") : mk_int(0));
  TermP h_yield = handler(y, y->kind == TypeKind::Int ? mk_var("h") : mk_int(0));
  TermP h_dead = handler(unit_t(), mk_int(0));

  Configuration c{mk_start(coroutine, arg), {}};
  EvalResult started = eval(std::move(c), fuel);
  out.steps += started.steps;
  if (started.status != EvalStatus::Finished || started.term->kind != TermKind::Inst) {
    out.outcome = started.status == EvalStatus::OutOfFuel ? DriveOutcome::OutOfFuel : DriveOutcome::Stuck;
    out.reason = "start did not produce an instance: " + started.reason;
    return out;
  }
  Label i = started.term->label;
  InstanceStore store = std::move(started.store);

  for (int n = 0; n < max_resumes; ++n) {
    if (is_suspended_empty(store.mu.at(i))) {
      out.outcome = DriveOutcome::Dead;
      return out;
    }
    bool yielded = false;
    StepObserver watch = [&](const Configuration &after, const std::string &rule) {
      // Only a capture into i itself releases its executing marker; the
      // resumption of i is the whole term, so the capture leaves v3(v) on top.
      if (rule == "E-Capture" && !yielded && !is_suspended_empty(after.store.mu.at(i))) {
        out.yields.push_back(after.term->kids[1]);
        yielded = true;
      }
    };
    Configuration rc{mk_resume(mk_inst(i), h_ret, h_yield, h_dead), std::move(store)};
    EvalResult res = eval(std::move(rc), fuel, watch);
    out.steps += res.steps;
    store = std::move(res.store);
    if (res.status != EvalStatus::Finished) {
      out.outcome = res.status == EvalStatus::OutOfFuel ? DriveOutcome::OutOfFuel : DriveOutcome::Stuck;
      out.reason = res.reason;
      return out;
    }
    const TermP &b = store.mu.at(i);
    if (is_suspended_empty(b)) {
      out.outcome = DriveOutcome::Result;
      out.value = b->kids[0];
      return out;
    }
  }
  out.outcome = DriveOutcome::StillLive;
  return out;
}

} // namespace lsq
