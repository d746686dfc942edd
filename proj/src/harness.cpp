#include "lsq/harness.hpp"

#include "lsq/cps.hpp"
#include "lsq/generator.hpp"
#include "lsq/syntax.hpp"
#include "lsq/target.hpp"

#include <json.hpp>

namespace lsq {

namespace {
struct Violation {
  std::string why;
};
} // namespace

MetaOutcome check_metatheory(const TermP &program, Mode mode, long fuel) {
  MetaOutcome out;
  Judgment j0;
  try {
    j0 = infer({}, {}, program, mode);
  } catch (const TypeError &e) {
    out.ok = false;
    out.violation = std::string("program does not typecheck: ") + e.what();
    return out;
  }
  // Σ is extended label by label: an origin never changes once recorded.
  InstanceTyping sigma;
  InstanceMap seen;
  auto check = [&](const Configuration &c, const std::string &rule) {
    for (auto it = c.store.origin.upper_bound(sigma.empty() ? -1 : sigma.rbegin()->first);
         it != c.store.origin.end(); ++it) {
      Judgment jo = infer(sigma, {}, it->second, mode);
      if (jo.type->kind != TypeKind::Cor)
        throw Violation{"instance origin is not a coroutine"};
      sigma[it->first] = inst_t(jo.type->args[1], jo.type->args[2]);
    }
    if (sigma.size() != c.store.mu.size())
      throw Violation{"instance typing and store disagree on their labels"};
    for (auto &[i, t] : c.store.mu) {
      auto old = seen.find(i);
      if (old != seen.end() && old->second == t)
        continue;
      seen[i] = t;
      if (!instance_well_typed(sigma, i, t, mode))
        throw Violation{"store is ill-typed at #" + std::to_string(i) + " after " + rule + ": " +
                        print_term(t)};
    }
    Judgment j;
    try {
      j = infer(sigma, {}, c.term, mode);
    } catch (const TypeError &e) {
      throw Violation{"term is ill-typed after " + rule + ": " + e.what() + "\n" + print_term(c.term)};
    }
    bool same_type = mode == Mode::Base ? type_eq(j.type, j0.type) : subtype(j.type, j0.type);
    if (!same_type || !yield_fits(j.yield, j0.yield, mode))
      throw Violation{"type changed after " + rule + ": " + print_type(j.type) + " | " +
                      print_type(j.yield)};
  };
  try {
    EvalResult r = eval({program, {}}, fuel, check);
    out.status = r.status;
    out.steps = r.steps;
    if (r.status == EvalStatus::SuspendedAtTop) {
      out.ok = false;
      out.violation = "suspension reached the top level: " + print_term(r.term);
    } else if (r.status == EvalStatus::Stuck) {
      out.ok = false;
      out.violation = "stuck (" + r.reason + "): " + print_term(r.term);
    }
  } catch (const Violation &v) {
    out.ok = false;
    out.violation = v.why;
  }
  return out;
}

std::string describe_source(const EvalResult &r) {
  if (r.status == EvalStatus::Finished)
    return print_term(r.term);
  return std::string(status_name(r.status)) + (r.reason.empty() ? "" : ": " + r.reason);
}

namespace {

std::string describe_target(const target::Result &r) {
  switch (r.status) {
  case target::Status::Value: return target::print_term(r.value);
  case target::Status::Stuck: return "Stuck: " + r.reason;
  case target::Status::OutOfFuel: return "OutOfFuel";
  }
  return "?";
}

} // namespace

std::optional<DiffFailure> compare_backends(const TermP &program, long fuel, bool *discarded) {
  if (discarded)
    *discarded = false;
  DiffFailure f;
  f.program = print_term(program);
  TypeP type;
  try {
    type = check_user_program(program, Mode::Base);
  } catch (const TypeError &e) {
    f.divergence = std::string("source does not typecheck: ") + e.what();
    return f;
  }
  EvalResult src = eval({program, {}}, fuel);
  f.source = describe_source(src);
  if (src.status == EvalStatus::OutOfFuel) {
    if (discarded)
      *discarded = true;
    return std::nullopt;
  }
  target::TermP tgt;
  try {
    tgt = cps::transform_free({}, program);
  } catch (const std::exception &e) {
    f.divergence = std::string("transform failed: ") + e.what();
    return f;
  }
  try {
    target::TypeP tt = target::typecheck(tgt);
    target::TypeP want = cps::translate_type(type);
    if (!target::type_eq(tt, want)) {
      f.divergence = "target type " + target::print_type(tt) + " differs from " + target::print_type(want);
      return f;
    }
  } catch (const target::TypeError &e) {
    f.divergence = std::string("target does not typecheck: ") + e.what();
    return f;
  }
  if (!target::free_vars(tgt).empty()) {
    f.divergence = "translation has free variables";
    return f;
  }
  target::Result res = target::eval(tgt, fuel * 100);
  f.target = describe_target(res);
  if (src.status != EvalStatus::Finished) {
    f.divergence = "source did not finish";
    return f;
  }
  if (res.status != target::Status::Value) {
    f.divergence = "target did not produce a value";
    return f;
  }
  const TermP &sv = src.term;
  const target::TermP &tv = res.value;
  bool agree = false;
  if (sv->kind == TermKind::Int)
    agree = tv->kind == target::Kind::Int && tv->value == sv->value;
  else if (sv->kind == TermKind::Unit)
    agree = tv->kind == target::Kind::Unit;
  else
    agree = true; // functions, coroutines and instances are not compared
  if (!agree) {
    f.divergence = "results differ";
    return f;
  }
  return std::nullopt;
}

DiffReport difftest_calculus(uint64_t seed, int count, long fuel) {
  DiffReport rep;
  rep.seed = seed;
  rep.count = count;
  for (int i = 0; i < count; ++i) {
    uint64_t s = seed * 7919ULL + static_cast<uint64_t>(i);
    TermP p = gen_well_typed(s, 6 + static_cast<int>(s % 11), Mode::Base);
    bool discarded = false;
    auto f = compare_backends(p, fuel, &discarded);
    if (discarded) {
      ++rep.discarded;
      continue;
    }
    ++rep.compared;
    if (f)
      rep.failures.push_back(std::move(*f));
  }
  return rep;
}

std::string to_json(const DiffReport &r) {
  nlohmann::json j;
  j["seed"] = r.seed;
  j["count"] = r.count;
  j["compared"] = r.compared;
  j["discarded"] = r.discarded;
  j["failures"] = nlohmann::json::array();
  for (auto &f : r.failures)
    j["failures"].push_back({{"program", f.program},
                             {"source", f.source},
                             {"target", f.target},
                             {"divergence", f.divergence}});
  return j.dump(2);
}

} // namespace lsq
