// Acceptance run: one PASS/FAIL line per criterion. Every check is exact;
// each criterion also has a wall-clock budget.

#include "lsq/cps.hpp"
#include "lsq/eval.hpp"
#include "lsq/generator.hpp"
#include "lsq/harness.hpp"
#include "lsq/syntax.hpp"
#include "lsq/target.hpp"
#include "lsq/typecheck.hpp"
#include "mini/cfg.hpp"
#include "mini/difftest.hpp"
#include "mini/normalize.hpp"
#include "mini/runtime.hpp"

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <random>
#include <sstream>

using namespace lsq;
namespace tg = lsq::target;
namespace fs = std::filesystem;

namespace {

const char *kDup = "cor (x: Int) yields Bot => x + x";
const char *kOnce = "cor (x: Int) yields Int => yield(x)";
const char *kRep = "cor (x: Int) yields Int => (cor (u: Unit) yields Int => yield(x))(yield(x))";

std::string slurp(const fs::path &p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::vector<fs::path> corpus(const std::string &ext, const fs::path &dir = LSQ_CORPUS_DIR) {
  std::vector<fs::path> out;
  for (auto &e : fs::directory_iterator(dir))
    if (e.path().extension() == ext)
      out.push_back(e.path());
  std::sort(out.begin(), out.end());
  return out;
}

struct Outcome {
  bool ok = true;
  std::string detail;
  void require(bool cond, const std::string &what) {
    if (!cond && ok) {
      ok = false;
      detail = what;
    }
  }
};

int failures = 0;

void criterion(int id, const char *title, double budget_s, const std::function<Outcome()> &body) {
  auto t0 = std::chrono::steady_clock::now();
  Outcome o;
  try {
    o = body();
  } catch (const std::exception &e) {
    o.ok = false;
    o.detail = std::string("exception: ") + e.what();
  }
  double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  if (o.ok && secs >= budget_s) {
    o.ok = false;
    o.detail = "over the time budget";
  }
  if (!o.ok)
    ++failures;
  std::printf("criterion %2d: %s  %s  (%.3f s, budget %.0f s)%s%s\n", id, o.ok ? "PASS" : "FAIL", title, secs,
              budget_s, o.detail.empty() ? "" : "  ", o.detail.c_str());
  std::fflush(stdout);
}

std::string show(const TypeP &t) { return print_type(t); }

void census(const TermP &t, bool &encoded) {
  switch (t->kind) {
  case TermKind::Cor:
  case TermKind::Start:
  case TermKind::Resume:
  case TermKind::Snapshot:
  case TermKind::Yield:
  case TermKind::Fix: encoded = true; break;
  default: break;
  }
  for (auto &k : t->kids)
    census(k, encoded);
}

tg::TermP embed(const TermP &t) {
  switch (t->kind) {
  case TermKind::Abs: return tg::abs(t->name, cps::translate_type(t->annot), embed(t->kids[0]));
  case TermKind::App: return tg::app(embed(t->kids[0]), embed(t->kids[1]));
  case TermKind::Var: return tg::var(t->name);
  case TermKind::Unit: return tg::unit();
  case TermKind::Int: return tg::int_lit(t->value);
  case TermKind::Add: return tg::add(embed(t->kids[0]), embed(t->kids[1]));
  default: throw std::logic_error("outside the shared fragment");
  }
}

mini::Program mini_fixture(const char *name) { return mini::parse_mini(slurp(fs::path(LSQ_CORPUS_DIR) / "mini" / name)); }

} // namespace

int main() {
  criterion(1, "type judgments of dup, once and start(once, 7)", 1, [] {
    Outcome o;
    TypeP dup = check_user_program(parse_term(kDup), Mode::Base);
    TypeP once = check_user_program(parse_term(kOnce), Mode::Base);
    TypeP inst = check_user_program(parse_term(std::string("start(") + kOnce + ", 7)"), Mode::Base);
    o.require(type_eq(dup, cor_t(int_t(), bot_t(), int_t())), "dup : " + show(dup));
    o.require(type_eq(once, cor_t(int_t(), int_t(), unit_t())), "once : " + show(once));
    o.require(type_eq(inst, inst_t(int_t(), unit_t())), "start(once, 7) : " + show(inst));
    return o;
  });

  criterion(2, "rep yields [7, 7] then terminates; first resume reduces to 7", 1, [] {
    Outcome o;
    auto d = drive(parse_term(kRep), mk_int(7), 10);
    o.require(d.outcome == DriveOutcome::Result, "drive did not terminate with a result");
    o.require(d.yields.size() == 2 && d.yields[0]->kind == TermKind::Int && d.yields[0]->value == 7 &&
                  d.yields[1]->kind == TermKind::Int && d.yields[1]->value == 7,
              "unexpected yields");
    auto first = parse_term(std::string("resume(start(") + kRep +
                            ", 7), cor (r: Unit) yields Bot => 0, cor (y: Int) yields Bot => y, "
                            "cor (u: Unit) yields Bot => 0)");
    auto r = eval({first, {}}, 1000);
    o.require(r.status == EvalStatus::Finished && r.term->kind == TermKind::Int && r.term->value == 7,
              "first resume: " + describe_source(r));
    return o;
  });

  criterion(3, "metatheory on 1000 generated programs per mode, fuel 10^4", 120, [] {
    Outcome o;
    int checked = 0;
    for (Mode m : {Mode::Base, Mode::Subtyping}) {
      for (uint64_t s = 0; s < 1000; ++s) {
        auto t = gen_well_typed(s, 2 + static_cast<int>(s % 15), m);
        auto r = check_metatheory(t, m, 10000);
        ++checked;
        o.require(r.ok, "violation: " + r.violation + " in " + print_term(t));
        o.require(r.status != EvalStatus::Stuck, "stuck: " + print_term(t));
        o.require(r.status != EvalStatus::SuspendedAtTop, "suspended at top: " + print_term(t));
      }
    }
    o.require(checked == 2000, "sample size");
    if (o.ok)
      o.detail = "2000 programs, 0 violations";
    return o;
  });

  criterion(4, "lattice laws on 10^4 type pairs and yield covariance on 200 bodies", 30, [] {
    Outcome o;
    std::mt19937_64 rng(4);
    for (int i = 0; i < 10000 && o.ok; ++i) {
      TypeP a = gen_type(rng, 3, true), b = gen_type(rng, 3, true), c = gen_type(rng, 3, true);
      TypeP j = join(a, b), m = meet(a, b);
      std::string pair = show(a) + " , " + show(b);
      o.require(subtype(a, a), "reflexivity " + show(a));
      o.require(!(subtype(a, b) && subtype(b, a)) || type_eq(a, b), "antisymmetry " + pair);
      o.require(!(subtype(a, b) && subtype(b, c)) || subtype(a, c), "transitivity " + pair);
      o.require(type_eq(j, join(b, a)) && type_eq(m, meet(b, a)), "commutativity " + pair);
      o.require(type_eq(join(a, a), a) && type_eq(meet(a, a), a), "idempotence " + show(a));
      o.require(type_eq(join(join(a, b), c), join(a, join(b, c))), "join associativity " + pair);
      o.require(type_eq(meet(meet(a, b), c), meet(a, meet(b, c))), "meet associativity " + pair);
      o.require(type_eq(join(a, bot_t()), a) && type_eq(join(a, top_t()), top_t()), "join bounds " + show(a));
      o.require(type_eq(meet(a, top_t()), a) && type_eq(meet(a, bot_t()), bot_t()), "meet bounds " + show(a));
      o.require(subtype(a, j) && subtype(b, j), "join is an upper bound " + pair);
      o.require(subtype(m, a) && subtype(m, b), "meet is a lower bound " + pair);
      o.require(!(subtype(a, c) && subtype(b, c)) || subtype(j, c), "join is least " + pair);
      o.require(!(subtype(c, a) && subtype(c, b)) || subtype(c, m), "meet is greatest " + pair);
    }
    for (uint64_t s = 0; s < 200 && o.ok; ++s) {
      auto g = gen_int_yielding_body(s, 2 + static_cast<int>(s % 10));
      TypeP at_int = check_user_program(mk_cor(g.param, g.param_type, int_t(), g.body), Mode::Base);
      TypeP at_top = check_user_program(mk_cor(g.param, g.param_type, top_t(), g.body), Mode::Subtyping);
      o.require(subtype(at_int, at_top), "covariance witness " + show(at_int) + " vs " + show(at_top));
    }
    return o;
  });

  criterion(5, "translation goldens for dup and once; coroutine-free corpus unchanged", 1, [] {
    Outcome o;
    auto dup = cps::transform_free({}, parse_term(kDup));
    o.require(tg::alpha_equal(dup, tg::parse_term("(s: (Unit => Out[Never, Int]) => Unit) => (x: Int) => "
                                                  "s(() => Term[Never, Int]); Ret[Never, Int](x + x)")),
              "dup: " + tg::print_term(dup));
    auto once = cps::transform_free({}, parse_term(kOnce));
    o.require(tg::alpha_equal(once, tg::parse_term("(s: (Unit => Out[Int, Unit]) => Unit) => (x: Int) => "
                                                   "((s: (Unit => Out[Int, Unit]) => Unit) => "
                                                   "(k: Unit => Out[Int, Unit]) => s(k); Yield[Int, Unit](x))(s)"
                                                   "((y: Unit) => s(() => Term[Int, Unit]); Ret[Int, Unit](y))")),
              "once: " + tg::print_term(once));
    int plain = 0;
    for (auto &f : corpus(".lsq")) {
      auto t = parse_term(slurp(f));
      bool encoded = false;
      census(t, encoded);
      if (encoded)
        continue;
      ++plain;
      o.require(tg::alpha_equal(cps::transform_free({}, t), embed(t)), f.filename().string() + " changed");
    }
    o.require(plain >= 3, "fewer than 3 coroutine-free corpus terms");
    return o;
  });

  criterion(6, "translation differential: 200 generated and 10 corpus programs", 120, [] {
    Outcome o;
    DiffReport r;
    int count = 200;
    do {
      r = difftest_calculus(42, count, 10000);
      count += 200 - r.compared;
    } while (r.compared < 200);
    o.require(r.failures.empty(), r.failures.empty() ? "" : r.failures[0].divergence + ": " + r.failures[0].program);
    auto files = corpus(".lsq");
    o.require(files.size() >= 10, "corpus has fewer than 10 programs");
    for (auto &f : files) {
      auto d = compare_backends(parse_term(slurp(f)), 100000);
      o.require(!d, f.filename().string() + ": " + (d ? d->divergence : ""));
    }
    if (o.ok)
      o.detail = std::to_string(r.compared) + " generated (" + std::to_string(r.discarded) + " discarded) + " +
                 std::to_string(files.size()) + " corpus, 0 divergences";
    return o;
  });

  criterion(7, "pipeline structure of the list coroutine", 1, [] {
    Outcome o;
    auto p = mini::normalize(mini_fixture("bucket.mini"));
    auto g = mini::build_cfg(p, 0);
    o.require(mini::control_census(g) == std::map<mini::NodeKind, int>{{mini::NodeKind::Y, 1},
                                                                       {mini::NodeKind::Ws, 1},
                                                                       {mini::NodeKind::We, 1}},
              "control node multiset");
    auto segs = mini::split_segments(g);
    o.require(segs.size() == 2, "segment count " + std::to_string(segs.size()));
    auto cp = mini::compile(p);
    o.require(cp.coroutines[0].dispatcher.size() == 2, "entry point count");
    if (!o.ok)
      return o;
    bool repaired = false;
    for (auto &n : segs[1].nodes)
      if (n.kind == mini::NodeKind::Be)
        for (int s : n.succ)
          repaired = repaired || segs[1].nodes[s].kind == mini::NodeKind::Ws;
    o.require(repaired, "no Be followed by a fresh loop in the resumed segment");
    auto rep = mini::analyze(g, segs);
    auto names = [&](const std::set<int> &vs) {
      std::set<std::string> out;
      for (int v : vs)
        out.insert(g.vars[v]);
      return out;
    };
    o.require(names(rep.must_load[1]) == std::set<std::string>{"b"}, "mustLoad(ep1)");
    int yield_exits = 0;
    for (int e = 0; e < 2; ++e)
      for (auto &x : segs[e].exits)
        if (segs[e].nodes[x.node].kind == mini::NodeKind::Y && ++yield_exits)
          o.require(names(rep.stores[e].at(x.node)) ==
                        (e == 0 ? std::set<std::string>{} : std::set<std::string>{"b"}),
                    "yield store set of ep" + std::to_string(e));
    o.require(yield_exits == 2, "expected one yield exit per segment");
    return o;
  });

  criterion(8, "pipeline differential on 300 generated programs with snapshot probes", 120, [] {
    Outcome o;
    auto r = mini::difftest_mini(7, 300);
    o.require(r.compared == 300, "only " + std::to_string(r.compared) + " compared");
    o.require(r.failures.empty(), r.failures.empty() ? "" : r.failures[0].divergence + "\n" + r.failures[0].program);
    if (o.ok)
      o.detail = "300 programs, 0 divergences";
    return o;
  });

  criterion(9, "exception fixture: handler path and uncaught variant", 1, [] {
    Outcome o;
    auto cp = mini::compile(mini_fixture("exceptions.mini"));
    auto run = mini::run_compiled(cp, "main", {});
    o.require(run.yields == std::vector<mini::Value>{mini::Value::integer(1), mini::Value::integer(5),
                                                     mini::Value::integer(13)},
              "handler path yields " + run.str());
    o.require(run.result == mini::Value::integer(1) && !run.exception, "handler path outcome " + run.str());
    auto in = mini::start_instance(cp, "forward", {});
    o.require(mini::resume_instance(in), "first resume of the uncaught variant");
    o.require(!mini::resume_instance(in), "uncaught variant kept running");
    o.require(mini::read_exception(in) == mini::Value::integer(13), "exception payload");
    bool unset = false;
    try {
      mini::read_result(in);
    } catch (const mini::RuntimeFault &f) {
      unset = f.kind == mini::RuntimeFault::Kind::FieldUnset;
    }
    o.require(unset, "result set after an uncaught exception");
    return o;
  });

  criterion(10, "stack growth and constant host depth at call depth 100", 5, [] {
    Outcome o;
    auto cp = mini::compile(mini::parse_mini("coroutine down(n: Int): Int yields Int {\n"
                                             "  var r = 0;\n"
                                             "  if (0 < n) { r = down(n - 1); } else { yieldval(0); }\n"
                                             "  r + 1\n"
                                             "}\n"));
    std::vector<size_t> host;
    for (int depth : {1, 10, 100}) {
      auto in = mini::start_instance(cp, "down", {mini::Value::integer(depth)});
      o.require(mini::resume_instance(in), "no yield at the bottom");
      o.require(in.cstack.size() == static_cast<size_t>(depth + 1), "frame count");
      o.require(!mini::resume_instance(in), "did not finish");
      o.require(mini::read_result(in) == mini::Value::integer(depth + 1), "result");
      host.push_back(in.max_host_depth);
      if (depth == 100) {
        const auto &h = in.cstack.capacity_history();
        bool doubling = h.front() == 4 && h.back() >= 128;
        for (size_t i = 1; i < h.size(); ++i)
          doubling = doubling && h[i] == 2 * h[i - 1];
        o.require(doubling, "capacities do not double from 4 to 128");
        o.require(in.cstack.copy_work() <= 2 * in.cstack.capacity() &&
                      in.pstack.copy_work() <= 2 * in.pstack.capacity() &&
                      in.bstack.copy_work() <= 2 * in.bstack.capacity() &&
                      in.vstack.copy_work() <= 2 * in.vstack.capacity(),
                  "copy work above twice the capacity");
        if (o.ok)
          o.detail = "capacity " + std::to_string(h.back()) + ", copy work " +
                     std::to_string(in.cstack.copy_work()) + ", host depth " + std::to_string(host.back());
      }
    }
    o.require(host[0] == host[1] && host[1] == host[2], "host depth grows with call depth");
    return o;
  });

  criterion(11, "compiled list iterator over 10^6 elements", 5, [] {
    Outcome o;
    std::vector<mini::Value> items;
    items.reserve(1000000);
    for (int64_t i = 0; i < 1000000; ++i)
      items.push_back(mini::Value::integer(i));
    auto cp = mini::compile(mini_fixture("bucket.mini"));
    auto in = mini::start_instance(cp, "bucket", {mini::Value::list(std::move(items))});
    in.fuel = -1;
    int64_t n = 0, sum = 0;
    while (mini::resume_instance(in)) {
      sum += mini::read_value(in).as_int();
      ++n;
    }
    o.require(n == 1000000, "yield count " + std::to_string(n));
    o.require(sum == 999999LL * 1000000LL / 2, "yield sum");
    return o;
  });

  std::printf("%d of 11 criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
