#include "doctest.h"

#include "lsq/lexer.hpp"
#include "mini/cfg.hpp"
#include "mini/difftest.hpp"
#include "mini/generator.hpp"
#include "mini/normalize.hpp"
#include "mini/runtime.hpp"

#include <filesystem>
#include <fstream>
#include <sstream>

using namespace mini;

namespace {

Program fixture(const char *name) {
  std::ifstream in(std::filesystem::path(LSQ_CORPUS_DIR) / "mini" / name);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_mini(ss.str());
}

Value ints(std::vector<int64_t> xs) {
  std::vector<Value> v;
  for (auto x : xs)
    v.push_back(Value::integer(x));
  return Value::list(std::move(v));
}

std::vector<Value> yields_of(std::vector<int64_t> xs) {
  std::vector<Value> v;
  for (auto x : xs)
    v.push_back(Value::integer(x));
  return v;
}

const char *kDown = R"(
coroutine down(n: Int): Int yields Int {
  var r = 0;
  if (0 < n) {
    r = down(n - 1);
  } else {
    yieldval(0);
  }
  r + 1
}
)";

const char *kForward = R"(
coroutine forward(): Int yields Int {
  var r = fail(13);
  r + 1
}
coroutine fail(e: Int): Int yields Int {
  throw(e);
  0
}
)";

std::set<std::string> names(const CfgGraph &g, const std::set<int> &vars) {
  std::set<std::string> out;
  for (int v : vars)
    out.insert(g.vars[v]);
  return out;
}

} // namespace

TEST_CASE("parsing MiniLang") {
  auto p = fixture("bucket.mini");
  REQUIRE(p.coroutines.size() == 1);
  REQUIRE(p.coroutines[0].params.size() == 1);
  CHECK(p.coroutines[0].params[0].type == Type::List);
  CHECK(parse_mini("").coroutines.empty());
  CHECK(parse_mini("// nothing here\n").coroutines.empty());
  CHECK_THROWS_AS(parse_mini("coroutine a(): Int yields Int { b() }"), lsq::SyntaxError);
  CHECK_THROWS_AS(parse_mini("coroutine a(): Int yields Int { a(1) }"), lsq::SyntaxError);
  CHECK_THROWS_AS(parse_mini("coroutine a(): Int yields Int { var = 1; 0 }"), lsq::SyntaxError);
  auto vs = parse_values("[1,2],3,true,nil,-4");
  REQUIRE(vs.size() == 5);
  CHECK(vs[0] == ints({1, 2}));
  CHECK(vs[2] == Value::boolean(true));
  CHECK(vs[3].is_nil());
  CHECK(vs[4] == Value::integer(-4));
}

TEST_CASE("printing then parsing generated programs is the identity") {
  for (uint64_t s = 0; s < 200; ++s) {
    auto g = gen_mini(s);
    CHECK(program_equal(parse_mini(print_program(g.program)), g.program));
  }
}

TEST_CASE("normal form of the list coroutine") {
  auto n = normalize(fixture("bucket.mini"));
  CHECK(print_program(n) == "coroutine bucket(b: List): Unit yields Int {\n"
                            "  var x_0 = b != nil;\n"
                            "  var x_1 = x_0;\n"
                            "  while (x_1) {\n"
                            "    var x_2 = b.head;\n"
                            "    var x_3 = yieldval(x_2);\n"
                            "    var x_4 = b.tail;\n"
                            "    b = x_4;\n"
                            "    var x_0 = b != nil;\n"
                            "    x_1 = x_0;\n"
                            "  }\n"
                            "  ()\n"
                            "}\n");
}

TEST_CASE("normalization of constants and short-circuit operators") {
  auto c = normalize(parse_mini("coroutine k(): Int yields Int { 7 }"));
  CHECK(c.coroutines[0].body.empty());
  CHECK(print_expr(c.coroutines[0].result) == "7");

  auto o = normalize(parse_mini("coroutine k(a: Bool, b: Bool): Bool yields Int { a || b }"));
  CHECK(print_block(o.coroutines[0].body, 0) == "var x_0;\n"
                                                "if (a) {\n"
                                                "  x_0 = true;\n"
                                                "} else {\n"
                                                "  x_0 = b;\n"
                                                "}\n");
  auto a = normalize(parse_mini("coroutine k(a: Bool, b: Bool): Bool yields Int { a && b }"));
  CHECK(print_block(a.coroutines[0].body, 0) == "var x_0;\n"
                                                "if (a) {\n"
                                                "  x_0 = b;\n"
                                                "} else {\n"
                                                "  x_0 = false;\n"
                                                "}\n");
  auto skip = normalize(parse_mini("coroutine k(x_0: Int): Int yields Int { x_0 + 1 + 2 }"));
  CHECK(print_block(skip.coroutines[0].body, 0) == "var x_1 = x_0 + 1;\nvar x_2 = x_1 + 2;\n");
}

TEST_CASE("normalization is idempotent, establishes the restricted form and preserves behaviour") {
  for (uint64_t s = 0; s < 300; ++s) {
    auto g = gen_mini(s);
    auto n = normalize(g.program);
    CHECK(is_normalized(n));
    CHECK(program_equal(normalize(n), n));
    RunOutcome before, after;
    try {
      before = direct_run(g.program, g.entry, g.args, 100000);
    } catch (const OutOfFuel &) {
      continue;
    }
    after = direct_run(n, g.entry, g.args, 1000000);
    CHECK_MESSAGE(before == after, print_program(g.program));
  }
}

TEST_CASE("reference interpreter on the fixtures") {
  auto b = direct_run(fixture("bucket.mini"), "bucket", {ints({1, 2, 3})});
  CHECK(b.yields == yields_of({1, 2, 3}));
  CHECK(b.result == Value::unit());
  auto h = direct_run(fixture("hashtable.mini"), "hashtable", {Value::list({ints({1}), ints({2, 3})})});
  CHECK(h.yields == yields_of({1, 2, 3}));
  auto e = direct_run(fixture("exceptions.mini"), "main", {});
  CHECK(e.yields == yields_of({1, 5, 13}));
  CHECK(e.result == Value::integer(1));
  CHECK_FALSE(e.exception);
  auto u = direct_run(fixture("exceptions.mini"), "forward", {});
  CHECK(u.exception == Value::integer(13));
  CHECK_FALSE(u.result);
  CHECK_THROWS_AS(direct_run(fixture("bucket.mini"), "bucket", {}), std::invalid_argument);
  CHECK_THROWS_AS(direct_run(parse_mini("coroutine k(): Int yields Int { var i = 0; while (true) { i = i + 1; } i }"),
                             "k", {}, 1000),
                  OutOfFuel);
}

TEST_CASE("control flow graph construction") {
  auto bucket = normalize(fixture("bucket.mini"));
  auto g = build_cfg(bucket, 0);
  CHECK(control_census(g) == std::map<NodeKind, int>{{NodeKind::Y, 1}, {NodeKind::Ws, 1}, {NodeKind::We, 1}});
  CHECK(g.nodes[g.ret].kind == NodeKind::R);

  auto branch = normalize(parse_mini("coroutine k(c: Bool): Int yields Int { if (c) { yieldval(1); } 0 }"));
  CHECK(control_census(build_cfg(branch, 0)) ==
        std::map<NodeKind, int>{{NodeKind::Y, 1}, {NodeKind::Is, 1}, {NodeKind::Ie, 1}});

  auto straight = normalize(parse_mini("coroutine k(a: Int): Int yields Int { var b = a + 1; b + 2 }"));
  CHECK(control_census(build_cfg(straight, 0)).empty());

  CHECK_THROWS_AS(build_cfg(fixture("bucket.mini"), 0), std::invalid_argument);
}

TEST_CASE("segments of the list coroutine") {
  auto p = normalize(fixture("bucket.mini"));
  auto g = build_cfg(p, 0);
  auto segs = split_segments(g);
  REQUIRE(segs.size() == 2);
  CHECK(segs[0].kind == EntryKind::MethodEntry);
  CHECK(segs[1].kind == EntryKind::AfterYield);
  CHECK(g.nodes[segs[1].origin].kind == NodeKind::Y);

  // The resumed segment finishes the interrupted iteration, closes it with a
  // Be and then enters the loop afresh with its own yield exit.
  const Segment &s = segs[1];
  int be = -1, ws = -1;
  for (auto &n : s.nodes) {
    if (n.kind == NodeKind::Be && be < 0)
      be = n.id;
    if (n.kind == NodeKind::Ws && ws < 0)
      ws = n.id;
  }
  REQUIRE(be >= 0);
  REQUIRE(ws >= 0);
  CHECK(s.nodes[be].succ == std::vector<int>{ws});
  bool yield_exit = false;
  for (auto &x : s.exits)
    yield_exit = yield_exit || (s.nodes[x.node].kind == NodeKind::Y && x.resumes_at == 1);
  CHECK(yield_exit);
  for (auto &n : s.nodes)
    CHECK(n.kind != NodeKind::Ie);

  // The write of b follows its first read, so it does not dominate it.
  int read = -1, write = -1;
  for (auto &n : s.nodes) {
    if (n.orig < 0 || n.landing)
      continue;
    const CfgNode &o = g.nodes[n.orig];
    if (read < 0 && o.rhs.kind == RhsKind::Select && o.rhs.field == Field::Tail)
      read = n.id;
    if (write < 0 && !o.declares && o.target == 0)
      write = n.id;
  }
  REQUIRE(read >= 0);
  REQUIRE(write >= 0);
  CHECK_FALSE(dominates(s, write, read));
  CHECK(dominates(s, read, write));
}

TEST_CASE("segment counts of simple coroutines") {
  auto straight = normalize(parse_mini("coroutine k(a: Int): Int yields Int { a + 1 }"));
  CHECK(split_segments(build_cfg(straight, 0)).size() == 1);

  auto fwd = normalize(parse_mini(kForward));
  auto segs = split_segments(build_cfg(fwd, fwd.find("forward")));
  REQUIRE(segs.size() == 2);
  CHECK(segs[1].kind == EntryKind::AfterCall);
}

TEST_CASE("load and store sets of the list coroutine") {
  auto p = normalize(fixture("bucket.mini"));
  auto g = build_cfg(p, 0);
  auto segs = split_segments(g);
  auto r = analyze(g, segs);
  CHECK(names(g, r.must_load[1]) == std::set<std::string>{"b"});
  CHECK(names(g, r.must_load[0]) == std::set<std::string>{"b"});
  REQUIRE(segs[0].exits.size() == 2);
  for (int e = 0; e < 2; ++e) {
    for (auto &x : segs[e].exits) {
      if (x.resumes_at < 0)
        continue;
      auto stored = names(g, r.stores[e].at(x.node));
      CHECK(stored == (e == 0 ? std::set<std::string>{} : std::set<std::string>{"b"}));
    }
  }
  // Without the analyses everything in scope moves.
  auto none = analyze(g, segs, AnalysisOptions::none());
  for (auto &x : segs[1].exits)
    if (x.resumes_at >= 0)
      CHECK(names(g, none.stores[1].at(x.node)).count("x_2"));
}

TEST_CASE("dominance is a partial order with the begin node as least element") {
  for (uint64_t s = 0; s < 40; ++s) {
    auto n = normalize(gen_mini(s).program);
    for (size_t k = 0; k < n.coroutines.size(); ++k) {
      auto g = build_cfg(n, static_cast<int>(k));
      for (auto &seg : split_segments(g)) {
        auto dom = dominator_matrix(seg);
        auto dominates = [&](int d, int n) { return static_cast<bool>(dom[n][d]); };
        int sz = static_cast<int>(seg.nodes.size());
        for (int a = 0; a < sz; ++a) {
          CHECK(dominates(a, a));
          CHECK(dominates(seg.begin, a));
          CHECK(dominates(a, a) == mini::dominates(seg, a, a));
        }
        for (int a = 0; a < sz; ++a)
          for (int b = 0; b < sz; ++b) {
            if (a != b && dominates(a, b))
              CHECK_FALSE(dominates(b, a));
            for (int c = 0; c < sz; ++c)
              if (dominates(a, b) && dominates(b, c))
                CHECK(dominates(a, c));
          }
      }
    }
  }
}

TEST_CASE("analysis invariants on generated programs") {
  for (uint64_t s = 0; s < 150; ++s) {
    auto n = normalize(gen_mini(s).program);
    for (size_t k = 0; k < n.coroutines.size(); ++k) {
      auto g = build_cfg(n, static_cast<int>(k));
      auto segs = split_segments(g);
      auto full = analyze(g, segs);
      AnalysisOptions no_needed;
      no_needed.is_needed = false;
      AnalysisOptions no_load;
      no_load.must_load = false;
      auto grown = analyze(g, segs, no_needed);
      auto loads = analyze(g, segs, no_load);
      for (auto &seg : segs) {
        for (int v : full.must_load[seg.id])
          CHECK(loads.must_load[seg.id].count(v));
        for (auto &x : seg.exits) {
          if (x.resumes_at < 0)
            continue;
          const auto &scope = seg.nodes[x.node].scope;
          for (int v : full.stores[seg.id][x.node]) {
            CHECK(scope.count(v));
            CHECK(grown.stores[seg.id][x.node].count(v));
          }
        }
      }
      // Every reachable statement of the graph lands in some segment.
      std::vector<bool> seen(g.nodes.size(), false), reach(g.nodes.size(), false);
      for (auto &seg : segs)
        for (auto &sn : seg.nodes)
          if (sn.orig >= 0)
            seen[sn.orig] = true;
      std::vector<int> work = {g.entry};
      reach[g.entry] = true;
      while (!work.empty()) {
        int v = work.back();
        work.pop_back();
        for (int w : g.nodes[v].succ)
          if (!reach[w]) {
            reach[w] = true;
            work.push_back(w);
          }
      }
      for (auto &node : g.nodes) {
        bool statement = node.kind == NodeKind::Plain || node.kind == NodeKind::Y || node.kind == NodeKind::C ||
                         node.kind == NodeKind::T || node.kind == NodeKind::R;
        if (statement && reach[node.id])
          CHECK_MESSAGE(seen[node.id], print_coroutine(n.coroutines[k]) << " node " << node.id);
      }
    }
  }
}

TEST_CASE("entry points") {
  auto cp = compile(fixture("bucket.mini"));
  REQUIRE(cp.coroutines.size() == 1);
  const auto &b = cp.coroutines[0];
  REQUIRE(b.dispatcher.size() == 2);
  CHECK(b.dispatcher[0].pc == 0);
  CHECK(b.dispatcher[1].pc == 1);
  CHECK_FALSE(b.dispatcher[0].unwind_handler);

  auto straight = compile(parse_mini("coroutine k(a: Int): Int yields Int { a }"));
  REQUIRE(straight.coroutines[0].dispatcher.size() == 1);
  const auto &code = straight.coroutines[0].dispatcher[0].code;
  REQUIRE(code.size() == 1);
  CHECK(code[0].kind == OpKind::ReturnExit);

  auto fwd = compile(parse_mini(kForward));
  const auto &f = fwd.coroutines[fwd.find("forward")];
  REQUIRE(f.dispatcher.size() == 2);
  CHECK(f.dispatcher[1].kind == EntryKind::AfterCall);
  CHECK(f.dispatcher[1].unwind_handler);
  REQUIRE(f.dispatcher[1].code.size() == 1);
  CHECK(f.dispatcher[1].code[0].kind == OpKind::Unwind);
  CHECK(f.dispatcher[1].code[0].body.at(0).kind == OpKind::TakeResult);

  auto main = compile(fixture("exceptions.mini"));
  const auto &m = main.coroutines[main.find("main")];
  bool replica = false;
  for (auto &ep : m.dispatcher)
    replica = replica || (ep.kind == EntryKind::AfterCall && ep.user_handler_replica);
  CHECK(replica);
  CHECK(dump_entries(m, &main).find("catch") != std::string::npos);
}

TEST_CASE("growable stacks double from four") {
  GrowStack<int> s;
  CHECK(s.capacity() == 4);
  for (int i = 0; i < 100; ++i)
    s.push(i);
  CHECK(s.capacity_history() == std::vector<size_t>{4, 8, 16, 32, 64, 128});
  CHECK(s.copy_work() == 4 + 8 + 16 + 32 + 64);
  CHECK(s.copy_work() <= 2 * s.capacity());
  for (int i = 99; i >= 0; --i) {
    CHECK(s.top() == i);
    s.pop();
  }
  CHECK(s.empty());
  CHECK(s.capacity() == 128);
}

TEST_CASE("resume, value and result") {
  auto cp = compile(fixture("bucket.mini"));
  auto in = start_instance(cp, "bucket", {ints({1})});
  CHECK(in.live);
  CHECK_FALSE(in.value);
  CHECK(in.cstack.capacity() == 4);
  CHECK(in.pstack.capacity() == 4);
  CHECK(in.bstack.capacity() == 4);
  CHECK(in.vstack.capacity_history().front() == 4);
  CHECK_THROWS_AS(read_result(in), RuntimeFault);
  CHECK(resume_instance(in));
  CHECK(read_value(in) == Value::integer(1));
  CHECK_FALSE(resume_instance(in));
  CHECK_THROWS_AS(read_value(in), RuntimeFault);
  CHECK(read_result(in) == Value::unit());
  try {
    resume_instance(in);
    FAIL("resume on a finished instance");
  } catch (const RuntimeFault &f) {
    CHECK(f.kind == RuntimeFault::Kind::ResumeOnDead);
  }
  try {
    start_instance(cp, "bucket", {});
    FAIL("arity");
  } catch (const RuntimeFault &f) {
    CHECK(f.kind == RuntimeFault::Kind::Arity);
  }

  auto ht = compile(fixture("hashtable.mini"));
  auto h = start_instance(ht, "hashtable", {Value::list({ints({1}), ints({2})})});
  CHECK(resume_instance(h));
  CHECK(read_value(h) == Value::integer(1));
  CHECK(h.cstack.size() == 2);
  CHECK(resume_instance(h));
  CHECK(read_value(h) == Value::integer(2));
  CHECK_FALSE(resume_instance(h));
  CHECK(h.cstack.empty());
}

TEST_CASE("snapshots are independent") {
  auto cp = compile(fixture("bucket.mini"));
  auto a = start_instance(cp, "bucket", {ints({1, 2, 3})});
  REQUIRE(resume_instance(a));
  auto b = snapshot_instance(a);
  REQUIRE(resume_instance(a));
  CHECK(read_value(a) == Value::integer(2));
  CHECK(read_value(b) == Value::integer(1));
  auto ra = drain(a), rb = drain(b);
  CHECK(ra.yields == yields_of({3}));
  CHECK(rb.yields == yields_of({2, 3}));

  auto dead = snapshot_instance(a);
  CHECK_FALSE(dead.live);
  CHECK_THROWS_AS(resume_instance(dead), RuntimeFault);
  CHECK_THROWS_AS(resume_instance(a), RuntimeFault);

  auto oracle = direct_run(fixture("bucket.mini"), "bucket", {ints({4, 5, 6, 7})});
  for (size_t k = 0; k <= 4; ++k)
    CHECK_FALSE(snapshot_probe(cp, "bucket", {ints({4, 5, 6, 7})}, oracle, k));
}

TEST_CASE("exceptions across frames") {
  auto cp = compile(fixture("exceptions.mini"));
  auto out = run_compiled(cp, "main", {});
  CHECK(out.yields == yields_of({1, 5, 13}));
  CHECK(out.result == Value::integer(1));
  CHECK_FALSE(out.exception);

  auto in = start_instance(cp, "forward", {});
  CHECK(resume_instance(in));
  CHECK(read_value(in) == Value::integer(5));
  CHECK_FALSE(resume_instance(in));
  CHECK(read_exception(in) == Value::integer(13));
  CHECK_THROWS_AS(read_result(in), RuntimeFault);
}

TEST_CASE("deep recursion keeps the host stack flat") {
  auto p = parse_mini(kDown);
  auto cp = compile(p);
  size_t host_small = 0;
  for (int depth : {10, 100}) {
    auto in = start_instance(cp, "down", {Value::integer(depth)});
    CHECK(resume_instance(in));
    CHECK(in.cstack.size() == static_cast<size_t>(depth + 1));
    CHECK_FALSE(resume_instance(in));
    CHECK(read_result(in) == Value::integer(depth + 1));
    if (depth == 10)
      host_small = in.max_host_depth;
    else
      CHECK(in.max_host_depth == host_small);
    if (depth == 100) {
      CHECK(in.cstack.capacity_history() == std::vector<size_t>{4, 8, 16, 32, 64, 128});
      CHECK(in.cstack.copy_work() <= 2 * in.cstack.capacity());
      CHECK(in.vstack.copy_work() <= 2 * in.vstack.capacity());
    }
  }
  CHECK(direct_run(p, "down", {Value::integer(100)}).result == Value::integer(101));
}

TEST_CASE("pipeline differential") {
  for (const char *f : {"bucket.mini", "hashtable.mini", "exceptions.mini"}) {
    auto p = fixture(f);
    std::vector<Value> args;
    std::string entry = p.coroutines[0].name;
    if (entry == "bucket")
      args = {ints({3, 1, 4})};
    if (entry == "hashtable")
      args = {Value::list({ints({1}), Value::nil(), ints({2, 3})})};
    auto d = compare_mini(p, entry, args, 100000, 1);
    CHECK_MESSAGE(!d, f << ": " << (d ? d->divergence : ""));
  }
  auto r = difftest_mini(5, 150);
  CHECK(r.compared + r.discarded == 150);
  for (auto &f : r.failures)
    FAIL_CHECK(f.program << "\n" << f.divergence);
}
