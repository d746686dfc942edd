#include "doctest.h"

#include "lsq/cps.hpp"
#include "lsq/generator.hpp"
#include "lsq/harness.hpp"
#include "lsq/syntax.hpp"
#include "lsq/target.hpp"

#include <algorithm>
#include <filesystem>
#include <functional>
#include <fstream>
#include <map>
#include <sstream>

using namespace lsq;
namespace tg = lsq::target;

namespace {

void census(const TermP &t, std::map<std::string, int> &out) {
  switch (t->kind) {
  case TermKind::Start: ++out["start"]; break;
  case TermKind::Resume: ++out["resume"]; break;
  case TermKind::Snapshot: ++out["snapshot"]; break;
  case TermKind::Yield: ++out["yield"]; break;
  case TermKind::Fix: ++out["fix"]; break;
  case TermKind::App:
    if (t->kids[0]->kind == TermKind::Cor)
      ++out["direct call"];
    break;
  default: break;
  }
  for (auto &k : t->kids)
    census(k, out);
}

std::vector<std::filesystem::path> corpus_files() {
  std::vector<std::filesystem::path> out;
  for (auto &e : std::filesystem::directory_iterator(LSQ_CORPUS_DIR))
    if (e.path().extension() == ".lsq")
      out.push_back(e.path());
  std::sort(out.begin(), out.end());
  return out;
}

std::string slurp(const std::filesystem::path &p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// The same term read as a target program; defined on the shared fragment.
tg::TermP embed(const TermP &t) {
  switch (t->kind) {
  case TermKind::Abs: return tg::abs(t->name, cps::translate_type(t->annot), embed(t->kids[0]));
  case TermKind::App: return tg::app(embed(t->kids[0]), embed(t->kids[1]));
  case TermKind::Var: return tg::var(t->name);
  case TermKind::Unit: return tg::unit();
  case TermKind::Int: return tg::int_lit(t->value);
  case TermKind::Add: return tg::add(embed(t->kids[0]), embed(t->kids[1]));
  default: throw std::logic_error("not in the shared fragment");
  }
}

// Coroutine constructs and fix need an encoding in the target.
bool needs_encoding(const TermP &t) {
  std::map<std::string, int> c;
  census(t, c);
  std::function<bool(const TermP &)> cor = [&](const TermP &u) {
    if (u->kind == TermKind::Cor)
      return true;
    for (auto &k : u->kids)
      if (cor(k))
        return true;
    return false;
  };
  return !c.empty() || cor(t);
}

} // namespace

TEST_CASE("generator is deterministic per seed") {
  for (uint64_t s = 1; s <= 20; ++s) {
    for (Mode m : {Mode::Base, Mode::Subtyping}) {
      auto a = gen_well_typed(s, 3 + static_cast<int>(s % 6), m);
      auto b = gen_well_typed(s, 3 + static_cast<int>(s % 6), m);
      CHECK(print_term(a) == print_term(b));
    }
  }
  CHECK(print_term(gen_well_typed(1, 8, Mode::Base)) != print_term(gen_well_typed(2, 8, Mode::Base)));
}

TEST_CASE("generated programs typecheck in both modes") {
  for (uint64_t s = 0; s < 300; ++s) {
    int size = 1 + static_cast<int>(s % 8);
    auto base = gen_well_typed(s, size, Mode::Base);
    TypeP tb = check_user_program(base, Mode::Base);
    TypeP ts = check_user_program(base, Mode::Subtyping);
    CHECK(subtype(tb, ts));
    auto sub = gen_well_typed(s, size, Mode::Subtyping);
    CHECK_NOTHROW(check_user_program(sub, Mode::Subtyping));
  }
}

TEST_CASE("generated programs cover every construct") {
  std::map<std::string, int> c;
  for (uint64_t s = 0; s < 300; ++s)
    census(gen_well_typed(s, 8 + static_cast<int>(s % 6), Mode::Base), c);
  for (const char *k : {"start", "resume", "snapshot", "yield", "fix", "direct call"})
    CHECK_MESSAGE(c[k] > 0, k);
}

TEST_CASE("printing then parsing generated programs is the identity up to renaming") {
  for (uint64_t s = 0; s < 200; ++s) {
    auto t = gen_well_typed(s, 1 + static_cast<int>(s % 12), s % 2 ? Mode::Subtyping : Mode::Base);
    CHECK(alpha_equal(parse_term(print_term(t)), t));
  }
}

TEST_CASE("progress and preservation hold step by step") {
  for (Mode m : {Mode::Base, Mode::Subtyping}) {
    for (uint64_t s = 0; s < 120; ++s) {
      auto t = gen_well_typed(s, 2 + static_cast<int>(s % 10), m);
      auto out = check_metatheory(t, m, 10000);
      CHECK_MESSAGE(out.ok, print_term(t) << "\n" << out.violation);
      CHECK(out.status != EvalStatus::Stuck);
      CHECK(out.status != EvalStatus::SuspendedAtTop);
    }
  }
}

TEST_CASE("subtyping is a partial order and join/meet form a lattice") {
  std::mt19937_64 rng(11);
  for (int i = 0; i < 2000; ++i) {
    TypeP a = gen_type(rng, 3, true), b = gen_type(rng, 3, true), c = gen_type(rng, 3, true);
    CHECK(subtype(a, a));
    if (subtype(a, b) && subtype(b, a))
      CHECK(type_eq(a, b));
    if (subtype(a, b) && subtype(b, c))
      CHECK(subtype(a, c));
    TypeP j = join(a, b), m = meet(a, b);
    CHECK(type_eq(j, join(b, a)));
    CHECK(type_eq(m, meet(b, a)));
    CHECK(type_eq(join(a, a), a));
    CHECK(type_eq(meet(a, a), a));
    CHECK(type_eq(join(join(a, b), c), join(a, join(b, c))));
    CHECK(type_eq(meet(meet(a, b), c), meet(a, meet(b, c))));
    CHECK(type_eq(join(a, bot_t()), a));
    CHECK(type_eq(join(a, top_t()), top_t()));
    CHECK(type_eq(meet(a, top_t()), a));
    CHECK(type_eq(meet(a, bot_t()), bot_t()));
    CHECK(subtype(a, j));
    CHECK(subtype(b, j));
    CHECK(subtype(m, a));
    CHECK(subtype(m, b));
    if (subtype(a, c) && subtype(b, c))
      CHECK(subtype(j, c));
    if (subtype(c, a) && subtype(c, b))
      CHECK(subtype(c, m));
  }
}

TEST_CASE("coroutine yield types are covariant") {
  for (uint64_t s = 0; s < 100; ++s) {
    auto g = gen_int_yielding_body(s, 2 + static_cast<int>(s % 8));
    auto at_int = mk_cor(g.param, g.param_type, int_t(), g.body);
    auto at_top = mk_cor(g.param, g.param_type, top_t(), g.body);
    TypeP ti = check_user_program(at_int, Mode::Base);
    TypeP tt = check_user_program(at_top, Mode::Subtyping);
    CHECK(subtype(ti, tt));
    CHECK_THROWS(check_user_program(at_top, Mode::Base));
  }
}

TEST_CASE("corpus programs agree across the translation") {
  auto files = corpus_files();
  REQUIRE(files.size() >= 10);
  for (auto &f : files) {
    auto t = parse_term(slurp(f));
    auto d = compare_backends(t, 100000);
    CHECK_MESSAGE(!d, f.filename().string() << ": " << (d ? d->divergence : ""));
  }
}

TEST_CASE("corpus drivers produce the documented results") {
  auto run = [](const char *name) {
    auto r = eval({parse_term(slurp(std::filesystem::path(LSQ_CORPUS_DIR) / name)), {}}, 100000);
    REQUIRE(r.status == EvalStatus::Finished);
    return r.term->value;
  };
  CHECK(run("dup-driver.lsq") == 14);
  CHECK(run("rep-driver.lsq") == 77);
  CHECK(run("lifecycle.lsq") == 108);
  CHECK(run("snapshot.lsq") == 45);
}

TEST_CASE("coroutine-free corpus terms translate to themselves") {
  int checked = 0;
  for (auto &f : corpus_files()) {
    auto t = parse_term(slurp(f));
    if (needs_encoding(t))
      continue;
    ++checked;
    auto out = cps::transform_free({}, t);
    CHECK_MESSAGE(tg::alpha_equal(out, embed(t)), f.filename().string());
  }
  CHECK(checked >= 3);
}

TEST_CASE("translation differential on generated programs") {
  auto r = difftest_calculus(3, 60, 10000);
  CHECK(r.compared + r.discarded == 60);
  for (auto &f : r.failures)
    FAIL_CHECK(f.program << "\n" << f.divergence);
}
