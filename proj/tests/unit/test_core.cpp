#include "doctest.h"

#include "lsq/eval.hpp"
#include "lsq/syntax.hpp"
#include "lsq/typecheck.hpp"

using namespace lsq;

namespace {
const char *kRep = "cor (x: Int) yields Int => (cor (u: Unit) yields Int => yield(x))(yield(x))";
const char *kDup = "cor (x: Int) yields Bot => x + x";
const char *kOnce = "cor (x: Int) yields Int => yield(x)";
} // namespace

TEST_CASE("is_value follows the value list") {
  CHECK(is_value(mk_abs("x", unit_t(), mk_var("x"))));
  CHECK_FALSE(is_value(mk_yield(mk_unit())));
  CHECK_FALSE(is_value(mk_suspension(mk_unit(), mk_unit())));
  CHECK(is_value(mk_empty()));
  CHECK(is_value(mk_inst(3)));
}

TEST_CASE("substitute and free_vars") {
  CHECK(alpha_equal(substitute(mk_var("x"), "x", mk_unit()), mk_unit()));
  auto id = mk_abs("x", unit_t(), mk_var("x"));
  CHECK(substitute(id, "x", mk_unit()) == id);
  CHECK(free_vars(mk_var("x")) == std::set<std::string>{"x"});
  CHECK(free_vars(id).empty());
  CHECK(free_vars(mk_app(mk_var("f"), mk_yield(mk_var("y")))) == std::set<std::string>{"f", "y"});

  auto rep = parse_term(kRep);
  auto body = substitute(rep->kids[0], "x", mk_int(7));
  CHECK(alpha_equal(body, parse_term("(cor (u: Unit) yields Int => yield(7))(yield(7))")));
}

TEST_CASE("parser and printer") {
  auto dup = parse_term(kDup);
  REQUIRE(dup->kind == TermKind::Cor);
  CHECK(dup->name == "x");
  CHECK(type_eq(dup->yield_annot, bot_t()));
  CHECK(dup->kids[0]->kind == TermKind::Add);
  CHECK(parse_term("()")->kind == TermKind::Unit);
  CHECK_THROWS_AS(parse_term("resume(i, h1, h2, h3)"), SyntaxError);
  CHECK_THROWS_AS(parse_term("[[ () ]]^7"), SyntaxError);
  CHECK(print_term(parse_term(kOnce)) == "cor (x: Int) yields Int => yield(x)");
  CHECK(print_term(mk_suspension(mk_unit(), mk_int(7))) == "[[ () ]]^7");
  auto rep = parse_term(kRep);
  CHECK(alpha_equal(parse_term(print_term(rep)), rep));
  CHECK(print_type(parse_type("Int ~Int~> Unit")) == "Int ~Int~> Unit");
  CHECK(print_type(parse_type("(Int -> Int) -> Int <~> Unit")) == "(Int -> Int) -> Int <~> Unit");
  CHECK(type_eq(parse_type("Int -> Int -> Int"), fun_t(int_t(), fun_t(int_t(), int_t()))));
}

TEST_CASE("sequencing inside a yielding coroutine uses a coroutine binder") {
  auto t = parse_term("cor (x: Int) yields Int => yield(x); yield(x)");
  REQUIRE(t->kids[0]->kind == TermKind::App);
  CHECK(t->kids[0]->kids[0]->kind == TermKind::Cor);
  auto f = parse_term("fun (x: Int) => x; x");
  CHECK(f->kids[0]->kids[0]->kind == TermKind::Abs);
  CHECK(type_eq(check_user_program(t, Mode::Base), parse_type("Int ~Int~> Unit")));
}

TEST_CASE("reference coroutine judgments") {
  auto dup = infer({}, {}, parse_term(kDup), Mode::Base);
  CHECK(print_type(dup.type) == "Int ~Bot~> Int");
  CHECK(dup.yield->kind == TypeKind::Bot);
  auto once = infer({}, {}, parse_term(kOnce), Mode::Base);
  CHECK(print_type(once.type) == "Int ~Int~> Unit");
  auto st = infer({}, {}, parse_term(std::string("start(") + kOnce + ", 7)"), Mode::Base);
  CHECK(print_type(st.type) == "Int <~> Unit");
  CHECK_THROWS_AS(check_user_program(parse_term("yield(())"), Mode::Base), TypeError);
  CHECK(type_eq(check_user_program(parse_term("()"), Mode::Base), unit_t()));
}

TEST_CASE("subtype examples") {
  CHECK(subtype(bot_t(), parse_type("Int ~Int~> Unit")));
  CHECK(subtype(parse_type("Int ~Bot~> Int"), parse_type("Int ~Int~> Int")));
  CHECK_FALSE(subtype(parse_type("Int ~Int~> Int"), parse_type("Int ~Bot~> Int")));
  CHECK(type_eq(join(int_t(), bot_t()), int_t()));
  CHECK(type_eq(join(int_t(), unit_t()), top_t()));
  CHECK(type_eq(join(parse_type("Int ~Int~> Int"), parse_type("Int ~Bot~> Int")),
                parse_type("Int ~Int~> Int")));
}

TEST_CASE("store_well_typed") {
  CHECK(store_well_typed({}, {}, Mode::Base));
  InstanceTyping sigma{{0, parse_type("Int <~> Unit")}};
  InstanceMap mu{{0, mk_yield(mk_int(7))}};
  CHECK(store_well_typed(sigma, mu, Mode::Base));
  CHECK_FALSE(store_well_typed(sigma, {}, Mode::Base));
}

TEST_CASE("step examples") {
  Configuration c{mk_app(mk_abs("x", unit_t(), mk_var("x")), mk_unit()), {}};
  auto o = step(c);
  REQUIRE(o.kind == StepKind::Stepped);
  CHECK(o.rule == "E-AppAbs");
  CHECK(o.next.term->kind == TermKind::Unit);

  auto y = step({mk_yield(mk_int(7)), {}});
  CHECK(y.rule == "E-Yield");
  CHECK(print_term(y.next.term) == "[[ () ]]^7");

  InstanceStore s;
  s.mu[0] = mk_suspension(mk_unit(), mk_empty());
  s.next = 1;
  auto h = parse_term("cor (u: Unit) yields Bot => 0");
  auto r = step({mk_resume(mk_inst(0), h, h, h), s});
  CHECK(r.rule == "E-Resume2");
  CHECK(alpha_equal(r.next.term, mk_app(h, mk_unit())));
}

TEST_CASE("eval and drive") {
  auto e = eval({parse_term("()"), {}}, 10);
  CHECK(e.status == EvalStatus::Finished);
  CHECK(e.steps == 0);

  auto dup_driver = parse_term(std::string("resume(start(") + kDup +
                               ", 7), cor (r: Int) yields Bot => r, cor (y: Bot) yields Bot => 0, "
                               "cor (u: Unit) yields Bot => 0)");
  CHECK(type_eq(check_user_program(dup_driver, Mode::Base), int_t()));
  auto d = eval({dup_driver, {}}, 1000);
  REQUIRE(d.status == EvalStatus::Finished);
  CHECK(d.term->value == 14);

  auto rep = drive(parse_term(kRep), mk_int(7), 10);
  CHECK(rep.outcome == DriveOutcome::Result);
  REQUIRE(rep.yields.size() == 2);
  CHECK(rep.yields[0]->value == 7);
  CHECK(rep.yields[1]->value == 7);

  auto dd = drive(parse_term(kDup), mk_int(7), 10);
  CHECK(dd.yields.empty());
  REQUIRE(dd.outcome == DriveOutcome::Result);
  CHECK(dd.value->value == 14);

  auto outer = parse_term(std::string("let once: Int ~Int~> Unit = ") + kOnce +
                          " in cor (x: Int) yields Int => once(x); once(x)");
  auto od = eval({outer, {}}, 100);
  REQUIRE(od.status == EvalStatus::Finished);
  auto o2 = drive(od.term, mk_int(7), 10);
  CHECK(o2.outcome == DriveOutcome::Result);
  CHECK(o2.yields.size() == 2);
}
