#include "doctest.h"

#include "lsq/cps.hpp"
#include "lsq/eval.hpp"
#include "lsq/syntax.hpp"
#include "lsq/target.hpp"

using namespace lsq;
namespace tg = lsq::target;

namespace {

const char *kDup = "cor (x: Int) yields Bot => x + x";
const char *kOnce = "cor (x: Int) yields Int => yield(x)";
const char *kRep = "cor (x: Int) yields Int => (cor (u: Unit) yields Int => yield(x))(yield(x))";

tg::Result run_target(const TermP &src, long fuel = 100000) {
  return tg::eval(cps::transform_free({}, src), fuel);
}

// Source evaluation of a closed program to a value.
TermP run_source(const TermP &src, long fuel = 100000) {
  auto r = eval({src, {}}, fuel);
  REQUIRE(r.status == EvalStatus::Finished);
  return r.term;
}

} // namespace

TEST_CASE("target examples") {
  auto m = tg::match(tg::ret_tag(tg::int_t(), tg::int_t(), tg::int_lit(7)), "x", tg::var("x"), "y",
                     tg::int_lit(0), tg::int_lit(0));
  auto r = tg::eval(m, 100);
  REQUIRE(r.status == tg::Status::Value);
  CHECK(r.value->value == 7);

  auto d = tg::eval(tg::deref(tg::ref(tg::unit())), 100);
  REQUIRE(d.status == tg::Status::Value);
  CHECK(d.value->kind == tg::Kind::Unit);

  CHECK_THROWS_AS(tg::typecheck(tg::assign(tg::ref(tg::unit()), tg::int_lit(1))), tg::TypeError);
  CHECK(tg::type_eq(tg::typecheck(tg::ret_tag(tg::int_t(), tg::unit_t(), tg::unit())),
                    tg::out_t(tg::int_t(), tg::unit_t())));
  CHECK_THROWS_AS(tg::typecheck(tg::ret_tag(tg::int_t(), tg::unit_t(), tg::int_lit(1))), tg::TypeError);
}

TEST_CASE("target syntax round trip") {
  const char *srcs[] = {
      "(x: Int) => x + 1",
      "val r: Ref[Int] = ref(1); r := !r + 2; !r",
      "Ret[Int, Unit](()) match { case Ret(a) => 1; case Yield(b) => b; case Term => 0 }",
      "(f: Unit => Out[Never, Int]) => f(())",
      "() => Term[Int, Unit]",
      "abort[Int => Int](3)",
  };
  for (const char *s : srcs) {
    auto t = tg::parse_term(s);
    auto back = tg::parse_term(tg::print_term(t));
    CHECK_MESSAGE(tg::alpha_equal(t, back), s);
  }
  CHECK(tg::print_type(tg::parse_type("(Unit => Out[Int, Unit]) => Unit")) ==
        "(Unit => Out[Int, Unit]) => Unit");
  CHECK(tg::print_term(tg::parse_term("!r(a)")) == "!r(a)");
  CHECK(tg::parse_term("!r(a)")->kind == tg::Kind::App);
  CHECK_THROWS_AS(tg::parse_term("#cell<0>"), SyntaxError);
}

TEST_CASE("abbreviations expand to their definitions") {
  auto i = tg::int_t(), u = tg::unit_t();
  CHECK(tg::print_type(cps::kappa(i, i, u)) == "Int => Out[Int, Unit]");
  CHECK(tg::print_type(cps::rho(i, u)) == "Ref[Unit => Out[Int, Unit]]");
  CHECK(tg::print_type(cps::sigmaT(i, u)) == "(Unit => Out[Int, Unit]) => Unit");
  CHECK(tg::print_type(cps::gammaT(i, i, u)) ==
        "((Unit => Out[Int, Unit]) => Unit) => Int => Out[Int, Unit]");
  CHECK(tg::print_type(cps::phiT(i, u, i)) == "Out[Int, Unit] => Out[Int, Int]");
  CHECK(tg::type_eq(cps::translate_type(parse_type("Int ~Int~> Unit")), cps::gammaT(i, i, u)));
  CHECK(tg::type_eq(cps::translate_type(parse_type("Int <~> Unit")), cps::rho(i, u)));
  CHECK(tg::type_eq(cps::translate_type(unit_t()), u));
  CHECK_THROWS_AS(cps::translate_type(top_t()), cps::CpsError);
}

TEST_CASE("output transformer and store constructor") {
  cps::Fresh fresh;
  auto k = tg::abs("v", tg::int_t(), tg::ret_tag(tg::int_t(), tg::int_t(), tg::var("v")));
  auto phi = cps::build_output_transformer(int_t(), int_t(), int_t(), k, fresh);
  CHECK(tg::type_eq(tg::typecheck(phi), cps::phiT(tg::int_t(), tg::int_t(), tg::int_t())));
  auto on = [&](tg::TermP out) {
    auto r = tg::eval(tg::app(phi, out), 100);
    REQUIRE(r.status == tg::Status::Value);
    return r.value;
  };
  auto i = tg::int_t();
  auto ret = on(tg::ret_tag(i, i, tg::int_lit(7)));
  CHECK(ret->kind == tg::Kind::RetTag);
  CHECK(ret->kids[0]->value == 7);
  auto yl = on(tg::yield_tag(i, i, tg::int_lit(7)));
  CHECK(yl->kind == tg::Kind::YieldTag);
  CHECK(yl->kids[0]->value == 7);
  CHECK(on(tg::term_tag(i, i))->kind == tg::Kind::TermTag);

  auto psi = cps::build_store_constructor(int_t(), unit_t(), fresh);
  auto u = tg::unit_t();
  auto cell = tg::ref(tg::thunk(tg::term_tag(i, u)));
  CHECK(tg::type_eq(tg::typecheck(tg::app(psi, cell)), cps::sigmaT(i, u)));
  auto k1 = tg::thunk(tg::yield_tag(i, u, tg::int_lit(1)));
  auto k2 = tg::thunk(tg::yield_tag(i, u, tg::int_lit(2)));
  auto prog = tg::let("r", cps::rho(i, u), cell,
                      tg::seq(tg::app(tg::app(psi, tg::var("r")), k1),
                              tg::seq(tg::app(tg::app(psi, tg::var("r")), k2),
                                      tg::app(tg::deref(tg::var("r")), tg::unit()))));
  auto r = tg::eval(prog, 100);
  REQUIRE(r.status == tg::Status::Value);
  CHECK(r.value->kids[0]->value == 2);
}

TEST_CASE("printed translations are reproduced") {
  auto dup = cps::transform_free({}, parse_term(kDup));
  CHECK(tg::alpha_equal(
      dup, tg::parse_term("(s: (Unit => Out[Never, Int]) => Unit) => (x: Int) => "
                          "s(() => Term[Never, Int]); Ret[Never, Int](x + x)")));

  auto once = cps::transform_free({}, parse_term(kOnce));
  CHECK(tg::alpha_equal(
      once, tg::parse_term(
                "(s: (Unit => Out[Int, Unit]) => Unit) => (x: Int) => "
                "((s: (Unit => Out[Int, Unit]) => Unit) => (k: Unit => Out[Int, Unit]) => "
                "s(k); Yield[Int, Unit](x))(s)((y: Unit) => s(() => Term[Int, Unit]); Ret[Int, Unit](y))")));
  CHECK(tg::type_eq(tg::typecheck(once), cps::gammaT(tg::int_t(), tg::int_t(), tg::unit_t())));

  auto legacy = parse_term("(fun (x: Unit) => x)(())");
  CHECK(tg::alpha_equal(cps::transform_free({}, legacy),
                        tg::app(tg::abs("x", tg::unit_t(), tg::var("x")), tg::unit())));
}

TEST_CASE("transform preconditions") {
  cps::TransformEnv env{{}, bot_t(), int_t(), {}};
  CHECK_THROWS_AS(cps::transform(env, parse_term("()")), cps::CpsError);
  try {
    cps::transform(env, parse_term("()"));
  } catch (const cps::CpsError &e) {
    CHECK(e.kind == cps::CpsErrorKind::UnsupportedAtBottom);
  }
  TypingContext g{{"x", int_t()}};
  try {
    cps::transform_free(g, mk_yield(mk_var("x")));
    FAIL("expected an error");
  } catch (const cps::CpsError &e) {
    CHECK(e.kind == cps::CpsErrorKind::FreeYield);
  }

  cps::TransformEnv in{{{"x", int_t()}}, int_t(), unit_t(), {}};
  auto y = cps::transform(in, mk_yield(mk_var("x")));
  CHECK(tg::print_term(y).find("Yield[Int, Unit](x)") != std::string::npos);
  auto u = cps::transform(in, mk_unit());
  CHECK(tg::print_term(u).find("(())") != std::string::npos);
}

TEST_CASE("translated programs agree with the source") {
  const std::string progs[] = {
      std::string("resume(start(") + kDup +
          ", 7), cor (r: Int) yields Bot => r, cor (y: Bot) yields Bot => 0, "
          "cor (u: Unit) yields Bot => 0)",
      std::string("let i: Int <~> Unit = start(") + kRep + ", 7) in " +
          "resume(i, cor (r: Unit) yields Bot => 0, cor (y: Int) yields Bot => y, "
          "cor (u: Unit) yields Bot => 0)",
      std::string("let i: Int <~> Unit = start(") + kRep + ", 7) in " +
          "let a: Int = resume(i, cor (r: Unit) yields Bot => 0, cor (y: Int) yields Bot => y, "
          "cor (u: Unit) yields Bot => 0) in "
          "let j: Int <~> Unit = snapshot(i) in "
          "let b: Int = resume(i, cor (r: Unit) yields Bot => 0, cor (y: Int) yields Bot => y + 1, "
          "cor (u: Unit) yields Bot => 0) in "
          "let c: Int = resume(j, cor (r: Unit) yields Bot => 100, cor (y: Int) yields Bot => y + 2, "
          "cor (u: Unit) yields Bot => 0) in "
          "let d: Int = resume(i, cor (r: Unit) yields Bot => 1000, cor (y: Int) yields Bot => y, "
          "cor (u: Unit) yields Bot => 0) in "
          "let e: Int = resume(i, cor (r: Unit) yields Bot => 1000, cor (y: Int) yields Bot => y, "
          "cor (u: Unit) yields Bot => 5) in a + b + c + d + e",
      "(fix(fun (f: Int -> Int) => fun (n: Int) => n))(3)",
  };
  for (const auto &p : progs) {
    auto src = parse_term(p);
    auto tgt = cps::transform_free({}, src);
    CHECK_NOTHROW(tg::typecheck(tgt));
    auto expect = run_source(src);
    auto got = run_target(src);
    REQUIRE_MESSAGE(got.status == tg::Status::Value, p << "\n" << got.reason);
    CHECK_MESSAGE(got.value->value == expect->value, p);
  }
}
