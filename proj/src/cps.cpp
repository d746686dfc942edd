#include "lsq/cps.hpp"

#include "lsq/syntax.hpp"

#include <functional>
#include <map>
#include <vector>

namespace lsq::cps {

tg::TypeP translate_type(const TypeP &t) {
  switch (t->kind) {
  case TypeKind::Unit: return tg::unit_t();
  case TypeKind::Int: return tg::int_t();
  case TypeKind::Bot: return tg::never_t();
  case TypeKind::Top:
    throw CpsError(CpsErrorKind::Unsupported, "Top has no target counterpart");
  case TypeKind::Fun:
    return tg::fun_t(translate_type(t->args[0]), translate_type(t->args[1]));
  case TypeKind::Cor:
    return gammaT(translate_type(t->args[0]), translate_type(t->args[1]),
                  translate_type(t->args[2]));
  case TypeKind::Inst:
    return rho(translate_type(t->args[0]), translate_type(t->args[1]));
  }
  throw CpsError(CpsErrorKind::Unsupported, "unknown type");
}

tg::TypeP kappa(tg::TypeP t, tg::TypeP ty, tg::TypeP tr) {
  return tg::fun_t(std::move(t), tg::out_t(std::move(ty), std::move(tr)));
}
tg::TypeP rho(tg::TypeP ty, tg::TypeP tr) {
  return tg::ref_t(kappa(tg::unit_t(), std::move(ty), std::move(tr)));
}
tg::TypeP sigmaT(tg::TypeP ty, tg::TypeP tr) {
  return tg::fun_t(kappa(tg::unit_t(), std::move(ty), std::move(tr)), tg::unit_t());
}
tg::TypeP gammaT(tg::TypeP t1, tg::TypeP ty, tg::TypeP tr) {
  return tg::fun_t(sigmaT(ty, tr), tg::fun_t(std::move(t1), tg::out_t(ty, tr)));
}
tg::TypeP phiT(tg::TypeP ty, tg::TypeP tr, tg::TypeP tq) {
  return tg::fun_t(tg::out_t(ty, std::move(tr)), tg::out_t(ty, std::move(tq)));
}

tg::TermP build_output_transformer(const TypeP &ty, const TypeP &tr, const TypeP &tq,
                                   const tg::TermP &k, Fresh &fresh) {
  auto y = translate_type(ty), r = translate_type(tr), q = translate_type(tq);
  std::string o = fresh("o"), a = fresh("x"), b = fresh("x");
  return tg::abs(o, tg::out_t(y, r),
                 tg::match(tg::var(o), a, tg::app(k, tg::var(a)), b,
                           tg::yield_tag(y, q, tg::var(b)), tg::term_tag(y, q)));
}

tg::TermP build_store_constructor(const TypeP &ty, const TypeP &tr, Fresh &fresh) {
  auto y = translate_type(ty), r = translate_type(tr);
  std::string x = fresh("r"), k = fresh("k");
  return tg::abs(x, rho(y, r),
                 tg::abs(k, kappa(tg::unit_t(), y, r), tg::assign(tg::var(x), tg::var(k))));
}

namespace {

using Atom = tg::TermP;
using Rest = std::function<tg::TermP(const Atom &)>;

bool is_atomic(const tg::TermP &t) {
  return t->kind == tg::Kind::Var || t->kind == tg::Kind::Unit || t->kind == tg::Kind::Int;
}

bool is_bot(const TypeP &t) { return t->kind == TypeKind::Bot; }

// A continuation is either a meta-level function producing code for its
// argument, or a target term of type kappa.
struct Cont {
  tg::TypeP arg;
  Rest meta;
  tg::TermP term;
};

class Transformer {
public:
  explicit Transformer(Fresh &fresh) : fresh_(fresh) {}

  Judgment judge(const TypingContext &gamma, const TermP &t) {
    try {
      return infer({}, gamma, t, Mode::Base);
    } catch (const TypeError &e) {
      throw CpsError(CpsErrorKind::Unsupported, std::string("ill-typed input: ") + e.what());
    }
  }

  tg::TermP free(TypingContext &g, const TermP &t) {
    const auto &k = t->kids;
    switch (t->kind) {
    case TermKind::Var: return tg::var(t->name);
    case TermKind::Unit: return tg::unit();
    case TermKind::Int: return tg::int_lit(t->value);
    case TermKind::Add: return tg::add(free(g, k[0]), free(g, k[1]));
    case TermKind::Abs: {
      g.emplace_back(t->name, t->annot);
      auto body = free(g, k[0]);
      g.pop_back();
      return tg::abs(t->name, translate_type(t->annot), body);
    }
    case TermKind::Cor:
      return free_coroutine(g, t);
    case TermKind::App: {
      TypeP ft = judge(g, k[0]).type;
      if (ft->kind == TypeKind::Fun)
        return tg::app(free(g, k[0]), free(g, k[1]));
      if (ft->kind == TypeKind::Cor && is_bot(ft->args[1])) {
        tg::TypeP out = translate_type(ft->args[2]);
        return direct_call(free(g, k[0]), free(g, k[1]), ft, out, [](const Atom &r) { return r; });
      }
      throw CpsError(CpsErrorKind::Unsupported, "application outside a coroutine: " + print_term(t));
    }
    case TermKind::Start: {
      TypeP ct = judge(g, k[0]).type;
      if (ct->kind != TypeKind::Cor)
        throw CpsError(CpsErrorKind::Unsupported, "start of a non-coroutine");
      return bind(free(g, k[0]), translate_type(ct), [&](const Atom &xc) {
        return bind(free(g, k[1]), translate_type(ct->args[0]), [&](const Atom &xa) {
          return start(xc, xa, ct, [](const Atom &r) { return r; });
        });
      });
    }
    case TermKind::Snapshot:
      return tg::ref(tg::deref(free(g, k[0])));
    case TermKind::Resume: {
      TypeP result = judge(g, t).type;
      std::vector<TypeP> types;
      std::vector<tg::TermP> parts;
      for (auto &kid : k) {
        types.push_back(judge(g, kid).type);
        parts.push_back(free(g, kid));
      }
      tg::TypeP out = translate_type(result);
      return bind_all(parts, types, 0, {}, [&](const std::vector<Atom> &xs) {
        return resume(xs, types, [&](const Atom &h, const TypeP &ht, const Atom &v) {
          return direct_call(h, v, ht, out, [](const Atom &r) { return r; });
        });
      });
    }
    case TermKind::Fix: {
      TypeP ft = judge(g, k[0]).type;
      return bind(free(g, k[0]), translate_type(ft), [&](const Atom &xf) {
        return fix(xf, ft->args[0], [](const Atom &r) { return r; });
      });
    }
    case TermKind::Yield:
      throw CpsError(CpsErrorKind::Unsupported, "yield of an uninhabited value");
    default:
      throw CpsError(CpsErrorKind::Unsupported, "runtime form in a program");
    }
  }

  // (s: sigmaT) => (k: kappa) => body, for a coroutine body.
  tg::TermP xi(TypingContext &g, const TypeP &ty, const TypeP &tr, const TermP &t) {
    TypeP tt = judge(g, t).type;
    Ctx c{g, ty, tr, fresh_("s"), translate_type(ty), translate_type(tr)};
    std::string k = fresh_("k");
    tg::TermP body = cps(c, t, Cont{translate_type(tt), nullptr, tg::var(k)});
    return tg::abs(c.s, sigmaT(c.y, c.r), tg::abs(k, kappa(translate_type(tt), c.y, c.r), body));
  }

private:
  Fresh &fresh_;

  struct Ctx {
    TypingContext &g;
    TypeP ty, tr;
    std::string s;
    tg::TypeP y, r;
    tg::TypeP out() const { return tg::out_t(y, r); }
  };

  // ---- shared building blocks -------------------------------------------

  tg::TermP bind(const tg::TermP &t, const tg::TypeP &type, const Rest &rest) {
    if (is_atomic(t))
      return rest(t);
    std::string x = fresh_("x");
    return tg::let(x, type, t, rest(tg::var(x)));
  }

  tg::TermP bind_all(const std::vector<tg::TermP> &parts, const std::vector<TypeP> &types, size_t i,
                     std::vector<Atom> acc,
                     const std::function<tg::TermP(const std::vector<Atom> &)> &rest) {
    if (i == parts.size())
      return rest(acc);
    return bind(parts[i], translate_type(types[i]), [&](const Atom &a) {
      auto next = acc;
      next.push_back(a);
      return bind_all(parts, types, i + 1, std::move(next), rest);
    });
  }

  tg::TermP free_coroutine(TypingContext &g, const TermP &t) {
    TypeP ct = judge(g, t).type;
    TypeP ty = t->yield_annot, tr = ct->args[2];
    tg::TypeP y = translate_type(ty), r = translate_type(tr);
    std::string s = fresh_("s");
    g.emplace_back(t->name, t->annot);
    tg::TermP body;
    auto finish = [&](const tg::TermP &v) {
      return tg::seq(tg::app(tg::var(s), tg::thunk(tg::term_tag(y, r))), tg::ret_tag(y, r, v));
    };
    if (is_bot(ty)) {
      body = finish(free(g, t->kids[0]));
    } else {
      tg::TermP inner = xi(g, ty, tr, t->kids[0]);
      std::string x2 = fresh_("x");
      body = tg::app(inner, tg::var(s), tg::abs(x2, r, finish(tg::var(x2))));
    }
    g.pop_back();
    return tg::abs(s, sigmaT(y, r), tg::abs(t->name, translate_type(t->annot), body));
  }

  // Calls a coroutine that never yields with a store function that drops
  // what it is given.
  tg::TermP direct_call(const tg::TermP &f, const tg::TermP &a, const TypeP &cor,
                        const tg::TypeP &arm_type, const Rest &on_ret) {
    tg::TypeP y = tg::never_t(), r = translate_type(cor->args[2]);
    tg::TermP dummy = tg::abs(fresh_("k"), kappa(tg::unit_t(), y, r), tg::unit());
    std::string xr = fresh_("x"), xy = fresh_("x");
    return tg::match(tg::app(f, dummy, a), xr, on_ret(tg::var(xr)), xy, tg::abort_t(arm_type),
                     tg::abort_t(arm_type));
  }

  // Calls a coroutine that shares the caller's yield type.
  tg::TermP cor_call(const Ctx &c, const Atom &f, const Atom &a, const TypeP &cor, const Cont &k) {
    TypeP tr_callee = cor->args[2];
    tg::TypeP rc = translate_type(tr_callee);
    std::string fn = fresh_("f"), s2 = fresh_("s"), k2 = fresh_("k"), u = fresh_("u");
    tg::TermP phi = build_output_transformer(c.ty, tr_callee, c.tr, reify(k), fresh_);
    tg::TermP store = tg::abs(
        k2, kappa(tg::unit_t(), c.y, rc),
        tg::app(tg::var(c.s),
                tg::abs(u, tg::unit_t(), tg::app(tg::var(fn), tg::app(tg::var(k2), tg::var(u))))));
    return tg::let(fn, tg::fun_t(tg::out_t(c.y, rc), c.out()), phi,
                   tg::let(s2, sigmaT(c.y, rc), store,
                           tg::app(tg::var(fn), tg::app(f, tg::var(s2), a))));
  }

  // The store function of a started instance writes into whichever instance
  // of its type is being resumed. A snapshot copies the stored continuation,
  // which still closes over this function, so binding it to the original
  // reference would make the copy's later yields land in the original.
  tg::TermP start(const Atom &xc, const Atom &xa, const TypeP &cor, const Rest &rest) {
    tg::TypeP y = translate_type(cor->args[1]), r = translate_type(cor->args[2]);
    std::string ref = fresh_("i"), k = fresh_("k");
    tg::TermP psi = build_store_constructor(cor->args[1], cor->args[2], fresh_);
    tg::TermP store = tg::abs(k, kappa(tg::unit_t(), y, r),
                              tg::app(psi, tg::deref(tg::var(active(y, r))), tg::var(k)));
    tg::TermP launch = tg::thunk(tg::app(xc, store, xa));
    return tg::let(ref, rho(y, r), tg::ref(tg::thunk(tg::term_tag(y, r))),
                   tg::seq(tg::assign(tg::var(ref), launch), rest(tg::var(ref))));
  }

  using HandlerCall = std::function<tg::TermP(const Atom &h, const TypeP &ht, const Atom &v)>;

  // Marks the instance as running, runs its stored continuation with the
  // instance registered as active, and dispatches on the outcome once the
  // previous active instance is restored.
  tg::TermP resume(const std::vector<Atom> &xs, const std::vector<TypeP> &types,
                   const HandlerCall &call) {
    const TypeP &inst = types[0];
    if (inst->kind != TypeKind::Inst)
      throw CpsError(CpsErrorKind::Unsupported, "resume of a non-instance");
    tg::TypeP y = translate_type(inst->args[0]), r = translate_type(inst->args[1]);
    std::string reg = active(y, r);
    std::string saved = fresh_("a"), cont = fresh_("c"), out = fresh_("o"), v = fresh_("x"),
                w = fresh_("x");
    tg::TermP dispatch =
        tg::match(tg::var(out), v, call(xs[1], types[1], tg::var(v)), w,
                  call(xs[2], types[2], tg::var(w)), call(xs[3], types[3], tg::unit()));
    tg::TermP run = tg::let(
        out, tg::out_t(y, r), tg::app(tg::var(cont), tg::unit()),
        tg::seq(tg::assign(tg::var(reg), tg::var(saved)), dispatch));
    return tg::let(
        saved, rho(y, r), tg::deref(tg::var(reg)),
        tg::seq(tg::assign(tg::var(reg), xs[0]),
                tg::let(cont, kappa(tg::unit_t(), y, r), tg::deref(xs[0]),
                        tg::seq(tg::assign(xs[0], tg::thunk(tg::term_tag(y, r))), run))));
  }

  // One register per instance type, holding the instance being resumed.
  std::string active(const tg::TypeP &y, const tg::TypeP &r) {
    std::string key = tg::print_type(tg::out_t(y, r));
    auto it = registers_.find(key);
    if (it != registers_.end())
      return it->second.name;
    std::string name = fresh_("active");
    registers_.emplace(key, Register{name, y, r});
    order_.push_back(key);
    return name;
  }

public:
  // Declares the registers used by `t` around it.
  tg::TermP with_registers(tg::TermP t) {
    for (auto it = order_.rbegin(); it != order_.rend(); ++it) {
      const Register &g = registers_.at(*it);
      tg::TermP idle = tg::ref(tg::thunk(tg::term_tag(g.y, g.r)));
      t = tg::let(g.name, tg::ref_t(rho(g.y, g.r)), tg::ref(idle), t);
    }
    return t;
  }

private:
  struct Register {
    std::string name;
    tg::TypeP y, r;
  };
  std::map<std::string, Register> registers_;
  std::vector<std::string> order_;

  // Ties the knot through a reference holding a placeholder.
  tg::TermP fix(const Atom &xf, const TypeP &t, const Rest &rest) {
    tg::TypeP tt = translate_type(t);
    std::string ref = fresh_("r"), fx = fresh_("x");
    tg::TermP placeholder, eta;
    auto self = tg::deref(tg::var(ref));
    if (t->kind == TypeKind::Fun) {
      tg::TypeP a = translate_type(t->args[0]), b = translate_type(t->args[1]);
      std::string p = fresh_("x"), q = fresh_("x");
      placeholder = tg::abs(p, a, tg::abort_t(b));
      eta = tg::abs(q, a, tg::app(self, tg::var(q)));
    } else if (t->kind == TypeKind::Cor) {
      tg::TypeP p = translate_type(t->args[0]);
      tg::TypeP y = translate_type(t->args[1]), r = translate_type(t->args[2]);
      std::string s1 = fresh_("s"), p1 = fresh_("x"), s2 = fresh_("s"), p2 = fresh_("x");
      placeholder = tg::abs(s1, sigmaT(y, r), tg::abs(p1, p, tg::abort_t(tg::out_t(y, r))));
      eta = tg::abs(s2, sigmaT(y, r), tg::abs(p2, p, tg::app(self, tg::var(s2), tg::var(p2))));
    } else {
      throw CpsError(CpsErrorKind::Unsupported,
                     "fix is only translated at function and coroutine types");
    }
    return tg::let(ref, tg::ref_t(tt), tg::ref(placeholder),
                   tg::seq(tg::assign(tg::var(ref), tg::app(xf, eta)),
                           tg::let(fx, tt, tg::deref(tg::var(ref)), rest(tg::var(fx)))));
  }

  // ---- continuations ------------------------------------------------------

  tg::TermP apply(const Cont &k, const Atom &a) { return k.meta ? k.meta(a) : tg::app(k.term, a); }

  tg::TermP pass(const Cont &k, const tg::TermP &t) {
    if (is_atomic(t))
      return apply(k, t);
    if (!k.meta)
      return tg::app(k.term, t);
    return bind(t, k.arg, k.meta);
  }

  tg::TermP reify(const Cont &k) {
    if (!k.meta)
      return k.term;
    std::string x = fresh_("x");
    return tg::abs(x, k.arg, k.meta(tg::var(x)));
  }

  // Names the continuation so several branches can call it.
  tg::TermP share(const Ctx &c, const Cont &k, const std::function<tg::TermP(const Cont &)> &body) {
    if (!k.meta && k.term->kind == tg::Kind::Var)
      return body(k);
    std::string name = fresh_("k");
    return tg::let(name, kappa(k.arg, c.y, c.r), reify(k), body(Cont{k.arg, nullptr, tg::var(name)}));
  }

  // ---- inside a coroutine -------------------------------------------------

  tg::TermP cps(const Ctx &c, const TermP &t, const Cont &k) {
    Judgment j = judge(c.g, t);
    if (is_bot(j.yield))
      return pass(k, free(c.g, t));
    const auto &kids = t->kids;
    auto sub = [&](const TermP &e, const Rest &rest) {
      return cps(c, e, Cont{translate_type(judge(c.g, e).type), rest, nullptr});
    };
    switch (t->kind) {
    case TermKind::Yield:
      return sub(kids[0], [&](const Atom &v) {
        return tg::seq(tg::app(tg::var(c.s), reify(k)), tg::yield_tag(c.y, c.r, v));
      });
    case TermKind::Add:
      return sub(kids[0], [&](const Atom &a) {
        return sub(kids[1], [&](const Atom &b) { return pass(k, tg::add(a, b)); });
      });
    case TermKind::App: {
      TypeP ft = judge(c.g, kids[0]).type;
      return sub(kids[0], [&](const Atom &f) {
        return sub(kids[1], [&](const Atom &a) { return call(c, f, a, ft, k); });
      });
    }
    case TermKind::Start: {
      TypeP ct = judge(c.g, kids[0]).type;
      if (ct->kind != TypeKind::Cor)
        throw CpsError(CpsErrorKind::Unsupported, "start of a non-coroutine");
      return sub(kids[0], [&](const Atom &xc) {
        return sub(kids[1], [&](const Atom &xa) {
          return start(xc, xa, ct, [&](const Atom &r) { return apply(k, r); });
        });
      });
    }
    case TermKind::Snapshot:
      return sub(kids[0], [&](const Atom &x) { return pass(k, tg::ref(tg::deref(x))); });
    case TermKind::Fix: {
      TypeP ft = judge(c.g, kids[0]).type;
      return sub(kids[0], [&](const Atom &xf) {
        return fix(xf, ft->args[0], [&](const Atom &r) { return apply(k, r); });
      });
    }
    case TermKind::Resume: {
      std::vector<TypeP> types;
      for (auto &kid : kids)
        types.push_back(judge(c.g, kid).type);
      return sub(kids[0], [&](const Atom &x0) {
        return sub(kids[1], [&](const Atom &x1) {
          return sub(kids[2], [&](const Atom &x2) {
            return sub(kids[3], [&](const Atom &x3) {
              return share(c, k, [&](const Cont &kk) {
                return resume({x0, x1, x2, x3}, types,
                              [&](const Atom &h, const TypeP &ht, const Atom &v) {
                                return call(c, h, v, ht, kk);
                              });
              });
            });
          });
        });
      });
    }
    default:
      throw CpsError(CpsErrorKind::Unsupported, "cannot translate " + print_term(t));
    }
  }

  tg::TermP call(const Ctx &c, const Atom &f, const Atom &a, const TypeP &ft, const Cont &k) {
    if (ft->kind == TypeKind::Fun)
      return pass(k, tg::app(f, a));
    if (ft->kind == TypeKind::Cor && is_bot(ft->args[1]))
      return direct_call(f, a, ft, c.out(), [&](const Atom &r) { return apply(k, r); });
    if (ft->kind == TypeKind::Cor && type_eq(ft->args[1], c.ty))
      return cor_call(c, f, a, ft, k);
    throw CpsError(CpsErrorKind::Unsupported, "call of a " + print_type(ft) + " value");
  }
};

} // namespace

tg::TermP transform(TransformEnv &env, const TermP &t) {
  if (!env.yield || is_bot(env.yield))
    throw CpsError(CpsErrorKind::UnsupportedAtBottom, "transform needs a non-bottom yield type");
  Transformer x(env.fresh);
  return x.with_registers(x.xi(env.gamma, env.yield, env.ret, t));
}

tg::TermP transform_free(const TypingContext &gamma, const TermP &t) {
  Fresh fresh;
  Transformer x(fresh);
  Judgment j = x.judge(gamma, t);
  if (!is_bot(j.yield))
    throw CpsError(CpsErrorKind::FreeYield, "term yields " + print_type(j.yield));
  TypingContext g = gamma;
  return x.with_registers(x.free(g, t));
}

} // namespace lsq::cps
