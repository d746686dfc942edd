#include "lsq/generator.hpp"

#include <algorithm>
#include <functional>
#include <vector>

namespace lsq {

TypeP gen_type(std::mt19937_64 &rng, int depth, bool with_extremes) {
  auto pick = [&](int n) { return static_cast<int>(rng() % static_cast<uint64_t>(n)); };
  int leaves = with_extremes ? 4 : 2;
  int choice = depth <= 0 ? pick(leaves) : pick(leaves + 3);
  switch (choice) {
  case 0: return unit_t();
  case 1: return int_t();
  case 2: return with_extremes ? bot_t() : unit_t();
  case 3: return with_extremes ? top_t() : int_t();
  default: break;
  }
  switch ((choice - leaves) % 3) {
  case 0: return fun_t(gen_type(rng, depth - 1, with_extremes), gen_type(rng, depth - 1, with_extremes));
  case 1:
    return cor_t(gen_type(rng, depth - 1, with_extremes), gen_type(rng, depth - 1, with_extremes),
                 gen_type(rng, depth - 1, with_extremes));
  default:
    return inst_t(gen_type(rng, depth - 1, with_extremes), gen_type(rng, depth - 1, with_extremes));
  }
}

namespace {

class Gen {
public:
  Gen(uint64_t seed, Mode mode) : rng_(seed), mode_(mode) {}

  TermP program(int size) {
    TypeP goal = coin(0.8) ? int_t() : unit_t();
    return gen(goal, bot_t(), size);
  }

  GeneratedBody body(int size) {
    std::string x = fresh();
    TypeP a = base();
    env_.emplace_back(x, a);
    TermP b = gen(base(), int_t(), size);
    env_.pop_back();
    return {x, a, b};
  }

private:
  std::mt19937_64 rng_;
  Mode mode_;
  TypingContext env_;
  int names_ = 0;

  int pick(int n) { return static_cast<int>(rng_() % static_cast<uint64_t>(n)); }
  bool coin(double p) { return std::uniform_real_distribution<double>(0, 1)(rng_) < p; }
  std::string fresh() { return "v" + std::to_string(names_++); }
  bool sub() const { return mode_ == Mode::Subtyping; }

  TypeP base() { return coin(0.7) ? int_t() : unit_t(); }

  TypeP yield_type() {
    int n = pick(sub() ? 4 : 3);
    if (n == 0) return bot_t();
    if (n == 1) return unit_t();
    if (n == 3) return top_t();
    return int_t();
  }

  // Parameter types accepting a base argument, possibly through subsumption.
  TypeP param_for(const TypeP &a) { return sub() && coin(0.2) ? top_t() : a; }

  TypeP value_type() {
    switch (pick(5)) {
    case 0: return fun_t(param_for(base()), base());
    case 1: return cor_t(base(), yield_type(), base());
    case 2: return inst_t(yield_type(), base());
    default: return base();
    }
  }

  // Splits a budget of `s` over `k` children, each getting at least one.
  std::vector<int> split(int s, int k) {
    std::vector<int> out(k, 1);
    for (int left = s - k; left > 0; --left)
      ++out[pick(k)];
    return out;
  }

  std::vector<std::string> vars_of(const TypeP &t) {
    std::vector<std::string> out;
    std::vector<std::string> seen;
    for (size_t i = env_.size(); i-- > 0;) {
      bool shadowed = false;
      for (auto &s : seen)
        shadowed |= s == env_[i].first;
      seen.push_back(env_[i].first);
      if (!shadowed && type_eq(env_[i].second, t))
        out.push_back(env_[i].first);
    }
    return out;
  }

  TermP with_binding(const std::string &x, const TypeP &t, const std::function<TermP()> &f) {
    env_.emplace_back(x, t);
    TermP r = f();
    env_.pop_back();
    return r;
  }

  TermP lambda(const TypeP &t, int size) {
    std::string x = fresh();
    if (t->kind == TypeKind::Fun)
      return mk_abs(x, t->args[0], with_binding(x, t->args[0], [&] {
                      return gen(t->args[1], bot_t(), size);
                    }));
    const TypeP &w = t->args[1];
    return mk_cor(x, t->args[0], w, with_binding(x, t->args[0], [&] {
                    if (w->kind == TypeKind::Bot || !coin(0.7))
                      return gen(t->args[2], w, size);
                    return yield_then(t->args[2], w, size);
                  }));
  }

  // yield(e); t  with the sequencing binder typed at the enclosing yield.
  TermP yield_then(const TypeP &t, const TypeP &y, int size) {
    auto s = split(std::max(size - 1, 2), 2);
    TypeP arg = y->kind == TypeKind::Top ? base() : y;
    TermP first = mk_yield(gen(arg, y, s[0]));
    std::string u = fresh();
    TermP rest = with_binding(u, unit_t(), [&] { return gen(t, y, s[1]); });
    return mk_app(mk_cor(u, unit_t(), y, rest), first);
  }

  TermP leaf(const TypeP &t, const TypeP &y) {
    auto vs = vars_of(t);
    if (!vs.empty() && coin(0.6))
      return mk_var(vs[pick(static_cast<int>(vs.size()))]);
    switch (t->kind) {
    case TypeKind::Int: return mk_int(pick(10));
    case TypeKind::Unit: return mk_unit();
    case TypeKind::Top: return leaf(base(), y);
    case TypeKind::Fun:
    case TypeKind::Cor: return lambda(t, 1);
    case TypeKind::Inst: {
      TypeP a = base();
      return mk_start(leaf(cor_t(a, t->args[0], t->args[1]), y), leaf(a, y));
    }
    case TypeKind::Bot: break;
    }
    return mk_unit();
  }

  TermP handler(const TypeP &param, const TypeP &hy, const TypeP &t, int size) {
    std::string x = fresh();
    return mk_cor(x, param, hy, with_binding(x, param, [&] { return gen(t, hy, size); }));
  }

  TermP let_in(const std::string &x, const TypeP &a, TermP t1, const TypeP &y,
               const std::function<TermP()> &body) {
    TermP t2 = with_binding(x, a, body);
    if (y->kind != TypeKind::Bot)
      return mk_app(mk_cor(x, a, y, t2), std::move(t1));
    return mk_app(mk_abs(x, a, t2), std::move(t1));
  }

  // Starts an instance, maybe snapshots it, and resumes both several times,
  // summing what the handlers report.
  TermP instance_script(const TypeP &y, int size) {
    TypeP w = coin(0.7) ? int_t() : yield_type(), r = base();
    TypeP it = inst_t(w, r);
    auto s = split(size - 1, 4);
    std::string i = fresh(), j = fresh();
    TermP inst = gen(it, y, s[0]);
    bool snap = coin(0.6);
    TypeP hy = y->kind != TypeKind::Bot && coin(0.3) ? y : bot_t();
    auto res = [&](const std::string &target, int budget) {
      auto hs = split(std::max(budget, 3), 3);
      return mk_resume(mk_var(target), handler(r, hy, int_t(), hs[0]), handler(w, hy, int_t(), hs[1]),
                       handler(unit_t(), hy, int_t(), hs[2]));
    };
    return let_in(i, it, inst, y, [&] {
      return let_in(j, it, snap ? mk_snapshot(mk_var(i)) : mk_var(i), y, [&] {
        int n = 2 + pick(3);
        TermP acc = res(i, s[1]);
        for (int k = 1; k < n; ++k) {
          std::string target = k % 2 ? j : i;
          acc = mk_add(acc, res(target, k == 1 ? s[2] : s[3]));
        }
        return acc;
      });
    });
  }

  TermP gen(const TypeP &t, const TypeP &y, int size) {
    if (size <= 1)
      return leaf(t, y);
    if (t->kind == TypeKind::Top)
      return gen(base(), y, size);
    bool in_cor = y->kind != TypeKind::Bot;
    std::vector<std::pair<int, std::function<TermP()>>> options;

    if (t->kind == TypeKind::Int)
      options.push_back({3, [&] {
                           auto s = split(size - 1, 2);
                           return mk_add(gen(int_t(), y, s[0]), gen(int_t(), y, s[1]));
                         }});
    options.push_back({2, [&] {
                         TypeP a = base();
                         auto s = split(size - 1, 2);
                         return mk_app(gen(fun_t(param_for(a), t), y, s[0]), gen(a, y, s[1]));
                       }});
    options.push_back({4, [&] {
                         TypeP a = value_type();
                         auto s = split(size - 1, 2);
                         std::string x = fresh();
                         TermP t1 = gen(a, y, s[0]);
                         TermP t2 = with_binding(x, a, [&] { return gen(t, y, s[1]); });
                         if (in_cor)
                           return mk_app(mk_cor(x, a, y, t2), t1);
                         return mk_app(mk_abs(x, a, t2), t1);
                       }});
    if (in_cor)
      options.push_back({3, [&] { return yield_then(t, y, size); }});
    if (in_cor && t->kind == TypeKind::Unit)
      options.push_back({5, [&] {
                           TypeP arg = y->kind == TypeKind::Top ? base() : y;
                           return mk_yield(gen(arg, y, size - 1));
                         }});
    options.push_back({2, [&] {
                         TypeP w = in_cor && coin(0.6) ? y : bot_t();
                         TypeP a = base();
                         auto s = split(size - 1, 2);
                         return mk_app(gen(cor_t(a, w, t), y, s[0]), gen(a, y, s[1]));
                       }});
    if (size >= 4)
      options.push_back({4, [&] {
                           TypeP w = yield_type(), r = base();
                           TypeP hy = in_cor && coin(0.3) ? y : bot_t();
                           auto s = split(size - 1, 4);
                           TermP target = gen(inst_t(w, r), y, s[0]);
                           return mk_resume(target, handler(r, hy, t, s[1]), handler(w, hy, t, s[2]),
                                            handler(unit_t(), hy, t, s[3]));
                         }});
    if (t->kind == TypeKind::Int && size >= 8)
      options.push_back({4, [&] { return instance_script(y, size); }});
    if (t->kind == TypeKind::Inst) {
      options.push_back({2, [&] { return mk_snapshot(gen(t, y, size - 1)); }});
      options.push_back({3, [&] {
                           TypeP a = base();
                           auto s = split(size - 1, 2);
                           return mk_start(gen(cor_t(a, t->args[0], t->args[1]), y, s[0]),
                                           gen(a, y, s[1]));
                         }});
    }
    if (t->kind == TypeKind::Fun || t->kind == TypeKind::Cor) {
      options.push_back({3, [&] { return lambda(t, size - 1); }});
      options.push_back({1, [&] {
                           std::string self = fresh();
                           return mk_fix(mk_abs(self, t, with_binding(self, t, [&] {
                                                  return lambda(t, size - 2);
                                                })));
                         }});
    }
    if (!vars_of(t).empty())
      options.push_back({2, [&] { return leaf(t, y); }});

    int total = 0;
    for (auto &o : options)
      total += o.first;
    int r = pick(total);
    for (auto &o : options) {
      if (r < o.first)
        return o.second();
      r -= o.first;
    }
    return leaf(t, y);
  }
};

} // namespace

TermP gen_well_typed(uint64_t seed, int size, Mode mode) {
  if (size < 1)
    size = 1;
  for (uint64_t attempt = 0;; ++attempt) {
    Gen g(seed * 1000003ULL + attempt, mode);
    TermP t = g.program(size);
    try {
      check_user_program(t, mode);
      return t;
    } catch (const TypeError &) {
      if (attempt >= 64)
        throw;
    }
  }
}

GeneratedBody gen_int_yielding_body(uint64_t seed, int size) {
  Gen g(seed, Mode::Base);
  return g.body(size);
}

} // namespace lsq
