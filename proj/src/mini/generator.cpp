#include "mini/generator.hpp"

#include <random>

namespace mini {

namespace {

struct Var {
  std::string name;
  Type type;
  bool assignable;
};

class Gen {
public:
  explicit Gen(uint64_t seed) : rng_(seed) {}

  GeneratedMini run() {
    GeneratedMini out;
    int n = 1 + pick(4);
    for (int i = 0; i < n; ++i) {
      Coroutine c;
      c.name = "c" + std::to_string(i);
      int arity = pick(3);
      for (int k = 0; k < arity; ++k)
        c.params.push_back({"p" + std::to_string(k), chance(0.5) ? Type::Int : Type::List});
      c.ret = Type::Int;
      c.yields = Type::Int;
      sigs_.push_back(c.params);
      out.program.coroutines.push_back(c);
    }
    for (int i = 0; i < n; ++i) {
      Coroutine &c = out.program.coroutines[i];
      self_ = i;
      names_ = 0;
      scopes_.assign(1, {});
      for (auto &p : c.params)
        scopes_.back().push_back({p.name, p.type, true});
      // Later coroutines get smaller bodies so nested calls stay cheap.
      budget_ = 12 - 2 * i;
      c.body = block(0);
      c.result = int_expr(2);
    }
    out.entry = "c0";
    for (auto &p : out.program.coroutines[0].params)
      out.args.push_back(p.type == Type::Int ? Value::integer(pick(7) - 2) : list_value());
    return out;
  }

private:
  std::mt19937_64 rng_;
  std::vector<std::vector<Param>> sigs_;
  std::vector<std::vector<Var>> scopes_;
  int self_ = 0;
  int names_ = 0;
  int budget_ = 0;
  int in_try_ = 0;

  int pick(int n) { return static_cast<int>(rng_() % static_cast<uint64_t>(n)); }
  bool chance(double p) { return std::uniform_real_distribution<double>(0, 1)(rng_) < p; }

  Value list_value() {
    std::vector<Value> items;
    int len = pick(4);
    for (int i = 0; i < len; ++i)
      items.push_back(Value::integer(pick(9) - 3));
    return Value::list(std::move(items));
  }

  std::vector<const Var *> visible(Type t, bool assignable_only) const {
    std::vector<const Var *> out;
    std::vector<std::string> seen;
    for (size_t f = scopes_.size(); f-- > 0;)
      for (size_t i = scopes_[f].size(); i-- > 0;) {
        const Var &v = scopes_[f][i];
        bool shadowed = false;
        for (auto &s : seen)
          shadowed = shadowed || s == v.name;
        seen.push_back(v.name);
        if (!shadowed && v.type == t && (!assignable_only || v.assignable))
          out.push_back(&v);
      }
    return out;
  }

  std::string fresh() {
    // Names of the temporary shape make the normalizer skip them.
    if (chance(0.15))
      return "x_" + std::to_string(pick(4));
    return "v" + std::to_string(names_++);
  }

  // A name to declare: usually fresh, sometimes shadowing an outer variable.
  std::string decl_name() {
    if (scopes_.size() > 1 && chance(0.15)) {
      auto ints = visible(Type::Int, true);
      if (!ints.empty())
        return ints[pick(static_cast<int>(ints.size()))]->name;
    }
    return fresh();
  }

  void declare(const std::string &name, Type t, bool assignable) { scopes_.back().push_back({name, t, assignable}); }

  ExprP call_expr(int depth) {
    int target = self_ + 1 + pick(static_cast<int>(sigs_.size()) - self_ - 1);
    std::vector<ExprP> args;
    for (auto &p : sigs_[target])
      args.push_back(p.type == Type::Int ? int_expr(depth - 1) : list_expr(depth - 1));
    return e_call("c" + std::to_string(target), args);
  }

  bool can_call() const { return self_ + 1 < static_cast<int>(sigs_.size()); }

  ExprP int_expr(int depth) {
    auto vars = visible(Type::Int, false);
    int r = pick(depth <= 0 ? 2 : 5);
    if (r == 0 || (r == 1 && vars.empty()))
      return e_int(pick(10) - 3);
    if (r == 1)
      return e_var(vars[pick(static_cast<int>(vars.size()))]->name);
    if (r == 4 && can_call() && chance(0.4))
      return call_expr(depth);
    return e_bin(chance(0.6) ? BinOp::Add : BinOp::Sub, int_expr(depth - 1), int_expr(depth - 1));
  }

  ExprP list_expr(int depth) {
    auto vars = visible(Type::List, false);
    int r = pick(3);
    if (r == 0 && !vars.empty())
      return e_var(vars[pick(static_cast<int>(vars.size()))]->name);
    if (r == 1)
      return e_nil();
    std::vector<ExprP> items;
    int len = 1 + pick(3);
    for (int i = 0; i < len; ++i)
      items.push_back(int_expr(depth - 1));
    return e_list(items);
  }

  ExprP bool_expr(int depth) {
    int r = pick(depth <= 0 ? 3 : 6);
    switch (r) {
    case 0: return e_bool(chance(0.5));
    case 1: return e_bin(BinOp::Lt, int_expr(depth - 1), int_expr(depth - 1));
    case 2: return e_bin(chance(0.5) ? BinOp::Eq : BinOp::Ne, int_expr(depth - 1), int_expr(depth - 1));
    case 3: return e_sel(Field::IsNil, list_expr(depth - 1));
    default:
      return e_bin(chance(0.5) ? BinOp::And : BinOp::Or, bool_expr(depth - 1), bool_expr(depth - 1));
    }
  }

  Block nested(int depth) {
    scopes_.emplace_back();
    Block b = block(depth);
    scopes_.pop_back();
    return b;
  }

  Block block(int depth) {
    Block b;
    int len = 1 + pick(depth == 0 ? 5 : 3);
    for (int i = 0; i < len && budget_ > 0; ++i)
      stmt(depth, b);
    return b;
  }

  void stmt(int depth, Block &out) {
    --budget_;
    int r = pick(depth >= 2 ? 6 : 10);
    switch (r) {
    case 0:
    case 1: {
      std::string x = decl_name();
      ExprP e = int_expr(2);
      declare(x, Type::Int, true);
      out.push_back(s_decl(x, e));
      return;
    }
    case 2: {
      auto vars = visible(Type::Int, true);
      if (vars.empty())
        break;
      out.push_back(s_assign(vars[pick(static_cast<int>(vars.size()))]->name, int_expr(2)));
      return;
    }
    case 3:
    case 4: out.push_back(s_expr(e_yield(int_expr(2)))); return;
    case 5:
      if (can_call()) {
        if (chance(0.5)) {
          out.push_back(s_expr(call_expr(2)));
        } else {
          std::string x = decl_name();
          ExprP e = call_expr(2);
          declare(x, Type::Int, true);
          out.push_back(s_decl(x, e));
        }
        return;
      }
      break;
    case 6: {
      ExprP c = bool_expr(2);
      Block t = nested(depth + 1);
      Block f = chance(0.6) ? nested(depth + 1) : Block{};
      out.push_back(s_if(c, t, f));
      return;
    }
    case 7: counter_loop(depth, out); return;
    case 8: list_loop(depth, out); return;
    case 9:
      if (chance(0.5)) {
        try_stmt(depth, out);
      } else {
        // A guarded throw; outside any try it may escape the coroutine.
        Block t = {s_throw(int_expr(1))};
        out.push_back(s_if(bool_expr(1), t, {}));
      }
      return;
    }
    out.push_back(s_expr(e_yield(int_expr(1))));
  }

  void counter_loop(int depth, Block &out) {
    std::string i = "i" + std::to_string(names_++);
    out.push_back(s_decl(i, e_int(0)));
    declare(i, Type::Int, false);
    ExprP cond = e_bin(BinOp::Lt, e_var(i), e_int(1 + pick(3)));
    if (chance(0.3))
      cond = e_bin(BinOp::And, cond, bool_expr(1));
    scopes_.emplace_back();
    Block body = block(depth + 1);
    scopes_.pop_back();
    body.push_back(s_assign(i, e_bin(BinOp::Add, e_var(i), e_int(1))));
    out.push_back(s_while(cond, body));
  }

  void list_loop(int depth, Block &out) {
    std::string l = "l" + std::to_string(names_++);
    out.push_back(s_decl(l, list_expr(2)));
    declare(l, Type::List, false);
    ExprP cond = chance(0.5) ? e_bin(BinOp::Ne, e_var(l), e_nil())
                             : e_bin(BinOp::Eq, e_sel(Field::IsNil, e_var(l)), e_bool(false));
    scopes_.emplace_back();
    std::string h = "h" + std::to_string(names_++);
    Block body = {s_decl(h, e_sel(Field::Head, e_var(l)))};
    declare(h, Type::Int, true);
    for (auto &s : block(depth + 1))
      body.push_back(s);
    scopes_.pop_back();
    body.push_back(s_assign(l, e_sel(Field::Tail, e_var(l))));
    out.push_back(s_while(cond, body));
  }

  void try_stmt(int depth, Block &out) {
    ++in_try_;
    Block body = nested(depth + 1);
    if (chance(0.5))
      body.push_back(s_if(bool_expr(1), {s_throw(int_expr(1))}, {}));
    --in_try_;
    scopes_.emplace_back();
    std::string e = fresh();
    declare(e, Type::Int, true);
    Block handler = block(depth + 1);
    if (chance(0.5))
      handler.push_back(s_expr(e_yield(e_var(e))));
    scopes_.pop_back();
    out.push_back(s_try(body, e, handler));
  }
};

} // namespace

GeneratedMini gen_mini(uint64_t seed) { return Gen(seed).run(); }

} // namespace mini
