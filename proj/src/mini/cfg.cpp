#include "mini/cfg.hpp"
#include "mini/normalize.hpp"

#include <sstream>
#include <stdexcept>

namespace mini {

const char *node_kind_name(NodeKind k) {
  switch (k) {
  case NodeKind::Plain: return "Plain";
  case NodeKind::Y: return "Y";
  case NodeKind::C: return "C";
  case NodeKind::T: return "T";
  case NodeKind::R: return "R";
  case NodeKind::Ws: return "Ws";
  case NodeKind::We: return "We";
  case NodeKind::Is: return "Is";
  case NodeKind::Ie: return "Ie";
  case NodeKind::Bs: return "Bs";
  case NodeKind::Be: return "Be";
  case NodeKind::Es: return "Es";
  case NodeKind::Ee: return "Ee";
  }
  return "?";
}

bool is_control(NodeKind k) { return k != NodeKind::Plain && k != NodeKind::R; }

std::vector<int> CfgNode::reads() const {
  std::vector<int> r;
  auto add = [&](const Atom &a) {
    if (a.is_var())
      r.push_back(a.var);
  };
  switch (kind) {
  case NodeKind::Plain:
  case NodeKind::Y:
  case NodeKind::C:
    for (auto &a : rhs.args)
      add(a);
    break;
  case NodeKind::T:
  case NodeKind::R:
  case NodeKind::Ws:
  case NodeKind::Is: add(cond); break;
  default: break;
  }
  return r;
}

int CfgNode::writes() const { return kind == NodeKind::Plain ? target : -1; }

namespace {

class Builder {
public:
  Builder(const Program &p, int k) : prog_(p), co_(p.coroutines[k]) {
    g_.coroutine = co_.name;
    g_.arity = static_cast<int>(co_.params.size());
  }

  CfgGraph build() {
    if (!is_normalized(co_))
      throw std::invalid_argument("coroutine " + co_.name + " is not in restricted form");
    frames_.emplace_back();
    for (auto &p : co_.params)
      declare(p.name);
    Piece top = seq(co_.body, -1, 0);
    int r = add(NodeKind::R, -1, 0, "return " + print_expr(co_.result ? co_.result : e_unit()));
    g_.nodes[r].cond = atom(co_.result ? co_.result : e_unit());
    g_.ret = r;
    g_.entry = top.first >= 0 ? top.first : r;
    if (top.last >= 0)
      g_.nodes[top.last].next = r;
    link();
    return std::move(g_);
  }

private:
  const Program &prog_;
  const Coroutine &co_;
  CfgGraph g_;
  std::vector<std::vector<std::pair<std::string, int>>> frames_;

  struct Piece {
    int first = -1, last = -1;
  };

  int declare(const std::string &name) {
    int id = static_cast<int>(g_.vars.size());
    g_.vars.push_back(name);
    frames_.back().emplace_back(name, id);
    return id;
  }

  int resolve(const std::string &name) const {
    for (size_t f = frames_.size(); f-- > 0;)
      for (size_t i = frames_[f].size(); i-- > 0;)
        if (frames_[f][i].first == name)
          return frames_[f][i].second;
    throw std::invalid_argument("unbound variable " + name + " in " + co_.name);
  }

  std::set<int> visible() const {
    std::set<int> s;
    for (auto &f : frames_)
      for (auto &b : f)
        s.insert(b.second);
    return s;
  }

  Atom atom(const ExprP &e) const {
    Atom a;
    switch (e->kind) {
    case ExprKind::Var: a.var = resolve(e->name); break;
    case ExprKind::Int: a.constant = Value::integer(e->value); break;
    case ExprKind::Bool: a.constant = Value::boolean(e->value != 0); break;
    case ExprKind::Nil: a.constant = Value::nil(); break;
    case ExprKind::Unit: break;
    default: throw std::invalid_argument("operand is not atomic: " + print_expr(e));
    }
    return a;
  }

  Rhs rhs(const ExprP &e) const {
    Rhs r;
    if (!e)
      return r;
    if (e->atomic()) {
      r.kind = RhsKind::Atom;
      r.args.push_back(atom(e));
      return r;
    }
    for (auto &a : e->args)
      r.args.push_back(atom(a));
    switch (e->kind) {
    case ExprKind::Binary:
      r.kind = RhsKind::Binary;
      r.op = e->op;
      break;
    case ExprKind::Select:
      r.kind = RhsKind::Select;
      r.field = e->field;
      break;
    case ExprKind::List: r.kind = RhsKind::List; break;
    case ExprKind::Call:
      r.kind = RhsKind::Call;
      r.callee = prog_.find(e->name);
      if (r.callee < 0)
        throw std::invalid_argument("call to undefined coroutine " + e->name);
      break;
    case ExprKind::Yield: r.kind = RhsKind::Yield; break;
    default: break;
    }
    return r;
  }

  int add(NodeKind k, int parent, int region, std::string text) {
    CfgNode n;
    n.id = static_cast<int>(g_.nodes.size());
    n.kind = k;
    n.parent = parent;
    n.region = region;
    n.scope = visible();
    n.text = std::move(text);
    g_.nodes.push_back(std::move(n));
    return g_.nodes.back().id;
  }

  Piece seq(const Block &b, int parent, int region) {
    Piece out;
    for (auto &s : b) {
      Piece p = stmt(*s, parent, region);
      if (out.last >= 0)
        g_.nodes[out.last].next = p.first;
      else
        out.first = p.first;
      out.last = p.last;
    }
    return out;
  }

  Piece stmt(const Stmt &s, int parent, int region_index) {
    switch (s.kind) {
    case StmtKind::Decl: {
      Rhs r = rhs(s.expr);
      int v = declare(s.name);
      NodeKind k = r.kind == RhsKind::Yield ? NodeKind::Y : r.kind == RhsKind::Call ? NodeKind::C : NodeKind::Plain;
      std::string text = "var " + s.name + (s.expr ? " = " + print_expr(s.expr) : "");
      int n = add(k, parent, region_index, text);
      g_.nodes[n].target = v;
      g_.nodes[n].declares = true;
      g_.nodes[n].rhs = r;
      return {n, n};
    }
    case StmtKind::Assign: {
      int n = add(NodeKind::Plain, parent, region_index, s.name + " = " + print_expr(s.expr));
      g_.nodes[n].target = resolve(s.name);
      g_.nodes[n].rhs = rhs(s.expr);
      return {n, n};
    }
    case StmtKind::Throw: {
      int n = add(NodeKind::T, parent, region_index, "throw(" + print_expr(s.expr) + ")");
      g_.nodes[n].cond = atom(s.expr);
      return {n, n};
    }
    case StmtKind::While: {
      int ws = add(NodeKind::Ws, parent, region_index, "while (" + print_expr(s.expr) + ")");
      g_.nodes[ws].cond = atom(s.expr);
      // The end node is created after the body so node ids follow source order.
      frames_.emplace_back();
      Piece p = seq(s.body, ws, 0);
      frames_.pop_back();
      int we = add(NodeKind::We, parent, region_index, "");
      if (p.last >= 0)
        g_.nodes[p.last].next = we;
      g_.nodes[ws].body_first = p.first >= 0 ? p.first : we;
      g_.nodes[ws].partner = we;
      g_.nodes[we].partner = ws;
      return {ws, we};
    }
    case StmtKind::If: {
      int is = add(NodeKind::Is, parent, region_index, "if (" + print_expr(s.expr) + ")");
      g_.nodes[is].cond = atom(s.expr);
      frames_.emplace_back();
      Piece t = seq(s.body, is, 0);
      frames_.pop_back();
      frames_.emplace_back();
      Piece f = seq(s.alt, is, 1);
      frames_.pop_back();
      int ie = add(NodeKind::Ie, parent, region_index, "");
      auto close = [&](const Piece &p) {
        if (p.last >= 0)
          g_.nodes[p.last].next = ie;
        return p.first >= 0 ? p.first : ie;
      };
      g_.nodes[is].body_first = close(t);
      g_.nodes[is].alt_first = close(f);
      g_.nodes[is].partner = ie;
      g_.nodes[ie].partner = is;
      return {is, ie};
    }
    case StmtKind::Try: {
      int es = add(NodeKind::Es, parent, region_index, "try");
      frames_.emplace_back();
      Piece b = seq(s.body, es, 0);
      frames_.pop_back();
      frames_.emplace_back();
      int v = declare(s.name);
      int bind = add(NodeKind::Plain, es, 1, "catch " + s.name);
      g_.nodes[bind].target = v;
      g_.nodes[bind].declares = true;
      g_.nodes[bind].catch_bind = true;
      Piece h = seq(s.alt, es, 1);
      frames_.pop_back();
      int ee = add(NodeKind::Ee, parent, region_index, "");
      if (b.last >= 0)
        g_.nodes[b.last].next = ee;
      g_.nodes[bind].next = h.first >= 0 ? h.first : ee;
      if (h.last >= 0)
        g_.nodes[h.last].next = ee;
      g_.nodes[es].body_first = b.first >= 0 ? b.first : ee;
      g_.nodes[es].alt_first = bind;
      g_.nodes[es].partner = ee;
      g_.nodes[ee].partner = es;
      return {es, ee};
    }
    case StmtKind::Expr: break;
    }
    throw std::invalid_argument("expression statement in restricted form");
  }

  // Handler entry of the innermost try whose protected body contains `n`.
  int handler_of(int n) const {
    int p = g_.nodes[n].parent, region = g_.nodes[n].region;
    while (p >= 0) {
      if (g_.nodes[p].kind == NodeKind::Es && region == 0)
        return g_.nodes[p].alt_first;
      region = g_.nodes[p].region;
      p = g_.nodes[p].parent;
    }
    return -1;
  }

  void link() {
    for (auto &n : g_.nodes) {
      switch (n.kind) {
      case NodeKind::Plain:
      case NodeKind::Y:
      case NodeKind::Ie:
      case NodeKind::Ee:
      case NodeKind::Bs:
      case NodeKind::Be: n.succ = {n.next}; break;
      case NodeKind::C: {
        n.succ = {n.next};
        int h = handler_of(n.id);
        if (h >= 0)
          n.succ.push_back(h);
        break;
      }
      case NodeKind::T: {
        int h = handler_of(n.id);
        if (h >= 0)
          n.succ = {h};
        break;
      }
      case NodeKind::R: break;
      case NodeKind::Ws: n.succ = {n.body_first, n.partner}; break;
      case NodeKind::We: n.succ = {n.partner, n.next}; break;
      case NodeKind::Is: n.succ = {n.body_first, n.alt_first}; break;
      case NodeKind::Es: n.succ = {n.body_first}; break;
      }
    }
  }
};

} // namespace

CfgGraph build_cfg(const Program &p, int coroutine) { return Builder(p, coroutine).build(); }

std::map<NodeKind, int> control_census(const CfgGraph &g) {
  std::map<NodeKind, int> m;
  for (auto &n : g.nodes)
    if (is_control(n.kind))
      ++m[n.kind];
  return m;
}

std::string dump_cfg(const CfgGraph &g) {
  std::ostringstream os;
  os << "cfg " << g.coroutine << " entry n" << g.entry << "\n";
  for (auto &n : g.nodes) {
    os << "  n" << n.id << " " << node_kind_name(n.kind);
    if (!n.text.empty())
      os << " [" << n.text << "]";
    os << " ->";
    for (int s : n.succ)
      os << " n" << s;
    os << "  scope {";
    bool first = true;
    for (int v : n.scope) {
      os << (first ? "" : ", ") << g.vars[v];
      first = false;
    }
    os << "}\n";
  }
  return os.str();
}

} // namespace mini
