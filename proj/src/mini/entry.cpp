#include "mini/cfg.hpp"
#include "mini/normalize.hpp"

#include <sstream>

namespace mini {

namespace {

class Generator {
public:
  Generator(const CfgGraph &g, const Segment &s, const LivenessReport &r) : g_(g), s_(s), r_(r) {}

  std::vector<Op> run() { return block(s_.shape); }

private:
  const CfgGraph &g_;
  const Segment &s_;
  const LivenessReport &r_;

  std::vector<int> stores(int node) const {
    auto it = r_.stores[s_.id].find(node);
    if (it == r_.stores[s_.id].end())
      return {};
    return {it->second.begin(), it->second.end()};
  }

  int resumes_at(int node) const {
    for (auto &x : s_.exits)
      if (x.node == node)
        return x.resumes_at;
    return -1;
  }

  std::vector<Op> block(const std::vector<Shape> &shapes) {
    std::vector<Op> out;
    for (auto &sh : shapes)
      emit(sh, out);
    return out;
  }

  void emit(const Shape &sh, std::vector<Op> &out) {
    const SegNode &n = s_.nodes[sh.node];
    Op op;
    switch (sh.kind) {
    case Shape::Kind::Block:
      op.kind = OpKind::Block;
      op.body = block(sh.body);
      out.push_back(std::move(op));
      return;
    case Shape::Kind::While:
      op.kind = OpKind::While;
      op.a = g_.nodes[n.orig].cond;
      op.body = block(sh.body);
      out.push_back(std::move(op));
      return;
    case Shape::Kind::If:
      op.kind = OpKind::If;
      op.a = g_.nodes[n.orig].cond;
      op.body = block(sh.body);
      op.alt = block(sh.alt);
      out.push_back(std::move(op));
      return;
    case Shape::Kind::Try:
      op.kind = OpKind::Try;
      op.var = g_.nodes[g_.nodes[n.orig].alt_first].target;
      op.body = block(sh.body);
      op.alt = block(sh.alt);
      out.push_back(std::move(op));
      return;
    case Shape::Kind::Node: break;
    }
    const CfgNode &o = g_.nodes[n.orig];
    if (n.landing) {
      op.kind = o.kind == NodeKind::Y ? OpKind::Landing : OpKind::TakeResult;
      op.var = o.target;
      out.push_back(std::move(op));
      return;
    }
    switch (n.kind) {
    case NodeKind::Plain:
      if (o.catch_bind)
        return; // bound by the enclosing Try
      op.kind = OpKind::Exec;
      op.var = o.target;
      op.rhs = o.rhs;
      break;
    case NodeKind::Y:
      op.kind = OpKind::YieldExit;
      op.a = o.rhs.args.at(0);
      op.stores = stores(n.id);
      op.pc = resumes_at(n.id);
      break;
    case NodeKind::C:
      op.kind = OpKind::CallExit;
      op.rhs = o.rhs;
      op.stores = stores(n.id);
      op.pc = resumes_at(n.id);
      break;
    case NodeKind::T:
      op.kind = n.native_throw ? OpKind::Throw : OpKind::ThrowExit;
      op.a = o.cond;
      break;
    case NodeKind::R:
      op.kind = OpKind::ReturnExit;
      op.a = o.cond;
      break;
    default: return;
    }
    out.push_back(std::move(op));
  }
};

std::string atom_text(const Atom &a, const CompiledCoroutine &c) {
  return a.is_var() ? c.var_names[a.var] + "#" + std::to_string(a.var) : a.constant.str();
}

std::string rhs_text(const Rhs &r, const CompiledCoroutine &c, const CompiledProgram *prog) {
  auto arg = [&](size_t i) { return atom_text(r.args.at(i), c); };
  auto list = [&](size_t from) {
    std::string s;
    for (size_t i = from; i < r.args.size(); ++i)
      s += (i > from ? ", " : "") + arg(i);
    return s;
  };
  switch (r.kind) {
  case RhsKind::Atom: return arg(0);
  case RhsKind::Binary: return arg(0) + " " + binop_text(r.op) + " " + arg(1);
  case RhsKind::Select: return arg(0) + "." + field_text(r.field);
  case RhsKind::List: return "[" + list(0) + "]";
  case RhsKind::Call: {
    std::string name = prog ? prog->coroutines[r.callee].name : "#" + std::to_string(r.callee);
    return name + "(" + list(0) + ")";
  }
  case RhsKind::Yield: return "yieldval(" + arg(0) + ")";
  case RhsKind::Default: return "()";
  }
  return "?";
}

std::string var_list(const std::vector<int> &vs, const CompiledCoroutine &c) {
  std::string s = "{";
  for (size_t i = 0; i < vs.size(); ++i)
    s += (i ? ", " : "") + c.var_names[vs[i]];
  return s + "}";
}

void dump_ops(const std::vector<Op> &ops, int indent, const CompiledCoroutine &c, const CompiledProgram *prog,
              std::ostringstream &os) {
  std::string pad(indent * 2, ' ');
  auto var = [&](int v) { return c.var_names[v] + "#" + std::to_string(v); };
  for (auto &op : ops) {
    os << pad;
    switch (op.kind) {
    case OpKind::Exec: os << var(op.var) << " = " << rhs_text(op.rhs, c, prog) << "\n"; break;
    case OpKind::Load: os << "load " << var(op.var) << "\n"; break;
    case OpKind::Landing: os << var(op.var) << " = ()  // resumed\n"; break;
    case OpKind::TakeResult: os << var(op.var) << " = take_result()\n"; break;
    case OpKind::While:
      os << "while (" << atom_text(op.a, c) << ") {\n";
      dump_ops(op.body, indent + 1, c, prog, os);
      os << pad << "}\n";
      break;
    case OpKind::If:
      os << "if (" << atom_text(op.a, c) << ") {\n";
      dump_ops(op.body, indent + 1, c, prog, os);
      os << pad << "} else {\n";
      dump_ops(op.alt, indent + 1, c, prog, os);
      os << pad << "}\n";
      break;
    case OpKind::Block:
      os << "{\n";
      dump_ops(op.body, indent + 1, c, prog, os);
      os << pad << "}\n";
      break;
    case OpKind::Try:
      os << "try {\n";
      dump_ops(op.body, indent + 1, c, prog, os);
      os << pad << "} catch (" << var(op.var) << ") {\n";
      dump_ops(op.alt, indent + 1, c, prog, os);
      os << pad << "}\n";
      break;
    case OpKind::Unwind:
      os << "unwind {\n";
      dump_ops(op.body, indent + 1, c, prog, os);
      os << pad << "}\n";
      break;
    case OpKind::Throw: os << "throw " << atom_text(op.a, c) << "\n"; break;
    case OpKind::YieldExit:
      os << "store " << var_list(op.stores, c) << "; yield " << atom_text(op.a, c) << "; pc = " << op.pc << "\n";
      break;
    case OpKind::CallExit:
      os << "store " << var_list(op.stores, c) << "; call " << rhs_text(op.rhs, c, prog) << "; pc = " << op.pc
         << "\n";
      break;
    case OpKind::ThrowExit: os << "exit throw " << atom_text(op.a, c) << "\n"; break;
    case OpKind::ReturnExit: os << "exit return " << atom_text(op.a, c) << "\n"; break;
    }
  }
}

} // namespace

CompiledCoroutine generate_entry_points(const CfgGraph &g, const std::vector<Segment> &segs,
                                        const LivenessReport &report) {
  CompiledCoroutine c;
  c.name = g.coroutine;
  c.arity = g.arity;
  c.slot_count = static_cast<int>(g.vars.size());
  c.var_names = g.vars;
  for (auto &s : segs) {
    EntryPoint ep;
    ep.pc = s.id;
    ep.kind = s.kind;
    ep.loads.assign(report.must_load[s.id].begin(), report.must_load[s.id].end());
    ep.user_handler_replica = s.in_try;
    std::vector<Op> code = Generator(g, s, report).run();
    if (s.kind == EntryKind::AfterCall) {
      // An exception the callee left behind propagates out of this frame
      // unless a replicated handler catches it.
      ep.unwind_handler = true;
      Op u;
      u.kind = OpKind::Unwind;
      u.body = std::move(code);
      code = {std::move(u)};
    }
    ep.code = std::move(code);
    c.dispatcher.push_back(std::move(ep));
  }
  return c;
}

int CompiledProgram::find(const std::string &name) const {
  for (size_t i = 0; i < coroutines.size(); ++i)
    if (coroutines[i].name == name)
      return static_cast<int>(i);
  return -1;
}

CompiledProgram compile(const Program &p, const AnalysisOptions &opt) {
  Program n = is_normalized(p) ? p : normalize(p);
  CompiledProgram out;
  for (size_t k = 0; k < n.coroutines.size(); ++k) {
    CfgGraph g = build_cfg(n, static_cast<int>(k));
    auto segs = split_segments(g);
    auto rep = analyze(g, segs, opt);
    out.coroutines.push_back(generate_entry_points(g, segs, rep));
  }
  return out;
}

std::string dump_entries(const CompiledCoroutine &c, const CompiledProgram *prog) {
  std::ostringstream os;
  os << "coroutine " << c.name << " arity " << c.arity << " slots " << c.slot_count << "\n";
  for (auto &ep : c.dispatcher) {
    std::vector<int> loads = ep.loads;
    os << "entry " << ep.pc << " " << entry_kind_name(ep.kind) << " loads " << var_list(loads, c);
    if (ep.user_handler_replica)
      os << " replica";
    os << "\n";
    dump_ops(ep.code, 1, c, prog, os);
  }
  return os.str();
}

} // namespace mini
