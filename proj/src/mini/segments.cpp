#include "mini/cfg.hpp"

#include <algorithm>
#include <deque>
#include <functional>
#include <sstream>

namespace mini {

const char *entry_kind_name(EntryKind k) {
  switch (k) {
  case EntryKind::MethodEntry: return "MethodEntry";
  case EntryKind::AfterYield: return "AfterYield";
  case EntryKind::AfterCall: return "AfterCall";
  }
  return "?";
}

namespace {

class Splitter {
public:
  explicit Splitter(const CfgGraph &g) : g_(g) {}

  std::vector<Segment> run() {
    Segment s0;
    s0.id = 0;
    s0.kind = EntryKind::MethodEntry;
    segs_.push_back(s0);
    work_.push_back(0);
    while (!work_.empty()) {
      int id = work_.front();
      work_.pop_front();
      build(id);
    }
    return std::move(segs_);
  }

private:
  const CfgGraph &g_;
  std::vector<Segment> segs_;
  std::map<int, int> seg_of_;
  std::deque<int> work_;

  // State of the segment under construction.
  Segment cur_;
  std::vector<int> preds_;
  std::vector<std::vector<int>> tries_; // per open try: nodes that throw into its handler

  int segment_for(int orig) {
    auto it = seg_of_.find(orig);
    if (it != seg_of_.end())
      return it->second;
    Segment s;
    s.id = static_cast<int>(segs_.size());
    s.kind = g_.nodes[orig].kind == NodeKind::Y ? EntryKind::AfterYield : EntryKind::AfterCall;
    s.origin = orig;
    seg_of_[orig] = s.id;
    segs_.push_back(s);
    work_.push_back(s.id);
    return s.id;
  }

  int add(int orig, NodeKind kind, const std::set<int> &scope) {
    SegNode n;
    n.id = static_cast<int>(cur_.nodes.size());
    n.orig = orig;
    n.kind = kind;
    n.scope = scope;
    for (int p : preds_) {
      auto &succ = cur_.nodes[p].succ;
      if (std::find(succ.begin(), succ.end(), n.id) == succ.end())
        succ.push_back(n.id);
    }
    cur_.nodes.push_back(n);
    preds_ = {n.id};
    return n.id;
  }

  int copy(int orig) { return add(orig, g_.nodes[orig].kind, g_.nodes[orig].scope); }

  void exit_to(int node, int resumes_at) {
    cur_.nodes[node].exit = true;
    cur_.exits.push_back({node, resumes_at});
    preds_.clear();
  }

  // Emits original nodes from `n` until the region end `stop` or a point where
  // control cannot continue.
  void seq(int n, int stop, std::vector<Shape> &out) {
    while (n >= 0 && n != stop && !preds_.empty())
      n = emit(n, out);
  }

  Shape node_shape(int id) {
    Shape s;
    s.node = id;
    return s;
  }

  void handler(int es, std::vector<int> throwers, std::vector<Shape> &out) {
    std::vector<int> after_body = preds_;
    preds_ = std::move(throwers);
    if (!preds_.empty()) {
      int bind = g_.nodes[es].alt_first;
      out.push_back(node_shape(copy(bind)));
      seq(g_.nodes[bind].next, g_.nodes[es].partner, out);
    }
    preds_.insert(preds_.end(), after_body.begin(), after_body.end());
  }

  // Emits one construct starting at original node `n`; returns the node that
  // follows it, or -1 when control does not continue.
  int emit(int n, std::vector<Shape> &out) {
    const CfgNode &o = g_.nodes[n];
    switch (o.kind) {
    case NodeKind::Plain:
    case NodeKind::Bs:
    case NodeKind::Be:
      out.push_back(node_shape(copy(n)));
      return o.next;
    case NodeKind::Y:
    case NodeKind::C: {
      int id = copy(n);
      out.push_back(node_shape(id));
      exit_to(id, segment_for(n));
      return -1;
    }
    case NodeKind::T: {
      int id = copy(n);
      out.push_back(node_shape(id));
      if (!tries_.empty()) {
        cur_.nodes[id].native_throw = true;
        tries_.back().push_back(id);
        preds_.clear();
      } else {
        exit_to(id, -1);
      }
      return -1;
    }
    case NodeKind::R: {
      int id = copy(n);
      out.push_back(node_shape(id));
      exit_to(id, -1);
      return -1;
    }
    case NodeKind::Ws: {
      Shape sh;
      sh.kind = Shape::Kind::While;
      sh.node = copy(n);
      seq(o.body_first, o.partner, sh.body);
      preds_.push_back(sh.node);
      int we = copy(o.partner);
      cur_.nodes[we].succ.push_back(sh.node);
      out.push_back(std::move(sh));
      return g_.nodes[o.partner].next;
    }
    case NodeKind::Is: {
      Shape sh;
      sh.kind = Shape::Kind::If;
      sh.node = copy(n);
      seq(o.body_first, o.partner, sh.body);
      std::vector<int> then_tails = preds_;
      preds_ = {sh.node};
      seq(o.alt_first, o.partner, sh.alt);
      preds_.insert(preds_.end(), then_tails.begin(), then_tails.end());
      out.push_back(std::move(sh));
      if (preds_.empty())
        return -1;
      copy(o.partner);
      return g_.nodes[o.partner].next;
    }
    case NodeKind::Es: {
      Shape sh;
      sh.kind = Shape::Kind::Try;
      sh.node = copy(n);
      tries_.emplace_back();
      seq(o.body_first, o.partner, sh.body);
      std::vector<int> throwers = std::move(tries_.back());
      tries_.pop_back();
      handler(n, std::move(throwers), sh.alt);
      out.push_back(std::move(sh));
      if (preds_.empty())
        return -1;
      copy(o.partner);
      return g_.nodes[o.partner].next;
    }
    case NodeKind::We:
    case NodeKind::Ie:
    case NodeKind::Ee: break;
    }
    return o.next;
  }

  void build(int id) {
    cur_ = segs_[id];
    preds_.clear();
    tries_.clear();
    if (cur_.kind == EntryKind::MethodEntry) {
      start_at(g_.entry, cur_.shape);
    } else {
      resume_after(cur_.origin);
    }
    segs_[id] = std::move(cur_);
  }

  void start_at(int n, std::vector<Shape> &out) {
    // `seq` stops on an empty predecessor set, so the first node is emitted
    // directly.
    int next = emit(n, out);
    seq(next, -1, out);
  }

  void resume_after(int p) {
    // Enclosing constructs, innermost first.
    std::vector<std::pair<int, int>> chain;
    for (int c = g_.nodes[p].parent, r = g_.nodes[p].region; c >= 0;) {
      chain.emplace_back(c, r);
      r = g_.nodes[c].region;
      c = g_.nodes[c].parent;
    }
    std::reverse(chain.begin(), chain.end()); // outermost first
    const CfgNode &o = g_.nodes[p];
    std::set<int> live = o.scope;
    size_t k = chain.size();
    std::vector<std::vector<Shape>> lists(k + 1);
    std::vector<Shape> heads(k);
    // Reopen every enclosing construct: a protected try region is replicated
    // with its handler, anything else becomes a plain block.
    for (size_t i = 0; i < k; ++i) {
      auto [c, r] = chain[i];
      bool protected_region = g_.nodes[c].kind == NodeKind::Es && r == 0;
      if (protected_region) {
        heads[i].kind = Shape::Kind::Try;
        heads[i].node = add(c, NodeKind::Es, live);
        tries_.emplace_back();
        cur_.in_try = true;
      } else {
        heads[i].kind = Shape::Kind::Block;
        heads[i].node = add(-1, NodeKind::Bs, live);
      }
    }
    int landing = add(p, o.kind, o.scope);
    cur_.nodes[landing].landing = true;
    cur_.landing = landing;
    if (o.kind == NodeKind::C && !tries_.empty())
      tries_.back().push_back(landing); // a pending callee exception is rethrown here
    lists[k].push_back(node_shape(landing));

    int n = o.next;
    for (size_t i = k; i-- > 0;) {
      auto [c, r] = chain[i];
      const CfgNode &start = g_.nodes[c];
      int end = start.partner;
      seq(n, end, lists[i + 1]);
      if (heads[i].kind == Shape::Kind::Try) {
        std::vector<int> throwers = std::move(tries_.back());
        tries_.pop_back();
        handler(c, std::move(throwers), heads[i].alt);
        if (!preds_.empty())
          copy(end);
      } else if (!preds_.empty()) {
        add(end, NodeKind::Be, g_.nodes[end].scope);
      }
      heads[i].body = std::move(lists[i + 1]);
      lists[i].push_back(std::move(heads[i]));
      n = -1;
      if (preds_.empty())
        continue;
      if (start.kind == NodeKind::Ws)
        n = emit(c, lists[i]); // the loop is entered afresh
      else
        n = g_.nodes[end].next;
    }
    seq(n, -1, lists[0]);
    cur_.shape = std::move(lists[0]);
  }
};

std::vector<std::vector<int>> predecessors(const Segment &s) {
  std::vector<std::vector<int>> pred(s.nodes.size());
  for (auto &n : s.nodes)
    for (int m : n.succ)
      pred[m].push_back(n.id);
  return pred;
}

std::vector<bool> reachable(const Segment &s) {
  std::vector<bool> seen(s.nodes.size(), false);
  if (s.nodes.empty())
    return seen;
  std::vector<int> stack = {s.begin};
  seen[s.begin] = true;
  while (!stack.empty()) {
    int n = stack.back();
    stack.pop_back();
    for (int m : s.nodes[n].succ)
      if (!seen[m]) {
        seen[m] = true;
        stack.push_back(m);
      }
  }
  return seen;
}

// dom[n][d] holds when d dominates n. Unreachable nodes are dominated by all.
std::vector<std::vector<bool>> dominator_sets(const Segment &s) {
  size_t n = s.nodes.size();
  std::vector<std::vector<bool>> dom(n, std::vector<bool>(n, true));
  if (n == 0)
    return dom;
  auto reach = reachable(s);
  auto pred = predecessors(s);
  dom[s.begin] = std::vector<bool>(n, false);
  dom[s.begin][s.begin] = true;
  for (bool changed = true; changed;) {
    changed = false;
    for (size_t v = 0; v < n; ++v) {
      if (static_cast<int>(v) == s.begin || !reach[v])
        continue;
      std::vector<bool> d(n, true);
      for (int p : pred[v])
        if (reach[p])
          for (size_t k = 0; k < n; ++k)
            d[k] = d[k] && dom[p][k];
      d[v] = true;
      if (d != dom[v]) {
        dom[v] = std::move(d);
        changed = true;
      }
    }
  }
  return dom;
}

} // namespace

std::vector<Segment> split_segments(const CfgGraph &g) { return Splitter(g).run(); }

std::vector<std::vector<bool>> dominator_matrix(const Segment &s) { return dominator_sets(s); }

bool dominates(const Segment &s, int d, int n) { return dominator_sets(s).at(n).at(d); }

namespace {

struct SegInfo {
  std::vector<bool> reach;
  std::vector<std::vector<bool>> dom;
  std::vector<std::vector<int>> reads;
  std::vector<int> writes;
  std::set<int> entry_scope;
};

SegInfo seg_info(const CfgGraph &g, const Segment &s) {
  SegInfo info;
  info.reach = reachable(s);
  info.dom = dominator_sets(s);
  for (auto &n : s.nodes) {
    std::vector<int> r;
    int w = -1;
    if (n.orig >= 0) {
      const CfgNode &o = g.nodes[n.orig];
      if (n.landing) {
        w = o.target;
      } else if (n.kind != NodeKind::Es && n.kind != NodeKind::Be) {
        r = o.reads();
        w = o.writes();
      }
    }
    info.reads.push_back(std::move(r));
    info.writes.push_back(w);
  }
  if (s.kind == EntryKind::MethodEntry) {
    for (int v = 0; v < g.arity; ++v)
      info.entry_scope.insert(v);
  } else {
    const CfgNode &o = g.nodes[s.origin];
    info.entry_scope = o.scope;
    if (o.declares)
      info.entry_scope.erase(o.target);
  }
  return info;
}

// Nodes reachable from `from` along paths on which `v` stays in scope.
std::vector<bool> live_reach(const Segment &s, const std::vector<bool> &reach, const std::vector<int> &from,
                             int v) {
  std::vector<bool> seen(s.nodes.size(), false);
  std::vector<int> stack;
  for (int f : from)
    if (reach[f] && s.nodes[f].scope.count(v) && !seen[f]) {
      seen[f] = true;
      stack.push_back(f);
    }
  while (!stack.empty()) {
    int n = stack.back();
    stack.pop_back();
    for (int m : s.nodes[n].succ)
      if (!seen[m] && s.nodes[m].scope.count(v)) {
        seen[m] = true;
        stack.push_back(m);
      }
  }
  return seen;
}

std::set<int> candidates(const CfgGraph &g, const SegNode &x) {
  std::set<int> c = x.scope;
  const CfgNode &o = g.nodes[x.orig];
  if (o.declares)
    c.erase(o.target);
  return c;
}

bool write_dominates(const SegInfo &info, int v, int n) {
  for (size_t w = 0; w < info.writes.size(); ++w)
    if (info.writes[w] == v && info.reach[w] && static_cast<int>(w) != n && info.dom[n][w])
      return true;
  return false;
}

} // namespace

LivenessReport analyze(const CfgGraph &g, const std::vector<Segment> &segs, const AnalysisOptions &opt) {
  size_t ns = segs.size();
  std::vector<SegInfo> info;
  for (auto &s : segs)
    info.push_back(seg_info(g, s));

  LivenessReport rep;
  rep.must_load.resize(ns);
  rep.stores.resize(ns);
  rep.was_changed.resize(ns);
  rep.needed.resize(ns);

  for (size_t e = 0; e < ns; ++e) {
    const SegInfo &in = info[e];
    if (!opt.must_load) {
      rep.must_load[e] = in.entry_scope;
      continue;
    }
    for (size_t n = 0; n < segs[e].nodes.size(); ++n) {
      if (!in.reach[n])
        continue;
      for (int v : in.reads[n])
        if (in.entry_scope.count(v) && !write_dominates(in, v, static_cast<int>(n)))
          rep.must_load[e].insert(v);
    }
  }

  // Was-changed: a v-live path from a write of v reaches the exit.
  for (size_t e = 0; e < ns; ++e) {
    const Segment &s = segs[e];
    for (auto &x : s.exits) {
      if (x.resumes_at < 0)
        continue;
      std::set<int> &wc = rep.was_changed[e][x.node];
      for (int v : candidates(g, s.nodes[x.node])) {
        if (!opt.was_changed) {
          wc.insert(v);
          continue;
        }
        std::vector<int> writers;
        for (size_t w = 0; w < s.nodes.size(); ++w)
          if (info[e].writes[w] == v)
            writers.push_back(static_cast<int>(w));
        if (live_reach(s, info[e].reach, writers, v)[x.node])
          wc.insert(v);
      }
    }
  }

  // Exits of segment e reachable from its begin node along a v-live path.
  std::map<std::pair<size_t, int>, std::vector<int>> live_exits;
  auto exits_live = [&](size_t e, int v) -> const std::vector<int> & {
    auto key = std::make_pair(e, v);
    auto it = live_exits.find(key);
    if (it != live_exits.end())
      return it->second;
    const Segment &s = segs[e];
    auto seen = live_reach(s, info[e].reach, {s.begin}, v);
    std::vector<int> out;
    for (auto &x : s.exits)
      if (x.resumes_at >= 0 && seen[x.node])
        out.push_back(x.node);
    return live_exits[key] = out;
  };

  for (;;) {
    // Is-needed as a least fixpoint over (exit, variable).
    for (auto &m : rep.needed)
      m.clear();
    for (bool changed = true; changed;) {
      changed = false;
      for (size_t e = 0; e < ns; ++e) {
        for (auto &x : segs[e].exits) {
          if (x.resumes_at < 0)
            continue;
          std::set<int> &need = rep.needed[e][x.node];
          size_t r = static_cast<size_t>(x.resumes_at);
          for (int v : candidates(g, segs[e].nodes[x.node])) {
            if (need.count(v))
              continue;
            bool yes = !opt.is_needed || rep.must_load[r].count(v) > 0;
            for (int x2 : yes ? std::vector<int>{} : exits_live(r, v)) {
              auto it = rep.needed[r].find(x2);
              if (it != rep.needed[r].end() && it->second.count(v)) {
                yes = true;
                break;
              }
            }
            if (yes) {
              need.insert(v);
              changed = true;
            }
          }
        }
      }
    }
    for (size_t e = 0; e < ns; ++e) {
      rep.stores[e].clear();
      for (auto &x : segs[e].exits) {
        if (x.resumes_at < 0)
          continue;
        std::set<int> &st = rep.stores[e][x.node];
        for (int v : rep.needed[e][x.node])
          if (rep.was_changed[e][x.node].count(v))
            st.insert(v);
      }
    }
    // A stored variable is read by the store itself; when no write reaches
    // the exit on every path, the entry point must load it first.
    bool grew = false;
    for (size_t e = 0; e < ns && opt.must_load; ++e)
      for (auto &[x, vars] : rep.stores[e])
        for (int v : vars)
          if (info[e].entry_scope.count(v) && !rep.must_load[e].count(v) && !write_dominates(info[e], v, x)) {
            rep.must_load[e].insert(v);
            grew = true;
          }
    if (!grew)
      break;
  }
  return rep;
}

std::string dump_segments(const CfgGraph &g, const std::vector<Segment> &segs) {
  std::ostringstream os;
  for (auto &s : segs) {
    os << "segment " << s.id << " " << entry_kind_name(s.kind);
    if (s.origin >= 0)
      os << "(n" << s.origin << ")";
    os << "\n";
    for (auto &n : s.nodes) {
      os << "  s" << n.id << " " << node_kind_name(n.kind);
      if (n.orig >= 0)
        os << " n" << n.orig;
      if (n.orig >= 0 && !g.nodes[n.orig].text.empty())
        os << " [" << g.nodes[n.orig].text << "]";
      if (n.landing)
        os << " landing";
      if (n.native_throw)
        os << " native";
      os << " ->";
      for (int m : n.succ)
        os << " s" << m;
      os << "\n";
    }
    for (auto &x : s.exits) {
      os << "  exit s" << x.node << " -> ";
      if (x.resumes_at < 0)
        os << "terminal\n";
      else
        os << "segment " << x.resumes_at << "\n";
    }
  }
  return os.str();
}

} // namespace mini
