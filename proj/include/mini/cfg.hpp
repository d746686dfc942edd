#pragma once

#include "mini/ast.hpp"

#include <map>
#include <set>
#include <string>
#include <vector>

namespace mini {

// Operands after normalization: a constant or a resolved variable.
struct Atom {
  int var = -1; // variable id, or -1 for a constant
  Value constant;
  bool is_var() const { return var >= 0; }
};

enum class RhsKind { Atom, Binary, Select, List, Call, Yield, Default };

// Right-hand side of a canonical declaration or assignment.
struct Rhs {
  RhsKind kind = RhsKind::Default;
  BinOp op = BinOp::Add;
  Field field = Field::Head;
  int callee = -1; // coroutine index for Call
  std::vector<Atom> args;
};

enum class NodeKind { Plain, Y, C, T, R, Ws, We, Is, Ie, Bs, Be, Es, Ee };
const char *node_kind_name(NodeKind k);
bool is_control(NodeKind k); // every kind except Plain and R

struct CfgNode {
  int id = -1;
  NodeKind kind = NodeKind::Plain;
  // Plain, Y and C: the written variable (or -1) and the computed value.
  // A Plain node with `catch_bind` binds the caught exception to `target`.
  int target = -1;
  bool declares = false;
  bool catch_bind = false;
  Rhs rhs;
  Atom cond; // Ws and Is condition, T payload, R result
  std::vector<int> succ;
  // Structure: matching start/end node, the enclosing start node (Ws, Is or
  // Es) with the region inside it (0 = loop body, then branch or try body;
  // 1 = else branch or handler), the first node of the nested regions, and
  // the node that follows in the enclosing sequence.
  int partner = -1;
  int parent = -1;
  int region = 0;
  int body_first = -1;
  int alt_first = -1;
  int next = -1;
  // Variables visible at the node, including the one it declares.
  std::set<int> scope;
  std::string text;

  std::vector<int> reads() const;
  int writes() const; // -1 when the node writes nothing before leaving
};

struct CfgGraph {
  std::string coroutine;
  int arity = 0;
  std::vector<std::string> vars; // variable id -> source name
  std::vector<CfgNode> nodes;
  int entry = -1;
  int ret = -1;
};

// Builds the graph of a normalized coroutine. `p` resolves call targets.
// Throws std::invalid_argument when the body is not in restricted form.
CfgGraph build_cfg(const Program &p, int coroutine);

std::map<NodeKind, int> control_census(const CfgGraph &g);
std::string dump_cfg(const CfgGraph &g);

enum class EntryKind { MethodEntry, AfterYield, AfterCall };
const char *entry_kind_name(EntryKind k);

struct SegNode {
  int id = -1;
  int orig = -1; // node of the original graph, -1 for a synthetic Bs
  NodeKind kind = NodeKind::Plain;
  bool exit = false;    // Y, C or T leaving the entry point
  bool landing = false; // the Y or C node the entry point resumes after
  bool native_throw = false;
  std::vector<int> succ;
  std::set<int> scope;
};

// Structured view of a segment: nested statements over segment nodes.
struct Shape {
  enum class Kind { Node, Block, While, If, Try } kind = Kind::Node;
  int node = -1; // the node itself, or the Bs, Ws, Is or Es opening the construct
  std::vector<Shape> body, alt;
};

struct SegExit {
  int node = -1;       // segment node
  int resumes_at = -1; // segment id, or -1 for a terminal exit
};

struct Segment {
  int id = 0; // also the program counter of its entry point
  EntryKind kind = EntryKind::MethodEntry;
  int origin = -1; // original Y or C node for the After kinds
  std::vector<SegNode> nodes;
  int begin = 0;
  std::vector<SegExit> exits;
  std::vector<Shape> shape;
  int landing = -1;
  bool in_try = false; // resumes inside a protected region
};

// Cuts the graph at yield and call sites. Segment 0 starts at the method
// entry; every newly reached Y or C node spawns one segment in discovery
// order. A structure end whose start lies outside the segment becomes a Be,
// and the enclosing loop is entered afresh after it.
std::vector<Segment> split_segments(const CfgGraph &g);

// Dominance within one segment, from its begin node. In the matrix, m[n][d]
// holds when d dominates n; unreachable nodes are dominated by every node.
bool dominates(const Segment &s, int d, int n);
std::vector<std::vector<bool>> dominator_matrix(const Segment &s);

struct AnalysisOptions {
  bool must_load = true;
  bool was_changed = true;
  bool is_needed = true;
  static AnalysisOptions none() { return {false, false, false}; }
};

struct LivenessReport {
  std::vector<std::set<int>> must_load;                // per segment
  std::vector<std::map<int, std::set<int>>> stores;   // per segment: exit node -> variables
  std::vector<std::map<int, std::set<int>>> was_changed; // per segment: exit node -> variables
  std::vector<std::map<int, std::set<int>>> needed;      // per segment: exit node -> variables
};

LivenessReport analyze(const CfgGraph &g, const std::vector<Segment> &segs, const AnalysisOptions &opt = {});

// Entry point code: the segment's structure over instance-slot primitives.
enum class OpKind {
  Exec,       // target = rhs (plain statement)
  Load,       // local var <- frame slot
  Landing,    // target <- () after a yield
  TakeResult, // target <- callee result, after rethrowing a pending exception
  While,
  If,
  Block,
  Try,        // body, catch into var, handler
  Unwind,     // body; an escaping exception is written to the instance and the frame popped
  Throw,      // native throw inside the entry point
  YieldExit,  // store; value <- a; pc <- next; return
  CallExit,   // store; pc <- next; push callee with args; call flag; return
  ThrowExit,  // exception <- a; pop; return
  ReturnExit  // result <- a; pop; return
};

struct Op {
  OpKind kind = OpKind::Exec;
  int var = -1;
  Rhs rhs;
  Atom a;
  std::vector<int> stores;
  int pc = -1;
  std::vector<Op> body, alt;
};

struct EntryPoint {
  int pc = 0;
  EntryKind kind = EntryKind::MethodEntry;
  std::vector<int> loads;
  std::vector<Op> code;
  bool unwind_handler = false;
  bool user_handler_replica = false;
};

struct CompiledCoroutine {
  std::string name;
  int arity = 0;
  int slot_count = 0;
  std::vector<std::string> var_names;
  std::vector<EntryPoint> dispatcher; // indexed by pc
};

CompiledCoroutine generate_entry_points(const CfgGraph &g, const std::vector<Segment> &segs,
                                        const LivenessReport &report);

struct CompiledProgram {
  std::vector<CompiledCoroutine> coroutines;
  int find(const std::string &name) const;
};

// Normalizes (when needed) and compiles every coroutine.
CompiledProgram compile(const Program &p, const AnalysisOptions &opt = {});

std::string dump_segments(const CfgGraph &g, const std::vector<Segment> &segs);
std::string dump_entries(const CompiledCoroutine &c, const CompiledProgram *prog = nullptr);

} // namespace mini
