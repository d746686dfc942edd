#pragma once

#include <cstdint>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

namespace mini {

// Raised for operations applied to values of the wrong shape, such as the
// head of an empty list. Generated programs never trigger it.
struct DynamicError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

enum class Type { Int, Bool, Unit, List };
const char *type_name(Type t);

// Immutable tagged value. Lists share their element vector and keep an
// offset, so `tail` is constant time and long lists are freed without
// recursion.
class Value {
public:
  enum class Kind { Unit, Int, Bool, List };

  Value() = default;
  static Value unit() { return Value(); }
  static Value integer(int64_t v);
  static Value boolean(bool b);
  static Value list(std::vector<Value> items);
  static Value nil() { return list({}); }

  Kind kind() const { return kind_; }
  int64_t as_int() const;
  bool as_bool() const;
  bool is_nil() const;
  Value head() const;
  Value tail() const;
  size_t length() const;

  bool operator==(const Value &o) const;
  bool operator!=(const Value &o) const { return !(*this == o); }
  std::string str() const;

private:
  Kind kind_ = Kind::Unit;
  int64_t int_ = 0;
  std::shared_ptr<const std::vector<Value>> items_;
  size_t offset_ = 0;
  void require(Kind k, const char *what) const;
};

enum class BinOp { Add, Sub, Eq, Ne, Lt, And, Or };
enum class Field { Head, Tail, IsNil };
const char *binop_text(BinOp op);
const char *field_text(Field f);

enum class ExprKind { Int, Bool, Unit, Nil, List, Var, Binary, Select, Call, Yield };

struct Expr;
using ExprP = std::shared_ptr<const Expr>;

struct Expr {
  ExprKind kind;
  int64_t value = 0; // Int literal, Bool literal (0/1)
  std::string name;  // Var, Call
  BinOp op = BinOp::Add;
  Field field = Field::Head;
  std::vector<ExprP> args; // List elements, Binary operands, Select target, Call arguments, Yield payload

  bool atomic() const {
    return kind == ExprKind::Int || kind == ExprKind::Bool || kind == ExprKind::Unit ||
           kind == ExprKind::Nil || kind == ExprKind::Var;
  }
};

ExprP e_int(int64_t v);
ExprP e_bool(bool b);
ExprP e_unit();
ExprP e_nil();
ExprP e_var(std::string name);
ExprP e_list(std::vector<ExprP> items);
ExprP e_bin(BinOp op, ExprP l, ExprP r);
ExprP e_sel(Field f, ExprP target);
ExprP e_call(std::string name, std::vector<ExprP> args);
ExprP e_yield(ExprP v);

enum class StmtKind { Decl, Assign, While, If, Throw, Try, Expr };

struct Stmt;
using StmtP = std::shared_ptr<const Stmt>;
using Block = std::vector<StmtP>;

struct Stmt {
  StmtKind kind;
  std::string name; // Decl/Assign target, Try catch variable
  ExprP expr;       // Decl initializer (may be null), Assign value, condition, Throw payload, Expr
  Block body;       // While body, If then, Try body
  Block alt;        // If else, Try handler
};

StmtP s_decl(std::string name, ExprP init);
StmtP s_assign(std::string name, ExprP value);
StmtP s_while(ExprP cond, Block body);
StmtP s_if(ExprP cond, Block then_branch, Block else_branch);
StmtP s_throw(ExprP payload);
StmtP s_try(Block body, std::string var, Block handler);
StmtP s_expr(ExprP e);

struct Param {
  std::string name;
  Type type;
};

struct Coroutine {
  std::string name;
  std::vector<Param> params;
  Type ret = Type::Unit;
  Type yields = Type::Int;
  Block body;
  ExprP result; // trailing expression; null means ()
};

struct Program {
  std::vector<Coroutine> coroutines;
  // Index of the named coroutine, or -1.
  int find(const std::string &name) const;
};

// Parses a .mini source. Throws lsq::SyntaxError on malformed input or
// an unresolved call target or an arity mismatch.
Program parse_mini(const std::string &src);
// Parses a comma separated list of literal values such as `[1,2],3,true`.
std::vector<Value> parse_values(const std::string &csv);

std::string print_expr(const ExprP &e);
std::string print_block(const Block &b, int indent);
std::string print_coroutine(const Coroutine &c);
std::string print_program(const Program &p);

bool expr_equal(const ExprP &a, const ExprP &b);
bool block_equal(const Block &a, const Block &b);
bool program_equal(const Program &a, const Program &b);

} // namespace mini
