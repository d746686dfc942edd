#include "mini/ast.hpp"

#include <sstream>

namespace mini {

const char *type_name(Type t) {
  switch (t) {
  case Type::Int: return "Int";
  case Type::Bool: return "Bool";
  case Type::Unit: return "Unit";
  case Type::List: return "List";
  }
  return "?";
}

Value Value::integer(int64_t v) {
  Value r;
  r.kind_ = Kind::Int;
  r.int_ = v;
  return r;
}

Value Value::boolean(bool b) {
  Value r;
  r.kind_ = Kind::Bool;
  r.int_ = b ? 1 : 0;
  return r;
}

Value Value::list(std::vector<Value> items) {
  Value r;
  r.kind_ = Kind::List;
  r.items_ = std::make_shared<const std::vector<Value>>(std::move(items));
  return r;
}

void Value::require(Kind k, const char *what) const {
  if (kind_ != k)
    throw DynamicError(std::string(what) + " applied to " + str());
}

int64_t Value::as_int() const {
  require(Kind::Int, "integer operation");
  return int_;
}

bool Value::as_bool() const {
  require(Kind::Bool, "boolean operation");
  return int_ != 0;
}

bool Value::is_nil() const {
  require(Kind::List, "isNil");
  return offset_ >= items_->size();
}

Value Value::head() const {
  if (is_nil())
    throw DynamicError("head of an empty list");
  return (*items_)[offset_];
}

Value Value::tail() const {
  if (is_nil())
    throw DynamicError("tail of an empty list");
  Value r = *this;
  ++r.offset_;
  return r;
}

size_t Value::length() const {
  require(Kind::List, "length");
  return items_->size() - offset_;
}

bool Value::operator==(const Value &o) const {
  if (kind_ != o.kind_)
    return false;
  if (kind_ != Kind::List)
    return int_ == o.int_;
  size_t n = length();
  if (n != o.length())
    return false;
  if (items_ == o.items_ && offset_ == o.offset_)
    return true;
  for (size_t k = 0; k < n; ++k)
    if ((*items_)[offset_ + k] != (*o.items_)[o.offset_ + k])
      return false;
  return true;
}

std::string Value::str() const {
  switch (kind_) {
  case Kind::Unit: return "()";
  case Kind::Int: return std::to_string(int_);
  case Kind::Bool: return int_ ? "true" : "false";
  case Kind::List: {
    std::string s = "[";
    for (size_t k = offset_; k < items_->size(); ++k) {
      if (k > offset_)
        s += ",";
      s += (*items_)[k].str();
    }
    return s + "]";
  }
  }
  return "?";
}

const char *binop_text(BinOp op) {
  switch (op) {
  case BinOp::Add: return "+";
  case BinOp::Sub: return "-";
  case BinOp::Eq: return "==";
  case BinOp::Ne: return "!=";
  case BinOp::Lt: return "<";
  case BinOp::And: return "&&";
  case BinOp::Or: return "||";
  }
  return "?";
}

const char *field_text(Field f) {
  switch (f) {
  case Field::Head: return "head";
  case Field::Tail: return "tail";
  case Field::IsNil: return "isNil";
  }
  return "?";
}

namespace {
ExprP make(Expr e) { return std::make_shared<const Expr>(std::move(e)); }
StmtP make(Stmt s) { return std::make_shared<const Stmt>(std::move(s)); }
} // namespace

ExprP e_int(int64_t v) { return make(Expr{ExprKind::Int, v, {}, {}, {}, {}}); }
ExprP e_bool(bool b) { return make(Expr{ExprKind::Bool, b ? 1 : 0, {}, {}, {}, {}}); }
ExprP e_unit() { return make(Expr{ExprKind::Unit, 0, {}, {}, {}, {}}); }
ExprP e_nil() { return make(Expr{ExprKind::Nil, 0, {}, {}, {}, {}}); }
ExprP e_var(std::string name) { return make(Expr{ExprKind::Var, 0, std::move(name), {}, {}, {}}); }
ExprP e_list(std::vector<ExprP> items) {
  return make(Expr{ExprKind::List, 0, {}, {}, {}, std::move(items)});
}
ExprP e_bin(BinOp op, ExprP l, ExprP r) {
  return make(Expr{ExprKind::Binary, 0, {}, op, {}, {std::move(l), std::move(r)}});
}
ExprP e_sel(Field f, ExprP target) {
  return make(Expr{ExprKind::Select, 0, {}, {}, f, {std::move(target)}});
}
ExprP e_call(std::string name, std::vector<ExprP> args) {
  return make(Expr{ExprKind::Call, 0, std::move(name), {}, {}, std::move(args)});
}
ExprP e_yield(ExprP v) { return make(Expr{ExprKind::Yield, 0, {}, {}, {}, {std::move(v)}}); }

StmtP s_decl(std::string name, ExprP init) {
  return make(Stmt{StmtKind::Decl, std::move(name), std::move(init), {}, {}});
}
StmtP s_assign(std::string name, ExprP value) {
  return make(Stmt{StmtKind::Assign, std::move(name), std::move(value), {}, {}});
}
StmtP s_while(ExprP cond, Block body) {
  return make(Stmt{StmtKind::While, {}, std::move(cond), std::move(body), {}});
}
StmtP s_if(ExprP cond, Block then_branch, Block else_branch) {
  return make(Stmt{StmtKind::If, {}, std::move(cond), std::move(then_branch), std::move(else_branch)});
}
StmtP s_throw(ExprP payload) { return make(Stmt{StmtKind::Throw, {}, std::move(payload), {}, {}}); }
StmtP s_try(Block body, std::string var, Block handler) {
  return make(Stmt{StmtKind::Try, std::move(var), nullptr, std::move(body), std::move(handler)});
}
StmtP s_expr(ExprP e) { return make(Stmt{StmtKind::Expr, {}, std::move(e), {}, {}}); }

int Program::find(const std::string &name) const {
  for (size_t i = 0; i < coroutines.size(); ++i)
    if (coroutines[i].name == name)
      return static_cast<int>(i);
  return -1;
}

namespace {

int precedence(BinOp op) {
  switch (op) {
  case BinOp::Or: return 1;
  case BinOp::And: return 2;
  case BinOp::Eq:
  case BinOp::Ne:
  case BinOp::Lt: return 3;
  case BinOp::Add:
  case BinOp::Sub: return 4;
  }
  return 0;
}

std::string print_at(const ExprP &e, int ctx) {
  switch (e->kind) {
  case ExprKind::Int: return std::to_string(e->value);
  case ExprKind::Bool: return e->value ? "true" : "false";
  case ExprKind::Unit: return "()";
  case ExprKind::Nil: return "nil";
  case ExprKind::Var: return e->name;
  case ExprKind::List: {
    std::string s = "[";
    for (size_t i = 0; i < e->args.size(); ++i)
      s += (i ? ", " : "") + print_at(e->args[i], 0);
    return s + "]";
  }
  case ExprKind::Binary: {
    int p = precedence(e->op);
    // Operators are left associative: the right operand binds one level tighter.
    std::string s = print_at(e->args[0], p) + " " + binop_text(e->op) + " " + print_at(e->args[1], p + 1);
    return p < ctx ? "(" + s + ")" : s;
  }
  case ExprKind::Select: return print_at(e->args[0], 5) + "." + field_text(e->field);
  case ExprKind::Call: {
    std::string s = e->name + "(";
    for (size_t i = 0; i < e->args.size(); ++i)
      s += (i ? ", " : "") + print_at(e->args[i], 0);
    return s + ")";
  }
  case ExprKind::Yield: return "yieldval(" + print_at(e->args[0], 0) + ")";
  }
  return "?";
}

void print_stmt(std::ostringstream &os, const StmtP &s, int indent) {
  std::string pad(indent, ' ');
  switch (s->kind) {
  case StmtKind::Decl:
    os << pad << "var " << s->name;
    if (s->expr)
      os << " = " << print_expr(s->expr);
    os << ";\n";
    return;
  case StmtKind::Assign: os << pad << s->name << " = " << print_expr(s->expr) << ";\n"; return;
  case StmtKind::While:
    os << pad << "while (" << print_expr(s->expr) << ") {\n"
       << print_block(s->body, indent + 2) << pad << "}\n";
    return;
  case StmtKind::If:
    os << pad << "if (" << print_expr(s->expr) << ") {\n" << print_block(s->body, indent + 2) << pad << "}";
    if (!s->alt.empty())
      os << " else {\n" << print_block(s->alt, indent + 2) << pad << "}";
    os << "\n";
    return;
  case StmtKind::Throw: os << pad << "throw(" << print_expr(s->expr) << ");\n"; return;
  case StmtKind::Try:
    os << pad << "try {\n" << print_block(s->body, indent + 2) << pad << "} catch " << s->name << " {\n"
       << print_block(s->alt, indent + 2) << pad << "}\n";
    return;
  case StmtKind::Expr: os << pad << print_expr(s->expr) << ";\n"; return;
  }
}

} // namespace

std::string print_expr(const ExprP &e) { return print_at(e, 0); }

std::string print_block(const Block &b, int indent) {
  std::ostringstream os;
  for (auto &s : b)
    print_stmt(os, s, indent);
  return os.str();
}

std::string print_coroutine(const Coroutine &c) {
  std::ostringstream os;
  os << "coroutine " << c.name << "(";
  for (size_t i = 0; i < c.params.size(); ++i)
    os << (i ? ", " : "") << c.params[i].name << ": " << type_name(c.params[i].type);
  os << "): " << type_name(c.ret) << " yields " << type_name(c.yields) << " {\n";
  os << print_block(c.body, 2);
  os << "  " << (c.result ? print_expr(c.result) : "()") << "\n}\n";
  return os.str();
}

std::string print_program(const Program &p) {
  std::string s;
  for (size_t i = 0; i < p.coroutines.size(); ++i)
    s += (i ? "\n" : "") + print_coroutine(p.coroutines[i]);
  return s;
}

bool expr_equal(const ExprP &a, const ExprP &b) {
  if (!a || !b)
    return !a && !b;
  if (a->kind != b->kind || a->value != b->value || a->name != b->name || a->args.size() != b->args.size())
    return false;
  if (a->kind == ExprKind::Binary && a->op != b->op)
    return false;
  if (a->kind == ExprKind::Select && a->field != b->field)
    return false;
  for (size_t i = 0; i < a->args.size(); ++i)
    if (!expr_equal(a->args[i], b->args[i]))
      return false;
  return true;
}

bool block_equal(const Block &a, const Block &b) {
  if (a.size() != b.size())
    return false;
  for (size_t i = 0; i < a.size(); ++i) {
    const Stmt &x = *a[i], &y = *b[i];
    if (x.kind != y.kind || x.name != y.name || !expr_equal(x.expr, y.expr) || !block_equal(x.body, y.body) ||
        !block_equal(x.alt, y.alt))
      return false;
  }
  return true;
}

bool program_equal(const Program &a, const Program &b) {
  if (a.coroutines.size() != b.coroutines.size())
    return false;
  for (size_t i = 0; i < a.coroutines.size(); ++i) {
    const Coroutine &x = a.coroutines[i], &y = b.coroutines[i];
    if (x.name != y.name || x.params.size() != y.params.size() || x.ret != y.ret || x.yields != y.yields)
      return false;
    for (size_t k = 0; k < x.params.size(); ++k)
      if (x.params[k].name != y.params[k].name || x.params[k].type != y.params[k].type)
        return false;
    ExprP rx = x.result ? x.result : e_unit(), ry = y.result ? y.result : e_unit();
    if (!block_equal(x.body, y.body) || !expr_equal(rx, ry))
      return false;
  }
  return true;
}

} // namespace mini
