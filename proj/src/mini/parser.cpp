#include "lsq/lexer.hpp"
#include "mini/ast.hpp"

#include <set>

namespace mini {

using lsq::SyntaxError;
using lsq::Tok;
using lsq::TokenStream;

namespace {

const std::vector<std::string> kPuncts = {"(", ")", "{", "}", "[", "]", ",", ";", ":", "=",
                                          "==", "!=", "<", "+", "-", "&&", "||", "."};

const std::set<std::string> kKeywords = {"coroutine", "yields", "var",   "while",    "if",
                                         "else",      "throw",  "try",   "catch",    "yieldval",
                                         "true",      "false",  "nil"};

class Parser {
public:
  explicit Parser(const std::string &src) : ts_(lsq::tokenize(src, kPuncts, "//", false)) {}

  Program program() {
    Program p;
    while (!ts_.at_end())
      p.coroutines.push_back(coroutine());
    resolve(p);
    return p;
  }

  std::vector<Value> values() {
    std::vector<Value> out;
    if (ts_.at_end())
      return out;
    do
      out.push_back(literal());
    while (ts_.accept(","));
    if (!ts_.at_end())
      ts_.fail("expected ','");
    return out;
  }

private:
  TokenStream ts_;
  struct CallSite {
    std::string name;
    size_t arity;
    int line, col;
  };
  std::vector<CallSite> calls_;

  std::string name() {
    const lsq::Token &t = ts_.peek();
    if (t.kind == Tok::Ident && kKeywords.count(t.text))
      ts_.fail("keyword used as a name");
    return ts_.ident();
  }

  Type type() {
    std::string t = ts_.ident();
    Type r;
    if (t == "Int")
      r = Type::Int;
    else if (t == "Bool")
      r = Type::Bool;
    else if (t == "Unit")
      r = Type::Unit;
    else if (t == "List")
      r = Type::List;
    else
      ts_.fail("unknown type " + t);
    // Element annotations such as List[Int] are accepted and ignored.
    if (r == Type::List && ts_.accept("[")) {
      int depth = 1;
      while (depth > 0 && !ts_.at_end()) {
        if (ts_.is("["))
          ++depth;
        else if (ts_.is("]"))
          --depth;
        ts_.next();
      }
    }
    return r;
  }

  Coroutine coroutine() {
    Coroutine c;
    ts_.expect("coroutine");
    c.name = name();
    ts_.expect("(");
    if (!ts_.is(")")) {
      do {
        Param p;
        p.name = name();
        ts_.expect(":");
        p.type = type();
        c.params.push_back(p);
      } while (ts_.accept(","));
    }
    ts_.expect(")");
    ts_.expect(":");
    c.ret = type();
    ts_.expect("yields");
    c.yields = type();
    ts_.expect("{");
    while (!ts_.is("}")) {
      if (starts_statement()) {
        c.body.push_back(statement());
        continue;
      }
      ExprP e = expr();
      if (ts_.accept(";")) {
        c.body.push_back(s_expr(e));
        continue;
      }
      if (!ts_.is("}"))
        ts_.fail("expected ';' or '}'");
      c.result = e;
    }
    ts_.expect("}");
    return c;
  }

  bool starts_statement() const {
    if (ts_.is("var") || ts_.is("while") || ts_.is("if") || ts_.is("throw") || ts_.is("try"))
      return true;
    return ts_.peek().kind == Tok::Ident && ts_.is("=", 1);
  }

  Block block() {
    ts_.expect("{");
    Block b;
    while (!ts_.is("}")) {
      if (ts_.at_end())
        ts_.fail("unterminated block");
      b.push_back(statement());
    }
    ts_.expect("}");
    return b;
  }

  StmtP statement() {
    if (ts_.accept("var")) {
      std::string x = name();
      ExprP init;
      if (ts_.accept("="))
        init = expr();
      ts_.expect(";");
      return s_decl(x, init);
    }
    if (ts_.accept("while")) {
      ts_.expect("(");
      ExprP c = expr();
      ts_.expect(")");
      return s_while(c, block());
    }
    if (ts_.accept("if")) {
      ts_.expect("(");
      ExprP c = expr();
      ts_.expect(")");
      Block t = block(), f;
      if (ts_.accept("else")) {
        if (ts_.is("if"))
          f.push_back(statement());
        else
          f = block();
      }
      return s_if(c, t, f);
    }
    if (ts_.accept("throw")) {
      ts_.expect("(");
      ExprP e = expr();
      ts_.expect(")");
      ts_.expect(";");
      return s_throw(e);
    }
    if (ts_.accept("try")) {
      Block b = block();
      ts_.expect("catch");
      bool paren = ts_.accept("(");
      std::string x = name();
      if (paren)
        ts_.expect(")");
      return s_try(b, x, block());
    }
    if (ts_.peek().kind == Tok::Ident && ts_.is("=", 1)) {
      std::string x = name();
      ts_.expect("=");
      ExprP e = expr();
      ts_.expect(";");
      return s_assign(x, e);
    }
    ExprP e = expr();
    ts_.expect(";");
    return s_expr(e);
  }

  ExprP expr() { return binary(1); }

  static int prec(const std::string &op) {
    if (op == "||")
      return 1;
    if (op == "&&")
      return 2;
    if (op == "==" || op == "!=" || op == "<")
      return 3;
    if (op == "+" || op == "-")
      return 4;
    return 0;
  }

  static BinOp binop(const std::string &op) {
    if (op == "||")
      return BinOp::Or;
    if (op == "&&")
      return BinOp::And;
    if (op == "==")
      return BinOp::Eq;
    if (op == "!=")
      return BinOp::Ne;
    if (op == "<")
      return BinOp::Lt;
    if (op == "+")
      return BinOp::Add;
    return BinOp::Sub;
  }

  ExprP binary(int min) {
    ExprP l = postfix();
    for (;;) {
      const lsq::Token &t = ts_.peek();
      int p = t.kind == Tok::Punct ? prec(t.text) : 0;
      if (p < min || p == 0)
        return l;
      std::string op = ts_.next().text;
      ExprP r = binary(p + 1);
      l = e_bin(binop(op), l, r);
    }
  }

  ExprP postfix() {
    ExprP e = primary();
    while (ts_.accept(".")) {
      std::string f = ts_.ident();
      if (f == "head")
        e = e_sel(Field::Head, e);
      else if (f == "tail")
        e = e_sel(Field::Tail, e);
      else if (f == "isNil")
        e = e_sel(Field::IsNil, e);
      else
        ts_.fail("unknown selection ." + f);
    }
    return e;
  }

  ExprP primary() {
    const lsq::Token &t = ts_.peek();
    if (t.kind == Tok::Int)
      return e_int(ts_.next().value);
    if (ts_.accept("-")) {
      if (ts_.peek().kind != Tok::Int)
        ts_.fail("expected an integer after '-'");
      return e_int(-ts_.next().value);
    }
    if (ts_.accept("true"))
      return e_bool(true);
    if (ts_.accept("false"))
      return e_bool(false);
    if (ts_.accept("nil"))
      return e_nil();
    if (ts_.accept("(")) {
      if (ts_.accept(")"))
        return e_unit();
      ExprP e = expr();
      ts_.expect(")");
      return e;
    }
    if (ts_.accept("[")) {
      std::vector<ExprP> items;
      if (!ts_.is("]")) {
        do
          items.push_back(expr());
        while (ts_.accept(","));
      }
      ts_.expect("]");
      return e_list(items);
    }
    if (ts_.accept("yieldval")) {
      ts_.expect("(");
      ExprP e = expr();
      ts_.expect(")");
      return e_yield(e);
    }
    int line = t.line, col = t.col;
    std::string x = name();
    if (ts_.accept("(")) {
      std::vector<ExprP> args;
      if (!ts_.is(")")) {
        do
          args.push_back(expr());
        while (ts_.accept(","));
      }
      ts_.expect(")");
      calls_.push_back({x, args.size(), line, col});
      return e_call(x, args);
    }
    return e_var(x);
  }

  Value literal() {
    if (ts_.peek().kind == Tok::Int)
      return Value::integer(ts_.next().value);
    if (ts_.accept("-")) {
      if (ts_.peek().kind != Tok::Int)
        ts_.fail("expected an integer after '-'");
      return Value::integer(-ts_.next().value);
    }
    if (ts_.accept("true"))
      return Value::boolean(true);
    if (ts_.accept("false"))
      return Value::boolean(false);
    if (ts_.accept("nil"))
      return Value::nil();
    if (ts_.accept("(")) {
      ts_.expect(")");
      return Value::unit();
    }
    ts_.expect("[");
    std::vector<Value> items;
    if (!ts_.is("]")) {
      do
        items.push_back(literal());
      while (ts_.accept(","));
    }
    ts_.expect("]");
    return Value::list(std::move(items));
  }

  void resolve(const Program &p) {
    std::set<std::string> seen;
    for (auto &c : p.coroutines)
      if (!seen.insert(c.name).second)
        throw SyntaxError("coroutine " + c.name + " is defined twice", 1, 1);
    for (auto &call : calls_) {
      int k = p.find(call.name);
      if (k < 0)
        throw SyntaxError("call to undefined coroutine " + call.name, call.line, call.col);
      if (p.coroutines[k].params.size() != call.arity)
        throw SyntaxError("wrong number of arguments for " + call.name, call.line, call.col);
    }
  }
};

} // namespace

Program parse_mini(const std::string &src) { return Parser(src).program(); }

std::vector<Value> parse_values(const std::string &csv) { return Parser(csv).values(); }

} // namespace mini
