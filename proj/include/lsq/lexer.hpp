#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace lsq {

struct SyntaxError : std::runtime_error {
  int line, col;
  SyntaxError(const std::string &msg, int line, int col)
      : std::runtime_error(std::to_string(line) + ":" + std::to_string(col) + ": " + msg),
        line(line), col(col) {}
};

enum class Tok { Ident, Int, Punct, End };

struct Token {
  Tok kind;
  std::string text;
  int64_t value = 0;
  int line = 1, col = 1;
};

// Tokenizer shared by the three surface languages. Punctuators are matched
// longest first; a comment runs from `comment` to the end of the line.
// `ident_start` lists extra characters that may begin an identifier.
std::vector<Token> tokenize(const std::string &src, const std::vector<std::string> &puncts,
                            const std::string &comment, bool neg_literals = true,
                            const std::string &ident_start = "");

class TokenStream {
public:
  explicit TokenStream(std::vector<Token> toks) : toks_(std::move(toks)) {}

  const Token &peek(size_t k = 0) const {
    return toks_[std::min(pos_ + k, toks_.size() - 1)];
  }
  Token next() {
    Token t = peek();
    if (pos_ < toks_.size() - 1)
      ++pos_;
    return t;
  }
  bool is(const std::string &p, size_t k = 0) const {
    const Token &t = peek(k);
    return (t.kind == Tok::Punct || t.kind == Tok::Ident) && t.text == p;
  }
  bool accept(const std::string &p) {
    if (!is(p))
      return false;
    next();
    return true;
  }
  Token expect(const std::string &p) {
    if (!is(p))
      fail("expected '" + p + "'");
    return next();
  }
  std::string ident() {
    if (peek().kind != Tok::Ident)
      fail("expected identifier");
    return next().text;
  }
  bool at_end() const { return peek().kind == Tok::End; }
  [[noreturn]] void fail(const std::string &msg) const {
    const Token &t = peek();
    std::string near = t.kind == Tok::End ? "end of input" : "'" + t.text + "'";
    throw SyntaxError(msg + " near " + near, t.line, t.col);
  }

private:
  std::vector<Token> toks_;
  size_t pos_ = 0;
};

} // namespace lsq
