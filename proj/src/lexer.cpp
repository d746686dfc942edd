#include "lsq/lexer.hpp"

#include <algorithm>
#include <cctype>

namespace lsq {

std::vector<Token> tokenize(const std::string &src, const std::vector<std::string> &puncts,
                            const std::string &comment, bool neg_literals,
                            const std::string &ident_start) {
  std::vector<std::string> ps = puncts;
  std::sort(ps.begin(), ps.end(),
            [](const std::string &a, const std::string &b) { return a.size() > b.size(); });
  std::vector<Token> out;
  int line = 1, col = 1;
  size_t i = 0;
  auto advance = [&](size_t n) {
    for (size_t k = 0; k < n && i < src.size(); ++k, ++i) {
      if (src[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
  };
  while (i < src.size()) {
    char c = src[i];
    if (std::isspace(static_cast<unsigned char>(c))) {
      advance(1);
      continue;
    }
    if (!comment.empty() && src.compare(i, comment.size(), comment) == 0) {
      while (i < src.size() && src[i] != '\n')
        advance(1);
      continue;
    }
    Token t;
    t.line = line;
    t.col = col;
    bool neg = neg_literals && c == '-' && i + 1 < src.size() && std::isdigit(static_cast<unsigned char>(src[i + 1]));
    if (std::isdigit(static_cast<unsigned char>(c)) || neg) {
      size_t j = i + (neg ? 1 : 0);
      while (j < src.size() && std::isdigit(static_cast<unsigned char>(src[j])))
        ++j;
      t.kind = Tok::Int;
      t.text = src.substr(i, j - i);
      try {
        t.value = std::stoll(t.text);
      } catch (const std::exception &) {
        throw SyntaxError("integer literal out of range", line, col);
      }
      advance(j - i);
      out.push_back(t);
      continue;
    }
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_' ||
        ident_start.find(c) != std::string::npos) {
      size_t j = i;
      while (j < src.size() &&
             (std::isalnum(static_cast<unsigned char>(src[j])) || src[j] == '_' || src[j] == '\''))
        ++j;
      t.kind = Tok::Ident;
      t.text = src.substr(i, j - i);
      advance(j - i);
      out.push_back(t);
      continue;
    }
    bool matched = false;
    for (auto &p : ps) {
      if (src.compare(i, p.size(), p) == 0) {
        t.kind = Tok::Punct;
        t.text = p;
        advance(p.size());
        out.push_back(t);
        matched = true;
        break;
      }
    }
    if (!matched)
      throw SyntaxError(std::string("unexpected character '") + c + "'", line, col);
  }
  Token end;
  end.kind = Tok::End;
  end.line = line;
  end.col = col;
  out.push_back(end);
  return out;
}

} // namespace lsq
