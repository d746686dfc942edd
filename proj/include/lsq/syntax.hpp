#pragma once

#include "lsq/ast.hpp"
#include "lsq/lexer.hpp"

#include <string>

namespace lsq {

// Parses a closed user program. Unbound variables and runtime-only forms are
// syntax errors. `;` and `let` are desugared into immediately applied
// abstractions; inside a yielding coroutine body the abstraction is a
// coroutine with the enclosing yield type so the continuation may yield.
TermP parse_term(const std::string &src);

// Parses a standalone type.
TypeP parse_type(const std::string &src);

std::string print_type(const TypeP &t);
std::string print_term(const TermP &t);

} // namespace lsq
