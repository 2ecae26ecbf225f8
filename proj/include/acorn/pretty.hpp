#pragma once

#include <string>
#include <vector>

#include "acorn/interp.hpp"
#include "acorn/kernel.hpp"
#include "acorn/syntax.hpp"

namespace acorn {

// Prints closed terms in the concrete syntax accepted by `parse_expr`.
// Binder names come from the hints, renamed where they would clash with an
// enclosing binder, a keyword, or (given `env`) a global name. Free indices are
// printed as `#i` and do not parse.
std::string print(const Ty& t, const GlobalEnv* env = nullptr);
std::string print(const Expr& e, const GlobalEnv* env = nullptr);
std::string print(const Val& v, const GlobalEnv* env = nullptr);

// Coq-flavoured rendering of kernel terms, for reading only.
std::string print(const kernel::Term& t, const kernel::KernelEnv* env = nullptr);
// Constructor types printed with raw indices, as in the declaration packing.
std::string print(const kernel::KernelInductive& d);

}  // namespace acorn
