#pragma once

#include <cstddef>
#include <map>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "acorn/syntax.hpp"

// Concrete syntax for source files.
//
//   data List A = Nil | Cons [A, List A]
//   data Maybe #1 = Nothing | Just [^0]
//   record Chain = MkChain { cur_time : Nat }
//   type Map = AcornMap Nat Int
//   def twice = \(f : Nat -> Nat) (x : Nat) -> f (f x)
//   test two = twice (addNat 1) 0
//
// Expressions: `\x : T -> e`, `/\A -> e`, `let x : T = e in e`,
// `fix f (x : T) : U = e`, `case e : I T.. return U of | C x.. -> e ..`,
// `if c return T then a else b`, application by juxtaposition, `@T` for a
// type argument, `I.C` for a qualified constructor, literals `5` (Nat) and
// `5z`/`-5z` (Int), `#i` for a raw index. A case nested inside a branch must
// be parenthesised.
// Types: `forall A B. T`, `T -> U`, application, `^i` for a raw index.
// `--` starts a comment.

namespace acorn {

class ParseError : public std::runtime_error {
public:
    ParseError(const std::string& message, std::size_t line, std::size_t column);

    std::size_t line() const { return line_; }
    std::size_t column() const { return column_; }

private:
    std::size_t line_;
    std::size_t column_;
};

struct Module {
    GlobalEnv env;
    // Names introduced by this module itself, in declaration order.
    std::vector<Ident> inductive_names;
    std::vector<Ident> definitions;
    std::vector<std::pair<Ident, Expr>> programs;
    std::map<Ident, Ty, std::less<>> aliases;
};

// A module with the primitives and nothing else.
Module empty_module();

// Parses and elaborates `source` on top of `base` (which is copied). Throws
// ParseError on syntax errors and UnboundName on scoping errors.
Module parse_module(std::string_view source, const Module& base);

// Parses a closed expression or type in the scope of `scope`, returning the
// nameless form.
Expr parse_expr(std::string_view source, const Module& scope);
Ty parse_type(std::string_view source, const Module& scope);

}  // namespace acorn
