#pragma once

#include <filesystem>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "acorn/interp.hpp"
#include "acorn/parse.hpp"

// The shipped program corpus and conversions between language values and
// native data.

namespace acorn::programs {

class ConversionError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Concrete-syntax sources compiled into the binary. `name` is a file stem
// such as "stdlib", "crowdfunding" or "counter".
std::optional<std::string_view> embedded_source(std::string_view name);
std::vector<std::string_view> embedded_names();

// The standard library, parsed once.
const Module& prelude();

// An embedded contract or program, elaborated on top of the prelude.
Module load_embedded(std::string_view name);

// Loads a `.acorn` or `.json` module from disk. Everything except the
// standard library itself is elaborated on top of the prelude.
Module load_file(const std::filesystem::path& path);

// Literal values.
Val int_val(const Integer& n);
Val nat_val(const Integer& n);
// Throws ConversionError unless `v` is a literal.
Integer prim_value(const Val& v);

Val to_acorn_list(std::span<const Val> items, const Ty& elem);
std::vector<Val> from_acorn_list(const Val& v);

// Maps keyed by addresses with money values (`Map`). Element 0 is the head.
Val to_acorn_map(std::span<const std::pair<Integer, Integer>> bindings);
std::vector<std::pair<Integer, Integer>> from_acorn_map(const Val& v);

// Sum of the visible bindings: only the first binding of each key counts.
Integer sum_map(const Val& m);

// Crowdfunding state fields.
struct CfState {
    Integer balance;
    Val donations;
    Integer owner;
    Integer deadline;
    bool done = false;
    Integer goal;
};
CfState read_cf_state(const Val& state);

// Until the campaign is done, the recorded donations add up to the balance.
bool consistent_balance(const Val& state);

enum class FoldOp { Plus, Max };
const char* primitive_name(FoldOp op);

struct FoldrConcatOutcome {
    bool holds = false;
    std::optional<Integer> lhs;  // foldr f i (concat l l')
    std::optional<Integer> rhs;  // foldr f (foldr f i l') l
    std::string diagnostic;
};

// Checks foldr f i (concat l l') = foldr f (foldr f i l') l through the
// interpreter on the deep embedding.
FoldrConcatOutcome foldr_concat_check(const Module& m, FoldOp f, const Integer& i, std::span<const Integer> l,
                                      std::span<const Integer> l2, std::size_t fuel = 100000);

// Builds the closed expression `foldr @Int @Int f i xs` over literal lists.
Expr foldr_expr(FoldOp f, const Integer& i, std::span<const Integer> xs);
Expr int_list_expr(std::span<const Integer> xs);

}  // namespace acorn::programs
