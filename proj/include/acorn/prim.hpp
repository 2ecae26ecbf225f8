#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

namespace acorn {

using Integer = boost::multiprecision::cpp_int;

enum class PrimKind { Int, Nat };

// A primitive literal: unbounded integer (`5z`) or natural number (`5`).
struct PrimVal {
    PrimKind kind = PrimKind::Int;
    Integer value;

    static PrimVal integer(Integer v) { return {PrimKind::Int, std::move(v)}; }
    // Precondition: v >= 0.
    static PrimVal natural(Integer v);

    friend bool operator==(const PrimVal&, const PrimVal&) = default;
};

std::string to_string(const PrimVal& p);

// Name of the builtin type that classifies a literal ("Int" or "Nat").
std::string_view prim_type_name(PrimKind kind);

// Result of a saturated primitive call: a literal or a boolean that the
// caller turns into a `Bool` constructor of its own representation.
using PrimResult = std::variant<PrimVal, bool>;

struct Primitive {
    std::string name;
    std::vector<PrimKind> params;
    PrimResult (*fn)(std::span<const PrimVal>);

    std::size_t arity() const { return params.size(); }
};

// Builtin constants available to every program, keyed by name.
const std::vector<Primitive>& primitives();
const Primitive* find_primitive(std::string_view name);

// Applies a primitive to exactly `arity()` arguments. Returns nullopt when an
// argument has the wrong kind or the operation is undefined (natural
// subtraction below zero).
std::optional<PrimResult> apply_primitive(const Primitive& prim, std::span<const PrimVal> args);

}  // namespace acorn
