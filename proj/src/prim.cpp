#include "acorn/prim.hpp"

#include <algorithm>
#include <cassert>

namespace acorn {

PrimVal PrimVal::natural(Integer v)
{
    assert(v >= 0);
    return {PrimKind::Nat, std::move(v)};
}

std::string to_string(const PrimVal& p)
{
    auto s = p.value.str();
    return p.kind == PrimKind::Int ? s + "z" : s;
}

std::string_view prim_type_name(PrimKind kind)
{
    return kind == PrimKind::Int ? "Int" : "Nat";
}

namespace {

using Args = std::span<const PrimVal>;

PrimResult add_int(Args a) { return PrimVal::integer(a[0].value + a[1].value); }
PrimResult sub_int(Args a) { return PrimVal::integer(a[0].value - a[1].value); }
PrimResult mul_int(Args a) { return PrimVal::integer(a[0].value * a[1].value); }
PrimResult max_int(Args a) { return PrimVal::integer(std::max(a[0].value, a[1].value)); }
PrimResult min_int(Args a) { return PrimVal::integer(std::min(a[0].value, a[1].value)); }
PrimResult le_int(Args a) { return a[0].value <= a[1].value; }
PrimResult lt_int(Args a) { return a[0].value < a[1].value; }
PrimResult eq_int(Args a) { return a[0].value == a[1].value; }

PrimResult add_nat(Args a) { return PrimVal::natural(a[0].value + a[1].value); }
PrimResult mul_nat(Args a) { return PrimVal::natural(a[0].value * a[1].value); }
// Truncated subtraction, as on Peano naturals.
PrimResult sub_nat(Args a)
{
    return PrimVal::natural(a[0].value > a[1].value ? Integer(a[0].value - a[1].value) : Integer(0));
}
PrimResult leb_nat(Args a) { return a[0].value <= a[1].value; }
PrimResult ltb_nat(Args a) { return a[0].value < a[1].value; }
PrimResult eqb_nat(Args a) { return a[0].value == a[1].value; }
PrimResult int_of_nat(Args a) { return PrimVal::integer(a[0].value); }

constexpr auto I = PrimKind::Int;
constexpr auto N = PrimKind::Nat;

}  // namespace

const std::vector<Primitive>& primitives()
{
    static const std::vector<Primitive> table = {
        {"plusInt", {I, I}, add_int},
        {"minusInt", {I, I}, sub_int},
        {"timesInt", {I, I}, mul_int},
        {"maxInt", {I, I}, max_int},
        {"minInt", {I, I}, min_int},
        {"leInt", {I, I}, le_int},
        {"ltInt", {I, I}, lt_int},
        {"eqInt", {I, I}, eq_int},
        // Names used by the Counter contract.
        {"plusInt64", {I, I}, add_int},
        {"minusInt64", {I, I}, sub_int},
        {"addNat", {N, N}, add_nat},
        {"subNat", {N, N}, sub_nat},
        {"mulNat", {N, N}, mul_nat},
        {"lebNat", {N, N}, leb_nat},
        {"ltbNat", {N, N}, ltb_nat},
        {"eqbNat", {N, N}, eqb_nat},
        {"intOfNat", {N}, int_of_nat},
    };
    return table;
}

const Primitive* find_primitive(std::string_view name)
{
    const auto& table = primitives();
    auto it = std::find_if(table.begin(), table.end(), [&](const Primitive& p) { return p.name == name; });
    return it == table.end() ? nullptr : &*it;
}

std::optional<PrimResult> apply_primitive(const Primitive& prim, std::span<const PrimVal> args)
{
    if (args.size() != prim.arity())
        return std::nullopt;
    for (std::size_t i = 0; i < args.size(); ++i)
        if (args[i].kind != prim.params[i])
            return std::nullopt;
    return prim.fn(args);
}

}  // namespace acorn
